/**
 * Converter CLI.
 *
 * Usage:
 *   node dist/cli.js convert --checkpoint <dir> --out <file.tsar>
 *   node dist/cli.js fixtures --weights <file.tsar> --vocab-dir <dir> --out <dir>
 *       [--strings <tokenizer_fixtures.json>] [--cases <meta.json>] [--seed N]
 *   node dist/cli.js synth-checkpoint --seed N --out <dir> [--vocab-dir <dir>]
 *
 * `convert` turns an upstream float32 checkpoint (model.safetensors +
 * vocab.json + merges.txt) into the TSAR archive the classifier loads,
 * copying the tokenizer files alongside. `fixtures` re-emits the parity
 * fixtures; with --strings/--cases pointing at committed fixture files it
 * reproduces them byte for byte. `synth-checkpoint` writes the
 * deterministic test checkpoint used when no real weights are available.
 */

import { mkdirSync } from 'node:fs';
import { join } from 'node:path';

import { BpeVocab } from './bpe.js';
import { convertCheckpoint, ConvertError } from './convert.js';
import { emitForwardFixtures, emitTokenizerFixtures, fixtureStrings, forwardCaseSpecs } from './fixtures.js';
import { syntheticTensors, writeSyntheticCheckpoint } from './synth.js';
import { readTsar } from './tsar.js';

interface Args {
  [key: string]: string;
}

function parseArgs(argv: string[]): { command: string; args: Args } {
  const command = argv[0];
  const args: Args = {};
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith('--')) throw new UsageError(`unexpected argument ${arg}`);
    const key = arg.slice(2);
    const value = argv[++i];
    if (value === undefined) throw new UsageError(`missing value for --${key}`);
    args[key] = value;
  }
  return { command, args };
}

class UsageError extends Error {}

function required(args: Args, key: string): string {
  const v = args[key];
  if (!v) throw new UsageError(`--${key} is required`);
  return v;
}

function cmdConvert(args: Args): void {
  convertCheckpoint(required(args, 'checkpoint'), required(args, 'out'));
}

function cmdFixtures(args: Args): void {
  const vocabDir = required(args, 'vocab-dir');
  const outDir = required(args, 'out');
  mkdirSync(outDir, { recursive: true });
  const vocab = BpeVocab.load(join(vocabDir, 'vocab.json'), join(vocabDir, 'merges.txt'));

  const stringsPath = args['strings'];
  if (stringsPath) {
    const n = emitTokenizerFixtures(fixtureStrings(stringsPath), vocab, join(outDir, 'tokenizer_fixtures.json'));
    console.error(`tokenizer fixtures: ${n} cases`);
  }

  const casesPath = args['cases'];
  if (casesPath) {
    const { seed, cases } = forwardCaseSpecs(casesPath);
    const tensors = args['weights']
      ? readTsar(args['weights'])
      : syntheticTensors(args['seed'] ? Number(args['seed']) : seed);
    const usedSeed = args['seed'] ? Number(args['seed']) : seed;
    emitForwardFixtures(
      cases,
      vocab,
      tensors,
      { generator: 'splitmix64-uniform-f32', seed: usedSeed },
      join(outDir, 'forward'),
    );
    console.error(`forward fixtures: ${cases.length} cases`);
  }
  if (!stringsPath && !casesPath) {
    throw new UsageError('nothing to emit: pass --strings and/or --cases');
  }
}

function cmdSynthCheckpoint(args: Args): void {
  const seed = Number(required(args, 'seed'));
  writeSyntheticCheckpoint(required(args, 'out'), seed, args['vocab-dir']);
  console.error(`synthetic checkpoint (seed ${seed}) written to ${args['out']}`);
}

export function main(argv: string[]): number {
  try {
    const { command, args } = parseArgs(argv);
    switch (command) {
      case 'convert':
        cmdConvert(args);
        return 0;
      case 'fixtures':
        cmdFixtures(args);
        return 0;
      case 'synth-checkpoint':
        cmdSynthCheckpoint(args);
        return 0;
      default:
        throw new UsageError(`unknown command ${command ?? '(none)'}`);
    }
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 2;
    }
    if (err instanceof ConvertError) {
      console.error(`convert error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exitCode = main(process.argv.slice(2));
