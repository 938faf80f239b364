/**
 * Parity fixture emission.
 *
 * Tokenizer fixtures: for a list of strings, reference token ids from the
 * converter's own BPE implementation. Hidden-state fixtures: for short
 * token sequences, final hidden states from the float64 reference forward
 * pass, stored as row-major little-endian float32 blobs plus a meta.json.
 * Output formatting is canonical so reruns are byte-identical.
 */

import { mkdirSync, readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { BpeVocab } from './bpe.js';
import { canonicalDocument, JsonValue } from './canonical-json.js';
import { forward, toWeights, Weights } from './gpt2.js';
import { NamedTensor } from './tsar.js';

export interface ForwardCaseSpec {
  name: string;
  text: string;
}

export function emitTokenizerFixtures(strings: string[], vocab: BpeVocab, outPath: string): number {
  const cases: JsonValue = strings.map((text) => {
    const ids = vocab.encode(text);
    if (vocab.decode(ids) !== text) throw new Error(`round-trip failed for ${JSON.stringify(text)}`);
    return { text, ids };
  });
  writeFileSync(outPath, canonicalDocument(cases), 'utf-8');
  return strings.length;
}

export function emitForwardFixtures(
  cases: ForwardCaseSpec[],
  vocab: BpeVocab,
  tensors: NamedTensor[],
  weightsMeta: JsonValue,
  outDir: string,
): void {
  mkdirSync(outDir, { recursive: true });
  const weights: Weights = toWeights(tensors);
  const metaCases: JsonValue[] = [];
  for (const spec of cases) {
    const ids = vocab.encode(spec.text);
    if (ids.length < 1 || ids.length > 32) {
      throw new Error(`case ${spec.name}: ${ids.length} tokens outside [1, 32]`);
    }
    const hidden = forward(ids, weights);
    const buf = Buffer.from(hidden.buffer, hidden.byteOffset, hidden.byteLength);
    const probe = new Uint8Array(new Float32Array([1]).buffer);
    if (probe[3] !== 0x3f) buf.swap32();
    writeFileSync(join(outDir, `${spec.name}.hidden.bin`), buf);
    metaCases.push({ name: spec.name, text: spec.text, ids, rows: ids.length, dim: 768 });
    console.error(`case ${spec.name}: ${ids.length} tokens`);
  }
  const meta: JsonValue = { weights: weightsMeta, cases: metaCases };
  writeFileSync(join(outDir, 'meta.json'), canonicalDocument(meta), 'utf-8');
}

/** Pull the canonical string list out of an existing tokenizer fixture file. */
export function fixtureStrings(path: string): string[] {
  const cases = JSON.parse(readFileSync(path, 'utf-8')) as Array<{ text: string }>;
  return cases.map((c) => c.text);
}

/** Pull forward-case specs out of an existing meta.json. */
export function forwardCaseSpecs(path: string): { seed: number; cases: ForwardCaseSpec[] } {
  const meta = JSON.parse(readFileSync(path, 'utf-8')) as {
    weights: { seed: number };
    cases: Array<{ name: string; text: string }>;
  };
  return { seed: meta.weights.seed, cases: meta.cases.map((c) => ({ name: c.name, text: c.text })) };
}
