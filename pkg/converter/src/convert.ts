/**
 * Checkpoint directory -> TSAR conversion.
 *
 * Reads model.safetensors (float32, upstream tensor names with or without
 * a "transformer." prefix), validates every shape against the fixed
 * 12-block / 768-wide architecture, writes the archive in canonical order
 * and copies vocab.json/merges.txt alongside. Output is deterministic:
 * re-running produces identical bytes.
 */

import { copyFileSync, existsSync, mkdirSync } from 'node:fs';
import { basename, dirname, join } from 'node:path';

import { readHeader, readTensor, SafetensorsIndex } from './safetensors.js';
import { tensorSchema } from './schema.js';
import { NamedTensor, writeTsar } from './tsar.js';

export class ConvertError extends Error {}

function resolveSource(index: SafetensorsIndex, source: string): string {
  for (const candidate of [source, `transformer.${source}`]) {
    if (index.tensors.has(candidate)) return candidate;
  }
  throw new ConvertError(`checkpoint is missing tensor ${source}`);
}

export function convertCheckpoint(checkpointDir: string, outPath: string): void {
  const modelPath = join(checkpointDir, 'model.safetensors');
  if (!existsSync(modelPath)) {
    throw new ConvertError(`no model.safetensors in ${checkpointDir}`);
  }
  const index = readHeader(modelPath);
  const tensors: NamedTensor[] = [];
  for (const spec of tensorSchema()) {
    const sourceName = resolveSource(index, spec.source);
    const { shape, data } = readTensor(index, sourceName);
    if (shape.length !== spec.shape.length || shape.some((d, i) => d !== spec.shape[i])) {
      throw new ConvertError(
        `tensor ${spec.source}: shape [${shape}] does not match expected [${spec.shape}]`,
      );
    }
    for (const v of data) {
      if (!Number.isFinite(v)) throw new ConvertError(`tensor ${spec.source} contains non-finite values`);
    }
    tensors.push({ name: spec.name, shape: spec.shape, data });
  }
  mkdirSync(dirname(outPath) || '.', { recursive: true });
  writeTsar(outPath, tensors);
  for (const f of ['vocab.json', 'merges.txt']) {
    const src = join(checkpointDir, f);
    if (existsSync(src)) {
      copyFileSync(src, join(dirname(outPath), f));
    }
  }
  console.error(`wrote ${tensors.length} tensors from ${basename(checkpointDir)} to ${outPath}`);
}
