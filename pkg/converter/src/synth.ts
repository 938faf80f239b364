/**
 * Deterministic synthetic checkpoint generation.
 *
 * Values are identical bit for bit to the classifier's own procedural
 * generator: one SplitMix64 counter stream per seed, consumed in
 * tensorSchema() order, dyadic float32 uniforms per tensor kind.
 */

import { mkdirSync, copyFileSync, existsSync } from 'node:fs';
import { join } from 'node:path';

import { fillUniformF32 } from './rng.js';
import { tensorSchema, syntheticScale, TensorSpec } from './schema.js';
import { PendingTensor, writeSafetensors } from './safetensors.js';
import { NamedTensor } from './tsar.js';

export function syntheticTensor(spec: TensorSpec, seed: number, offset: number): Float32Array {
  const n = spec.shape.reduce((a, b) => a * b, 1);
  const { scale, shift } = syntheticScale(spec.name);
  const data = new Float32Array(n);
  fillUniformF32(data, seed, offset, scale, shift);
  return data;
}

export function syntheticTensors(seed: number): NamedTensor[] {
  const out: NamedTensor[] = [];
  let offset = 0;
  for (const spec of tensorSchema()) {
    out.push({ name: spec.name, shape: spec.shape, data: syntheticTensor(spec, seed, offset) });
    offset += spec.shape.reduce((a, b) => a * b, 1);
  }
  return out;
}

/**
 * Write a checkpoint directory in the upstream layout (model.safetensors
 * under source names, plus vocab/merges copied from a donor directory).
 */
export function writeSyntheticCheckpoint(outDir: string, seed: number, vocabDir?: string): void {
  mkdirSync(outDir, { recursive: true });
  let offset = 0;
  const pending: PendingTensor[] = tensorSchema().map((spec) => {
    const myOffset = offset;
    offset += spec.shape.reduce((a, b) => a * b, 1);
    return {
      name: spec.source,
      shape: spec.shape,
      fill: () => syntheticTensor(spec, seed, myOffset),
    };
  });
  writeSafetensors(join(outDir, 'model.safetensors'), pending);
  if (vocabDir) {
    for (const f of ['vocab.json', 'merges.txt']) {
      const src = join(vocabDir, f);
      if (existsSync(src)) copyFileSync(src, join(outDir, f));
    }
  }
}
