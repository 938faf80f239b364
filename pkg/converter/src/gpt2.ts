/**
 * Reference forward pass for the 12-block / 768-wide transformer,
 * computed in float64 and emitted as float32 rows. Used only to produce
 * parity fixtures; plain loops, no attempt at speed.
 */

import { NamedTensor } from './tsar.js';
import { N_EMBD, N_LAYER } from './schema.js';

const N_HEAD = 12;
const HEAD_DIM = N_EMBD / N_HEAD;
const LN_EPS = 1e-5;

export type Weights = Map<string, { shape: number[]; data: Float64Array }>;

export function toWeights(tensors: NamedTensor[]): Weights {
  const w: Weights = new Map();
  for (const t of tensors) w.set(t.name, { shape: t.shape, data: Float64Array.from(t.data) });
  return w;
}

function layerNorm(x: Float64Array, rows: number, g: Float64Array, b: Float64Array): void {
  for (let r = 0; r < rows; r++) {
    const off = r * N_EMBD;
    let mu = 0;
    for (let i = 0; i < N_EMBD; i++) mu += x[off + i];
    mu /= N_EMBD;
    let varSum = 0;
    for (let i = 0; i < N_EMBD; i++) {
      const d = x[off + i] - mu;
      varSum += d * d;
    }
    const inv = 1 / Math.sqrt(varSum / N_EMBD + LN_EPS);
    for (let i = 0; i < N_EMBD; i++) {
      x[off + i] = g[i] * ((x[off + i] - mu) * inv) + b[i];
    }
  }
}

/** y[rows, nOut] = x[rows, nIn] @ w[nIn, nOut] + b */
function matmulBias(
  x: Float64Array,
  rows: number,
  nIn: number,
  w: Float64Array,
  nOut: number,
  b: Float64Array,
): Float64Array {
  const y = new Float64Array(rows * nOut);
  for (let r = 0; r < rows; r++) {
    const xOff = r * nIn;
    const yOff = r * nOut;
    for (let o = 0; o < nOut; o++) y[yOff + o] = b[o];
    for (let i = 0; i < nIn; i++) {
      const xv = x[xOff + i];
      if (xv === 0) continue;
      const wOff = i * nOut;
      for (let o = 0; o < nOut; o++) y[yOff + o] += xv * w[wOff + o];
    }
  }
  return y;
}

function gelu(x: Float64Array): void {
  const c = Math.sqrt(2 / Math.PI);
  for (let i = 0; i < x.length; i++) {
    const v = x[i];
    x[i] = 0.5 * v * (1 + Math.tanh(c * (v + 0.044715 * v * v * v)));
  }
}

export function forward(ids: number[], w: Weights): Float32Array {
  const t = ids.length;
  if (t < 1 || t > 1024) throw new Error(`sequence length ${t} outside [1, 1024]`);
  const wte = w.get('wte')!.data;
  const wpe = w.get('wpe')!.data;
  let x = new Float64Array(t * N_EMBD);
  for (let r = 0; r < t; r++) {
    const tokOff = ids[r] * N_EMBD;
    const posOff = r * N_EMBD;
    for (let i = 0; i < N_EMBD; i++) x[r * N_EMBD + i] = wte[tokOff + i] + wpe[posOff + i];
  }
  for (let layer = 0; layer < N_LAYER; layer++) {
    const p = `h${layer}.`;
    const h = Float64Array.from(x);
    layerNorm(h, t, w.get(p + 'ln_1.g')!.data, w.get(p + 'ln_1.b')!.data);
    const qkv = matmulBias(h, t, N_EMBD, w.get(p + 'attn.qkv.w')!.data, 3 * N_EMBD, w.get(p + 'attn.qkv.b')!.data);
    const attnOut = new Float64Array(t * N_EMBD);
    const scores = new Float64Array(t);
    for (let head = 0; head < N_HEAD; head++) {
      const qOff = head * HEAD_DIM;
      const kOff = N_EMBD + head * HEAD_DIM;
      const vOff = 2 * N_EMBD + head * HEAD_DIM;
      for (let qi = 0; qi < t; qi++) {
        let maxScore = -Infinity;
        for (let ki = 0; ki <= qi; ki++) {
          let dot = 0;
          for (let d = 0; d < HEAD_DIM; d++) {
            dot += qkv[qi * 3 * N_EMBD + qOff + d] * qkv[ki * 3 * N_EMBD + kOff + d];
          }
          const s = dot / Math.sqrt(HEAD_DIM);
          scores[ki] = s;
          if (s > maxScore) maxScore = s;
        }
        let denom = 0;
        for (let ki = 0; ki <= qi; ki++) {
          scores[ki] = Math.exp(scores[ki] - maxScore);
          denom += scores[ki];
        }
        for (let ki = 0; ki <= qi; ki++) {
          const weight = scores[ki] / denom;
          if (weight === 0) continue;
          for (let d = 0; d < HEAD_DIM; d++) {
            attnOut[qi * N_EMBD + qOff + d] += weight * qkv[ki * 3 * N_EMBD + vOff + d];
          }
        }
      }
    }
    const proj = matmulBias(attnOut, t, N_EMBD, w.get(p + 'attn.proj.w')!.data, N_EMBD, w.get(p + 'attn.proj.b')!.data);
    for (let i = 0; i < x.length; i++) x[i] += proj[i];
    const h2 = Float64Array.from(x);
    layerNorm(h2, t, w.get(p + 'ln_2.g')!.data, w.get(p + 'ln_2.b')!.data);
    const inner = matmulBias(h2, t, N_EMBD, w.get(p + 'mlp.fc.w')!.data, 4 * N_EMBD, w.get(p + 'mlp.fc.b')!.data);
    gelu(inner);
    const mlpOut = matmulBias(inner, t, 4 * N_EMBD, w.get(p + 'mlp.proj.w')!.data, N_EMBD, w.get(p + 'mlp.proj.b')!.data);
    for (let i = 0; i < x.length; i++) x[i] += mlpOut[i];
  }
  layerNorm(x, t, w.get('ln_f.g')!.data, w.get('ln_f.b')!.data);
  return Float32Array.from(x);
}
