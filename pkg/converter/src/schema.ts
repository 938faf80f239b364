/**
 * Canonical tensor schema of the target archive: names, shapes, and the
 * checkpoint-name mapping. Order matters; the synthetic generator assigns
 * counter ranges in exactly this order.
 */

export const N_VOCAB = 50257;
export const N_CTX = 1024;
export const N_EMBD = 768;
export const N_LAYER = 12;

export interface TensorSpec {
  name: string;
  shape: number[];
  /** hugging-face style source name (without the optional "transformer." prefix) */
  source: string;
}

const BLOCK_FIELDS: Array<[string, number[], string]> = [
  ['ln_1.g', [N_EMBD], 'ln_1.weight'],
  ['ln_1.b', [N_EMBD], 'ln_1.bias'],
  ['attn.qkv.w', [N_EMBD, 3 * N_EMBD], 'attn.c_attn.weight'],
  ['attn.qkv.b', [3 * N_EMBD], 'attn.c_attn.bias'],
  ['attn.proj.w', [N_EMBD, N_EMBD], 'attn.c_proj.weight'],
  ['attn.proj.b', [N_EMBD], 'attn.c_proj.bias'],
  ['ln_2.g', [N_EMBD], 'ln_2.weight'],
  ['ln_2.b', [N_EMBD], 'ln_2.bias'],
  ['mlp.fc.w', [N_EMBD, 4 * N_EMBD], 'mlp.c_fc.weight'],
  ['mlp.fc.b', [4 * N_EMBD], 'mlp.c_fc.bias'],
  ['mlp.proj.w', [4 * N_EMBD, N_EMBD], 'mlp.c_proj.weight'],
  ['mlp.proj.b', [N_EMBD], 'mlp.c_proj.bias'],
];

export function tensorSchema(): TensorSpec[] {
  const specs: TensorSpec[] = [
    { name: 'wte', shape: [N_VOCAB, N_EMBD], source: 'wte.weight' },
    { name: 'wpe', shape: [N_CTX, N_EMBD], source: 'wpe.weight' },
  ];
  for (let i = 0; i < N_LAYER; i++) {
    for (const [field, shape, source] of BLOCK_FIELDS) {
      specs.push({ name: `h${i}.${field}`, shape, source: `h.${i}.${source}` });
    }
  }
  specs.push({ name: 'ln_f.g', shape: [N_EMBD], source: 'ln_f.weight' });
  specs.push({ name: 'ln_f.b', shape: [N_EMBD], source: 'ln_f.bias' });
  return specs;
}

/** Uniform half-width and additive offset for the synthetic generator. */
export function syntheticScale(name: string): { scale: number; shift: number } {
  if (name === 'wte' || name === 'wpe') return { scale: 0.04, shift: 0 };
  if (name.endsWith('ln_1.g') || name.endsWith('ln_2.g') || name === 'ln_f.g') return { scale: 0.1, shift: 1 };
  if (name.endsWith('.b')) {
    if (name.includes('ln_1') || name.includes('ln_2') || name === 'ln_f.b') return { scale: 0.02, shift: 0 };
    return { scale: 0.01, shift: 0 };
  }
  if (name.endsWith('attn.qkv.w')) return { scale: 0.036, shift: 0 };
  if (name.endsWith('attn.proj.w')) return { scale: 0.018, shift: 0 };
  if (name.endsWith('mlp.fc.w')) return { scale: 0.036, shift: 0 };
  if (name.endsWith('mlp.proj.w')) return { scale: 0.01, shift: 0 };
  throw new Error(`no scale rule for tensor ${name}`);
}
