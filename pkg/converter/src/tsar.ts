/**
 * TSAR flat tensor archive, little-endian.
 *
 * Layout: magic "TSAR", version u32 (1), tensor count u32, then per
 * tensor: name length u32, UTF-8 name, dtype code u8 (1 = float32),
 * rank u32, dims as u64 list, raw float32 payload.
 */

import { openSync, writeSync, closeSync, readFileSync } from 'node:fs';

export interface NamedTensor {
  name: string;
  shape: number[];
  data: Float32Array;
}

const MAGIC = Buffer.from('TSAR', 'ascii');
const VERSION = 1;
const DTYPE_F32 = 1;

export function writeTsar(path: string, tensors: NamedTensor[]): void {
  const seen = new Set<string>();
  for (const t of tensors) {
    if (seen.has(t.name)) throw new Error(`duplicate tensor name ${t.name}`);
    seen.add(t.name);
    const count = t.shape.reduce((a, b) => a * b, 1);
    if (count !== t.data.length) throw new Error(`${t.name}: shape/payload mismatch`);
  }
  const fd = openSync(path, 'w');
  try {
    const head = Buffer.alloc(12);
    MAGIC.copy(head, 0);
    head.writeUInt32LE(VERSION, 4);
    head.writeUInt32LE(tensors.length, 8);
    writeSync(fd, head);
    for (const t of tensors) {
      const nameBytes = Buffer.from(t.name, 'utf-8');
      const meta = Buffer.alloc(4 + nameBytes.length + 1 + 4 + 8 * t.shape.length);
      let off = meta.writeUInt32LE(nameBytes.length, 0);
      off += nameBytes.copy(meta, off);
      off = meta.writeUInt8(DTYPE_F32, off);
      off = meta.writeUInt32LE(t.shape.length, off);
      for (const d of t.shape) off = meta.writeBigUInt64LE(BigInt(d), off);
      writeSync(fd, meta);
      writeSync(fd, littleEndianBytes(t.data));
    }
  } finally {
    closeSync(fd);
  }
}

export function readTsar(path: string): NamedTensor[] {
  const buf = readFileSync(path);
  if (!buf.subarray(0, 4).equals(MAGIC)) throw new Error(`${path}: bad magic`);
  const version = buf.readUInt32LE(4);
  if (version !== VERSION) throw new Error(`${path}: unsupported version ${version}`);
  const count = buf.readUInt32LE(8);
  const out: NamedTensor[] = [];
  let off = 12;
  for (let i = 0; i < count; i++) {
    const nameLen = buf.readUInt32LE(off);
    off += 4;
    const name = buf.subarray(off, off + nameLen).toString('utf-8');
    off += nameLen;
    const dtype = buf.readUInt8(off);
    off += 1;
    if (dtype !== DTYPE_F32) throw new Error(`${path}: tensor ${name} has dtype code ${dtype}`);
    const rank = buf.readUInt32LE(off);
    off += 4;
    const shape: number[] = [];
    for (let r = 0; r < rank; r++) {
      shape.push(Number(buf.readBigUInt64LE(off)));
      off += 8;
    }
    const n = shape.reduce((a, b) => a * b, 1);
    const payload = Buffer.alloc(4 * n);
    buf.copy(payload, 0, off, off + 4 * n);
    const probe = new Uint8Array(new Float32Array([1]).buffer);
    if (probe[3] !== 0x3f) payload.swap32();
    const data = new Float32Array(payload.buffer, payload.byteOffset, n);
    off += 4 * n;
    out.push({ name, shape, data });
  }
  if (off !== buf.length) throw new Error(`${path}: trailing bytes`);
  return out;
}

function littleEndianBytes(data: Float32Array): Buffer {
  // Node runs little-endian on every supported platform here; guard anyway.
  const probe = new Uint8Array(new Float32Array([1]).buffer);
  if (probe[3] !== 0x3f) {
    const buf = Buffer.alloc(4 * data.length);
    for (let i = 0; i < data.length; i++) buf.writeFloatLE(data[i], 4 * i);
    return buf;
  }
  return Buffer.from(data.buffer, data.byteOffset, data.byteLength);
}
