/**
 * Minimal safetensors reader/writer (float32 only).
 *
 * Format: u64 LE header length, JSON header mapping tensor name to
 * {dtype, shape, data_offsets: [begin, end]} relative to the data block,
 * then the raw data block. Only F32 is accepted; converting holds one
 * tensor in memory at a time.
 */

import { openSync, writeSync, closeSync, readSync, fstatSync } from 'node:fs';

export interface TensorInfo {
  dtype: string;
  shape: number[];
  data_offsets: [number, number];
}

export interface SafetensorsIndex {
  path: string;
  dataStart: number;
  tensors: Map<string, TensorInfo>;
}

export function readHeader(path: string): SafetensorsIndex {
  const fd = openSync(path, 'r');
  try {
    const lenBuf = Buffer.alloc(8);
    readSync(fd, lenBuf, 0, 8, 0);
    const headerLen = Number(lenBuf.readBigUInt64LE(0));
    const headerBuf = Buffer.alloc(headerLen);
    readSync(fd, headerBuf, 0, headerLen, 8);
    const parsed = JSON.parse(headerBuf.toString('utf-8')) as Record<string, TensorInfo>;
    const tensors = new Map<string, TensorInfo>();
    for (const [name, info] of Object.entries(parsed)) {
      if (name === '__metadata__') continue;
      tensors.set(name, info);
    }
    return { path, dataStart: 8 + headerLen, tensors };
  } finally {
    closeSync(fd);
  }
}

export function readTensor(index: SafetensorsIndex, name: string): { shape: number[]; data: Float32Array } {
  const info = index.tensors.get(name);
  if (!info) throw new Error(`missing tensor ${name}`);
  if (info.dtype !== 'F32') throw new Error(`tensor ${name}: dtype ${info.dtype} not supported (convert to F32 first)`);
  const [begin, end] = info.data_offsets;
  const byteLen = end - begin;
  const n = info.shape.reduce((a, b) => a * b, 1);
  if (byteLen !== 4 * n) throw new Error(`tensor ${name}: payload ${byteLen} bytes, expected ${4 * n}`);
  const fd = openSync(index.path, 'r');
  try {
    // read straight into the typed array's backing store (little-endian host)
    const data = new Float32Array(n);
    const view = Buffer.from(data.buffer);
    let read = 0;
    while (read < byteLen) {
      const got = readSync(fd, view, read, byteLen - read, index.dataStart + begin + read);
      if (got <= 0) throw new Error(`tensor ${name}: truncated payload`);
      read += got;
    }
    if (!HOST_LITTLE_ENDIAN) byteSwap32(view);
    return { shape: info.shape, data };
  } finally {
    closeSync(fd);
  }
}

const HOST_LITTLE_ENDIAN = new Uint8Array(new Float32Array([1]).buffer)[3] === 0x3f;

function byteSwap32(buf: Buffer): void {
  buf.swap32();
}

export interface PendingTensor {
  name: string;
  shape: number[];
  /** Called once at write time; keeps peak memory at one tensor. */
  fill: () => Float32Array;
}

export function writeSafetensors(path: string, tensors: PendingTensor[]): void {
  const header: Record<string, TensorInfo> = {};
  let offset = 0;
  for (const t of tensors) {
    const n = t.shape.reduce((a, b) => a * b, 1);
    header[t.name] = { dtype: 'F32', shape: t.shape, data_offsets: [offset, offset + 4 * n] };
    offset += 4 * n;
  }
  const headerJson = Buffer.from(JSON.stringify(header), 'utf-8');
  const fd = openSync(path, 'w');
  try {
    const lenBuf = Buffer.alloc(8);
    lenBuf.writeBigUInt64LE(BigInt(headerJson.length), 0);
    writeSync(fd, lenBuf);
    writeSync(fd, headerJson);
    for (const t of tensors) {
      const data = t.fill();
      const buf = Buffer.from(data.buffer, data.byteOffset, data.byteLength);
      if (!HOST_LITTLE_ENDIAN) byteSwap32(buf);
      writeSync(fd, buf);
    }
  } finally {
    closeSync(fd);
  }
}
