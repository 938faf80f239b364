/**
 * Byte-level BPE over the published vocabulary and merge list.
 *
 * Same pipeline as every faithful implementation: regex pre-split,
 * reversible byte-to-unicode alphabet, iterated lowest-rank merges,
 * id lookup. Total coverage, exactly invertible.
 */

import { readFileSync } from 'node:fs';

const PRETOKEN = /'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+/gu;

export function byteToUnicode(): Map<number, string> {
  const bs: number[] = [];
  for (let b = 33; b <= 126; b++) bs.push(b);
  for (let b = 161; b <= 172; b++) bs.push(b);
  for (let b = 174; b <= 255; b++) bs.push(b);
  const cs = bs.slice();
  let n = 0;
  for (let b = 0; b < 256; b++) {
    if (!bs.includes(b)) {
      bs.push(b);
      cs.push(256 + n);
      n += 1;
    }
  }
  const table = new Map<number, string>();
  bs.forEach((b, i) => table.set(b, String.fromCodePoint(cs[i])));
  return table;
}

export class BpeVocab {
  tokenToId: Map<string, number>;
  idToToken: string[];
  mergeRanks: Map<string, number>;
  byteEncoder: Map<number, string>;
  byteDecoder: Map<string, number>;
  private cache = new Map<string, number[]>();

  constructor(tokenToId: Map<string, number>, merges: Array<[string, string]>) {
    this.tokenToId = tokenToId;
    this.idToToken = new Array(tokenToId.size);
    for (const [tok, id] of tokenToId) this.idToToken[id] = tok;
    this.mergeRanks = new Map(merges.map(([a, b], rank) => [`${a} ${b}`, rank]));
    this.byteEncoder = byteToUnicode();
    this.byteDecoder = new Map([...this.byteEncoder].map(([b, c]) => [c, b]));
  }

  static load(vocabPath: string, mergesPath: string): BpeVocab {
    const vocabJson = JSON.parse(readFileSync(vocabPath, 'utf-8')) as Record<string, number>;
    const tokenToId = new Map(Object.entries(vocabJson));
    const merges: Array<[string, string]> = [];
    for (const line of readFileSync(mergesPath, 'utf-8').split('\n')) {
      if (!line || line.startsWith('#version')) continue;
      const parts = line.split(' ');
      if (parts.length === 2) merges.push([parts[0], parts[1]]);
    }
    return new BpeVocab(tokenToId, merges);
  }

  private mergePiece(piece: string): number[] {
    const cached = this.cache.get(piece);
    if (cached) return cached;
    let word = Array.from(piece);
    while (word.length > 1) {
      let bestRank = Infinity;
      let bestIndex = -1;
      for (let i = 0; i < word.length - 1; i++) {
        const rank = this.mergeRanks.get(`${word[i]} ${word[i + 1]}`);
        if (rank !== undefined && rank < bestRank) {
          bestRank = rank;
          bestIndex = i;
        }
      }
      if (bestIndex < 0) break;
      const [a, b] = [word[bestIndex], word[bestIndex + 1]];
      const merged: string[] = [];
      let i = 0;
      while (i < word.length) {
        if (i < word.length - 1 && word[i] === a && word[i + 1] === b) {
          merged.push(a + b);
          i += 2;
        } else {
          merged.push(word[i]);
          i += 1;
        }
      }
      word = merged;
    }
    const ids = word.map((t) => {
      const id = this.tokenToId.get(t);
      if (id === undefined) throw new Error(`token ${JSON.stringify(t)} not in vocabulary`);
      return id;
    });
    this.cache.set(piece, ids);
    return ids;
  }

  encode(text: string): number[] {
    const ids: number[] = [];
    for (const match of text.matchAll(PRETOKEN)) {
      const bytes = Buffer.from(match[0], 'utf-8');
      let mapped = '';
      for (const b of bytes) mapped += this.byteEncoder.get(b)!;
      ids.push(...this.mergePiece(mapped));
    }
    return ids;
  }

  decode(ids: number[]): string {
    const bytes: number[] = [];
    for (const id of ids) {
      const tok = this.idToToken[id];
      if (tok === undefined) throw new Error(`token id ${id} out of range`);
      for (const ch of tok) bytes.push(this.byteDecoder.get(ch)!);
    }
    return Buffer.from(bytes).toString('utf-8');
  }
}
