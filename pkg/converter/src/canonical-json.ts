/**
 * JSON writer matching the formatting the repository's fixtures use:
 * 2-space indent, insertion-order keys, ASCII-only output with \uXXXX
 * escapes (lowercase hex), a space after ':' and none before, LF endings.
 * Byte-compatible with Python's json.dumps(obj, indent=2, ensure_ascii=True).
 */

export type JsonValue = null | boolean | number | string | JsonValue[] | { [k: string]: JsonValue };

const SHORT_ESCAPES: Record<string, string> = {
  '"': '\\"',
  '\\': '\\\\',
  '\b': '\\b',
  '\f': '\\f',
  '\n': '\\n',
  '\r': '\\r',
  '\t': '\\t',
};

export function escapeString(s: string): string {
  let out = '"';
  for (let i = 0; i < s.length; i++) {
    const ch = s[i];
    const code = s.charCodeAt(i);
    if (SHORT_ESCAPES[ch]) {
      out += SHORT_ESCAPES[ch];
    } else if (code < 0x20 || code > 0x7e) {
      // non-ASCII: escape each UTF-16 code unit (surrogates stay paired)
      out += '\\u' + code.toString(16).padStart(4, '0');
    } else {
      out += ch;
    }
  }
  return out + '"';
}

function renderNumber(n: number): string {
  if (!Number.isFinite(n)) throw new Error('non-finite number in fixture JSON');
  if (Number.isInteger(n) && Math.abs(n) < 2 ** 53) return String(n);
  return String(n);
}

export function canonicalJson(value: JsonValue, indent = 0): string {
  const pad = ' '.repeat(indent);
  const inner = ' '.repeat(indent + 2);
  if (value === null) return 'null';
  if (typeof value === 'boolean') return value ? 'true' : 'false';
  if (typeof value === 'number') return renderNumber(value);
  if (typeof value === 'string') return escapeString(value);
  if (Array.isArray(value)) {
    if (value.length === 0) return '[]';
    const items = value.map((v) => inner + canonicalJson(v, indent + 2));
    return '[\n' + items.join(',\n') + '\n' + pad + ']';
  }
  const keys = Object.keys(value);
  if (keys.length === 0) return '{}';
  const items = keys.map((k) => `${inner}${escapeString(k)}: ${canonicalJson(value[k], indent + 2)}`);
  return '{\n' + items.join(',\n') + '\n' + pad + '}';
}

/** Full document: canonical body plus trailing newline. */
export function canonicalDocument(value: JsonValue): string {
  return canonicalJson(value) + '\n';
}
