/**
 * Binary PGM (P5) decode/encode for the detector wire protocol.
 *
 * Frames arrive as base64 of a P5 file with maxval 255 or 65535; pixels are
 * normalized to [0, 1] doubles, row-major.
 */

export interface Plane {
  width: number;
  height: number;
  data: Float64Array;
}

export class PgmError extends Error {}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d;
}

/** Read the next whitespace-delimited header token, skipping # comments. */
function nextToken(buf: Buffer, pos: number): { token: string; pos: number } {
  while (pos < buf.length) {
    if (isSpace(buf[pos])) {
      pos++;
    } else if (buf[pos] === 0x23) {
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
    } else {
      break;
    }
  }
  const start = pos;
  while (pos < buf.length && !isSpace(buf[pos])) pos++;
  if (start === pos) throw new PgmError("truncated header");
  return { token: buf.toString("ascii", start, pos), pos };
}

export function decodePgm(base64: string): Plane {
  const buf = Buffer.from(base64, "base64");
  if (buf.length < 2 || buf.toString("ascii", 0, 2) !== "P5") {
    throw new PgmError("not a P5 stream");
  }
  let pos = 2;
  let t = nextToken(buf, pos);
  const width = parseInt(t.token, 10);
  t = nextToken(buf, t.pos);
  const height = parseInt(t.token, 10);
  t = nextToken(buf, t.pos);
  const maxval = parseInt(t.token, 10);
  if (!Number.isFinite(width) || !Number.isFinite(height) || width <= 0 || height <= 0) {
    throw new PgmError(`bad dimensions ${t.token}`);
  }
  if (maxval !== 255 && maxval !== 65535) {
    throw new PgmError(`maxval ${maxval} (255 or 65535 only)`);
  }
  pos = t.pos + 1; // exactly one whitespace byte separates header and payload

  const count = width * height;
  const sampleBytes = maxval === 255 ? 1 : 2;
  if (buf.length - pos !== count * sampleBytes) {
    throw new PgmError(
      `expected ${count * sampleBytes} payload bytes, got ${buf.length - pos}`
    );
  }
  const data = new Float64Array(count);
  if (maxval === 255) {
    for (let i = 0; i < count; i++) data[i] = buf[pos + i] / 255;
  } else {
    for (let i = 0; i < count; i++) data[i] = buf.readUInt16BE(pos + 2 * i) / 65535;
  }
  return { width, height, data };
}

export function encodePgm(plane: Plane): string {
  const header = Buffer.from(`P5\n${plane.width} ${plane.height}\n255\n`, "ascii");
  const payload = Buffer.alloc(plane.width * plane.height);
  for (let i = 0; i < plane.data.length; i++) {
    const v = Math.min(1, Math.max(0, plane.data[i]));
    payload[i] = Math.round(v * 255);
  }
  return Buffer.concat([header, payload]).toString("base64");
}

export function at(plane: Plane, x: number, y: number): number {
  return plane.data[y * plane.width + x];
}

/** Mean over an axis-aligned box clipped to the plane; 0 for empty boxes. */
export function boxMean(
  plane: Plane,
  x0: number,
  y0: number,
  w: number,
  h: number
): number {
  const xa = Math.max(0, Math.floor(x0));
  const ya = Math.max(0, Math.floor(y0));
  const xb = Math.min(plane.width, Math.ceil(x0 + w));
  const yb = Math.min(plane.height, Math.ceil(y0 + h));
  if (xb <= xa || yb <= ya) return 0;
  let sum = 0;
  for (let y = ya; y < yb; y++) {
    for (let x = xa; x < xb; x++) sum += plane.data[y * plane.width + x];
  }
  return sum / ((xb - xa) * (yb - ya));
}
