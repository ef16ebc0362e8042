/**
 * Digit OCR for production slate boards.
 *
 * Slates in this pipeline stencil digits in a fixed 3x5 cell font, dark ink
 * on a light field. Crops arrive already rectified, so reading is: binarize,
 * split characters on blank column gaps, sample each character's 3x5 grid,
 * and match against the stencil table (nearest by Hamming distance when the
 * warp smudged a cell).
 */

import { Plane } from "./pgm";

const STENCILS: ReadonlyArray<[string, string]> = [
  ["0", "111101101101111"],
  ["1", "010110010010111"],
  ["2", "111001111100111"],
  ["3", "111001111001111"],
  ["4", "101101111001001"],
  ["5", "111100111001111"],
  ["6", "111100111101111"],
  ["7", "111001010010010"],
  ["8", "111101111101111"],
  ["9", "111101111001111"],
];

const INK_THRESHOLD = 0.45;
const CELL_FILL = 0.35; // fraction of a grid cell that must be inked
const MAX_REPAIR = 2; // worst Hamming distance still accepted as a digit

export interface OcrResult {
  text: string;
  confidence: number;
}

interface CharSpan {
  x0: number;
  x1: number; // exclusive
}

function inkMask(crop: Plane): Uint8Array {
  const mask = new Uint8Array(crop.width * crop.height);
  for (let i = 0; i < crop.data.length; i++) {
    if (crop.data[i] < INK_THRESHOLD) mask[i] = 1;
  }
  return mask;
}

function columnCounts(mask: Uint8Array, width: number, height: number): Int32Array {
  const counts = new Int32Array(width);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) counts[x] += mask[y * width + x];
  }
  return counts;
}

/** Contiguous runs of inked columns; the inter-character gap is blank. */
function splitChars(counts: Int32Array): CharSpan[] {
  const spans: CharSpan[] = [];
  let start = -1;
  for (let x = 0; x <= counts.length; x++) {
    const inked = x < counts.length && counts[x] >= 2;
    if (inked && start < 0) start = x;
    if (!inked && start >= 0) {
      spans.push({ x0: start, x1: x });
      start = -1;
    }
  }
  return spans;
}

function rowExtent(
  mask: Uint8Array,
  width: number,
  height: number,
  span: CharSpan
): { y0: number; y1: number } | null {
  let y0 = -1;
  let y1 = -1;
  for (let y = 0; y < height; y++) {
    let any = 0;
    for (let x = span.x0; x < span.x1; x++) any += mask[y * width + x];
    if (any >= 1) {
      if (y0 < 0) y0 = y;
      y1 = y + 1;
    }
  }
  return y0 < 0 ? null : { y0, y1 };
}

function sampleGrid(
  mask: Uint8Array,
  width: number,
  span: CharSpan,
  y0: number,
  y1: number
): string {
  let bits = "";
  const cw = (span.x1 - span.x0) / 3;
  const ch = (y1 - y0) / 5;
  for (let gy = 0; gy < 5; gy++) {
    for (let gx = 0; gx < 3; gx++) {
      const xa = Math.round(span.x0 + gx * cw);
      const xb = Math.max(xa + 1, Math.round(span.x0 + (gx + 1) * cw));
      const ya = Math.round(y0 + gy * ch);
      const yb = Math.max(ya + 1, Math.round(y0 + (gy + 1) * ch));
      let ink = 0;
      for (let y = ya; y < yb; y++) {
        for (let x = xa; x < xb; x++) ink += mask[y * width + x];
      }
      bits += ink / ((xb - xa) * (yb - ya)) > CELL_FILL ? "1" : "0";
    }
  }
  return bits;
}

function hamming(a: string, b: string): number {
  let d = 0;
  for (let i = 0; i < a.length; i++) if (a[i] !== b[i]) d++;
  return d;
}

function matchStencil(bits: string): { char: string; confidence: number } {
  let best = "?";
  let bestDist = bits.length + 1;
  for (const [char, stencil] of STENCILS) {
    const d = hamming(bits, stencil);
    if (d < bestDist) {
      bestDist = d;
      best = char;
    }
  }
  if (bestDist > MAX_REPAIR) return { char: "?", confidence: 0 };
  return { char: best, confidence: 1 - bestDist / bits.length };
}

export function readDigits(crop: Plane): OcrResult {
  const mask = inkMask(crop);
  const spans = splitChars(columnCounts(mask, crop.width, crop.height));
  if (spans.length === 0) return { text: "", confidence: 0 };
  let text = "";
  let confidence = 1;
  for (const span of spans) {
    const rows = rowExtent(mask, crop.width, crop.height, span);
    if (rows === null) continue;
    const m = matchStencil(sampleGrid(mask, crop.width, span, rows.y0, rows.y1));
    text += m.char;
    confidence = Math.min(confidence, m.confidence);
  }
  if (text.length === 0) return { text: "", confidence: 0 };
  return { text, confidence };
}

/** Stencil renderer, the test oracle for readDigits round trips. */
export function renderDigits(
  text: string,
  cell: number,
  pad: number,
  ink = 0.05,
  field = 0.85
): Plane {
  const width = pad * 2 + text.length * 4 * cell;
  const height = pad * 2 + 5 * cell;
  const data = new Float64Array(width * height).fill(field);
  let x0 = pad;
  for (const ch of text) {
    const entry = STENCILS.find(([c]) => c === ch);
    if (entry) {
      const bits = entry[1];
      for (let gy = 0; gy < 5; gy++) {
        for (let gx = 0; gx < 3; gx++) {
          if (bits[gy * 3 + gx] === "1") {
            for (let y = 0; y < cell; y++) {
              for (let x = 0; x < cell; x++) {
                data[(pad + gy * cell + y) * width + x0 + gx * cell + x] = ink;
              }
            }
          }
        }
      }
    }
    x0 += 4 * cell;
  }
  return { width, height, data };
}
