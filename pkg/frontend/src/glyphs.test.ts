import { test } from "node:test";
import assert from "node:assert/strict";

import { readDigits, renderDigits } from "./glyphs";
import { Plane } from "./pgm";

/** Paint an arbitrary 3x5 cell pattern the way the stencil renderer does. */
function paintPattern(bits: string, cell: number, pad: number): Plane {
  const width = pad * 2 + 3 * cell;
  const height = pad * 2 + 5 * cell;
  const data = new Float64Array(width * height).fill(0.85);
  for (let gy = 0; gy < 5; gy++) {
    for (let gx = 0; gx < 3; gx++) {
      if (bits[gy * 3 + gx] === "1") {
        for (let y = 0; y < cell; y++) {
          for (let x = 0; x < cell; x++) {
            data[(pad + gy * cell + y) * width + pad + gx * cell + x] = 0.05;
          }
        }
      }
    }
  }
  return { width, height, data };
}

test("every digit round trips through render and read", () => {
  for (const ch of "0123456789") {
    const out = readDigits(renderDigits(ch, 6, 8));
    assert.equal(out.text, ch);
    assert.equal(out.confidence, 1);
  }
});

test("multi-digit strings keep order and full confidence", () => {
  for (const text of ["12", "507", "2026", "98"]) {
    const out = readDigits(renderDigits(text, 6, 8));
    assert.equal(out.text, text);
    assert.equal(out.confidence, 1);
  }
});

test("a damaged glyph still reads but at reduced confidence", () => {
  // "3" with its top-left cell erased: one cell off the stencil
  const out = readDigits(paintPattern("011001111001111", 6, 8));
  assert.equal(out.text, "3");
  assert.ok(out.confidence < 1);
  assert.ok(out.confidence > 0.8);
});

test("a pattern unlike any digit reads as ? with zero confidence", () => {
  const out = readDigits(paintPattern("101010101010101", 6, 8));
  assert.equal(out.text, "?");
  assert.equal(out.confidence, 0);
});

test("a blank field reads as empty with zero confidence", () => {
  const data = new Float64Array(64 * 44).fill(0.85);
  const out = readDigits({ width: 64, height: 44, data });
  assert.equal(out.text, "");
  assert.equal(out.confidence, 0);
});

test("reading survives mild blur of the ink edges", () => {
  const crisp = renderDigits("8417", 6, 8);
  // 3x3 box blur: the kind of softening a warp resample introduces
  const blurred = new Float64Array(crisp.data.length);
  for (let y = 0; y < crisp.height; y++) {
    for (let x = 0; x < crisp.width; x++) {
      let sum = 0;
      let n = 0;
      for (let dy = -1; dy <= 1; dy++) {
        for (let dx = -1; dx <= 1; dx++) {
          const yy = y + dy;
          const xx = x + dx;
          if (yy < 0 || yy >= crisp.height || xx < 0 || xx >= crisp.width) continue;
          sum += crisp.data[yy * crisp.width + xx];
          n++;
        }
      }
      blurred[y * crisp.width + x] = sum / n;
    }
  }
  const out = readDigits({ width: crisp.width, height: crisp.height, data: blurred });
  assert.equal(out.text, "8417");
});
