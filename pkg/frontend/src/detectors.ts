/**
 * Pixel-domain detectors for the dailies pipeline.
 *
 * Every detector works from a single grayscale plane and simple statistics:
 * windowed contrast for faces, grid pooling for embeddings, row-band
 * contrast for standing-figure height, luminance split for inside/outside.
 * They are deliberately small and deterministic; the point is honest
 * measurements with calibrated confidences, not state of the art anything.
 */

import { Plane, at, boxMean } from "./pgm";

export type Box = [number, number, number, number]; // x, y, w, h

export interface Detection {
  box: Box;
  confidence: number;
}

export interface ObjectDetection {
  category: string;
  confidence: number;
  box?: Box;
}

export interface SceneResult {
  scene_type: "Inside" | "Outside";
  place?: string;
  confidence?: number;
}

function clamp01(v: number): number {
  return Math.max(0, Math.min(1, v));
}

function planeMean(plane: Plane): number {
  let s = 0;
  for (let i = 0; i < plane.data.length; i++) s += plane.data[i];
  return plane.data.length ? s / plane.data.length : 0;
}

function planeStd(plane: Plane, mean: number): number {
  let s = 0;
  for (let i = 0; i < plane.data.length; i++) {
    const d = plane.data[i] - mean;
    s += d * d;
  }
  return plane.data.length ? Math.sqrt(s / plane.data.length) : 0;
}

/** Clipped box sum plus the pixel count actually covered. */
function boxSumArea(
  plane: Plane,
  x0: number,
  y0: number,
  w: number,
  h: number
): { sum: number; area: number } {
  const xa = Math.max(0, Math.floor(x0));
  const ya = Math.max(0, Math.floor(y0));
  const xb = Math.min(plane.width, Math.ceil(x0 + w));
  const yb = Math.min(plane.height, Math.ceil(y0 + h));
  if (xb <= xa || yb <= ya) return { sum: 0, area: 0 };
  let sum = 0;
  for (let y = ya; y < yb; y++) {
    for (let x = xa; x < xb; x++) sum += plane.data[y * plane.width + x];
  }
  return { sum, area: (xb - xa) * (yb - ya) };
}

/**
 * Bright-window face finder. A lit face reads as a compact region brighter
 * than its surround, so score candidate windows by interior mean minus the
 * mean of a one-window-wide ring, then keep non-overlapping peaks.
 */
export function faceDetect(plane: Plane): Detection[] {
  const sizes = [
    Math.round(Math.min(plane.width, plane.height) * 0.28),
    Math.round(Math.min(plane.width, plane.height) * 0.40),
  ].filter((s) => s >= 8);
  const candidates: Detection[] = [];
  for (const s of sizes) {
    const step = Math.max(2, Math.floor(s / 4));
    const h = Math.round(s * 1.3); // faces are taller than wide
    for (let y = 0; y + h <= plane.height; y += step) {
      for (let x = 0; x + s <= plane.width; x += step) {
        const inner = boxSumArea(plane, x, y, s, h);
        const outer = boxSumArea(plane, x - s, y - h, 3 * s, 3 * h);
        const ringArea = outer.area - inner.area;
        if (ringArea <= 0) continue; // window fills the frame, no surround left
        const score = inner.sum / inner.area - (outer.sum - inner.sum) / ringArea;
        if (score > 0.12) {
          candidates.push({ box: [x, y, s, h], confidence: clamp01(score * 3) });
        }
      }
    }
  }
  candidates.sort((a, b) => b.confidence - a.confidence);
  const kept: Detection[] = [];
  for (const c of candidates) {
    const overlaps = kept.some((k) => {
      const ix = Math.max(
        0,
        Math.min(c.box[0] + c.box[2], k.box[0] + k.box[2]) - Math.max(c.box[0], k.box[0])
      );
      const iy = Math.max(
        0,
        Math.min(c.box[1] + c.box[3], k.box[1] + k.box[3]) - Math.max(c.box[1], k.box[1])
      );
      return ix * iy > 0.3 * Math.min(c.box[2] * c.box[3], k.box[2] * k.box[3]);
    });
    if (!overlaps) kept.push(c);
    if (kept.length >= 4) break;
  }
  return kept;
}

/** 4x4 grid of box means over the face crop, L2 normalized. */
export function faceEmbed(plane: Plane, box?: Box): number[] {
  let [x0, y0, w, h] = box ?? [0, 0, plane.width, plane.height];
  x0 = Math.max(0, Math.min(plane.width - 1, Math.round(x0)));
  y0 = Math.max(0, Math.min(plane.height - 1, Math.round(y0)));
  w = Math.max(1, Math.min(plane.width - x0, Math.round(w)));
  h = Math.max(1, Math.min(plane.height - y0, Math.round(h)));
  const vec: number[] = [];
  for (let gy = 0; gy < 4; gy++) {
    for (let gx = 0; gx < 4; gx++) {
      const cx = x0 + Math.floor((gx * w) / 4);
      const cy = y0 + Math.floor((gy * h) / 4);
      const cw = Math.max(1, Math.floor(((gx + 1) * w) / 4) - Math.floor((gx * w) / 4));
      const ch = Math.max(1, Math.floor(((gy + 1) * h) / 4) - Math.floor((gy * h) / 4));
      vec.push(boxMean(plane, cx, cy, cw, ch));
    }
  }
  let norm = Math.sqrt(vec.reduce((s, v) => s + v * v, 0));
  if (norm < 1e-12) {
    vec[0] = 1;
    norm = 1;
  }
  return vec.map((v) => v / norm);
}

/**
 * Standing-figure height: rows a person occupies carry more horizontal
 * variation than empty set rows, so measure the longest contiguous band of
 * rows whose contrast clears the median row contrast.
 */
export function poseHeight(plane: Plane): { height_px: number; confidence: number } | null {
  if (plane.height < 4) return null;
  const rowVar = new Float64Array(plane.height);
  for (let y = 0; y < plane.height; y++) {
    let mean = 0;
    for (let x = 0; x < plane.width; x++) mean += at(plane, x, y);
    mean /= plane.width;
    let v = 0;
    for (let x = 0; x < plane.width; x++) {
      const d = at(plane, x, y) - mean;
      v += d * d;
    }
    rowVar[y] = v / plane.width;
  }
  const sorted = Array.from(rowVar).sort((a, b) => a - b);
  const median = sorted[Math.floor(sorted.length / 2)];
  const floor = Math.max(median * 1.5, 1e-4);
  let best = 0;
  let run = 0;
  for (let y = 0; y < plane.height; y++) {
    run = rowVar[y] > floor ? run + 1 : 0;
    if (run > best) best = run;
  }
  if (best < plane.height * 0.15) return null;
  return { height_px: best, confidence: 0.5 };
}

/**
 * Dark-blob object proposals. Conservative by design: an empty list on a
 * plain or noisy frame is the correct answer, not a failure.
 */
export function objectDetect(plane: Plane): ObjectDetection[] {
  const mean = planeMean(plane);
  const std = planeStd(plane, mean);
  const thr = mean - Math.max(2 * std, 0.15);
  const cell = Math.max(4, Math.floor(Math.min(plane.width, plane.height) / 12));
  const gw = Math.floor(plane.width / cell);
  const gh = Math.floor(plane.height / cell);
  if (gw < 2 || gh < 2) return [];
  const dark: boolean[] = [];
  for (let gy = 0; gy < gh; gy++) {
    for (let gx = 0; gx < gw; gx++) {
      dark.push(boxMean(plane, gx * cell, gy * cell, cell, cell) < thr);
    }
  }
  // flood fill over the coarse grid
  const seen = new Uint8Array(gw * gh);
  const out: ObjectDetection[] = [];
  for (let i = 0; i < gw * gh; i++) {
    if (!dark[i] || seen[i]) continue;
    const stack = [i];
    seen[i] = 1;
    let minx = gw;
    let miny = gh;
    let maxx = -1;
    let maxy = -1;
    let count = 0;
    while (stack.length) {
      const j = stack.pop() as number;
      const jx = j % gw;
      const jy = Math.floor(j / gw);
      count++;
      if (jx < minx) minx = jx;
      if (jx > maxx) maxx = jx;
      if (jy < miny) miny = jy;
      if (jy > maxy) maxy = jy;
      const neigh = [j - 1, j + 1, j - gw, j + gw];
      for (const k of neigh) {
        if (k < 0 || k >= gw * gh || seen[k] || !dark[k]) continue;
        if (Math.abs((k % gw) - jx) + Math.abs(Math.floor(k / gw) - jy) !== 1) continue;
        seen[k] = 1;
        stack.push(k);
      }
    }
    if (count < 2) continue; // single-cell blobs are noise
    out.push({
      category: "object",
      confidence: clamp01(0.3 + 0.1 * count),
      box: [minx * cell, miny * cell, (maxx - minx + 1) * cell, (maxy - miny + 1) * cell],
    });
  }
  out.sort((a, b) => b.confidence - a.confidence);
  return out.slice(0, 5);
}

/**
 * Inside/outside from the vertical luminance profile: sky makes exterior
 * frames top-heavy, interiors light from fixtures and read flatter or
 * bottom-heavy. Place label is a coarse texture bucket.
 */
export function sceneClassify(plane: Plane): SceneResult {
  const third = Math.max(1, Math.floor(plane.height / 3));
  const top = boxMean(plane, 0, 0, plane.width, third);
  const bottom = boxMean(plane, 0, plane.height - third, plane.width, third);
  const split = top - bottom;
  const sceneType: "Inside" | "Outside" = split > 0.04 ? "Outside" : "Inside";
  const mean = planeMean(plane);
  const std = planeStd(plane, mean);
  let place: string;
  if (sceneType === "Outside") {
    place = std > 0.18 ? "street" : "field";
  } else {
    place = mean > 0.45 ? "room" : "stage";
  }
  return {
    scene_type: sceneType,
    place,
    confidence: clamp01(0.5 + Math.abs(split) * 2),
  };
}

/**
 * Clapper-stick finder: the stick is a band of strong alternating light and
 * dark stripes, which shows up as a run of rows with high sign-flip counts
 * along x.
 */
export function slateDetect(plane: Plane): Detection[] {
  if (plane.width < 16 || plane.height < 8) return [];
  const flips = new Int32Array(plane.height);
  for (let y = 0; y < plane.height; y++) {
    let prev = at(plane, 0, y) > 0.5;
    let n = 0;
    for (let x = 1; x < plane.width; x++) {
      const cur = at(plane, x, y) > 0.5;
      if (cur !== prev) n++;
      prev = cur;
    }
    flips[y] = n;
  }
  const want = Math.max(4, Math.floor(plane.width / 24));
  let y0 = -1;
  let best: { y0: number; y1: number } | null = null;
  for (let y = 0; y <= plane.height; y++) {
    const hot = y < plane.height && flips[y] >= want;
    if (hot && y0 < 0) y0 = y;
    if (!hot && y0 >= 0) {
      if (!best || y - y0 > best.y1 - best.y0) best = { y0, y1: y };
      y0 = -1;
    }
  }
  if (!best || best.y1 - best.y0 < 3) return [];
  const bandH = best.y1 - best.y0;
  return [
    {
      box: [0, best.y0, plane.width, bandH],
      confidence: clamp01(0.4 + bandH / plane.height),
    },
  ];
}
