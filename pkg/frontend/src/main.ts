/**
 * Entry point for the detector service.
 *
 *   node dist/main.js --serve       speak the line protocol on stdin/stdout
 *   node dist/main.js --self-test   run a quick smoke check and exit
 */

import * as readline from "node:readline";
import { handleLine } from "./protocol";
import { readDigits, renderDigits } from "./glyphs";
import { faceDetect, sceneClassify } from "./detectors";
import { decodePgm, encodePgm } from "./pgm";

function serve(): void {
  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  rl.on("line", (line) => {
    const reply = handleLine(line);
    if (reply !== null) process.stdout.write(reply + "\n");
  });
  rl.on("close", () => process.exit(0));
}

function selfTest(): number {
  let failures = 0;
  const check = (name: string, ok: boolean) => {
    process.stdout.write(`${ok ? "ok" : "FAIL"}  ${name}\n`);
    if (!ok) failures++;
  };

  const digits = renderDigits("5102", 6, 8);
  check("digit round trip", readDigits(digits).text === "5102");

  const codec = decodePgm(encodePgm(digits));
  check("pgm round trip", codec.width === digits.width && codec.height === digits.height);

  const w = 96;
  const h = 96;
  const data = new Float64Array(w * h).fill(0.2);
  for (let y = 20; y < 52; y++) {
    for (let x = 36; x < 60; x++) data[y * w + x] = 0.8;
  }
  const faces = faceDetect({ width: w, height: h, data });
  check("bright window found", faces.length >= 1);

  const sky = new Float64Array(w * h);
  for (let y = 0; y < h; y++) {
    for (let x = 0; x < w; x++) sky[y * w + x] = y < h / 2 ? 0.9 : 0.3;
  }
  check("sky reads outside", sceneClassify({ width: w, height: h, data: sky }).scene_type === "Outside");

  return failures === 0 ? 0 : 1;
}

function main(argv: string[]): number {
  if (argv.includes("--serve")) {
    serve();
    return 0;
  }
  if (argv.includes("--self-test")) {
    return selfTest();
  }
  process.stderr.write("usage: main.js --serve | --self-test\n");
  return 2;
}

const code = main(process.argv.slice(2));
if (code !== 0) process.exitCode = code;
