/**
 * Line protocol for the detector service.
 *
 * One JSON request per line on stdin, one JSON reply per line on stdout:
 *   {"id": "7", "kind": "ocr", "clip": "A001_C001", "frame": 3,
 *    "payload": {"image": "<base64 PGM>", ...}}
 * becomes
 *   {"id": "7", "ok": true, "result": ...}  or
 *   {"id": "7", "ok": false, "error": "..."}
 *
 * Blank lines are skipped. Malformed JSON answers with id null. The reply
 * envelope carries exactly id/ok plus one of result or error.
 */

import { decodePgm, Plane, PgmError } from "./pgm";
import { readDigits } from "./glyphs";
import {
  Box,
  faceDetect,
  faceEmbed,
  objectDetect,
  poseHeight,
  sceneClassify,
  slateDetect,
} from "./detectors";

export const DETECTOR_KINDS = [
  "face_detect",
  "face_embed",
  "object_detect",
  "scene_classify",
  "ocr",
  "slate_detect",
  "pose_height",
] as const;

export const UNSUPPORTED_KIND = "unsupported kind";

export type Reply =
  | { id: unknown; ok: true; result: unknown }
  | { id: unknown; ok: false; error: string };

/** Request-level failure whose message goes out verbatim as the error. */
class RequestError extends Error {}

function decodeImage(payload: unknown): Plane {
  if (typeof payload !== "object" || payload === null) {
    throw new RequestError("missing image payload");
  }
  const image = (payload as Record<string, unknown>).image;
  if (typeof image !== "string" || image.length === 0) {
    throw new RequestError("missing image payload");
  }
  return decodePgm(image);
}

function payloadBox(payload: unknown): Box | undefined {
  if (typeof payload !== "object" || payload === null) return undefined;
  const box = (payload as Record<string, unknown>).box;
  if (!Array.isArray(box) || box.length !== 4) return undefined;
  if (!box.every((v) => typeof v === "number" && Number.isFinite(v))) return undefined;
  return [box[0], box[1], box[2], box[3]];
}

function dispatch(kind: string, payload: unknown): unknown {
  const plane = decodeImage(payload);
  switch (kind) {
    case "face_detect":
      return faceDetect(plane);
    case "face_embed":
      return { embedding: faceEmbed(plane, payloadBox(payload)), confidence: 0.6 };
    case "object_detect":
      return objectDetect(plane);
    case "scene_classify":
      return sceneClassify(plane);
    case "ocr":
      return readDigits(plane);
    case "slate_detect":
      return slateDetect(plane);
    case "pose_height": {
      const pose = poseHeight(plane);
      if (pose === null) throw new RequestError("no figure found");
      return pose;
    }
    default:
      throw new RequestError(UNSUPPORTED_KIND);
  }
}

/**
 * Answer one wire line. Returns the serialized reply, or null when the line
 * is blank and deserves no reply at all.
 */
export function handleLine(line: string): string | null {
  if (line.trim().length === 0) return null;
  let id: unknown = null;
  let reply: Reply;
  try {
    let msg: unknown;
    try {
      msg = JSON.parse(line);
    } catch (exc) {
      throw new RequestError(`bad request: ${(exc as Error).message}`);
    }
    if (typeof msg !== "object" || msg === null || Array.isArray(msg)) {
      throw new RequestError("bad request: not an object");
    }
    const req = msg as Record<string, unknown>;
    id = req.id ?? null;
    if (!("kind" in req)) {
      throw new RequestError("bad request: 'kind'");
    }
    const kind = String(req.kind);
    if (!(DETECTOR_KINDS as readonly string[]).includes(kind)) {
      throw new RequestError(UNSUPPORTED_KIND);
    }
    reply = { id, ok: true, result: dispatch(kind, req.payload ?? {}) };
  } catch (exc) {
    if (exc instanceof RequestError || exc instanceof PgmError) {
      reply = { id, ok: false, error: exc.message };
    } else {
      reply = { id, ok: false, error: `internal error: ${(exc as Error).message}` };
    }
  }
  return JSON.stringify(reply);
}
