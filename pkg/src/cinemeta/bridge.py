"""Detector backend protocol: line-delimited JSON over a child's stdio.

Annotators that need learned models (faces, objects, OCR, scenes, pose) talk
to an external process instead of linking against one. The child is started
with ``--serve``, reads one JSON request per line on stdin, and writes one
JSON response per line on stdout:

    {"id": "7", "kind": "ocr", "clip": "A001_C001", "frame": 3,
     "payload": {"region": "scene_num", "image": "<base64 PGM>"}}
    {"id": "7", "ok": true, "result": {"text": "12", "confidence": 0.93}}
    {"id": "8", "ok": false, "error": "no fixture"}

One request is in flight per connection at a time, and the response id must
echo the request id. The JSON schemas under schemas/ at the repo root pin
the envelope and the per-kind result shapes; any process honoring them can
stand in for any other, which is what makes the fixture backend below a
faithful test double for real model servers.

Run ``python3 -m cinemeta.bridge --serve --fixture-root DIR`` to serve
canned results from a directory tree: DIR/<clip>/<kind>/<key>.json, where
key is the payload's region name when one is present, else the frame index.
"""

from __future__ import annotations

import argparse
import base64
import json
import queue
import subprocess
import sys
import threading
from pathlib import Path

import numpy as np

from .formats.raster import RasterFile, raster_from_bytes, raster_to_bytes

DETECTOR_KINDS = (
    "face_detect",
    "face_embed",
    "object_detect",
    "scene_classify",
    "ocr",
    "slate_detect",
    "pose_height",
)

DEFAULT_TIMEOUT = 30.0

NO_FIXTURE = "no fixture"
UNSUPPORTED_KIND = "unsupported kind"


class BridgeError(Exception):
    pass


class ProtocolError(BridgeError):
    pass


class BackendExitError(BridgeError):
    pass


class BridgeTimeoutError(BridgeError):
    pass


class DetectorError(BridgeError):
    """The backend answered, but with ok=false; the message is its error."""


def plane_to_pgm_base64(plane: np.ndarray) -> str:
    """Encode a grayscale float plane as base64 of its PGM serialization."""

    h, w = plane.shape
    raster = RasterFile(w, h, 1, 255, np.clip(plane, 0.0, 1.0)[:, :, None])
    return base64.b64encode(raster_to_bytes(raster)).decode("ascii")


def pgm_base64_to_plane(data: str) -> np.ndarray:
    raster = raster_from_bytes(base64.b64decode(data))
    return raster.pixels[:, :, 0]


def _check_response(msg: object, req_id: str):
    if not isinstance(msg, dict) or "id" not in msg or "ok" not in msg:
        raise ProtocolError(f"response missing id/ok: {msg!r}")
    if msg["id"] != req_id:
        raise ProtocolError(f"response id {msg['id']!r} != request id {req_id!r}")
    if msg["ok"]:
        if "result" not in msg:
            raise ProtocolError("ok response without a result")
        return msg["result"]
    raise DetectorError(str(msg.get("error", "unknown error")))


class DetectorClient:
    """Owns one backend child process and speaks the request protocol to it.

    The command is launched verbatim, so callers append ``--serve``. A reader
    thread drains stdout into a queue; request() writes a line then waits for
    the matching response, raising BridgeTimeoutError after the deadline and
    BackendExitError when the child hangs up instead of answering.
    """

    def __init__(self, command: list[str], timeout: float = DEFAULT_TIMEOUT):
        self._command = list(command)
        self._timeout = timeout
        self._next_id = 0
        self._lock = threading.Lock()
        self._proc = subprocess.Popen(
            self._command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )
        self._queue: queue.Queue[object] = queue.Queue()
        self._reader = threading.Thread(target=self._drain, daemon=True)
        self._reader.start()

    def _drain(self) -> None:
        stream = self._proc.stdout
        assert stream is not None
        for line in stream:
            self._queue.put(line)
        self._queue.put(None)  # EOF marker

    def request(
        self,
        kind: str,
        clip: str,
        frame: int,
        payload: dict | None = None,
        timeout: float | None = None,
    ):
        """Send one request and block for its response's result."""

        with self._lock:
            req_id = str(self._next_id)
            self._next_id += 1
            line = json.dumps(
                {
                    "id": req_id,
                    "kind": kind,
                    "clip": clip,
                    "frame": frame,
                    "payload": payload or {},
                },
                ensure_ascii=False,
            )
            stdin = self._proc.stdin
            if stdin is None or self._proc.poll() is not None:
                raise BackendExitError(f"backend exited with {self._proc.returncode}")
            try:
                stdin.write(line + "\n")
                stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise BackendExitError(f"backend pipe closed: {exc}") from exc
            try:
                raw = self._queue.get(timeout=timeout or self._timeout)
            except queue.Empty:
                raise BridgeTimeoutError(
                    f"no response to {kind} within {timeout or self._timeout}s"
                ) from None
            if raw is None:
                raise BackendExitError(
                    f"backend exited with {self._proc.poll()} before answering"
                )
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"response is not JSON: {raw!r}") from exc
        return _check_response(msg, req_id)

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                if self._proc.stdin:
                    self._proc.stdin.close()
                self._proc.wait(timeout=5.0)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()

    def __enter__(self) -> "DetectorClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


# --- fixture backend --------------------------------------------------------


def fixture_key(frame: int, payload: dict) -> str:
    """Filename stem a fixture request resolves to."""

    region = payload.get("region")
    if region is not None:
        return str(region)
    return str(frame)


def fixture_lookup(root: Path, kind: str, clip: str, frame: int, payload: dict):
    if not isinstance(clip, str) or not clip:
        raise DetectorError("fixture backend needs a clip id")
    path = root / clip / kind / f"{fixture_key(frame, payload)}.json"
    if not path.exists():
        raise DetectorError(NO_FIXTURE)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"bad fixture JSON at {path}: {exc}") from exc


class FixtureConnection:
    """In-process detector connection serving canned results from a tree.

    Lookup mirrors the --serve loop: <root>/<clip>/<kind>/<key>.json with
    the region name (or frame index) as key. Malformed fixture files raise
    ProtocolError naming the path, so a broken test setup fails loudly.
    """

    def __init__(self, root: str | Path):
        self._root = Path(root)
        if not self._root.is_dir():
            raise ProtocolError(f"fixture root {self._root} does not exist")

    def request(
        self,
        kind: str,
        clip: str,
        frame: int,
        payload: dict | None = None,
        timeout: float | None = None,
    ):
        if kind not in DETECTOR_KINDS:
            raise DetectorError(UNSUPPORTED_KIND)
        return fixture_lookup(self._root, kind, clip, frame, payload or {})

    def close(self) -> None:
        pass

    def __enter__(self) -> "FixtureConnection":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def serve_fixtures(root: Path, stdin=None, stdout=None) -> None:
    """Blocking serve loop for the fixture backend (used by --serve)."""

    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        rid = None
        try:
            msg = json.loads(line)
            rid = msg.get("id")
            kind = msg["kind"]
            clip = msg.get("clip", "")
            frame = msg.get("frame", 0)
            payload = msg.get("payload") or {}
            if kind not in DETECTOR_KINDS:
                raise DetectorError(UNSUPPORTED_KIND)
            result = fixture_lookup(root, kind, clip, frame, payload)
            reply = {"id": rid, "ok": True, "result": result}
        except (DetectorError, ProtocolError) as exc:
            reply = {"id": rid, "ok": False, "error": str(exc)}
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            reply = {"id": rid, "ok": False, "error": f"bad request: {exc}"}
        stdout.write(json.dumps(reply, ensure_ascii=False) + "\n")
        stdout.flush()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cinemeta.bridge", description="fixture detector backend"
    )
    parser.add_argument("--serve", action="store_true", help="speak the stdio protocol")
    parser.add_argument(
        "--fixture-root", required=True, help="directory of canned detector results"
    )
    args = parser.parse_args(argv)
    if not args.serve:
        parser.error("--serve is the only supported mode")
    serve_fixtures(Path(args.fixture_root))
    return 0


if __name__ == "__main__":
    sys.exit(main())
