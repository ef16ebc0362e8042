"""Clip manifests: where a clip's frames live plus its camera-recorded basics.

Manifests stand in for vendor RAW ingest: one JSON file per clip pointing at
a numbered frame-sequence directory. A manifest may also carry the
production's declared scene/shot/take so fusion can cross-check the slate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from ..model import BasicMetadata, ClipId, Timecode
from .sidecar import BadTypeError, MissingKeyError

_BAYER_PATTERNS = ("RGGB", "BGGR", "GRBG", "GBRG")


@dataclass(frozen=True)
class ClipManifest:
    clip_id: ClipId
    frames_dir: str
    frame_pattern: str
    frame_count: int
    basic: BasicMetadata
    slate_template_id: str | None = None
    slate_scan_frames: int | None = None
    # Raw footage marker: a Bayer pattern means frames need demosaicing.
    bayer_pattern: str | None = None
    # Optional .cube to apply after load (LOG footage correction).
    lut: str | None = None
    # Production-declared slate hints, cross-checked against OCR in fusion.
    scene_num: int | None = None
    shot_num: int | None = None
    take_num: int | None = None

    def __post_init__(self) -> None:
        if self.frame_count < 1:
            raise BadTypeError(f"frame_count must be >= 1, got {self.frame_count}")
        if self.bayer_pattern is not None and self.bayer_pattern not in _BAYER_PATTERNS:
            raise BadTypeError(f"unknown bayer_pattern {self.bayer_pattern!r}")
        for name in ("scene_num", "shot_num", "take_num"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise BadTypeError(f"{name} must be non-negative, got {val}")

    def frame_path(self, index: int) -> str:
        return f"{self.frames_dir}/{self.frame_pattern % index}"


def _opt_positive(raw: dict, key: str) -> float | None:
    val = raw.get(key)
    if val is None:
        return None
    if not isinstance(val, (int, float)) or isinstance(val, bool) or val <= 0:
        raise BadTypeError(f"{key} must be a positive number, got {val!r}")
    return float(val)


def _opt_int(raw: dict, key: str) -> int | None:
    val = raw.get(key)
    if val is None:
        return None
    if not isinstance(val, int) or isinstance(val, bool):
        raise BadTypeError(f"{key} must be an integer, got {val!r}")
    return val


def parse_manifest(text: str) -> ClipManifest:
    """Parse one clip manifest JSON document."""

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadTypeError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise BadTypeError("manifest must be a JSON object")

    for key in ("clip_id", "frames_dir", "frame_pattern", "frame_count", "fps"):
        if key not in raw:
            raise MissingKeyError(f"manifest lacks {key!r}")

    fps = raw["fps"]
    if not isinstance(fps, (int, float)) or isinstance(fps, bool) or fps <= 0:
        raise BadTypeError(f"fps must be a positive number, got {fps!r}")
    frame_count = raw["frame_count"]
    if not isinstance(frame_count, int) or isinstance(frame_count, bool) or frame_count < 1:
        raise BadTypeError(f"frame_count must be a positive integer, got {frame_count!r}")

    fps_base = max(1, round(float(fps)))
    tc_text = raw.get("timecode_start", "00:00:00:00")
    if not isinstance(tc_text, str):
        raise BadTypeError("timecode_start must be HH:MM:SS:FF text")
    try:
        timecode = Timecode.from_text(tc_text, fps_base)
    except ValueError as exc:
        raise BadTypeError(str(exc)) from exc

    iso = _opt_int(raw, "iso")
    if iso is not None and iso <= 0:
        raise BadTypeError(f"iso must be positive, got {iso}")

    basic = BasicMetadata(
        fps=float(fps),
        timecode_start=timecode,
        shutter=_opt_positive(raw, "shutter"),
        aperture=_opt_positive(raw, "aperture"),
        iso=iso,
        focus=_opt_positive(raw, "focus"),
    )
    return ClipManifest(
        clip_id=ClipId(str(raw["clip_id"])),
        frames_dir=str(raw["frames_dir"]),
        frame_pattern=str(raw["frame_pattern"]),
        frame_count=frame_count,
        basic=basic,
        slate_template_id=raw.get("slate_template_id"),
        slate_scan_frames=_opt_int(raw, "slate_scan_frames"),
        bayer_pattern=raw.get("bayer_pattern"),
        lut=raw.get("lut"),
        scene_num=_opt_int(raw, "scene_num"),
        shot_num=_opt_int(raw, "shot_num"),
        take_num=_opt_int(raw, "take_num"),
    )


def manifest_to_dict(manifest: ClipManifest) -> dict:
    d: dict[str, Any] = {
        "clip_id": str(manifest.clip_id),
        "frames_dir": manifest.frames_dir,
        "frame_pattern": manifest.frame_pattern,
        "frame_count": manifest.frame_count,
        "fps": manifest.basic.fps,
        "timecode_start": manifest.basic.timecode_start.to_text(),
    }
    for key in ("shutter", "aperture", "iso", "focus"):
        val = getattr(manifest.basic, key)
        if val is not None:
            d[key] = val
    for key in (
        "slate_template_id",
        "slate_scan_frames",
        "bayer_pattern",
        "lut",
        "scene_num",
        "shot_num",
        "take_num",
    ):
        val = getattr(manifest, key)
        if val is not None:
            d[key] = val
    return d
