"""Canonical JSON sidecar for metadata records and the JSON-lines catalog.

The sidecar is the lossless interchange form: every field, confidence, and
provenance survives a round trip. The catalog is one sidecar object per
line, UTF-8, LF-terminated.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..model import (
    ActorPID,
    AnnotatedValue,
    BasicMetadata,
    CameraMove,
    ClipId,
    MetadataRecord,
    Provenance,
    SceneType,
    SemanticFields,
    ShotType,
    Timecode,
    TimeOfDay,
)


class SidecarError(ValueError):
    pass


class MissingKeyError(SidecarError):
    pass


class BadTypeError(SidecarError):
    pass


class DuplicateClipIdError(SidecarError):
    pass


_SCALAR_CODECS = {
    "scene_num": (lambda v: v, lambda r: _expect_int(r, "scene_num")),
    "shot_num": (lambda v: v, lambda r: _expect_int(r, "shot_num")),
    "take_num": (lambda v: v, lambda r: _expect_int(r, "take_num")),
    "camera_move": (lambda v: v.value, lambda r: _expect_enum(r, CameraMove)),
    "shot_type": (lambda v: v.value, lambda r: _expect_enum(r, ShotType)),
    "time": (lambda v: v.value, lambda r: _expect_enum(r, TimeOfDay)),
    "scene_type": (lambda v: v.value, lambda r: _expect_enum(r, SceneType)),
    "places": (lambda v: v, lambda r: _expect_str(r, "places")),
}

_SEMANTIC_KEYS = (
    "scene_num",
    "shot_num",
    "take_num",
    "camera_move",
    "shot_type",
    "actors",
    "time",
    "scene_type",
    "places",
    "objects",
)

_TOP_KEYS = ("clip_id", "basic", "semantic", "notes")


def _expect_int(raw: Any, key: str) -> int:
    if not isinstance(raw, int) or isinstance(raw, bool):
        raise BadTypeError(f"{key} must be an integer, got {raw!r}")
    return raw


def _expect_str(raw: Any, key: str) -> str:
    if not isinstance(raw, str):
        raise BadTypeError(f"{key} must be a string, got {raw!r}")
    return raw


def _expect_enum(raw: Any, enum_cls: type) -> Any:
    try:
        return enum_cls(raw)
    except ValueError:
        raise BadTypeError(f"{raw!r} is not a valid {enum_cls.__name__}") from None


def _annotated_to_dict(av: AnnotatedValue, encode) -> dict:
    return {
        "value": encode(av.value),
        "confidence": av.confidence,
        "provenance": av.provenance.value,
    }


def _annotated_from_dict(raw: Any, decode) -> AnnotatedValue:
    if not isinstance(raw, dict):
        raise BadTypeError(f"annotated value must be an object, got {raw!r}")
    for key in ("value", "confidence", "provenance"):
        if key not in raw:
            raise MissingKeyError(f"annotated value lacks {key!r}")
    provenance = _expect_enum(raw["provenance"], Provenance)
    confidence = raw["confidence"]
    if not isinstance(confidence, (int, float)) or isinstance(confidence, bool):
        raise BadTypeError(f"confidence must be a number, got {confidence!r}")
    return AnnotatedValue(decode(raw["value"]), float(confidence), provenance)


def _actor_to_dict(actor: ActorPID) -> dict:
    d: dict[str, Any] = {"pid": actor.pid}
    if actor.display_name is not None:
        d["display_name"] = actor.display_name
    return d


def _actor_from_dict(raw: Any) -> ActorPID:
    if not isinstance(raw, dict) or "pid" not in raw:
        raise BadTypeError(f"actor must be an object with a pid, got {raw!r}")
    return ActorPID(_expect_str(raw["pid"], "pid"), raw.get("display_name"))


def basic_to_dict(basic: BasicMetadata) -> dict:
    d: dict[str, Any] = {
        "fps": basic.fps,
        "timecode_start": {
            "tc": basic.timecode_start.to_text(),
            "fps_base": basic.timecode_start.fps_base,
        },
    }
    for key in ("shutter", "aperture", "iso", "focus"):
        val = getattr(basic, key)
        if val is not None:
            d[key] = val
    return d


def basic_from_dict(raw: Any) -> BasicMetadata:
    if not isinstance(raw, dict):
        raise BadTypeError("basic must be an object")
    if "fps" not in raw:
        raise MissingKeyError("basic lacks fps")
    if "timecode_start" not in raw:
        raise MissingKeyError("basic lacks timecode_start")
    tc_raw = raw["timecode_start"]
    if not isinstance(tc_raw, dict) or "tc" not in tc_raw or "fps_base" not in tc_raw:
        raise BadTypeError("timecode_start must be {tc, fps_base}")
    tc = Timecode.from_text(
        _expect_str(tc_raw["tc"], "tc"), _expect_int(tc_raw["fps_base"], "fps_base")
    )
    iso = raw.get("iso")
    if iso is not None:
        iso = _expect_int(iso, "iso")
    return BasicMetadata(
        fps=float(raw["fps"]),
        timecode_start=tc,
        shutter=raw.get("shutter"),
        aperture=raw.get("aperture"),
        iso=iso,
        focus=raw.get("focus"),
    )


def semantic_to_dict(sem: SemanticFields) -> dict:
    d: dict[str, Any] = {}
    for key in _SEMANTIC_KEYS:
        if key == "actors":
            if sem.actors:
                d["actors"] = [
                    _annotated_to_dict(a, _actor_to_dict) for a in sem.actors
                ]
        elif key == "objects":
            if sem.objects:
                d["objects"] = [
                    _annotated_to_dict(o, lambda v: v) for o in sem.objects
                ]
        else:
            av = getattr(sem, key)
            if av is not None:
                d[key] = _annotated_to_dict(av, _SCALAR_CODECS[key][0])
    return d


def semantic_from_dict(raw: Any) -> SemanticFields:
    if not isinstance(raw, dict):
        raise BadTypeError("semantic must be an object")
    kwargs: dict[str, Any] = {}
    for key, payload in raw.items():
        if key == "actors":
            kwargs["actors"] = tuple(
                _annotated_from_dict(a, _actor_from_dict) for a in payload
            )
        elif key == "objects":
            kwargs["objects"] = tuple(
                _annotated_from_dict(o, lambda v: _expect_str(v, "object")) for o in payload
            )
        elif key in _SCALAR_CODECS:
            kwargs[key] = _annotated_from_dict(payload, _SCALAR_CODECS[key][1])
        # Unknown semantic keys are tolerated and dropped; top-level unknown
        # keys are what the extras map preserves.
    return SemanticFields(**kwargs)


def record_to_dict(record: MetadataRecord) -> dict:
    d: dict[str, Any] = {
        "clip_id": str(record.clip_id),
        "basic": basic_to_dict(record.basic),
        "semantic": semantic_to_dict(record.semantic),
    }
    if record.notes is not None:
        d["notes"] = record.notes
    for key, value in record.extras.items():
        if key not in _TOP_KEYS:
            d[key] = value
    return d


def record_from_dict(raw: Any) -> MetadataRecord:
    if not isinstance(raw, dict):
        raise BadTypeError("record must be a JSON object")
    for key in ("clip_id", "basic", "semantic"):
        if key not in raw:
            raise MissingKeyError(f"record lacks {key!r}")
    notes = raw.get("notes")
    if notes is not None:
        notes = _expect_str(notes, "notes")
    extras = {k: v for k, v in raw.items() if k not in _TOP_KEYS}
    return MetadataRecord(
        clip_id=ClipId(_expect_str(raw["clip_id"], "clip_id")),
        basic=basic_from_dict(raw["basic"]),
        semantic=semantic_from_dict(raw["semantic"]),
        notes=notes,
        extras=extras,
    )


def dumps_record(record: MetadataRecord) -> str:
    """Serialize one record to its canonical single-line JSON form."""
    return json.dumps(record_to_dict(record), ensure_ascii=False, separators=(",", ":"))


def loads_record(text: str) -> MetadataRecord:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SidecarError(f"record is not valid JSON: {exc}") from exc
    return record_from_dict(raw)


def read_catalog(path: str | Path) -> list[MetadataRecord]:
    """Read a JSON-lines catalog, preserving file order.

    Raises DuplicateClipIdError when two lines share a clip id.
    """

    records: list[MetadataRecord] = []
    seen: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = loads_record(line)
        except SidecarError as exc:
            raise SidecarError(f"{path}:{lineno}: {exc}") from exc
        key = str(record.clip_id)
        if key in seen:
            raise DuplicateClipIdError(f"{path}:{lineno}: duplicate clip id {key!r}")
        seen.add(key)
        records.append(record)
    return records


def write_catalog(path: str | Path, records: list[MetadataRecord]) -> None:
    seen: set[str] = set()
    for record in records:
        key = str(record.clip_id)
        if key in seen:
            raise DuplicateClipIdError(f"duplicate clip id {key!r}")
        seen.add(key)
    body = "".join(dumps_record(r) + "\n" for r in records)
    Path(path).write_text(body, encoding="utf-8", newline="\n")
