"""Merge per-source metadata candidates into one record per clip.

Sources rank by the profile's provenance precedence (default: manual beats
slate OCR beats annotators beats manifest beats camera). Losing candidates
are not discarded silently; they land in the record's notes so a human
checking the dailies can see what was overruled.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .formats.manifest import ClipManifest
from .formats.sidecar import (
    DuplicateClipIdError,
    dumps_record,
    read_catalog,
)
from .model import (
    ActorPID,
    AnnotatedValue,
    ClipId,
    MetadataRecord,
    Provenance,
    QueryPredicate,
    SemanticFields,
    match,
)
from .profile import UserProfile
from .slate import SlateReading


class FusionError(ValueError):
    pass


class ClipMismatchError(FusionError):
    """Inputs claim different clip ids."""


# Scalar semantic attributes fusion resolves one winner for.
_SCALAR_FIELDS = (
    "scene_num",
    "shot_num",
    "take_num",
    "camera_move",
    "shot_type",
    "time",
    "scene_type",
    "places",
)
_TUPLE_FIELDS = ("actors", "objects")

# Tie-break order when precedence rank and confidence both match.
_SOURCE_ORDER = {
    Provenance.MANUAL: 0,
    Provenance.SLATE_OCR: 1,
    Provenance.ANNOTATOR: 2,
    Provenance.MANIFEST: 3,
    Provenance.CAMERA: 4,
    Provenance.FUSED: 5,
}


@dataclass(frozen=True)
class AnnotationBundle:
    """Everything the automatic annotators produced for one clip."""

    clip_id: ClipId
    camera_move: AnnotatedValue | None = None
    shot_type: AnnotatedValue | None = None
    actors: tuple[AnnotatedValue, ...] = ()
    time: AnnotatedValue | None = None
    scene_type: AnnotatedValue | None = None
    places: AnnotatedValue | None = None
    objects: tuple[AnnotatedValue, ...] = ()


@dataclass(frozen=True)
class _Candidate:
    payload: Any  # AnnotatedValue for scalars, tuple of them for lists
    confidence: float
    provenance: Provenance


def _fmt_value(value: Any) -> str:
    if isinstance(value, ActorPID):
        return value.pid
    if hasattr(value, "value") and not isinstance(value, AnnotatedValue):
        return str(value.value)  # enum member
    return str(value)


def _note(name: str, cand: _Candidate) -> str:
    if isinstance(cand.payload, tuple):
        text = "+".join(_fmt_value(av.value) for av in cand.payload) or "(empty)"
    else:
        text = _fmt_value(cand.payload.value)
    return f"{name}={text}({cand.provenance.value},{cand.confidence:.2f})"


def _resolve(
    name: str,
    candidates: Sequence[_Candidate],
    profile: UserProfile,
) -> tuple[Any, list[str]]:
    """Pick one winner; everything else becomes an audit note.

    Candidates below min_confidence cannot win but are still noted, so a
    reviewer sees the value the threshold suppressed.
    """

    survivors = [c for c in candidates if c.confidence >= profile.min_confidence]
    if not survivors:
        return None, [_note(name, c) for c in candidates]
    ranked = sorted(
        survivors,
        key=lambda c: (
            profile.rank(c.provenance),
            -c.confidence,
            _SOURCE_ORDER.get(c.provenance, len(_SOURCE_ORDER)),
        ),
    )
    winner = ranked[0]
    notes = [_note(name, c) for c in candidates if c is not winner]
    return winner.payload, notes


def _tuple_candidate(
    values: tuple[AnnotatedValue, ...], profile: UserProfile
) -> _Candidate | None:
    """List-valued fields fuse as a block; members are threshold-filtered."""
    kept = tuple(av for av in values if av.confidence >= profile.min_confidence)
    if not kept:
        return None
    conf = min(av.confidence for av in kept)
    return _Candidate(kept, conf, kept[0].provenance)


def fuse(
    clip: ClipManifest,
    slate: SlateReading | None,
    annotations: AnnotationBundle,
    profile: UserProfile,
    manual: Mapping[str, AnnotatedValue] | None = None,
) -> MetadataRecord:
    """Resolve all candidate values for one clip into a MetadataRecord.

    Selection in the profile does not narrow what is stored: every resolved
    field lands in the record, and selected_labels only filters export
    columns later.
    """

    if str(annotations.clip_id) != str(clip.clip_id):
        raise ClipMismatchError(
            f"annotations are for {annotations.clip_id}, clip is {clip.clip_id}"
        )
    manual = dict(manual or {})
    for key in manual:
        if key not in _SCALAR_FIELDS and key not in _TUPLE_FIELDS:
            raise FusionError(f"manual override names unknown field {key!r}")

    candidates: dict[str, list[_Candidate]] = {n: [] for n in _SCALAR_FIELDS}

    if slate is not None:
        for fname, sfield in sorted(slate.fields.items()):
            if fname in _SCALAR_FIELDS and sfield.value is not None:
                av = AnnotatedValue(
                    sfield.value, sfield.confidence, Provenance.SLATE_OCR
                )
                candidates[fname].append(
                    _Candidate(av, sfield.confidence, Provenance.SLATE_OCR)
                )

    for fname in ("camera_move", "shot_type", "time", "scene_type", "places"):
        av = getattr(annotations, fname)
        if av is not None:
            candidates[fname].append(_Candidate(av, av.confidence, av.provenance))

    for fname in ("scene_num", "shot_num", "take_num"):
        hint = getattr(clip, fname)
        if hint is not None:
            av = AnnotatedValue(hint, 1.0, Provenance.MANIFEST)
            candidates[fname].append(_Candidate(av, 1.0, Provenance.MANIFEST))

    for fname in _SCALAR_FIELDS:
        if fname in manual:
            av = manual[fname]
            candidates[fname].append(_Candidate(av, av.confidence, av.provenance))

    resolved: dict[str, Any] = {}
    notes: list[str] = []
    for fname in _SCALAR_FIELDS:
        value, field_notes = _resolve(fname, candidates[fname], profile)
        resolved[fname] = value
        notes.extend(field_notes)

    for fname in _TUPLE_FIELDS:
        cands: list[_Candidate] = []
        base = getattr(annotations, fname)
        if base:
            c = _tuple_candidate(base, profile)
            if c is not None:
                cands.append(c)
        if fname in manual:
            override = manual[fname]
            if not isinstance(override, tuple):
                raise FusionError(f"manual override for {fname} must be a tuple")
            c = _tuple_candidate(override, profile)
            if c is not None:
                cands.append(c)
        value, field_notes = _resolve(fname, cands, profile)
        resolved[fname] = value if value is not None else ()
        notes.extend(field_notes)

    semantic = SemanticFields(**resolved)
    return MetadataRecord(
        clip_id=clip.clip_id,
        basic=clip.basic,
        semantic=semantic,
        notes="; ".join(notes) if notes else None,
    )


# --- catalog ---------------------------------------------------------------


def catalog_append(path: str | Path, record: MetadataRecord) -> None:
    """Append one record to the JSON-lines catalog, atomically.

    The whole file is rewritten through a temp file in the same directory so
    a crash mid-write never leaves a torn line. Single-writer discipline is
    the caller's job; concurrent appends are not arbitrated here.
    """

    path = Path(path)
    existing = read_catalog(path) if path.exists() else []
    key = str(record.clip_id)
    for rec in existing:
        if str(rec.clip_id) == key:
            raise DuplicateClipIdError(f"clip id {key!r} already cataloged")
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            for rec in existing:
                fh.write(dumps_record(rec) + "\n")
            fh.write(dumps_record(record) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def catalog_query(path: str | Path, predicate: QueryPredicate) -> list[ClipId]:
    """Clip ids of catalog records satisfying every predicate clause."""
    return [rec.clip_id for rec in read_catalog(path) if match(rec, predicate)]
