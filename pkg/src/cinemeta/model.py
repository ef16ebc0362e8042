"""Core metadata schema: clip identity, camera-recorded basics, semantic labels.

Every extracted value is wrapped in :class:`AnnotatedValue`, carrying the
confidence of the extractor and the provenance of the source, so downstream
fusion and audit trails can reason about where a value came from.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Any, Generic, TypeVar

V = TypeVar("V")

_FORBIDDEN_ID_CHARS = ("\t", "\n", "\r", ",")


class PredicateError(ValueError):
    """Base class for query predicate parse failures."""


class UnknownFieldError(PredicateError):
    pass


class BadValueError(PredicateError):
    pass


class Provenance(enum.Enum):
    """Where a metadata value originated."""

    CAMERA = "camera"
    SLATE_OCR = "slate_ocr"
    ANNOTATOR = "annotator"
    MANIFEST = "manifest"
    MANUAL = "manual"
    FUSED = "fused"


class CameraMove(enum.Enum):
    # pedestal/dolly/truck/tilt/pan/zoom are the classic grip vocabulary;
    # static/handheld/unknown give the classifier honest rejection classes.
    STATIC = "static"
    PAN = "pan"
    TILT = "tilt"
    TRUCK = "truck"
    PEDESTAL = "pedestal"
    DOLLY = "dolly"
    ZOOM = "zoom"
    HANDHELD = "handheld"
    UNKNOWN = "unknown"


class ShotType(enum.Enum):
    """Framing breadth, ordered broadest to tightest."""

    FULL = "full"
    MEDIUM_FULL = "medium_full"
    MEDIUM = "medium"
    CLOSE = "close"
    CLOSE_UP = "close_up"

    @property
    def tightness(self) -> int:
        return _SHOT_ORDER.index(self)


_SHOT_ORDER = [
    ShotType.FULL,
    ShotType.MEDIUM_FULL,
    ShotType.MEDIUM,
    ShotType.CLOSE,
    ShotType.CLOSE_UP,
]


class TimeOfDay(enum.Enum):
    DAY = "Day"
    NIGHT = "Night"


class SceneType(enum.Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class ClipId:
    """Identity of one take, unique within a catalog.

    Must stay delimiter-safe: no tab, newline, or comma, so the id can be
    embedded verbatim in ALE, CSV, and predicate text.
    """

    value: str

    def __post_init__(self) -> None:
        if not self.value:
            raise ValueError("clip id must be non-empty")
        for ch in _FORBIDDEN_ID_CHARS:
            if ch in self.value:
                raise ValueError(f"clip id contains forbidden character {ch!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AnnotatedValue(Generic[V]):
    """A metadata value plus extraction confidence and provenance."""

    value: V
    confidence: float
    provenance: Provenance

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.provenance in (Provenance.CAMERA, Provenance.MANIFEST):
            if self.confidence != 1.0:
                raise ValueError(
                    f"{self.provenance.value} values are authoritative and must "
                    f"carry confidence 1.0, got {self.confidence}"
                )


_TC_RE = re.compile(r"^(\d{2,}):(\d{2}):(\d{2}):(\d{2,})$")


@dataclass(frozen=True)
class Timecode:
    hh: int
    mm: int
    ss: int
    ff: int
    fps_base: int

    def __post_init__(self) -> None:
        if self.fps_base <= 0:
            raise ValueError("fps_base must be positive")
        if min(self.hh, self.mm, self.ss, self.ff) < 0:
            raise ValueError("timecode components must be non-negative")
        if self.mm >= 60 or self.ss >= 60:
            raise ValueError("minutes and seconds must be < 60")
        if self.ff >= self.fps_base:
            raise ValueError(f"frame {self.ff} >= fps_base {self.fps_base}")

    def to_text(self) -> str:
        return f"{self.hh:02d}:{self.mm:02d}:{self.ss:02d}:{self.ff:02d}"

    @classmethod
    def from_text(cls, text: str, fps_base: int) -> "Timecode":
        m = _TC_RE.match(text)
        if m is None:
            raise ValueError(f"bad timecode text {text!r}")
        hh, mm, ss, ff = (int(g) for g in m.groups())
        return cls(hh, mm, ss, ff, fps_base)


@dataclass(frozen=True)
class BasicMetadata:
    """Camera-recorded parameters of a take."""

    fps: float
    timecode_start: Timecode
    shutter: float | None = None
    aperture: float | None = None
    iso: int | None = None
    focus: float | None = None

    def __post_init__(self) -> None:
        for name in ("fps", "shutter", "aperture", "iso", "focus"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValueError(f"{name} must be strictly positive, got {val}")


@dataclass(frozen=True)
class ActorPID:
    """Production identity of a performer (gallery key, optional display name)."""

    pid: str
    display_name: str | None = None

    def __post_init__(self) -> None:
        if not self.pid:
            raise ValueError("actor pid must be non-empty")


@dataclass(frozen=True)
class SemanticFields:
    """The ten extracted label classes of one clip.

    Scalar labels are optional; actors and objects are (possibly empty)
    tuples since several can co-occur in a take.
    """

    scene_num: AnnotatedValue[int] | None = None
    shot_num: AnnotatedValue[int] | None = None
    take_num: AnnotatedValue[int] | None = None
    camera_move: AnnotatedValue[CameraMove] | None = None
    shot_type: AnnotatedValue[ShotType] | None = None
    actors: tuple[AnnotatedValue[ActorPID], ...] = ()
    time: AnnotatedValue[TimeOfDay] | None = None
    scene_type: AnnotatedValue[SceneType] | None = None
    places: AnnotatedValue[str] | None = None
    objects: tuple[AnnotatedValue[str], ...] = ()

    def __post_init__(self) -> None:
        for name in ("scene_num", "shot_num", "take_num"):
            av = getattr(self, name)
            if av is not None and av.value < 0:
                raise ValueError(f"{name} must be non-negative, got {av.value}")


@dataclass(frozen=True)
class MetadataRecord:
    """One clip's fused metadata: identity, basics, semantics, audit notes.

    ``extras`` preserves unknown top-level keys found when parsing a sidecar
    written by a newer tool, so re-serializing does not drop them.
    """

    clip_id: ClipId
    basic: BasicMetadata
    semantic: SemanticFields = field(default_factory=SemanticFields)
    notes: str | None = None
    extras: dict[str, Any] = field(default_factory=dict)


# --- Label registry -------------------------------------------------------
#
# Canonical label names, used by user profiles, predicates, and exports.
# Keys are the export-facing names; each maps to the SemanticFields attribute
# and the clause kind used for predicate validation.

LABEL_FIELDS: dict[str, tuple[str, str]] = {
    "SceneNum": ("scene_num", "int"),
    "ShotNum": ("shot_num", "int"),
    "TakeNum": ("take_num", "int"),
    "CameraMove": ("camera_move", "enum"),
    "ShotType": ("shot_type", "enum"),
    "ActorPID": ("actors", "actor_list"),
    "Time": ("time", "enum"),
    "SceneType": ("scene_type", "enum"),
    "Places": ("places", "str"),
    "ObjectType": ("objects", "str_list"),
}

LABEL_ENUMS: dict[str, type[enum.Enum]] = {
    "CameraMove": CameraMove,
    "ShotType": ShotType,
    "Time": TimeOfDay,
    "SceneType": SceneType,
}

#: Labels accepted in user profiles: the semantic labels plus clip identity
#: and the free-text notes column.
SELECTABLE_LABELS: tuple[str, ...] = ("Name",) + tuple(LABEL_FIELDS) + ("Notes",)


@dataclass(frozen=True)
class QueryPredicate:
    """Conjunction of (label, value) clauses over semantic fields.

    Values are already validated/coerced: ints for slate labels, enum members
    for enum labels, raw strings for Places/ActorPID/ObjectType.
    """

    clauses: tuple[tuple[str, Any], ...] = ()


def parse_predicate(text: str) -> QueryPredicate:
    """Parse ``Field=Value(,Field=Value)*`` into a validated predicate.

    An empty string parses to the empty conjunction (matches everything).
    """

    text = text.strip()
    if not text:
        return QueryPredicate()
    clauses: list[tuple[str, Any]] = []
    for part in text.split(","):
        if "=" not in part:
            raise BadValueError(f"clause {part!r} is not Field=Value")
        name, raw = part.split("=", 1)
        name = name.strip()
        raw = raw.strip()
        if name not in LABEL_FIELDS:
            raise UnknownFieldError(f"unknown field {name!r}")
        kind = LABEL_FIELDS[name][1]
        if kind == "int":
            try:
                value: Any = int(raw)
            except ValueError:
                raise BadValueError(f"{name} expects an integer, got {raw!r}") from None
            if value < 0:
                raise BadValueError(f"{name} must be non-negative, got {raw!r}")
        elif kind == "enum":
            enum_cls = LABEL_ENUMS[name]
            try:
                value = enum_cls(raw)
            except ValueError:
                vocab = ", ".join(m.value for m in enum_cls)
                raise BadValueError(
                    f"{name} expects one of [{vocab}], got {raw!r}"
                ) from None
        else:
            if not raw:
                raise BadValueError(f"{name} expects a non-empty value")
            value = raw
        clauses.append((name, value))
    return QueryPredicate(tuple(clauses))


def match(record: MetadataRecord, predicate: QueryPredicate) -> bool:
    """True iff every clause matches; clauses on absent fields are false."""

    for name, expected in predicate.clauses:
        attr, kind = LABEL_FIELDS[name]
        got = getattr(record.semantic, attr)
        if kind == "actor_list":
            if not any(a.value.pid == expected for a in got):
                return False
        elif kind == "str_list":
            if not any(o.value == expected for o in got):
                return False
        else:
            if got is None or got.value != expected:
                return False
    return True
