"""Record generators shared across the format and acceptance tests.

Two flavors: a seeded-RNG zoo for bulk round-trip runs (fast, covers the
full value space without hypothesis overhead) and hypothesis strategies for
the property tests proper.
"""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from cinemeta.model import (
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
    TimeOfDay,
    Timecode,
)

# Vocabulary for text-valued fields. Kept free of ';' (the list separator),
# tabs, and commas so values survive every export projection unchanged;
# the lossy edges get their own dedicated tests.
PLACES = ("street", "kitchen", "forest", "rooftop", "station", "beach", "plaza")
OBJECTS = ("car", "lamp", "umbrella", "bicycle", "dog", "phone")
PIDS = ("P001", "P002", "P003", "P017", "P104")

_SOFT_PROVENANCE = (
    Provenance.SLATE_OCR,
    Provenance.ANNOTATOR,
    Provenance.MANUAL,
    Provenance.FUSED,
)


def _annot(rng: np.random.Generator, value) -> AnnotatedValue:
    prov = _SOFT_PROVENANCE[rng.integers(len(_SOFT_PROVENANCE))]
    conf = float(np.round(rng.random(), 6))
    return AnnotatedValue(value, conf, prov)


def random_record(rng: np.random.Generator, index: int) -> MetadataRecord:
    """One record with every field independently present or absent."""

    fps_base = int(rng.choice([24, 25, 30, 48]))
    tc = Timecode(
        int(rng.integers(0, 24)),
        int(rng.integers(0, 60)),
        int(rng.integers(0, 60)),
        int(rng.integers(0, fps_base)),
        fps_base,
    )
    basic = BasicMetadata(
        fps=float(fps_base),
        timecode_start=tc,
        shutter=float(rng.integers(24, 2000)) if rng.random() < 0.5 else None,
        aperture=round(float(rng.uniform(1.4, 22.0)), 2) if rng.random() < 0.5 else None,
        iso=int(rng.choice([200, 800, 3200])) if rng.random() < 0.5 else None,
        focus=round(float(rng.uniform(0.3, 50.0)), 3) if rng.random() < 0.5 else None,
    )

    def maybe(builder, p=0.7):
        return builder() if rng.random() < p else None

    n_actors = int(rng.integers(0, 3))
    actor_pids = list(rng.choice(PIDS, size=n_actors, replace=False)) if n_actors else []
    n_objects = int(rng.integers(0, 3))
    object_labels = (
        list(rng.choice(OBJECTS, size=n_objects, replace=False)) if n_objects else []
    )
    semantic = SemanticFields(
        scene_num=maybe(lambda: _annot(rng, int(rng.integers(0, 120)))),
        shot_num=maybe(lambda: _annot(rng, int(rng.integers(0, 40)))),
        take_num=maybe(lambda: _annot(rng, int(rng.integers(1, 20)))),
        camera_move=maybe(lambda: _annot(rng, CameraMove(rng.choice([m.value for m in CameraMove])))),
        shot_type=maybe(lambda: _annot(rng, ShotType(rng.choice([s.value for s in ShotType])))),
        actors=tuple(_annot(rng, ActorPID(str(p))) for p in actor_pids),
        time=maybe(lambda: _annot(rng, TimeOfDay(rng.choice(["Day", "Night"])))),
        scene_type=maybe(lambda: _annot(rng, SceneType(rng.choice(["Inside", "Outside"])))),
        places=maybe(lambda: _annot(rng, str(rng.choice(PLACES)))),
        objects=tuple(_annot(rng, str(o)) for o in object_labels),
    )
    notes = None
    if rng.random() < 0.4:
        notes = f"scene_num={int(rng.integers(0, 99))}(manifest,1.00)"
    return MetadataRecord(
        clip_id=ClipId(f"A{index // 100:03d}_C{index % 100:03d}"),
        basic=basic,
        semantic=semantic,
        notes=notes,
    )


def golden_profile():
    from cinemeta.profile import UserProfile

    return UserProfile(
        selected_labels=(
            "Name",
            "SceneNum",
            "ShotNum",
            "TakeNum",
            "CameraMove",
            "ShotType",
            "ActorPID",
            "Time",
            "SceneType",
            "Places",
            "ObjectType",
            "Notes",
        ),
        output_format="ale",
        column_renames={"SceneNum": "Scene", "ActorPID": "Cast"},
    )


def golden_records() -> list[MetadataRecord]:
    """Three hand-pinned records backing the byte-stable export goldens."""

    def annot(value, conf, prov):
        return AnnotatedValue(value, conf, prov)

    tc = Timecode(1, 0, 0, 0, 24)
    basic = BasicMetadata(fps=24.0, timecode_start=tc, iso=800)
    return [
        MetadataRecord(
            clip_id=ClipId("A001_C001"),
            basic=basic,
            semantic=SemanticFields(
                scene_num=annot(5, 0.92, Provenance.SLATE_OCR),
                shot_num=annot(1, 0.92, Provenance.SLATE_OCR),
                take_num=annot(2, 0.92, Provenance.SLATE_OCR),
                camera_move=annot(CameraMove.PAN, 1.0, Provenance.ANNOTATOR),
                time=annot(TimeOfDay.DAY, 0.75, Provenance.ANNOTATOR),
                scene_type=annot(SceneType.OUTSIDE, 0.9, Provenance.ANNOTATOR),
                places=annot("street", 0.9, Provenance.ANNOTATOR),
                objects=(annot("car", 0.85, Provenance.ANNOTATOR),),
            ),
            notes="scene_num=4(manifest,1.00)",
        ),
        MetadataRecord(
            clip_id=ClipId("A001_C002"),
            basic=basic,
            semantic=SemanticFields(
                scene_num=annot(5, 0.92, Provenance.SLATE_OCR),
                shot_num=annot(2, 0.92, Provenance.SLATE_OCR),
                take_num=annot(1, 0.92, Provenance.SLATE_OCR),
                camera_move=annot(CameraMove.STATIC, 1.0, Provenance.ANNOTATOR),
                shot_type=annot(ShotType.CLOSE_UP, 0.95, Provenance.ANNOTATOR),
                actors=(
                    annot(ActorPID("P001"), 0.9, Provenance.ANNOTATOR),
                    annot(ActorPID("P002"), 0.82, Provenance.ANNOTATOR),
                ),
                time=annot(TimeOfDay.DAY, 0.52, Provenance.ANNOTATOR),
                scene_type=annot(SceneType.INSIDE, 0.9, Provenance.ANNOTATOR),
                places=annot("kitchen", 0.9, Provenance.ANNOTATOR),
            ),
        ),
        MetadataRecord(
            clip_id=ClipId("B002_C003"),
            basic=basic,
            semantic=SemanticFields(
                scene_num=annot(8, 1.0, Provenance.MANIFEST),
                camera_move=annot(CameraMove.ZOOM, 1.0, Provenance.ANNOTATOR),
                shot_type=annot(ShotType.MEDIUM_FULL, 0.4, Provenance.ANNOTATOR),
                time=annot(TimeOfDay.NIGHT, 1.0, Provenance.ANNOTATOR),
                scene_type=annot(SceneType.OUTSIDE, 0.8, Provenance.ANNOTATOR),
                places=annot("forest", 0.8, Provenance.ANNOTATOR),
            ),
            notes='comma, "quote", done',
        ),
    ]


# --- hypothesis strategies ---------------------------------------------------

clip_ids = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Nd"), whitelist_characters="_-"),
    min_size=1,
    max_size=12,
).map(ClipId)

confidences = st.floats(min_value=0.0, max_value=1.0, allow_nan=False).map(
    lambda c: float(np.round(c, 6))
)


def annotated(values: st.SearchStrategy) -> st.SearchStrategy:
    return st.builds(
        AnnotatedValue,
        value=values,
        confidence=confidences,
        provenance=st.sampled_from(_SOFT_PROVENANCE),
    )


@st.composite
def timecodes(draw) -> Timecode:
    fps_base = draw(st.sampled_from([24, 25, 30, 48, 60]))
    return Timecode(
        draw(st.integers(0, 99)),
        draw(st.integers(0, 59)),
        draw(st.integers(0, 59)),
        draw(st.integers(0, fps_base - 1)),
        fps_base,
    )


basics = st.builds(
    BasicMetadata,
    fps=st.sampled_from([23.976, 24.0, 25.0, 29.97, 30.0, 48.0]),
    timecode_start=timecodes(),
    shutter=st.none() | st.floats(min_value=1.0, max_value=4000.0, allow_nan=False),
    aperture=st.none() | st.floats(min_value=0.9, max_value=32.0, allow_nan=False),
    iso=st.none() | st.integers(min_value=50, max_value=25600),
    focus=st.none() | st.floats(min_value=0.1, max_value=999.0, allow_nan=False),
)


@st.composite
def semantics(draw) -> SemanticFields:
    opt = lambda s: draw(st.none() | annotated(s))  # noqa: E731
    pids = draw(st.lists(st.sampled_from(PIDS), unique=True, max_size=3))
    objs = draw(st.lists(st.sampled_from(OBJECTS), unique=True, max_size=3))
    return SemanticFields(
        scene_num=opt(st.integers(0, 999)),
        shot_num=opt(st.integers(0, 99)),
        take_num=opt(st.integers(0, 99)),
        camera_move=opt(st.sampled_from(CameraMove)),
        shot_type=opt(st.sampled_from(ShotType)),
        actors=tuple(draw(annotated(st.just(ActorPID(p)))) for p in pids),
        time=opt(st.sampled_from(TimeOfDay)),
        scene_type=opt(st.sampled_from(SceneType)),
        places=opt(st.sampled_from(PLACES)),
        objects=tuple(draw(annotated(st.just(o))) for o in objs),
    )


records = st.builds(
    MetadataRecord,
    clip_id=clip_ids,
    basic=basics,
    semantic=semantics(),
    notes=st.none() | st.text(alphabet=st.characters(blacklist_characters="\t\r\n", blacklist_categories=("Cs", "Cc")), max_size=40),
)


def unique_records(min_size: int = 1, max_size: int = 6) -> st.SearchStrategy:
    """Record lists with pairwise-distinct clip ids (catalog precondition)."""
    return st.lists(
        records, min_size=min_size, max_size=max_size, unique_by=lambda r: str(r.clip_id)
    )
