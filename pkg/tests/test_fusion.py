"""Candidate fusion, audit notes, and the JSON-lines catalog."""

import numpy as np
import pytest

import helpers
from cinemeta import geometry
from cinemeta.formats.manifest import ClipManifest
from cinemeta.formats.sidecar import DuplicateClipIdError, read_catalog
from cinemeta.fusion import (
    AnnotationBundle,
    ClipMismatchError,
    FusionError,
    catalog_append,
    catalog_query,
    fuse,
)
from cinemeta.model import (
    ActorPID,
    AnnotatedValue,
    BasicMetadata,
    CameraMove,
    ClipId,
    Provenance,
    Timecode,
    match,
    parse_predicate,
)
from cinemeta.profile import UserProfile
from cinemeta.slate import Alignment, SlateField, SlateReading

CLIP = "A001_C001"
PROFILE = UserProfile(selected_labels=("Name", "SceneNum", "CameraMove"))


def _manifest(scene=None, shot=None, take=None, clip=CLIP):
    return ClipManifest(
        clip_id=ClipId(clip),
        frames_dir="frames",
        frame_pattern="frame_%04d.ppm",
        frame_count=10,
        basic=BasicMetadata(fps=24.0, timecode_start=Timecode(1, 0, 0, 0, 24)),
        scene_num=scene,
        shot_num=shot,
        take_num=take,
    )


def _reading(**fields):
    alignment = Alignment(geometry.Homography(np.eye(3)), 20, 18)
    return SlateReading(2, alignment, dict(fields))


def _bundle(clip=CLIP, **kw):
    return AnnotationBundle(clip_id=ClipId(clip), **kw)


class TestFuse:
    def test_slate_beats_manifest_and_loser_is_noted(self):
        record = fuse(
            _manifest(scene=11),
            _reading(scene_num=SlateField("12", 0.92, 12)),
            _bundle(),
            PROFILE,
        )
        assert record.semantic.scene_num.value == 12
        assert record.semantic.scene_num.provenance is Provenance.SLATE_OCR
        assert "scene_num=11(manifest,1.00)" in record.notes

    def test_absent_sources_leave_fields_none(self):
        record = fuse(_manifest(), None, _bundle(), PROFILE)
        assert record.semantic.scene_num is None
        assert record.semantic.time is None
        assert record.semantic.actors == ()
        assert record.notes is None
        assert record.basic.fps == 24.0
        assert str(record.clip_id) == CLIP

    def test_low_confidence_value_suppressed_but_noted(self):
        profile = UserProfile(selected_labels=("Name",), min_confidence=0.8)
        move = AnnotatedValue(CameraMove.PAN, 0.6, Provenance.ANNOTATOR)
        record = fuse(_manifest(), None, _bundle(camera_move=move), profile)
        assert record.semantic.camera_move is None
        assert "camera_move=pan(annotator,0.60)" in record.notes

    def test_clip_mismatch_rejected(self):
        with pytest.raises(ClipMismatchError):
            fuse(_manifest(), None, _bundle(clip="B999_C999"), PROFILE)

    def test_manual_override_beats_slate(self):
        manual = {"scene_num": AnnotatedValue(99, 1.0, Provenance.MANUAL)}
        record = fuse(
            _manifest(),
            _reading(scene_num=SlateField("12", 0.92, 12)),
            _bundle(),
            PROFILE,
            manual=manual,
        )
        assert record.semantic.scene_num.value == 99
        assert "scene_num=12(slate_ocr,0.92)" in record.notes

    def test_manual_override_unknown_field(self):
        manual = {"mood": AnnotatedValue("tense", 1.0, Provenance.MANUAL)}
        with pytest.raises(FusionError, match="unknown field"):
            fuse(_manifest(), None, _bundle(), PROFILE, manual=manual)

    def test_precedence_reorder_flips_winner(self):
        profile = UserProfile(
            selected_labels=("Name",),
            precedence=(
                Provenance.MANUAL,
                Provenance.MANIFEST,
                Provenance.SLATE_OCR,
                Provenance.ANNOTATOR,
                Provenance.CAMERA,
            ),
        )
        record = fuse(
            _manifest(scene=11),
            _reading(scene_num=SlateField("12", 0.92, 12)),
            _bundle(),
            profile,
        )
        assert record.semantic.scene_num.value == 11
        assert record.semantic.scene_num.provenance is Provenance.MANIFEST

    def test_raising_threshold_never_adds_fields(self):
        rng = np.random.default_rng(19)
        scalars = ("scene_num", "shot_num", "take_num", "camera_move", "time")
        for _ in range(50):
            slate = _reading(
                scene_num=SlateField("5", float(rng.random()), 5),
                shot_num=SlateField("2", float(rng.random()), 2),
            )
            bundle = _bundle(
                camera_move=AnnotatedValue(
                    CameraMove.PAN, float(rng.random()), Provenance.ANNOTATOR
                ),
                time=helpers.random_record(rng, 0).semantic.time,
            )
            lo, hi = sorted(rng.random(2))
            low = fuse(
                _manifest(take=3),
                slate,
                bundle,
                UserProfile(selected_labels=("Name",), min_confidence=float(lo)),
            )
            high = fuse(
                _manifest(take=3),
                slate,
                bundle,
                UserProfile(selected_labels=("Name",), min_confidence=float(hi)),
            )
            for name in scalars:
                if getattr(high.semantic, name) is not None:
                    assert getattr(low.semantic, name) is not None

    def test_tuple_members_filtered_by_threshold(self):
        profile = UserProfile(selected_labels=("Name",), min_confidence=0.5)
        actors = (
            AnnotatedValue(ActorPID("P001"), 0.9, Provenance.ANNOTATOR),
            AnnotatedValue(ActorPID("P002"), 0.3, Provenance.ANNOTATOR),
        )
        record = fuse(_manifest(), None, _bundle(actors=actors), profile)
        assert [av.value for av in record.semantic.actors] == [ActorPID("P001")]

    def test_tuple_manual_override_wins_and_notes_loser(self):
        actors = (
            AnnotatedValue(ActorPID("P001"), 0.9, Provenance.ANNOTATOR),
            AnnotatedValue(ActorPID("P002"), 0.82, Provenance.ANNOTATOR),
        )
        manual = {
            "actors": (AnnotatedValue(ActorPID("P009"), 1.0, Provenance.MANUAL),)
        }
        record = fuse(
            _manifest(), None, _bundle(actors=actors), PROFILE, manual=manual
        )
        assert [av.value.pid for av in record.semantic.actors] == ["P009"]
        assert "actors=P001+P002(annotator,0.82)" in record.notes

    def test_tuple_manual_override_must_be_tuple(self):
        manual = {"actors": AnnotatedValue(ActorPID("P009"), 1.0, Provenance.MANUAL)}
        with pytest.raises(FusionError, match="must be a tuple"):
            fuse(_manifest(), None, _bundle(), PROFILE, manual=manual)

    def test_no_digit_slate_fields_never_arrive(self):
        # extract_fields maps unreadable boxes to value None; fusion skips them
        record = fuse(
            _manifest(),
            _reading(scene_num=SlateField("??", 0.0, None)),
            _bundle(),
            PROFILE,
        )
        assert record.semantic.scene_num is None
        assert record.notes is None


class TestCatalog:
    def test_append_and_read_back(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rng = np.random.default_rng(3)
        recs = [helpers.random_record(rng, i) for i in range(4)]
        for rec in recs:
            catalog_append(path, rec)
        assert read_catalog(path) == recs
        assert path.read_bytes().endswith(b"\n")

    def test_duplicate_clip_id_rejected_and_file_unchanged(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rec = helpers.random_record(np.random.default_rng(4), 7)
        catalog_append(path, rec)
        before = path.read_bytes()
        with pytest.raises(DuplicateClipIdError):
            catalog_append(path, rec)
        assert path.read_bytes() == before

    def test_no_stray_temp_files_after_appends(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rng = np.random.default_rng(5)
        for i in range(3):
            catalog_append(path, helpers.random_record(rng, i))
        assert sorted(p.name for p in tmp_path.iterdir()) == ["catalog.jsonl"]

    def test_query_matches_brute_force(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rng = np.random.default_rng(6)
        recs = [helpers.random_record(rng, i) for i in range(30)]
        for rec in recs:
            catalog_append(path, rec)
        for text in ("SceneNum=5", "Time=Day", "ActorPID=P001", "ObjectType=lamp"):
            predicate = parse_predicate(text)
            expect = [r.clip_id for r in recs if match(r, predicate)]
            assert catalog_query(path, predicate) == expect

    def test_empty_predicate_matches_everything(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rng = np.random.default_rng(8)
        recs = [helpers.random_record(rng, i) for i in range(5)]
        for rec in recs:
            catalog_append(path, rec)
        assert catalog_query(path, parse_predicate("")) == [r.clip_id for r in recs]

    def test_conjunction_narrows(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        rng = np.random.default_rng(9)
        recs = [helpers.random_record(rng, i) for i in range(40)]
        for rec in recs:
            catalog_append(path, rec)
        broad = set(catalog_query(path, parse_predicate("Time=Day")))
        narrow = set(catalog_query(path, parse_predicate("Time=Day,SceneType=Inside")))
        assert narrow <= broad
