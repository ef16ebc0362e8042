"""Self-contained demo project generator.

Builds a small dailies set on disk: synthetic clips (slate head frames plus
a scripted camera move), a slate template registry, detector fixtures, an
actor gallery, a profile, a run config, and a matching truth catalog. Used
by the end-to-end tests and by scripts/make_demo.py.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import slate, synthetic
from .formats.manifest import ClipManifest, manifest_to_dict
from .formats.raster import RasterFile, write_raster
from .formats.sidecar import write_catalog
from .model import (
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

FRAME_SIZE = (320, 180)
N_SLATE_FRAMES = 2
N_MOVE_FRAMES = 12

_GALLERY = [
    ("P001", [1.0, 0.0, 0.0, 0.0]),
    ("P002", [0.0, 1.0, 0.0, 0.0]),
]


def _manual(value) -> AnnotatedValue:
    return AnnotatedValue(value, 1.0, Provenance.MANUAL)


def _clip_specs():
    """The three demo clips: identity, move, slate digits, fixtures, truth."""

    return (
        {
            "clip_id": "A001_C001",
            "move": CameraMove.PAN,
            "slate": (5, 1, 2),
            "manifest_hints": (4, 1, 2),  # scene logged wrong on set
            "dark": False,
            "timecode": "01:00:00:00",
            "fixtures": {
                "scene_classify": {
                    "scene_type": "Outside",
                    "place": "street",
                    "confidence": 0.9,
                },
                "object_detect": [{"category": "car", "confidence": 0.85}],
            },
            "truth": dict(
                camera_move=_manual(CameraMove.PAN),
                time=_manual(TimeOfDay.DAY),
                scene_type=_manual(SceneType.OUTSIDE),
                places=_manual("street"),
                objects=(_manual("car"),),
            ),
        },
        {
            "clip_id": "A001_C002",
            "move": CameraMove.STATIC,
            "slate": (5, 2, 1),
            "manifest_hints": (5, 2, 1),
            "dark": False,
            "timecode": "01:04:10:00",
            "fixtures": {
                "face_detect": [
                    {"box": [130.0, 40.0, 54.0, 72.0], "confidence": 0.95}
                ],
                "face_embed": {
                    "face0": {"embedding": [1.0, 0.0, 0.0, 0.0], "confidence": 0.9}
                },
                "scene_classify": {
                    "scene_type": "Inside",
                    "place": "kitchen",
                    "confidence": 0.9,
                },
            },
            "truth": dict(
                camera_move=_manual(CameraMove.STATIC),
                time=_manual(TimeOfDay.DAY),
                scene_type=_manual(SceneType.INSIDE),
                places=_manual("kitchen"),
                shot_type=_manual(ShotType.CLOSE_UP),
                actors=(_manual(ActorPID("P001")),),
            ),
        },
        {
            "clip_id": "B002_C003",
            "move": CameraMove.ZOOM,
            "slate": (8, 1, 1),
            "manifest_hints": (8, 1, 1),
            "dark": True,
            "timecode": "02:11:20:12",
            "fixtures": {
                "pose_height": {"height_px": 216.0, "confidence": 0.8},
                "scene_classify": {
                    "scene_type": "Outside",
                    "place": "forest",
                    "confidence": 0.8,
                },
            },
            "truth": dict(
                camera_move=_manual(CameraMove.ZOOM),
                time=_manual(TimeOfDay.NIGHT),
                scene_type=_manual(SceneType.OUTSIDE),
                places=_manual("forest"),
                shot_type=_manual(ShotType.MEDIUM_FULL),
            ),
        },
    )


def _write_plane(path: Path, plane: np.ndarray) -> None:
    h, w = plane.shape
    write_raster(RasterFile(w, h, 1, 255, plane[:, :, None]), path)


def _render_clip(spec: dict, rng: np.random.Generator, templates_dir: Path):
    """Slate head frames plus move frames; registers the slate template."""

    clip_id = spec["clip_id"]
    scene, shot, take = spec["slate"]
    board = synthetic.slate_board(rng, scene, shot, take)
    bh, bw = board.image.shape
    placement = synthetic.random_homography(
        rng, bw, bh, sigma=0.008, offset=(40.0, 10.0)
    )
    frames = [
        synthetic.render_slate_frame(board.image, placement, FRAME_SIZE, rng)
        for _ in range(N_SLATE_FRAMES)
    ]
    frames += synthetic.move_clip(
        spec["move"], rng, n_frames=N_MOVE_FRAMES, frame_size=FRAME_SIZE
    )
    if spec["dark"]:
        # night grade on the action, slate stays lit
        frames[N_SLATE_FRAMES:] = [f * 0.3 for f in frames[N_SLATE_FRAMES:]]

    regions = {
        name: slate.FieldRegion(x, y, w, h, kind="int")
        for name, (x, y, w, h) in board.regions.items()
    }
    template = slate.SlateTemplate(f"slate_{clip_id}", board.image, regions)
    slate.save_template(templates_dir, template)
    return frames, template


def _write_fixture(path: Path, result) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(result) + "\n", encoding="utf-8")


def _write_fixtures(root: Path, spec: dict, sample_indices: list[int]) -> None:
    clip_dir = root / spec["clip_id"]
    scene, shot, take = spec["slate"]
    for region, value in (
        ("scene_num", scene),
        ("shot_num", shot),
        ("take_num", take),
    ):
        # ocr requests carry a region, so the fixture key is the region name
        _write_fixture(
            clip_dir / "ocr" / f"{region}.json",
            {"text": str(value), "confidence": 0.92},
        )
    for kind, result in spec["fixtures"].items():
        if kind == "face_embed":
            for region, payload in result.items():
                _write_fixture(clip_dir / kind / f"{region}.json", payload)
            continue
        # per-frame kinds: fixtures only for action frames, none for the slate
        for idx in sample_indices:
            if idx < N_SLATE_FRAMES:
                continue
            _write_fixture(clip_dir / kind / f"{idx}.json", result)


def write_demo_project(root: str | Path, seed: int = 7) -> dict:
    """Lay out the full demo project under root; returns key paths."""

    root = Path(root)
    clips_dir = root / "clips"
    frames_root = root / "frames"
    templates_dir = root / "templates"
    fixtures_dir = root / "fixtures"
    for d in (clips_dir, frames_root, templates_dir, fixtures_dir):
        d.mkdir(parents=True, exist_ok=True)

    frame_stride = 4
    n_frames = N_SLATE_FRAMES + N_MOVE_FRAMES
    sample_indices = list(range(0, n_frames, frame_stride))

    truth_records = []
    for i, spec in enumerate(_clip_specs()):
        clip_id = spec["clip_id"]
        rng = np.random.default_rng(seed * 1000 + i)
        frames, _template = _render_clip(spec, rng, templates_dir)
        clip_frames_dir = frames_root / clip_id
        clip_frames_dir.mkdir(parents=True, exist_ok=True)
        for j, plane in enumerate(frames):
            _write_plane(clip_frames_dir / f"f{j:04d}.pgm", plane)

        scene, shot, take = spec["manifest_hints"]
        manifest = ClipManifest(
            clip_id=ClipId(clip_id),
            frames_dir=f"../frames/{clip_id}",
            frame_pattern="f%04d.pgm",
            frame_count=len(frames),
            basic=BasicMetadata(
                fps=24.0, timecode_start=Timecode.from_text(spec["timecode"], 24)
            ),
            slate_template_id=f"slate_{clip_id}",
            slate_scan_frames=N_SLATE_FRAMES,
            scene_num=scene,
            shot_num=shot,
            take_num=take,
        )
        (clips_dir / f"{clip_id}.json").write_text(
            json.dumps(manifest_to_dict(manifest), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        _write_fixtures(fixtures_dir, spec, sample_indices)

        t_scene, t_shot, t_take = spec["slate"]
        truth_records.append(
            MetadataRecord(
                clip_id=ClipId(clip_id),
                basic=manifest.basic,
                semantic=SemanticFields(
                    scene_num=_manual(t_scene),
                    shot_num=_manual(t_shot),
                    take_num=_manual(t_take),
                    **spec["truth"],
                ),
            )
        )

    write_catalog(root / "truth.jsonl", truth_records)

    gallery = [{"pid": pid, "embedding": vec} for pid, vec in _GALLERY]
    (root / "gallery.json").write_text(
        json.dumps(gallery, indent=2) + "\n", encoding="utf-8"
    )

    profile = {
        "selected_labels": [
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
        ],
        "output_format": "ale",
    }
    (root / "profile.json").write_text(
        json.dumps(profile, indent=2) + "\n", encoding="utf-8"
    )

    config = {
        "profile_path": "profile.json",
        "clips_dir": "clips",
        "out_dir": "out",
        "templates_dir": "templates",
        "gallery_path": "gallery.json",
        "detectors": {"fixture_root": "fixtures"},
        "sampling": {"spatial_factor": 1, "frame_stride": frame_stride},
        "seed": seed,
        "workers": 1,
    }
    (root / "config.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8"
    )
    return {
        "config": str(root / "config.json"),
        "truth": str(root / "truth.jsonl"),
        "clips": [spec["clip_id"] for spec in _clip_specs()],
    }
