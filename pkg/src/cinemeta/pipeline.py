"""Ingest orchestration: frames in, fused catalog and export files out.

A run walks the manifest directory in name order, pushes each clip through
preprocess -> slate -> camera move -> semantic annotators -> fusion, then
writes the catalog and export in that same order. Per-clip seeds derive
from the run seed and the clip id, so worker count and completion order
cannot change a single output byte.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fusion, semantic, slate
from .bridge import (
    NO_FIXTURE,
    BridgeError,
    DetectorClient,
    DetectorError,
    plane_to_pgm_base64,
)
from .camera_move import CameraMoveConfig, classify_camera_move
from .formats.manifest import ClipManifest, parse_manifest
from .formats.raster import read_raster
from .formats.ale import write_ale
from .formats.csv_io import write_csv
from .formats.sidecar import record_to_dict, write_catalog
from .imaging import (
    BayerPattern,
    Image,
    apply_lut,
    demosaic_bilinear,
    downsample_box,
    parse_cube,
    to_grayscale,
)
from .model import AnnotatedValue, ClipId, MetadataRecord, Provenance
from .profile import UserProfile, load_profile
from .semantic import SemanticConfig
from .slate import SlateConfig

log = logging.getLogger("cinemeta.pipeline")


class PipelineError(ValueError):
    pass


class ConfigError(PipelineError):
    pass


@dataclass(frozen=True)
class SamplingConfig:
    spatial_factor: int = 4
    frame_stride: int = 4

    def __post_init__(self) -> None:
        if self.spatial_factor < 1 or self.frame_stride < 1:
            raise ConfigError("sampling factors must be >= 1")


@dataclass(frozen=True)
class DetectorSetup:
    """How to reach a detector backend: explicit command or fixture root."""

    command: tuple[str, ...] = ()
    fixture_root: str | None = None

    def resolve_command(self) -> tuple[str, ...]:
        if self.command:
            return self.command
        if self.fixture_root:
            return (
                "python3",
                "-m",
                "cinemeta.bridge",
                "--serve",
                "--fixture-root",
                self.fixture_root,
            )
        raise ConfigError("detector setup needs a command or a fixture root")


@dataclass(frozen=True)
class PipelineConfig:
    profile_path: str
    clips_dir: str
    out_dir: str
    templates_dir: str | None = None
    detectors: DetectorSetup | None = None
    gallery_path: str | None = None
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    camera: CameraMoveConfig = field(default_factory=CameraMoveConfig)
    slate: SlateConfig = field(default_factory=SlateConfig)
    semantic: SemanticConfig = field(default_factory=SemanticConfig)
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


def _dataclass_from_dict(cls, raw: dict, what: str):
    fields = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    unknown = set(raw) - fields
    if unknown:
        raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    """Read a run config JSON; CINEMETA_SEED in the environment wins."""

    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    base = Path(path).parent

    def resolve(p: str | None) -> str | None:
        if p is None:
            return None
        q = Path(p)
        return str(q if q.is_absolute() else base / q)

    kwargs: dict = {}
    for key in ("profile_path", "clips_dir", "out_dir", "templates_dir", "gallery_path"):
        if key in raw:
            kwargs[key] = resolve(raw.pop(key))
    if "detectors" in raw:
        det = raw.pop("detectors")
        if det is not None:
            det = dict(det)
            if "fixture_root" in det:
                det["fixture_root"] = resolve(det["fixture_root"])
            if "command" in det:
                det["command"] = tuple(det["command"])
            det = _dataclass_from_dict(DetectorSetup, det, "detectors")
        kwargs["detectors"] = det
    for key, cls in (
        ("sampling", SamplingConfig),
        ("camera", CameraMoveConfig),
        ("slate", SlateConfig),
        ("semantic", SemanticConfig),
    ):
        if key in raw:
            sub = raw.pop(key)
            if isinstance(sub, dict):
                sub = {
                    k: tuple(v) if isinstance(v, list) else v for k, v in sub.items()
                }
            kwargs[key] = _dataclass_from_dict(cls, sub, key)
    for key in ("seed", "workers"):
        if key in raw:
            kwargs[key] = int(raw.pop(key))
    if raw:
        raise ConfigError(f"unknown config keys: {sorted(raw)}")
    missing = {"profile_path", "clips_dir", "out_dir"} - set(kwargs)
    if missing:
        raise ConfigError(f"config missing keys: {sorted(missing)}")

    env_seed = os.environ.get("CINEMETA_SEED")
    if env_seed is not None:
        kwargs["seed"] = int(env_seed)
    return PipelineConfig(**kwargs)


def clip_seed(run_seed: int, clip_id: ClipId | str) -> int:
    """Stable per-clip seed; independent of manifest order and workers."""
    digest = hashlib.sha256(f"{run_seed}:{clip_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def load_gallery(path: str | Path) -> list[tuple[str, np.ndarray]]:
    """Actor gallery: JSON list of {"pid": ..., "embedding": [...]}."""

    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    out = []
    for entry in raw:
        out.append((str(entry["pid"]), np.asarray(entry["embedding"], dtype=np.float64)))
    return out


# --- per-clip stages --------------------------------------------------------


def load_clip_frames(
    manifest: ClipManifest, sampling: SamplingConfig, base_dir: str | Path = "."
) -> list[Image]:
    """Load, linearize, and downsample every frame of a clip."""

    frames_dir = Path(manifest.frames_dir)
    if not frames_dir.is_absolute():
        frames_dir = Path(base_dir) / frames_dir
    lut = None
    if manifest.lut:
        lut_path = Path(manifest.lut)
        if not lut_path.is_absolute():
            lut_path = Path(base_dir) / lut_path
        lut = parse_cube(lut_path.read_text(encoding="utf-8"))

    frames: list[Image] = []
    for i in range(manifest.frame_count):
        path = frames_dir / (manifest.frame_pattern % i)
        raster = read_raster(path)
        img = raster.to_image()
        if manifest.bayer_pattern is not None:
            if img.channels != 1:
                raise PipelineError(
                    f"{path}: bayer_pattern set but frame has {img.channels} channels"
                )
            img = demosaic_bilinear(img, BayerPattern[manifest.bayer_pattern])
        if lut is not None and img.channels == 3:
            img = apply_lut(img, lut)
        if sampling.spatial_factor > 1:
            img = downsample_box(img, sampling.spatial_factor)
        frames.append(img)
    return frames


def _gray_planes(frames: Sequence[Image]) -> list[np.ndarray]:
    out = []
    for img in frames:
        out.append(img.plane() if img.channels == 1 else to_grayscale(img).plane())
    return out


def _rgb_frames(frames: Sequence[Image]) -> list[Image]:
    out = []
    for img in frames:
        if img.channels == 3:
            out.append(img)
        else:
            out.append(Image(np.repeat(img.data, 3, axis=2)))
    return out


def _run_detectors(
    client: DetectorClient,
    clip_id: str,
    gray: Sequence[np.ndarray],
    sample_indices: Sequence[int],
) -> list[semantic.FrameDetections]:
    """Query the backend per sampled frame; a failing kind degrades to empty."""

    detections = []
    for idx in sample_indices:
        image_b64 = plane_to_pgm_base64(gray[idx])

        def ask(kind: str, extra: dict | None = None):
            payload = {"image": image_b64}
            if extra:
                payload.update(extra)
            try:
                return client.request(kind, clip_id, idx, payload)
            except DetectorError as exc:
                if NO_FIXTURE not in str(exc):
                    log.warning("%s: %s failed: %s", clip_id, kind, exc)
                return None
            except BridgeError as exc:
                log.warning("%s: %s failed: %s", clip_id, kind, exc)
                return None

        face_detect = ask("face_detect")
        face_embed = []
        if face_detect:
            for j, face in enumerate(face_detect):
                emb = ask("face_embed", {"region": f"face{j}", "box": face.get("box")})
                if emb is not None and "embedding" in emb:
                    face_embed.append(emb)
        pose = None
        if not face_detect:
            pose = ask("pose_height")
        detections.append(
            semantic.parse_detections(
                face_detect=face_detect,
                face_embed=face_embed,
                object_detect=ask("object_detect"),
                scene_classify=ask("scene_classify"),
                pose_height=pose,
            )
        )
    return detections


def _read_slate(
    manifest: ClipManifest,
    gray: Sequence[np.ndarray],
    client: DetectorClient,
    config: PipelineConfig,
    seed: int,
) -> slate.SlateReading | None:
    if manifest.slate_template_id is None or config.templates_dir is None:
        return None
    template = slate.load_template(config.templates_dir, manifest.slate_template_id)
    slate_cfg = config.slate
    if manifest.slate_scan_frames is not None:
        slate_cfg = replace(slate_cfg, scan_frames=manifest.slate_scan_frames)

    frame_box: dict = {"index": 0}

    def ocr(crop: np.ndarray, region: str) -> tuple[str, float]:
        payload = {"region": region, "image": plane_to_pgm_base64(crop)}
        result = client.request(
            "ocr", str(manifest.clip_id), frame_box["index"], payload
        )
        return str(result.get("text", "")), float(result.get("confidence", 0.0))

    index, alignment = slate.find_slate_frame(gray, template, slate_cfg, seed=seed)
    frame_box["index"] = index
    fields = slate.extract_fields(gray[index], template, alignment, ocr)
    return slate.SlateReading(index, alignment, fields)


def process_clip(
    manifest: ClipManifest,
    config: PipelineConfig,
    profile: UserProfile,
    gallery: Sequence[tuple[str, np.ndarray]],
    client: DetectorClient | None,
    base_dir: str | Path = ".",
) -> MetadataRecord:
    """One clip through every stage; annotator failures leave fields absent."""

    seed = clip_seed(config.seed, manifest.clip_id)
    try:
        frames = load_clip_frames(manifest, config.sampling, base_dir)
    except (OSError, ValueError) as exc:
        raise PipelineError(f"clip {manifest.clip_id}: cannot load frames: {exc}") from exc
    gray = _gray_planes(frames)
    rgb = _rgb_frames(frames)
    clip_id = str(manifest.clip_id)

    reading = None
    if client is not None:
        try:
            reading = _read_slate(manifest, gray, client, config, seed)
        except slate.SlateError as exc:
            log.warning("%s: slate stage skipped: %s", clip_id, exc)
        except BridgeError as exc:
            log.warning("%s: slate OCR unavailable: %s", clip_id, exc)

    camera_move_av = None
    try:
        result = classify_camera_move(gray, config.camera, seed=seed)
        camera_move_av = AnnotatedValue(
            result.move, result.confidence, Provenance.ANNOTATOR
        )
    except Exception as exc:
        log.warning("%s: camera move stage failed: %s", clip_id, exc)

    sample_indices = list(range(0, len(frames), config.sampling.frame_stride))
    sampled_rgb = [rgb[i] for i in sample_indices]

    detections = [semantic.FrameDetections() for _ in sample_indices]
    if client is not None:
        try:
            detections = _run_detectors(client, clip_id, gray, sample_indices)
        except BridgeError as exc:
            log.warning("%s: detector backend lost: %s", clip_id, exc)

    try:
        annotations = semantic.annotate_clip(
            sampled_rgb, detections, gallery, config.semantic
        )
    except Exception as exc:
        log.warning("%s: semantic stage failed: %s", clip_id, exc)
        annotations = semantic.ClipAnnotations()

    bundle = fusion.AnnotationBundle(
        clip_id=manifest.clip_id,
        camera_move=camera_move_av,
        shot_type=annotations.shot_type,
        actors=annotations.actors,
        time=annotations.time,
        scene_type=annotations.scene_type,
        places=annotations.places,
        objects=annotations.objects,
    )
    return fusion.fuse(manifest, reading, bundle, profile)


# --- whole-run orchestration ------------------------------------------------


def load_manifests(clips_dir: str | Path) -> list[ClipManifest]:
    clips_dir = Path(clips_dir)
    if not clips_dir.is_dir():
        raise ConfigError(f"clips directory {clips_dir} does not exist")
    manifests = []
    for path in sorted(clips_dir.glob("*.json")):
        try:
            manifests.append(parse_manifest(path.read_text(encoding="utf-8")))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not manifests:
        raise ConfigError(f"no clip manifests in {clips_dir}")
    return manifests


_EXPORT_EXT = {"ale": "ale", "csv": "csv", "json": "json"}


def export_records(
    records: list[MetadataRecord], profile: UserProfile, out_path: str | Path
) -> None:
    fmt = profile.output_format
    if fmt == "ale":
        text = write_ale(records, profile)
        data = text.encode("utf-8")
    elif fmt == "csv":
        text = write_csv(records, profile)
        data = text.encode("utf-8")
    elif fmt == "json":
        payload = [record_to_dict(r) for r in records]
        data = (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    Path(out_path).write_bytes(data)


def run_ingest(config: PipelineConfig) -> dict:
    """Process every manifest; write catalog, export, and a run log.

    Returns a small summary dict (paths plus per-clip status) for callers
    and tests. Raises ConfigError on anything wrong with the setup; an
    individual annotator failure only degrades that clip's record.
    """

    profile = load_profile(Path(config.profile_path).read_text(encoding="utf-8"))
    manifests = load_manifests(config.clips_dir)
    gallery = load_gallery(config.gallery_path) if config.gallery_path else []

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "ingest.log"
    handler = logging.FileHandler(log_path, mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("cinemeta")
    root.addHandler(handler)
    root.setLevel(logging.INFO)

    client = None
    try:
        if config.detectors is not None:
            client = DetectorClient(list(config.detectors.resolve_command()))

        base_dir = Path(config.clips_dir)

        def worker(manifest: ClipManifest) -> MetadataRecord:
            record = process_clip(manifest, config, profile, gallery, client, base_dir)
            log.info("processed %s", manifest.clip_id)
            return record

        if config.workers == 1:
            records = [worker(m) for m in manifests]
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                records = list(pool.map(worker, manifests))
    finally:
        if client is not None:
            client.close()
        root.removeHandler(handler)
        handler.close()

    catalog_path = out_dir / "catalog.jsonl"
    write_catalog(catalog_path, records)
    export_path = out_dir / f"dailies.{_EXPORT_EXT[profile.output_format]}"
    export_records(records, profile, export_path)
    return {
        "catalog": str(catalog_path),
        "export": str(export_path),
        "log": str(log_path),
        "clips": [str(r.clip_id) for r in records],
    }
