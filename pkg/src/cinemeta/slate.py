"""Slate detection, alignment, and field readout.

Productions register one template image per slate design (a PGM plus a
regions JSON naming each readable field box). Clips are scanned for a frame
matching the template; that frame is aligned with a robust homography and
the field boxes are rectified into template space and handed to OCR.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import geometry
from .imaging import warp_plane
from .formats.raster import RasterFile, read_raster, write_raster

OcrFn = Callable[[np.ndarray, str], tuple[str, float]]
"""(region plane, field name) -> (raw text, confidence in [0, 1])."""


class SlateError(Exception):
    pass


class NoSlateFoundError(SlateError):
    pass


class TemplateNotFoundError(SlateError):
    pass


class BadRegionsError(SlateError):
    pass


@dataclass(frozen=True)
class FieldRegion:
    """Axis-aligned box in template pixels; kind governs parsing."""

    x: int
    y: int
    w: int
    h: int
    kind: str = "int"  # "int" | "text"

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise BadRegionsError(f"empty region box {self.x},{self.y},{self.w},{self.h}")
        if self.kind not in ("int", "text"):
            raise BadRegionsError(f"unknown region kind {self.kind!r}")


@dataclass(frozen=True)
class SlateTemplate:
    template_id: str
    image: np.ndarray  # grayscale plane
    regions: dict[str, FieldRegion]

    def __post_init__(self) -> None:
        h, w = self.image.shape
        for name, r in self.regions.items():
            if r.x < 0 or r.y < 0 or r.x + r.w > w or r.y + r.h > h:
                raise BadRegionsError(f"region {name!r} exceeds the template")


def load_template(registry_dir: str | Path, template_id: str) -> SlateTemplate:
    """Read <id>.pgm and <id>.regions.json from the registry directory."""

    base = Path(registry_dir)
    img_path = base / f"{template_id}.pgm"
    reg_path = base / f"{template_id}.regions.json"
    if not img_path.exists() or not reg_path.exists():
        raise TemplateNotFoundError(f"no template {template_id!r} in {base}")
    raster = read_raster(img_path)
    if raster.channels != 1:
        raise BadRegionsError(f"template {template_id!r} must be grayscale")
    try:
        doc = json.loads(reg_path.read_text())
        regions = {
            name: FieldRegion(
                int(spec["box"][0]),
                int(spec["box"][1]),
                int(spec["box"][2]),
                int(spec["box"][3]),
                str(spec.get("kind", "int")),
            )
            for name, spec in doc["fields"].items()
        }
    except BadRegionsError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise BadRegionsError(f"malformed regions file {reg_path}: {exc}") from exc
    return SlateTemplate(template_id, raster.pixels[:, :, 0], regions)


def save_template(
    registry_dir: str | Path, template: SlateTemplate
) -> tuple[Path, Path]:
    """Write the registry pair for a template; returns the two paths."""

    base = Path(registry_dir)
    base.mkdir(parents=True, exist_ok=True)
    img_path = base / f"{template.template_id}.pgm"
    reg_path = base / f"{template.template_id}.regions.json"
    h, w = template.image.shape
    write_raster(RasterFile(w, h, 1, 255, template.image[:, :, None]), img_path)
    doc = {
        "fields": {
            name: {"box": [r.x, r.y, r.w, r.h], "kind": r.kind}
            for name, r in sorted(template.regions.items())
        }
    }
    reg_path.write_text(json.dumps(doc, indent=2) + "\n")
    return img_path, reg_path


@dataclass(frozen=True)
class SlateConfig:
    scan_frames: int = 48
    min_inliers: int = 15
    ransac_threshold: float = 3.0
    ransac_iterations: int = 500
    max_corners: int = 350
    corner_quality: float = 0.01
    corner_min_distance: float = 6.0
    match_max_distance: int = 64
    match_ratio: float = 0.8


@dataclass(frozen=True)
class Alignment:
    """frame -> template homography plus the match evidence behind it."""

    homography: geometry.Homography
    n_matches: int
    n_inliers: int

    @property
    def inlier_fraction(self) -> float:
        return self.n_inliers / self.n_matches if self.n_matches else 0.0


def _features(plane: np.ndarray, config: SlateConfig):
    corners = geometry.detect_corners(
        plane,
        max_corners=config.max_corners,
        quality=config.corner_quality,
        min_distance=config.corner_min_distance,
    )
    return geometry.describe_corners(plane, corners)


def align_to_template(
    frame: np.ndarray,
    template: SlateTemplate,
    config: SlateConfig | None = None,
    seed: int = 0,
    template_features: tuple[np.ndarray, np.ndarray] | None = None,
) -> Alignment:
    """Estimate the frame -> template homography from descriptor matches.

    Raises NoSlateFoundError when matches are too few or no consensus
    reaches min_inliers.
    """

    cfg = config or SlateConfig()
    t_pts, t_desc = template_features or _features(template.image, cfg)
    f_pts, f_desc = _features(frame, cfg)
    pairs = geometry.match_descriptors(
        f_desc, t_desc, max_distance=cfg.match_max_distance, ratio=cfg.match_ratio
    )
    if pairs.shape[0] < cfg.min_inliers:
        raise NoSlateFoundError(
            f"{pairs.shape[0]} descriptor matches, need {cfg.min_inliers}"
        )
    src = f_pts[pairs[:, 0]]
    dst = t_pts[pairs[:, 1]]
    try:
        fit = geometry.ransac(
            src,
            dst,
            "homography",
            threshold=cfg.ransac_threshold,
            max_iterations=cfg.ransac_iterations,
            min_inliers=cfg.min_inliers,
            seed=seed,
        )
    except geometry.GeometryError as exc:
        raise NoSlateFoundError(f"no homography consensus: {exc}") from exc
    return Alignment(fit.model, pairs.shape[0], fit.inlier_count)


def find_slate_frame(
    frames: Sequence[np.ndarray],
    template: SlateTemplate,
    config: SlateConfig | None = None,
    seed: int = 0,
) -> tuple[int, Alignment]:
    """Scan the head of the clip for the first frame aligning to the template."""

    cfg = config or SlateConfig()
    t_feat = _features(template.image, cfg)
    last_error: Exception | None = None
    for index in range(min(len(frames), cfg.scan_frames)):
        try:
            alignment = align_to_template(
                frames[index], template, cfg, seed=seed + index, template_features=t_feat
            )
        except NoSlateFoundError as exc:
            last_error = exc
            continue
        return index, alignment
    raise NoSlateFoundError(
        f"no slate in the first {min(len(frames), cfg.scan_frames)} frames"
        + (f" (last: {last_error})" if last_error else "")
    )


_DIGIT_RE = re.compile(r"\d+")


@dataclass(frozen=True)
class SlateField:
    text: str
    confidence: float
    value: int | None = None


@dataclass(frozen=True)
class SlateReading:
    frame_index: int
    alignment: Alignment
    fields: dict[str, SlateField] = field(default_factory=dict)


def extract_fields(
    frame: np.ndarray,
    template: SlateTemplate,
    alignment: Alignment,
    ocr: OcrFn,
) -> dict[str, SlateField]:
    """Rectify the slate into template space and OCR each field box.

    Integer fields keep only the digit runs of the raw OCR text; a readout
    with no digits comes back with value None and zero confidence. Field
    confidence is the OCR confidence damped by the alignment inlier
    fraction, so a shaky alignment drags every field down with it.
    """

    h, w = template.image.shape
    to_frame = alignment.homography.inverse().matrix
    rectified = warp_plane(frame, to_frame, w, h)
    out: dict[str, SlateField] = {}
    for name, region in sorted(template.regions.items()):
        crop = rectified[region.y : region.y + region.h, region.x : region.x + region.w]
        text, conf = ocr(crop, name)
        conf = float(np.clip(conf, 0.0, 1.0)) * alignment.inlier_fraction
        if region.kind == "int":
            runs = _DIGIT_RE.findall(text)
            if not runs:
                out[name] = SlateField(text=text, confidence=0.0, value=None)
                continue
            out[name] = SlateField(text=text, confidence=conf, value=int("".join(runs)))
        else:
            out[name] = SlateField(text=text.strip(), confidence=conf)
    return out


def read_slate(
    frames: Sequence[np.ndarray],
    template: SlateTemplate,
    ocr: OcrFn,
    config: SlateConfig | None = None,
    seed: int = 0,
) -> SlateReading:
    """find_slate_frame + extract_fields in one step."""

    index, alignment = find_slate_frame(frames, template, config, seed=seed)
    fields = extract_fields(frames[index], template, alignment, ocr)
    return SlateReading(index, alignment, fields)


def reprojection_error(
    alignment: Alignment, true_board_to_frame: np.ndarray, template: SlateTemplate
) -> float:
    """Mean corner reprojection error (px) of an alignment against truth.

    Maps the template corners through the true placement and back through
    the estimated frame->template homography; exact recovery returns 0.
    """

    h, w = template.image.shape
    corners = np.array(
        [[0.0, 0.0], [w - 1.0, 0.0], [w - 1.0, h - 1.0], [0.0, h - 1.0]]
    )
    placed = geometry.Homography(true_board_to_frame).apply(corners)
    recovered = alignment.homography.apply(placed)
    err = np.hypot(recovered[:, 0] - corners[:, 0], recovered[:, 1] - corners[:, 1])
    return float(err.mean())


def digits_only(text: str) -> str:
    """Concatenated digit runs of a string ('' when none)."""
    return "".join(_DIGIT_RE.findall(text))
