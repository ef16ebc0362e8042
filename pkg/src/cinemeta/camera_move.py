"""Camera move classification from sparse frame-to-frame flow.

Corners tracked between sampled frame pairs are summarized by a robust
similarity fit per pair; the per-pair scale, translation, and residual
parallax feed an ordered decision table whose first satisfied rule names
the move. Thresholds live in CameraMoveConfig so productions can retune
them against their own coverage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import geometry
from .model import CameraMove


@dataclass(frozen=True)
class CameraMoveConfig:
    stride: int = 2  # classify pairs (i, i + stride)
    max_corners: int = 100
    corner_quality: float = 0.01
    corner_min_distance: float = 7.0
    window_radius: int = 7
    search_radius: int = 8
    max_norm_ssd: float = 0.01
    min_track_points: int = 8
    parallax_drop: int = 3  # worst residuals ignored when summarizing parallax
    distinctiveness: float = 0.7  # best-vs-second SSD gate in tracking
    ransac_threshold: float = 1.0
    ransac_iterations: int = 120
    static_t: float = 0.002  # translation floor, fraction of frame diagonal
    scale_eps: float = 0.002  # |scale - 1| considered still
    zoom_scale: float = 0.004  # |scale - 1| considered a deliberate scale move
    sign_agreement: float = 0.8
    axis_dominance: float = 2.0
    flip_fraction: float = 0.3
    tau_parallax: float = 0.15
    parallax_eps: float = 2.0  # px, floor on the motion normalizer

    def __post_init__(self) -> None:
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if not 0.0 < self.sign_agreement <= 1.0:
            raise ValueError("sign_agreement must be in (0, 1]")


@dataclass(frozen=True)
class PairSample:
    """Motion summary for one sampled frame pair."""

    valid: bool
    scale: float = 1.0
    theta: float = 0.0
    tx: float = 0.0
    ty: float = 0.0
    parallax_ratio: float = 0.0
    n_tracks: int = 0
    n_inliers: int = 0

    @property
    def t_norm(self) -> float:
        return math.hypot(self.tx, self.ty)


@dataclass(frozen=True)
class MoveClassification:
    move: CameraMove
    confidence: float
    samples: tuple[PairSample, ...]

    @property
    def n_valid(self) -> int:
        return sum(1 for s in self.samples if s.valid)


def measure_pair(
    prev: np.ndarray,
    nxt: np.ndarray,
    config: CameraMoveConfig,
    seed: int = 0,
) -> PairSample:
    """Track corners from prev to nxt and fit a similarity to the flow.

    parallax_ratio is the rms of the residual flow divided by the dominant
    motion magnitude, floored at parallax_eps so near-still pairs do not
    explode the ratio. The rms is taken over all tracked points, consensus
    outliers included (they ARE the parallax signal), minus the few worst
    residuals so an isolated mistrack cannot mimic a second motion plane.
    """

    corners = geometry.detect_corners(
        prev,
        max_corners=config.max_corners,
        quality=config.corner_quality,
        min_distance=config.corner_min_distance,
    )
    if corners.shape[0] < config.min_track_points:
        return PairSample(valid=False, n_tracks=corners.shape[0])
    tracked = geometry.track_points(
        prev,
        nxt,
        corners,
        window_radius=config.window_radius,
        search_radius=config.search_radius,
        max_norm_ssd=config.max_norm_ssd,
        distinctiveness=config.distinctiveness,
    )
    src = corners[tracked.ok]
    dst = tracked.points[tracked.ok]
    if src.shape[0] < config.min_track_points:
        return PairSample(valid=False, n_tracks=int(tracked.ok.sum()))
    try:
        fit = geometry.ransac(
            src,
            dst,
            "similarity",
            threshold=config.ransac_threshold,
            max_iterations=config.ransac_iterations,
            seed=seed,
        )
    except geometry.GeometryError:
        return PairSample(valid=False, n_tracks=src.shape[0])
    model: geometry.SimilarityTransform = fit.model
    res = np.sort(geometry.residuals(model, src, dst))
    if res.size > 4 * config.parallax_drop:
        res = res[: res.size - config.parallax_drop]
    rms = float(np.sqrt(np.mean(res**2)))
    h, w = prev.shape
    diag = math.hypot(w, h)
    scale_motion = abs(model.scale - 1.0) * diag / 2.0
    normalizer = max(model.translation_norm, scale_motion, config.parallax_eps)
    return PairSample(
        valid=True,
        scale=model.scale,
        theta=model.theta,
        tx=model.tx,
        ty=model.ty,
        parallax_ratio=rms / normalizer,
        n_tracks=src.shape[0],
        n_inliers=fit.inlier_count,
    )


def measure_clip(
    frames: Sequence[np.ndarray],
    config: CameraMoveConfig,
    seed: int = 0,
) -> tuple[PairSample, ...]:
    """PairSample per (i, i + stride) frame pair, in frame order."""

    samples = []
    for k, i in enumerate(range(0, len(frames) - config.stride, config.stride)):
        samples.append(measure_pair(frames[i], frames[i + config.stride], config, seed=seed + k))
    return tuple(samples)


def _sign_stats(values: np.ndarray) -> tuple[float, float]:
    """(majority sign, fraction of samples carrying it)."""
    pos = int((values > 0).sum())
    neg = int((values < 0).sum())
    if pos == 0 and neg == 0:
        return 0.0, 0.0
    if pos >= neg:
        return 1.0, pos / values.size
    return -1.0, neg / values.size


def _flip_fraction(samples: Sequence[PairSample]) -> float:
    """Fraction of consecutive valid sample pairs whose translation reverses."""
    vecs = [(s.tx, s.ty) for s in samples if s.valid]
    if len(vecs) < 2:
        return 0.0
    flips = 0
    for (ax, ay), (bx, by) in zip(vecs, vecs[1:]):
        if ax * bx + ay * by < 0.0:
            flips += 1
    return flips / (len(vecs) - 1)


def decide(
    samples: Sequence[PairSample],
    diagonal: float,
    config: CameraMoveConfig | None = None,
) -> tuple[CameraMove, float]:
    """Apply the ordered decision table to per-pair motion summaries.

    Rules are tried in order and the first satisfied one wins:
      1. still translation and still scale            -> static
      2. translation above floor, direction thrashing -> handheld
      3. consistent scale drift                       -> zoom or dolly
      4. horizontal translation dominates             -> pan or truck
      5. vertical translation dominates               -> tilt or pedestal
    Anything else is unknown with zero confidence. The translation-driven
    rules split on residual parallax: real camera translation shears the
    scene (truck/pedestal/dolly), lens or mount moves do not (pan/tilt/zoom).

    Confidence is the fraction of valid samples individually satisfying the
    winning rule's per-sample predicate.
    """

    cfg = config or CameraMoveConfig()
    valid = [s for s in samples if s.valid]
    if not valid:
        return CameraMove.UNKNOWN, 0.0

    t_norms = np.array([s.t_norm for s in valid])
    scales = np.array([s.scale for s in valid])
    txs = np.array([s.tx for s in valid])
    tys = np.array([s.ty for s in valid])
    parallax = np.array([s.parallax_ratio for s in valid])

    med_t = float(np.median(t_norms))
    med_scale_dev = float(np.median(np.abs(scales - 1.0)))
    med_tx = float(np.median(np.abs(txs)))
    med_ty = float(np.median(np.abs(tys)))
    med_parallax = float(np.median(parallax))
    t_floor = cfg.static_t * diagonal

    if med_t < t_floor and med_scale_dev < cfg.scale_eps:
        frac = np.mean(
            (t_norms < t_floor) & (np.abs(scales - 1.0) < cfg.scale_eps)
        )
        return CameraMove.STATIC, float(frac)

    flips = _flip_fraction(valid)
    if flips > cfg.flip_fraction and med_t >= t_floor:
        return CameraMove.HANDHELD, float(flips)

    if med_scale_dev >= cfg.zoom_scale:
        sign, frac = _sign_stats(scales - 1.0)
        if frac >= cfg.sign_agreement:
            move = CameraMove.DOLLY if med_parallax > cfg.tau_parallax else CameraMove.ZOOM
            per = (np.sign(scales - 1.0) == sign) & (np.abs(scales - 1.0) >= cfg.zoom_scale)
            return move, float(np.mean(per))

    if med_tx > cfg.axis_dominance * med_ty and med_t >= t_floor:
        sign, frac = _sign_stats(txs)
        if frac >= cfg.sign_agreement:
            move = CameraMove.TRUCK if med_parallax > cfg.tau_parallax else CameraMove.PAN
            per = (np.sign(txs) == sign) & (np.abs(txs) > cfg.axis_dominance * np.abs(tys))
            return move, float(np.mean(per))

    if med_ty > cfg.axis_dominance * med_tx and med_t >= t_floor:
        sign, frac = _sign_stats(tys)
        if frac >= cfg.sign_agreement:
            move = CameraMove.PEDESTAL if med_parallax > cfg.tau_parallax else CameraMove.TILT
            per = (np.sign(tys) == sign) & (np.abs(tys) > cfg.axis_dominance * np.abs(txs))
            return move, float(np.mean(per))

    return CameraMove.UNKNOWN, 0.0


def classify_camera_move(
    frames: Sequence[np.ndarray],
    config: CameraMoveConfig | None = None,
    seed: int = 0,
) -> MoveClassification:
    """Classify the camera move across a clip of grayscale analysis frames."""

    cfg = config or CameraMoveConfig()
    if len(frames) < cfg.stride + 1:
        return MoveClassification(CameraMove.UNKNOWN, 0.0, ())
    samples = measure_clip(frames, cfg, seed=seed)
    h, w = frames[0].shape
    move, confidence = decide(samples, math.hypot(w, h), cfg)
    return MoveClassification(move, confidence, samples)
