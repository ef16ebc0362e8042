"""Sparse geometry: corner detection, binary descriptors, block tracking,
and robust 2D transform estimation.

All estimators are hand-rolled numpy so their behavior is pinned by the test
suite rather than by an external CV library's version. Coordinates are (x, y)
with x along columns; transforms map source points to destination points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    pass


class NotEnoughPointsError(GeometryError):
    pass


class DegenerateDataError(GeometryError):
    pass


class NoModelError(GeometryError):
    pass


def _box3(plane: np.ndarray) -> np.ndarray:
    """3x3 box sum with replicated edges."""
    p = np.pad(plane, 1, mode="edge")
    out = np.zeros_like(plane)
    for dy in range(3):
        for dx in range(3):
            out += p[dy : dy + plane.shape[0], dx : dx + plane.shape[1]]
    return out


def corner_response(plane: np.ndarray) -> np.ndarray:
    """Min-eigenvalue (Shi-Tomasi) response of the 3x3 structure tensor."""

    gy, gx = np.gradient(plane)
    sxx = _box3(gx * gx)
    syy = _box3(gy * gy)
    sxy = _box3(gx * gy)
    trace = sxx + syy
    root = np.sqrt((sxx - syy) ** 2 + 4.0 * sxy * sxy)
    return 0.5 * (trace - root)


def detect_corners(
    plane: np.ndarray,
    max_corners: int = 200,
    quality: float = 0.01,
    min_distance: float = 8.0,
) -> np.ndarray:
    """Strongest corners with greedy spacing, as an (n, 2) array of (x, y).

    Candidates below quality * max(response) are dropped; survivors are
    accepted strongest-first, skipping any within min_distance of an
    already accepted corner.
    """

    if plane.ndim != 2:
        raise GeometryError("detect_corners expects a 2D array")
    resp = corner_response(plane)
    peak = float(resp.max(initial=0.0))
    if peak <= 0.0:
        return np.zeros((0, 2), dtype=np.float64)
    ys, xs = np.nonzero(resp >= quality * peak)
    if xs.size == 0:
        return np.zeros((0, 2), dtype=np.float64)
    strength = resp[ys, xs]
    # Stable ordering keeps the result deterministic when responses tie.
    order = np.lexsort((xs, ys, -strength))
    xs, ys = xs[order], ys[order]

    kept_x: list[float] = []
    kept_y: list[float] = []
    min_d2 = min_distance * min_distance
    for x, y in zip(xs, ys):
        ok = True
        for kx, ky in zip(kept_x, kept_y):
            if (x - kx) ** 2 + (y - ky) ** 2 < min_d2:
                ok = False
                break
        if ok:
            kept_x.append(float(x))
            kept_y.append(float(y))
            if len(kept_x) >= max_corners:
                break
    return np.stack([np.array(kept_x), np.array(kept_y)], axis=1) if kept_x else np.zeros((0, 2))


DESCRIPTOR_BITS = 256
_PATCH_RADIUS = 15  # descriptor window is 31x31

# Fixed comparison-pair layout, generated once. The layout is part of the
# descriptor definition: changing the seed invalidates stored descriptors.
_pair_rng = np.random.default_rng(1830283051)
_PAIRS = np.clip(
    np.rint(_pair_rng.normal(0.0, _PATCH_RADIUS / 2.4, size=(DESCRIPTOR_BITS, 4))),
    -_PATCH_RADIUS,
    _PATCH_RADIUS,
).astype(np.int64)
del _pair_rng

_POPCNT = np.array([bin(v).count("1") for v in range(256)], dtype=np.uint16)


def describe_corners(
    plane: np.ndarray, corners: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Binary intensity-comparison descriptors for the given corners.

    Corners closer than 16px to the border cannot host a full patch and are
    dropped. Returns (kept_corners (m, 2), descriptors (m, 32) uint8).
    """

    h, w = plane.shape
    if corners.size == 0:
        return np.zeros((0, 2)), np.zeros((0, DESCRIPTOR_BITS // 8), dtype=np.uint8)
    smooth = _box3(plane) / 9.0
    cx = np.rint(corners[:, 0]).astype(np.int64)
    cy = np.rint(corners[:, 1]).astype(np.int64)
    margin = _PATCH_RADIUS + 1
    keep = (cx >= margin) & (cx < w - margin) & (cy >= margin) & (cy < h - margin)
    cx, cy = cx[keep], cy[keep]
    if cx.size == 0:
        return np.zeros((0, 2)), np.zeros((0, DESCRIPTOR_BITS // 8), dtype=np.uint8)
    a = smooth[cy[:, None] + _PAIRS[None, :, 1], cx[:, None] + _PAIRS[None, :, 0]]
    b = smooth[cy[:, None] + _PAIRS[None, :, 3], cx[:, None] + _PAIRS[None, :, 2]]
    bits = (a < b).astype(np.uint8)
    return corners[keep], np.packbits(bits, axis=1)


def hamming_matrix(d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Pairwise Hamming distances between packed descriptor rows."""

    if d1.shape[0] == 0 or d2.shape[0] == 0:
        return np.zeros((d1.shape[0], d2.shape[0]), dtype=np.uint16)
    x = np.bitwise_xor(d1[:, None, :], d2[None, :, :])
    return _POPCNT[x].sum(axis=2)


def match_descriptors(
    d1: np.ndarray,
    d2: np.ndarray,
    max_distance: int = 64,
    ratio: float = 0.8,
) -> np.ndarray:
    """Mutual nearest-neighbor matches passing a ratio test on both sides.

    Returns an (k, 2) array of (index into d1, index into d2).
    """

    dist = hamming_matrix(d1, d2).astype(np.float64)
    n, m = dist.shape
    if n == 0 or m == 0:
        return np.zeros((0, 2), dtype=np.int64)
    best2 = dist.argmin(axis=1)
    best1 = dist.argmin(axis=0)
    pairs = []
    for i in range(n):
        j = best2[i]
        if best1[j] != i:
            continue
        d = dist[i, j]
        if d > max_distance:
            continue
        if m > 1:
            second = np.partition(dist[i], 1)[1]
            if d >= ratio * second:
                continue
        if n > 1:
            second = np.partition(dist[:, j], 1)[1]
            if d >= ratio * second:
                continue
        pairs.append((i, j))
    return np.array(pairs, dtype=np.int64) if pairs else np.zeros((0, 2), dtype=np.int64)


@dataclass(frozen=True)
class TrackResult:
    points: np.ndarray  # (n, 2) updated positions
    ok: np.ndarray  # (n,) bool, False where the track was lost


def track_points(
    prev: np.ndarray,
    nxt: np.ndarray,
    points: np.ndarray,
    window_radius: int = 7,
    search_radius: int = 8,
    max_norm_ssd: float = 0.05,
    subpixel: bool = True,
    distinctiveness: float = 0.0,
) -> TrackResult:
    """Exhaustive SSD block matching from prev to nxt.

    Each point carries a (2r+1)^2 template; the displacement minimizing SSD
    over the integer search square wins, optionally refined by per-axis
    parabolic interpolation (clamped to half a pixel). A track is lost when
    its window leaves either frame or the best mean squared difference
    exceeds max_norm_ssd.

    With distinctiveness > 0, a track must also beat the best SSD found
    outside its immediate neighborhood by that factor; repeated texture
    produces near-tied aliases and gets rejected rather than mismatched.
    """

    h, w = prev.shape
    if nxt.shape != prev.shape:
        raise GeometryError("frame shapes differ")
    r, s = window_radius, search_radius
    side = 2 * r + 1
    area = float(side * side)
    n = points.shape[0]
    out = points.astype(np.float64).copy()
    ok = np.zeros(n, dtype=bool)

    for idx in range(n):
        x, y = points[idx]
        cx, cy = int(round(x)), int(round(y))
        if cx - r < 0 or cy - r < 0 or cx + r >= w or cy + r >= h:
            continue
        template = prev[cy - r : cy + r + 1, cx - r : cx + r + 1]
        if cx - r - s >= 0 and cy - r - s >= 0 and cx + r + s < w and cy + r + s < h:
            region = nxt[cy - r - s : cy + r + s + 1, cx - r - s : cx + r + s + 1]
            windows = np.lib.stride_tricks.sliding_window_view(region, (side, side))
            ssd = ((windows - template) ** 2).sum(axis=(2, 3))
        else:
            ssd = np.full((2 * s + 1, 2 * s + 1), np.inf)
            for dy in range(-s, s + 1):
                ty = cy + dy
                if ty - r < 0 or ty + r >= h:
                    continue
                for dx in range(-s, s + 1):
                    tx = cx + dx
                    if tx - r < 0 or tx + r >= w:
                        continue
                    cand = nxt[ty - r : ty + r + 1, tx - r : tx + r + 1]
                    diff = cand - template
                    ssd[dy + s, dx + s] = np.dot(diff.ravel(), diff.ravel())
        flat = int(np.argmin(ssd))
        by, bx = divmod(flat, 2 * s + 1)
        best = ssd[by, bx]
        if not np.isfinite(best) or best / area > max_norm_ssd:
            continue
        if distinctiveness > 0.0:
            masked = ssd.copy()
            masked[max(by - 1, 0) : by + 2, max(bx - 1, 0) : bx + 2] = np.inf
            second = float(masked.min())
            if np.isfinite(second) and best > distinctiveness * second:
                continue
        dx_best = float(bx - s)
        dy_best = float(by - s)
        if subpixel:
            dx_best += _parabolic_offset(ssd[by, bx - 1] if bx > 0 else np.inf, best,
                                         ssd[by, bx + 1] if bx < 2 * s else np.inf)
            dy_best += _parabolic_offset(ssd[by - 1, bx] if by > 0 else np.inf, best,
                                         ssd[by + 1, bx] if by < 2 * s else np.inf)
        out[idx, 0] = x + dx_best
        out[idx, 1] = y + dy_best
        ok[idx] = True
    return TrackResult(out, ok)


def _parabolic_offset(left: float, center: float, right: float) -> float:
    if not (np.isfinite(left) and np.isfinite(right)):
        return 0.0
    denom = left - 2.0 * center + right
    if denom <= 1e-12:
        return 0.0
    return float(np.clip(0.5 * (left - right) / denom, -0.5, 0.5))


# --- transform models ------------------------------------------------------


@dataclass(frozen=True)
class EuclideanTransform:
    """Rotation by theta then translation."""

    theta: float
    tx: float
    ty: float

    @property
    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        return np.array([[c, -s, self.tx], [s, c, self.ty], [0.0, 0.0, 1.0]])

    def apply(self, pts: np.ndarray) -> np.ndarray:
        return _apply_affine(self.matrix, pts)

    @classmethod
    def estimate(cls, src: np.ndarray, dst: np.ndarray) -> "EuclideanTransform":
        """Least-squares rigid fit (closed form via the orientation sums)."""
        if src.shape[0] < 2:
            raise NotEnoughPointsError("need at least 2 correspondences")
        a, b, ca, cb = _centered(src, dst)
        dot = float((a * b).sum())
        cross = float((a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]).sum())
        if dot == 0.0 and cross == 0.0:
            raise DegenerateDataError("coincident source points")
        theta = float(np.arctan2(cross, dot))
        c, s = np.cos(theta), np.sin(theta)
        tx = cb[0] - (c * ca[0] - s * ca[1])
        ty = cb[1] - (s * ca[0] + c * ca[1])
        return cls(theta, float(tx), float(ty))


@dataclass(frozen=True)
class SimilarityTransform:
    """Uniform scale and rotation, then translation."""

    scale: float
    theta: float
    tx: float
    ty: float

    @property
    def matrix(self) -> np.ndarray:
        c = self.scale * np.cos(self.theta)
        s = self.scale * np.sin(self.theta)
        return np.array([[c, -s, self.tx], [s, c, self.ty], [0.0, 0.0, 1.0]])

    def apply(self, pts: np.ndarray) -> np.ndarray:
        return _apply_affine(self.matrix, pts)

    @property
    def translation_norm(self) -> float:
        return float(np.hypot(self.tx, self.ty))

    @classmethod
    def estimate(cls, src: np.ndarray, dst: np.ndarray) -> "SimilarityTransform":
        if src.shape[0] < 2:
            raise NotEnoughPointsError("need at least 2 correspondences")
        a, b, ca, cb = _centered(src, dst)
        dot = float((a * b).sum())
        cross = float((a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]).sum())
        norm_a = float((a * a).sum())
        if norm_a < 1e-24:
            raise DegenerateDataError("coincident source points")
        theta = float(np.arctan2(cross, dot))
        scale = float(np.hypot(dot, cross) / norm_a)
        if scale < 1e-12:
            raise DegenerateDataError("coincident destination points")
        c = scale * np.cos(theta)
        s = scale * np.sin(theta)
        tx = cb[0] - (c * ca[0] - s * ca[1])
        ty = cb[1] - (s * ca[0] + c * ca[1])
        return cls(scale, theta, float(tx), float(ty))


@dataclass(frozen=True)
class Homography:
    """Projective mapping, matrix normalized so the corner element is 1."""

    matrix: np.ndarray  # (3, 3)

    def apply(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        ones = np.ones((pts.shape[0], 1))
        hom = np.concatenate([pts, ones], axis=1) @ self.matrix.T
        wcol = hom[:, 2:3]
        if np.any(np.abs(wcol) < 1e-12):
            raise DegenerateDataError("point maps to infinity")
        return hom[:, :2] / wcol

    def inverse(self) -> "Homography":
        inv = np.linalg.inv(self.matrix)
        return Homography(inv / inv[2, 2])

    @classmethod
    def estimate(cls, src: np.ndarray, dst: np.ndarray) -> "Homography":
        """Normalized direct linear transform (needs >= 4 correspondences)."""
        src = np.asarray(src, dtype=np.float64)
        dst = np.asarray(dst, dtype=np.float64)
        n = src.shape[0]
        if n < 4:
            raise NotEnoughPointsError("need at least 4 correspondences")
        t_src, src_n = _hartley_normalize(src)
        t_dst, dst_n = _hartley_normalize(dst)
        a = np.zeros((2 * n, 9))
        x, y = src_n[:, 0], src_n[:, 1]
        u, v = dst_n[:, 0], dst_n[:, 1]
        a[0::2, 0] = -x
        a[0::2, 1] = -y
        a[0::2, 2] = -1.0
        a[0::2, 6] = u * x
        a[0::2, 7] = u * y
        a[0::2, 8] = u
        a[1::2, 3] = -x
        a[1::2, 4] = -y
        a[1::2, 5] = -1.0
        a[1::2, 6] = v * x
        a[1::2, 7] = v * y
        a[1::2, 8] = v
        _, sv, vt = np.linalg.svd(a)
        if n == 4 and sv[-2] < 1e-9:
            raise DegenerateDataError("minimal set does not pin a homography")
        h = vt[-1].reshape(3, 3)
        full = np.linalg.inv(t_dst) @ h @ t_src
        if abs(full[2, 2]) < 1e-12:
            raise DegenerateDataError("homography has a vanishing corner term")
        return cls(full / full[2, 2])


def _apply_affine(m: np.ndarray, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64)
    return pts @ m[:2, :2].T + m[:2, 2]


def _centered(src, dst):
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    ca = src.mean(axis=0)
    cb = dst.mean(axis=0)
    return src - ca, dst - cb, ca, cb


def _hartley_normalize(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Translate to the centroid and scale mean radius to sqrt(2)."""
    centroid = pts.mean(axis=0)
    shifted = pts - centroid
    mean_dist = np.hypot(shifted[:, 0], shifted[:, 1]).mean()
    if mean_dist < 1e-12:
        raise DegenerateDataError("coincident points")
    s = np.sqrt(2.0) / mean_dist
    t = np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )
    return t, shifted * s


_MODEL_CLASSES = {
    "euclidean": (EuclideanTransform, 2),
    "similarity": (SimilarityTransform, 2),
    "homography": (Homography, 4),
}


@dataclass(frozen=True)
class RansacResult:
    model: object
    inliers: np.ndarray  # bool mask over the input correspondences
    iterations: int
    rms_residual: float

    @property
    def inlier_count(self) -> int:
        return int(self.inliers.sum())


def residuals(model, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Per-point euclidean error of model(src) against dst.

    Points a degenerate homography sends to infinity score inf rather than
    raising, so consensus scoring can simply discard such hypotheses.
    """
    if isinstance(model, Homography):
        src = np.asarray(src, dtype=np.float64)
        ones = np.ones((src.shape[0], 1))
        hom = np.concatenate([src, ones], axis=1) @ model.matrix.T
        out = np.full(src.shape[0], np.inf)
        ok = np.abs(hom[:, 2]) > 1e-12
        mapped = hom[ok, :2] / hom[ok, 2:3]
        out[ok] = np.hypot(mapped[:, 0] - dst[ok, 0], mapped[:, 1] - dst[ok, 1])
        return out
    mapped = model.apply(src)
    return np.hypot(mapped[:, 0] - dst[:, 0], mapped[:, 1] - dst[:, 1])


def ransac(
    src: np.ndarray,
    dst: np.ndarray,
    kind: str,
    threshold: float,
    max_iterations: int = 500,
    min_inliers: int | None = None,
    seed: int = 0,
) -> RansacResult:
    """Robust transform fit: sample minimal sets, keep the consensus winner,
    then refit by least squares on its inliers.

    Ties on inlier count break toward the lower RMS residual. The returned
    inlier mask is recomputed under the refit model, so every marked point
    sits within threshold by construction. Raises NoModelError when no
    hypothesis reaches min_inliers (default: the minimal sample size).
    """

    if kind not in _MODEL_CLASSES:
        raise GeometryError(f"unknown model kind {kind!r}")
    cls, sample_size = _MODEL_CLASSES[kind]
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise GeometryError("src and dst must both be (n, 2)")
    n = src.shape[0]
    if n < sample_size:
        raise NotEnoughPointsError(f"need {sample_size} correspondences, got {n}")
    need = sample_size if min_inliers is None else min_inliers

    rng = np.random.default_rng(seed)
    best_count = -1
    best_rms = np.inf
    best_mask = None
    degenerate_streak = 0
    iterations = 0
    for _ in range(max_iterations):
        iterations += 1
        pick = rng.choice(n, size=sample_size, replace=False)
        try:
            model = cls.estimate(src[pick], dst[pick])
        except GeometryError:
            degenerate_streak += 1
            if degenerate_streak > 100:
                raise DegenerateDataError(
                    "could not draw a non-degenerate minimal sample"
                ) from None
            continue
        degenerate_streak = 0
        res = residuals(model, src, dst)
        mask = res <= threshold
        count = int(mask.sum())
        if count < need:
            continue
        rms = float(np.sqrt(np.mean(res[mask] ** 2))) if count else np.inf
        if count > best_count or (count == best_count and rms < best_rms):
            best_count = count
            best_rms = rms
            best_mask = mask
    if best_mask is None:
        raise NoModelError(f"no {kind} hypothesis reached {need} inliers")

    refit = cls.estimate(src[best_mask], dst[best_mask])
    res = residuals(refit, src, dst)
    mask = res <= threshold
    if not mask.any():
        # The refit drifted off the consensus set; fall back to it.
        mask = best_mask
        refit = cls.estimate(src[mask], dst[mask])
        res = residuals(refit, src, dst)
        mask = mask & (res <= threshold)
        if not mask.any():
            raise NoModelError("refit lost every inlier")
    rms = float(np.sqrt(np.mean(res[mask] ** 2)))
    return RansacResult(refit, mask, iterations, rms)
