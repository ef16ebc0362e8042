"""Independent brute-force oracles shared by unit and acceptance tests.

Each function reimplements an operation from its mathematical definition
using scalar loops or a different decomposition than the production kernel,
so agreement is evidence rather than tautology.
"""

import numpy as np

from cinemeta.imaging import BayerPattern, Lut

# --- imaging ----------------------------------------------------------------


def oracle_demosaic(mosaic: np.ndarray, pattern: BayerPattern) -> np.ndarray:
    """Scalar bilinear de-Bayer: per pixel, average the canonical neighbor
    set for each missing channel, replicating edges."""

    h, w = mosaic.shape
    p = np.pad(mosaic, 1, mode="edge")
    tile = pattern.tile()
    out = np.zeros((h, w, 3))
    for y in range(h):
        for x in range(w):
            site = int(tile[y % 2, x % 2])
            py, px = y + 1, x + 1
            cross = (p[py - 1, px], p[py + 1, px], p[py, px - 1], p[py, px + 1])
            diag = (
                p[py - 1, px - 1],
                p[py - 1, px + 1],
                p[py + 1, px - 1],
                p[py + 1, px + 1],
            )
            for c in range(3):
                if c == site:
                    out[y, x, c] = mosaic[y, x]
                elif c == 1:
                    out[y, x, c] = sum(cross) / 4.0
                elif site == 1:
                    if int(tile[y % 2, 1 - (x % 2)]) == c:
                        out[y, x, c] = (p[py, px - 1] + p[py, px + 1]) / 2.0
                    else:
                        out[y, x, c] = (p[py - 1, px] + p[py + 1, px]) / 2.0
                else:
                    out[y, x, c] = sum(diag) / 4.0
    return np.clip(out, 0.0, 1.0)


def oracle_lut3d(rgb: np.ndarray, lut: Lut) -> np.ndarray:
    n = lut.size
    dmin, dmax = np.asarray(lut.domain_min), np.asarray(lut.domain_max)
    out = np.zeros_like(rgb)
    for y in range(rgb.shape[0]):
        for x in range(rgb.shape[1]):
            t = np.clip((rgb[y, x] - dmin) / (dmax - dmin), 0.0, 1.0) * (n - 1)
            i = np.minimum(t.astype(int), n - 2)
            f = t - i
            acc = np.zeros(3)
            for dr in (0, 1):
                for dg in (0, 1):
                    for db in (0, 1):
                        weight = (
                            (f[0] if dr else 1 - f[0])
                            * (f[1] if dg else 1 - f[1])
                            * (f[2] if db else 1 - f[2])
                        )
                        flat = (i[0] + dr) + (i[1] + dg) * n + (i[2] + db) * n * n
                        acc += weight * lut.entries[flat]
            out[y, x] = acc
    return np.clip(out, 0.0, 1.0)


def oracle_lut1d(rgb: np.ndarray, lut: Lut) -> np.ndarray:
    n = lut.size
    dmin, dmax = np.asarray(lut.domain_min), np.asarray(lut.domain_max)
    out = np.zeros_like(rgb)
    for y in range(rgb.shape[0]):
        for x in range(rgb.shape[1]):
            for c in range(3):
                t = min(max((rgb[y, x, c] - dmin[c]) / (dmax[c] - dmin[c]), 0.0), 1.0)
                t *= n - 1
                i = min(int(t), n - 2)
                f = t - i
                out[y, x, c] = lut.entries[i, c] * (1 - f) + lut.entries[i + 1, c] * f
    return np.clip(out, 0.0, 1.0)


def oracle_downsample(data: np.ndarray, factor: int) -> np.ndarray:
    h, w, ch = data.shape
    oh, ow = h // factor, w // factor
    out = np.zeros((oh, ow, ch))
    for y in range(oh):
        for x in range(ow):
            for c in range(ch):
                total = 0.0
                for dy in range(factor):
                    for dx in range(factor):
                        total += data[y * factor + dy, x * factor + dx, c]
                out[y, x, c] = total / (factor * factor)
    return out


# --- geometry ---------------------------------------------------------------


def kabsch_euclidean(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Least-squares rigid transform via SVD (Kabsch), as a 3x3 matrix."""

    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    cs, cd = src.mean(axis=0), dst.mean(axis=0)
    h = (src - cs).T @ (dst - cd)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    rot = vt.T @ np.diag([1.0, d]) @ u.T
    t = cd - rot @ cs
    out = np.eye(3)
    out[:2, :2] = rot
    out[:2, 2] = t
    return out


def umeyama_similarity(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Least-squares similarity transform (Umeyama 1991), as a 3x3 matrix."""

    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    n = src.shape[0]
    cs, cd = src.mean(axis=0), dst.mean(axis=0)
    a, b = src - cs, dst - cd
    cov = b.T @ a / n
    u, s, vt = np.linalg.svd(cov)
    sign = np.sign(np.linalg.det(u) * np.linalg.det(vt))
    diag = np.diag([1.0, sign])
    rot = u @ diag @ vt
    var_src = (a**2).sum() / n
    scale = np.trace(np.diag(s) @ diag) / var_src
    t = cd - scale * rot @ cs
    out = np.eye(3)
    out[:2, :2] = scale * rot
    out[:2, 2] = t
    return out
