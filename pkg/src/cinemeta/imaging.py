"""Pre-processing kernels: demosaic, LUT color transform, downsampling, HSV.

Everything operates on planar float rasters in [0, 1]. These run at analysis
resolution (annotators never need delivery-grade pixels), so kernels favor
verifiability over throughput: each one has a brute-force per-pixel oracle
in the test suite.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np

_RANGE_EPS = 1e-6


class ImagingError(ValueError):
    pass


class OddDimensionsError(ImagingError):
    pass


class ChannelMismatchError(ImagingError):
    pass


class FactorTooLargeError(ImagingError):
    pass


class BadParamsError(ImagingError):
    pass


class CubeError(ImagingError):
    pass


class MissingSizeLineError(CubeError):
    pass


class EntryCountMismatchError(CubeError):
    pass


class ValueOutOfDomainError(CubeError):
    pass


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable planar raster: (height, width, channels) float64 in [0, 1]."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ImagingError(f"bad image shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ImagingError(f"bad image shape {arr.shape}")
        lo, hi = float(arr.min()), float(arr.max())
        if lo < -_RANGE_EPS or hi > 1.0 + _RANGE_EPS:
            raise ImagingError(f"samples outside [0,1] (min {lo}, max {hi})")
        arr = np.clip(arr, 0.0, 1.0)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def plane(self, index: int = 0) -> np.ndarray:
        """One channel as a read-only 2D array."""
        return self.data[:, :, index]

    @classmethod
    def full(cls, width: int, height: int, value: float, channels: int = 1) -> "Image":
        return cls(np.full((height, width, channels), value, dtype=np.float64))


class BayerPattern(enum.Enum):
    RGGB = "RGGB"
    BGGR = "BGGR"
    GRBG = "GRBG"
    GBRG = "GBRG"

    def tile(self) -> np.ndarray:
        """2x2 channel indices (0=R, 1=G, 2=B), row-major."""
        chan = {"R": 0, "G": 1, "B": 2}
        letters = self.value
        return np.array(
            [[chan[letters[0]], chan[letters[1]]], [chan[letters[2]], chan[letters[3]]]]
        )


def demosaic_bilinear(raw: Image, pattern: BayerPattern) -> Image:
    """Bilinear de-Bayer of a single-channel mosaic into RGB.

    Missing channels interpolate from the canonical neighbor sets (cross for
    green; horizontal/vertical/diagonal for red/blue depending on site), with
    out-of-bounds neighbors replaced by the replicated edge sample.
    """

    if raw.channels != 1:
        raise ChannelMismatchError("demosaic expects a single-channel mosaic")
    h, w = raw.height, raw.width
    if h % 2 or w % 2 or h < 2 or w < 2:
        raise OddDimensionsError(f"dimensions must be even and >= 2, got {w}x{h}")

    m = raw.plane()
    p = np.pad(m, 1, mode="edge")
    nb_n, nb_s = p[0:-2, 1:-1], p[2:, 1:-1]
    nb_w, nb_e = p[1:-1, 0:-2], p[1:-1, 2:]
    nb_nw, nb_se = p[0:-2, 0:-2], p[2:, 2:]
    nb_ne, nb_sw = p[0:-2, 2:], p[2:, 0:-2]

    # Pairwise grouping keeps averages of equal values exact.
    cross = ((nb_n + nb_s) + (nb_e + nb_w)) / 4.0
    horiz = (nb_e + nb_w) / 2.0
    vert = (nb_n + nb_s) / 2.0
    diag = ((nb_nw + nb_se) + (nb_ne + nb_sw)) / 4.0

    tile = pattern.tile()
    rows = np.arange(h)[:, None] % 2
    cols = np.arange(w)[None, :] % 2
    site = tile[rows, cols]  # channel recorded at each pixel

    out = np.empty((h, w, 3), dtype=np.float64)
    out[:, :, 1] = np.where(site == 1, m, cross)
    for c, other in ((0, 2), (2, 0)):
        est = np.where(site == other, diag, 0.0)
        # At green sites the same-color pair sits along the row or column the
        # mosaic places channel c in.
        row_of_c = np.any(tile == c, axis=1)  # which tile rows carry c
        in_c_row = row_of_c[rows[:, 0]][:, None] & np.ones((1, w), dtype=bool)
        est = np.where((site == 1) & in_c_row, horiz, est)
        est = np.where((site == 1) & ~in_c_row, vert, est)
        out[:, :, c] = np.where(site == c, m, est)
    return Image(np.clip(out, 0.0, 1.0))


@dataclass(frozen=True)
class Lut:
    """A 1D or 3D color lookup table (.cube semantics, red-fastest order)."""

    kind: str  # "lut1d" | "lut3d"
    size: int
    entries: np.ndarray  # (size, 3) or (size**3, 3)
    domain_min: tuple[float, float, float] = (0.0, 0.0, 0.0)
    domain_max: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        if self.kind not in ("lut1d", "lut3d"):
            raise CubeError(f"unknown LUT kind {self.kind!r}")
        if self.size < 2:
            raise CubeError(f"LUT size must be >= 2, got {self.size}")
        expected = self.size if self.kind == "lut1d" else self.size**3
        if self.entries.shape != (expected, 3):
            raise EntryCountMismatchError(
                f"expected {expected} entries, got {self.entries.shape[0]}"
            )

    @classmethod
    def identity(cls, kind: str = "lut3d", size: int = 2) -> "Lut":
        grid = np.linspace(0.0, 1.0, size)
        if kind == "lut1d":
            entries = np.stack([grid, grid, grid], axis=1)
        else:
            b, g, r = np.meshgrid(grid, grid, grid, indexing="ij")
            entries = np.stack([r.ravel(), g.ravel(), b.ravel()], axis=1)
        return cls(kind, size, entries)


_SIZE_RE = re.compile(r"^LUT_(1D|3D)_SIZE\s+(\d+)$")


def parse_cube(text: str) -> Lut:
    """Parse a .cube LUT document (TITLE/DOMAIN lines optional)."""

    kind: str | None = None
    size = 0
    domain_min = [0.0, 0.0, 0.0]
    domain_max = [1.0, 1.0, 1.0]
    values: list[float] = []
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        upper = line.upper()
        m = _SIZE_RE.match(upper)
        if m:
            if kind is not None:
                raise CubeError("duplicate LUT size line")
            kind = "lut1d" if m.group(1) == "1D" else "lut3d"
            size = int(m.group(2))
            continue
        if upper.startswith("TITLE"):
            continue
        if upper.startswith("DOMAIN_MIN") or upper.startswith("DOMAIN_MAX"):
            parts = line.split()
            if len(parts) != 4:
                raise CubeError(f"bad domain line {line!r}")
            target = domain_min if upper.startswith("DOMAIN_MIN") else domain_max
            target[:] = [float(v) for v in parts[1:]]
            continue
        parts = line.split()
        try:
            values.extend(float(v) for v in parts)
        except ValueError:
            raise CubeError(f"unparseable line {line!r}") from None

    if kind is None:
        raise MissingSizeLineError("no LUT_1D_SIZE or LUT_3D_SIZE line")
    if size < 2:
        raise CubeError(f"LUT size must be >= 2, got {size}")
    if len(values) % 3 != 0:
        raise EntryCountMismatchError("table values are not RGB triples")
    entries = np.array(values, dtype=np.float64).reshape(-1, 3)
    expected = size if kind == "lut1d" else size**3
    if entries.shape[0] != expected:
        raise EntryCountMismatchError(
            f"expected {expected} entries, got {entries.shape[0]}"
        )
    if entries.min() < 0.0 or entries.max() > 1.0:
        raise ValueOutOfDomainError("table entries outside [0, 1]")
    for lo, hi in zip(domain_min, domain_max):
        if hi <= lo:
            raise CubeError("DOMAIN_MAX must exceed DOMAIN_MIN")
    return Lut(kind, size, entries, tuple(domain_min), tuple(domain_max))


def apply_lut(img: Image, lut: Lut) -> Image:
    """Map an RGB image through the LUT (linear / trilinear interpolation)."""

    if img.channels != 3:
        raise ChannelMismatchError("apply_lut expects a 3-channel image")
    rgb = img.data
    n = lut.size
    dmin = np.asarray(lut.domain_min)
    dmax = np.asarray(lut.domain_max)
    t = np.clip((rgb - dmin) / (dmax - dmin), 0.0, 1.0) * (n - 1)

    if lut.kind == "lut1d":
        i0 = np.minimum(t.astype(np.int64), n - 2)
        frac = t - i0
        table = lut.entries  # (n, 3), column c drives channel c
        cols = np.arange(3)[None, None, :]
        lo = table[i0, cols]
        hi = table[i0 + 1, cols]
        out = lo * (1.0 - frac) + hi * frac
    else:
        i0 = np.minimum(t.astype(np.int64), n - 2)
        f = t - i0
        fr, fg, fb = f[..., 0], f[..., 1], f[..., 2]
        ir, ig, ib = i0[..., 0], i0[..., 1], i0[..., 2]

        def corner(dr: int, dg: int, db: int) -> np.ndarray:
            flat = (ir + dr) + (ig + dg) * n + (ib + db) * n * n
            return lut.entries[flat]

        wr, wg, wb = fr[..., None], fg[..., None], fb[..., None]
        c00 = corner(0, 0, 0) * (1 - wr) + corner(1, 0, 0) * wr
        c10 = corner(0, 1, 0) * (1 - wr) + corner(1, 1, 0) * wr
        c01 = corner(0, 0, 1) * (1 - wr) + corner(1, 0, 1) * wr
        c11 = corner(0, 1, 1) * (1 - wr) + corner(1, 1, 1) * wr
        c0 = c00 * (1 - wg) + c10 * wg
        c1 = c01 * (1 - wg) + c11 * wg
        out = c0 * (1 - wb) + c1 * wb
    return Image(np.clip(out, 0.0, 1.0))


def log_to_linear(img: Image, a: float, b: float) -> Image:
    """Parametric inverse-log curve y = (a**x - 1) / (a**b - 1), clamped.

    A fallback for footage without a vendor LUT; the sanctioned color path
    is apply_lut with the production's .cube.
    """

    if img.channels != 3:
        raise ChannelMismatchError("log_to_linear expects a 3-channel image")
    if a <= 1.0 or b <= 0.0:
        raise BadParamsError(f"need a > 1 and b > 0, got a={a}, b={b}")
    out = (np.power(a, img.data) - 1.0) / (math.pow(a, b) - 1.0)
    return Image(np.clip(out, 0.0, 1.0))


def downsample_box(img: Image, factor: int) -> Image:
    """Box-filter downsampling; trailing partial rows/columns are dropped."""

    if factor < 1:
        raise FactorTooLargeError(f"factor must be >= 1, got {factor}")
    if factor == 1:
        return img
    oh, ow = img.height // factor, img.width // factor
    if oh == 0 or ow == 0:
        raise FactorTooLargeError(
            f"factor {factor} collapses a {img.width}x{img.height} image"
        )
    cropped = img.data[: oh * factor, : ow * factor, :]
    blocks = cropped.reshape(oh, factor, ow, factor, img.channels)
    return Image(blocks.mean(axis=(1, 3)))


def to_grayscale(img: Image) -> Image:
    """Rec.601 luma (0.299 R + 0.587 G + 0.114 B)."""

    if img.channels == 1:
        return img
    rgb = img.data
    luma = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return Image(np.clip(luma, 0.0, 1.0))


def rgb_to_hsv(rgb) -> np.ndarray:
    """Hexagonal HSV: h in [0, 360) (0 when s = 0), s and v in [0, 1].

    Accepts a single (r, g, b) triple or any (..., 3) array.
    """

    arr = np.asarray(rgb, dtype=np.float64)
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    v = mx
    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)

    with np.errstate(invalid="ignore", divide="ignore"):
        safe = np.where(delta > 0, delta, 1.0)
        h_r = np.mod((g - b) / safe, 6.0)
        h_g = (b - r) / safe + 2.0
        h_b = (r - g) / safe + 4.0
    h = np.where(mx == r, h_r, np.where(mx == g, h_g, h_b))
    h = np.where(delta > 0, h * 60.0, 0.0)
    h = np.where(h >= 360.0, h - 360.0, h)
    return np.stack([h, s, v], axis=-1)


def hsv_to_rgb(hsv) -> np.ndarray:
    """Inverse of rgb_to_hsv; used by tests to close the conversion loop."""

    arr = np.asarray(hsv, dtype=np.float64)
    h, s, v = arr[..., 0], arr[..., 1], arr[..., 2]
    hp = (h % 360.0) / 60.0
    c = v * s
    x = c * (1.0 - np.abs(np.mod(hp, 2.0) - 1.0))
    zero = np.zeros_like(c)
    sector = np.floor(hp).astype(np.int64) % 6
    r = np.choose(sector, [c, x, zero, zero, x, c])
    g = np.choose(sector, [x, c, c, x, zero, zero])
    b = np.choose(sector, [zero, zero, x, c, c, x])
    m = v - c
    return np.stack([r + m, g + m, b + m], axis=-1)


def bilinear_sample(plane: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample a 2D array at subpixel (x, y) coordinates, clamping at edges."""

    h, w = plane.shape
    x = np.clip(xs, 0.0, w - 1.0)
    y = np.clip(ys, 0.0, h - 1.0)
    x0 = np.minimum(x.astype(np.int64), w - 2) if w > 1 else np.zeros_like(x, np.int64)
    y0 = np.minimum(y.astype(np.int64), h - 2) if h > 1 else np.zeros_like(y, np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    top = plane[y0, x0] * (1.0 - fx) + plane[y0, x1] * fx
    bot = plane[y1, x0] * (1.0 - fx) + plane[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def warp_plane(src: np.ndarray, dst_to_src: np.ndarray, width: int, height: int) -> np.ndarray:
    """Render a (height, width) view of src through a dst->src homography."""

    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    ones = np.ones_like(xs)
    coords = np.stack([xs, ys, ones], axis=0).reshape(3, -1)
    mapped = dst_to_src @ coords
    sx = mapped[0] / mapped[2]
    sy = mapped[1] / mapped[2]
    return bilinear_sample(src, sx, sy).reshape(height, width)
