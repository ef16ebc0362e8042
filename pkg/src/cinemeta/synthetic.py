"""Synthetic footage: textured scenes, scripted camera moves, slate boards.

Test suites and demo scripts render known-truth clips through this module,
so every generator takes an explicit numpy Generator and is deterministic
for a given seed. Frames are single-channel float planes in [0, 1] unless
a function says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .imaging import Image, bilinear_sample
from .model import CameraMove

FG_SPEED_GAIN = 1.8  # near plane moves this much faster than the far plane
FG_ZOOM_GAIN = 3.5


def value_noise(rng: np.random.Generator, width: int, height: int, octaves: int = 4) -> np.ndarray:
    """Multi-octave value noise normalized to [0, 1]; corner-rich texture."""

    out = np.zeros((height, width))
    amp = 1.0
    total = 0.0
    for octave in range(octaves):
        cells = 2 ** (octave + 2)
        gw = max(2, int(round(width / max(width, height) * cells)) + 1)
        gh = max(2, int(round(height / max(width, height) * cells)) + 1)
        grid = rng.random((gh, gw))
        ys = np.linspace(0, gh - 1, height)
        xs = np.linspace(0, gw - 1, width)
        xx, yy = np.meshgrid(xs, ys)
        out += amp * bilinear_sample(grid, xx, yy)
        total += amp
        amp *= 0.55
    out /= total
    lo, hi = out.min(), out.max()
    return (out - lo) / (hi - lo) if hi > lo else np.full_like(out, 0.5)


def blob_mask(
    rng: np.random.Generator,
    width: int,
    height: int,
    n_blobs: int = 6,
    radius: tuple[float, float] = (28.0, 40.0),
) -> np.ndarray:
    """Soft 0/1 coverage mask made of gaussian blobs (near-plane objects)."""

    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    mask = np.zeros((height, width))
    # jittered grid placement keeps coverage from collapsing on bad draws
    cols = max(2, int(round(math.sqrt(n_blobs * width / height))))
    rows = max(2, -(-n_blobs // cols))
    cells = [(i, j) for j in range(rows) for i in range(cols)]
    for i, j in cells[:n_blobs]:
        cx = (i + 0.5) * width / cols + rng.uniform(-0.15, 0.15) * width / cols
        cy = (j + 0.5) * height / rows + rng.uniform(-0.15, 0.15) * height / rows
        r = rng.uniform(*radius)
        d2 = (xs - cx) ** 2 + (ys - cy) ** 2
        mask = np.maximum(mask, np.exp(-d2 / (2.0 * (r / 2.0) ** 2)))
    return np.clip((mask - 0.3) * 4.0, 0.0, 1.0)


@dataclass(frozen=True)
class MoveScript:
    """Per-frame camera path: planar offset and zoom factor for two planes."""

    bg_offsets: np.ndarray  # (n, 2) scene-space offsets of the far plane
    fg_offsets: np.ndarray
    bg_scales: np.ndarray  # (n,) zoom factor about frame center
    fg_scales: np.ndarray
    use_foreground: bool


def _offsets(n: int, vx: float, vy: float) -> np.ndarray:
    t = np.arange(n, dtype=np.float64)
    return np.stack([vx * t, vy * t], axis=1)


def move_script(
    move: CameraMove,
    n_frames: int,
    rng: np.random.Generator,
    speed: float = 2.0,
    zoom_rate: float = 0.01,
) -> MoveScript:
    """Scripted ground-truth path for a camera move class.

    speed is px/frame of far-plane drift; zoom_rate is per-frame scale change.
    Moves with real camera translation (truck/pedestal/dolly) give the near
    plane a faster path, which is what the classifier reads as parallax.
    """

    ones = np.ones(n_frames)
    zeros = np.zeros((n_frames, 2))
    if move is CameraMove.STATIC:
        return MoveScript(zeros, zeros, ones, ones, False)
    if move is CameraMove.PAN:
        o = _offsets(n_frames, speed, 0.0)
        return MoveScript(o, o, ones, ones, False)
    if move is CameraMove.TILT:
        o = _offsets(n_frames, 0.0, speed)
        return MoveScript(o, o, ones, ones, False)
    if move is CameraMove.TRUCK:
        return MoveScript(
            _offsets(n_frames, speed, 0.0),
            _offsets(n_frames, FG_SPEED_GAIN * speed, 0.0),
            ones,
            ones,
            True,
        )
    if move is CameraMove.PEDESTAL:
        return MoveScript(
            _offsets(n_frames, 0.0, speed),
            _offsets(n_frames, 0.0, FG_SPEED_GAIN * speed),
            ones,
            ones,
            True,
        )
    if move is CameraMove.ZOOM:
        s = (1.0 + zoom_rate) ** np.arange(n_frames)
        return MoveScript(zeros, zeros, s, s, False)
    if move is CameraMove.DOLLY:
        sb = (1.0 + zoom_rate) ** np.arange(n_frames)
        sf = (1.0 + FG_ZOOM_GAIN * zoom_rate) ** np.arange(n_frames)
        return MoveScript(zeros, zeros, sb, sf, True)
    if move is CameraMove.HANDHELD:
        jitter = rng.uniform(-1.5 * speed, 1.5 * speed, size=(n_frames, 2))
        jitter[0] = 0.0
        return MoveScript(jitter, jitter, ones, ones, False)
    raise ValueError(f"no script for move {move}")


def move_clip(
    move: CameraMove,
    rng: np.random.Generator,
    n_frames: int = 9,
    frame_size: tuple[int, int] = (192, 108),
    noise: float = 0.0,
    speed: float = 2.0,
    zoom_rate: float = 0.01,
) -> list[np.ndarray]:
    """Render a grayscale clip performing the given camera move."""

    w, h = frame_size
    script = move_script(move, n_frames, rng, speed=speed, zoom_rate=zoom_rate)
    margin = int(math.ceil(max(
        np.abs(script.bg_offsets).max(initial=0.0),
        np.abs(script.fg_offsets).max(initial=0.0),
    ))) + int(0.25 * max(w, h)) + 8
    sw, sh = w + 2 * margin, h + 2 * margin
    bg = value_noise(rng, sw, sh)
    fg = value_noise(rng, sw, sh)
    mask = None
    if script.use_foreground:
        # blobs live in the frame-visible window, not the whole canvas,
        # so near-plane coverage stays meaningful for every seed
        pad = 16
        sub = blob_mask(rng, w + 2 * pad, h + 2 * pad)
        mask = np.zeros((sh, sw))
        o = margin - pad
        mask[o : o + sub.shape[0], o + 0 : o + sub.shape[1]] = sub

    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    frames = []
    for i in range(n_frames):
        def plane_coords(offset, scale):
            # zoom about the frame center, then drift, then recenter in scene
            px = (xs - cx) / scale + cx + offset[0] + margin
            py = (ys - cy) / scale + cy + offset[1] + margin
            return px, py

        bx, by = plane_coords(script.bg_offsets[i], script.bg_scales[i])
        frame = bilinear_sample(bg, bx, by)
        if mask is not None:
            fx, fy = plane_coords(script.fg_offsets[i], script.fg_scales[i])
            m = bilinear_sample(mask, fx, fy)
            frame = frame * (1.0 - m) + bilinear_sample(fg, fx, fy) * m
        if noise > 0.0:
            frame = frame + rng.normal(0.0, noise, frame.shape)
        frames.append(np.clip(frame, 0.0, 1.0))
    return frames


# --- slate boards -----------------------------------------------------------

_DIGITS = {
    "0": ["111", "101", "101", "101", "111"],
    "1": ["010", "110", "010", "010", "111"],
    "2": ["111", "001", "111", "100", "111"],
    "3": ["111", "001", "111", "001", "111"],
    "4": ["101", "101", "111", "001", "001"],
    "5": ["111", "100", "111", "001", "111"],
    "6": ["111", "100", "111", "101", "111"],
    "7": ["111", "001", "010", "010", "010"],
    "8": ["111", "101", "111", "101", "111"],
    "9": ["111", "101", "111", "001", "111"],
}


def _draw_text(plane: np.ndarray, text: str, x: int, y: int, cell: int, value: float) -> None:
    for ch in text:
        glyph = _DIGITS.get(ch)
        if glyph is not None:
            for gy, row in enumerate(glyph):
                for gx, bit in enumerate(row):
                    if bit == "1":
                        plane[
                            y + gy * cell : y + (gy + 1) * cell,
                            x + gx * cell : x + (gx + 1) * cell,
                        ] = value
        x += 4 * cell


@dataclass(frozen=True)
class SlateBoard:
    image: np.ndarray  # grayscale template plane
    regions: dict[str, tuple[int, int, int, int]]  # field -> (x, y, w, h)
    fields: dict[str, str] = field(default_factory=dict)  # rendered truth


def slate_board(
    rng: np.random.Generator,
    scene: int,
    shot: int,
    take: int,
    size: tuple[int, int] = (240, 160),
) -> SlateBoard:
    """A clapper-board style template: fiducial corners plus digit fields."""

    w, h = size
    board = np.full((h, w), 0.12)
    board += 0.04 * value_noise(rng, w, h, octaves=3)

    fid = 22
    for oy in (8, h - 8 - fid):
        for ox in (8, w - 8 - fid):
            cells = rng.random((4, 4))
            patch = np.kron(cells, np.ones((fid // 4 + 1, fid // 4 + 1)))[:fid, :fid]
            board[oy : oy + fid, ox : ox + fid] = np.where(patch > 0.5, 0.95, 0.05)

    # diagonal clapper stripes along the top edge
    ys, xs = np.mgrid[0:12, 0:w]
    stripes = ((xs + ys) // 9) % 2
    board[38 : 38 + 12, :] = np.where(stripes, 0.9, 0.1)

    values = {"scene_num": str(scene), "shot_num": str(shot), "take_num": str(take)}
    regions = {}
    box_w = (w - 48) // 3
    for i, name in enumerate(("scene_num", "shot_num", "take_num")):
        x0 = 16 + i * (box_w + 8)
        y0 = h - 72
        regions[name] = (x0, y0, box_w, 44)
        board[y0 : y0 + 44, x0 : x0 + box_w] = 0.85
        _draw_text(board, values[name], x0 + 6, y0 + 7, 6, 0.05)
    return SlateBoard(np.clip(board, 0.0, 1.0), regions, values)


def random_homography(
    rng: np.random.Generator,
    width: int,
    height: int,
    sigma: float = 0.01,
    offset: tuple[float, float] = (0.0, 0.0),
) -> np.ndarray:
    """Homography displacing the unit-rectangle corners by gaussian jitter.

    sigma is relative to the image diagonal. Returns a 3x3 matrix mapping
    (x, y) in the width x height rectangle to jittered positions.
    """

    from .geometry import Homography

    diag = math.hypot(width, height)
    corners = np.array(
        [[0.0, 0.0], [width - 1.0, 0.0], [width - 1.0, height - 1.0], [0.0, height - 1.0]]
    )
    jitter = rng.normal(0.0, sigma * diag, size=(4, 2))
    moved = corners + jitter + np.asarray(offset)
    return Homography.estimate(corners, moved).matrix


def render_slate_frame(
    board: np.ndarray,
    board_to_frame: np.ndarray,
    frame_size: tuple[int, int],
    rng: np.random.Generator,
) -> np.ndarray:
    """Composite the warped board over a noise background."""

    w, h = frame_size
    bh, bw = board.shape
    background = 0.25 + 0.2 * value_noise(rng, w, h, octaves=2)
    frame_to_board = np.linalg.inv(board_to_frame)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    ones = np.ones_like(xs)
    coords = np.stack([xs, ys, ones], axis=0).reshape(3, -1)
    mapped = frame_to_board @ coords
    bx = (mapped[0] / mapped[2]).reshape(h, w)
    by = (mapped[1] / mapped[2]).reshape(h, w)
    inside = (bx >= 0) & (bx <= bw - 1) & (by >= 0) & (by <= bh - 1)
    sampled = bilinear_sample(board, bx, by)
    return np.where(inside, sampled, background)


def noise_frame(rng: np.random.Generator, frame_size: tuple[int, int]) -> np.ndarray:
    w, h = frame_size
    return rng.random((h, w))


def to_image(plane: np.ndarray) -> Image:
    """Wrap a grayscale plane as a 3-channel Image (pipeline frame shape)."""
    return Image(np.repeat(plane[:, :, None], 3, axis=2))
