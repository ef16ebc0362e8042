"""Binary PGM (P5) and PPM (P6) files, the frame-sequence fixture carrier.

Samples normalize to [0, 1] floats on load and denormalize on save, so a
canonical file survives a read/write cycle byte-for-byte. ASCII variants
(P2/P3) are deliberately rejected to keep the parser surface bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..imaging import Image


class RasterError(ValueError):
    pass


class BadMagicError(RasterError):
    pass


class TruncatedPayloadError(RasterError):
    pass


class UnsupportedMaxValueError(RasterError):
    pass


@dataclass(frozen=True)
class RasterFile:
    width: int
    height: int
    channels: int
    max_value: int
    pixels: np.ndarray  # (height, width, channels) float64 in [0, 1]

    def __post_init__(self) -> None:
        if self.channels not in (1, 3):
            raise RasterError(f"channels must be 1 or 3, got {self.channels}")
        if self.max_value not in (255, 65535):
            raise UnsupportedMaxValueError(f"max_value {self.max_value}")
        if self.pixels.shape != (self.height, self.width, self.channels):
            raise RasterError(
                f"pixel shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x{self.channels}"
            )

    def to_image(self) -> Image:
        return Image(self.pixels)

    @classmethod
    def from_image(cls, img: Image, max_value: int = 255) -> "RasterFile":
        return cls(img.width, img.height, img.channels, max_value, img.data)


def _parse_header(data: bytes):
    """Parse PNM header tokens (magic, width, height, maxval) + payload offset."""

    if len(data) < 2:
        raise BadMagicError("file too short for a PNM magic")
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise BadMagicError(f"unsupported magic {magic!r} (binary P5/P6 only)")

    tokens: list[int] = []
    i = 2
    while len(tokens) < 3:
        if i >= len(data):
            raise TruncatedPayloadError("header ended before width/height/maxval")
        ch = data[i : i + 1]
        if ch in b" \t\r\n":
            i += 1
        elif ch == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        elif ch.isdigit():
            j = i
            while j < len(data) and data[j : j + 1].isdigit():
                j += 1
            tokens.append(int(data[i:j]))
            i = j
        else:
            raise RasterError(f"unexpected header byte {ch!r} at offset {i}")
    # Exactly one whitespace byte separates the maxval from the payload.
    if i >= len(data) or data[i : i + 1] not in b" \t\r\n":
        raise TruncatedPayloadError("missing whitespace before payload")
    return channels, tokens[0], tokens[1], tokens[2], i + 1


def raster_from_bytes(data: bytes) -> RasterFile:
    channels, width, height, max_value, offset = _parse_header(data)
    if width <= 0 or height <= 0:
        raise RasterError(f"bad dimensions {width}x{height}")
    if max_value not in (255, 65535):
        raise UnsupportedMaxValueError(f"max_value {max_value} (255 or 65535 only)")

    count = width * height * channels
    payload = data[offset:]
    sample_bytes = 1 if max_value == 255 else 2
    if len(payload) != count * sample_bytes:
        raise TruncatedPayloadError(
            f"expected {count * sample_bytes} payload bytes, got {len(payload)}"
        )
    dtype = np.uint8 if max_value == 255 else np.dtype(">u2")
    samples = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    pixels = (samples / max_value).reshape(height, width, channels)
    return RasterFile(width, height, channels, max_value, pixels)


def read_raster(path: str | Path) -> RasterFile:
    return raster_from_bytes(Path(path).read_bytes())


def raster_to_bytes(raster: RasterFile) -> bytes:
    magic = b"P5" if raster.channels == 1 else b"P6"
    header = magic + f"\n{raster.width} {raster.height}\n{raster.max_value}\n".encode()
    scaled = np.rint(np.clip(raster.pixels, 0.0, 1.0) * raster.max_value)
    if raster.max_value == 255:
        payload = scaled.astype(np.uint8).tobytes()
    else:
        payload = scaled.astype(np.uint16).astype(np.dtype(">u2")).tobytes()
    return header + payload


def write_raster(raster: RasterFile, path: str | Path) -> None:
    Path(path).write_bytes(raster_to_bytes(raster))


def read_frame(path: str | Path) -> Image:
    return read_raster(path).to_image()


def write_frame(img: Image, path: str | Path, max_value: int = 255) -> None:
    write_raster(RasterFile.from_image(img, max_value), path)
