"""Grayscale image container, PNG/PGM file I/O, and integral-image primitives.

Coordinate convention used project-wide: x is the column index and increases
rightward, y is the row index and increases downward, origin at the top-left
pixel. Arrays are indexed [y, x].
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

# Detectors need a border margin; smaller images are accepted by the loader
# but rejected at pipeline entry.
MIN_PIPELINE_DIM = 32


class ImageLoadError(ValueError):
    """File cannot be read, or its format/bit depth is unsupported."""


@dataclass(frozen=True)
class GrayImage:
    """Immutable 8-bit grayscale raster.

    ``pixels`` is a read-only (height, width) uint8 array, row-major.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError("pixels must be a 2-D (height, width) array")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("dimensions below minimum (empty image)")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.integer):
                raise ValueError("pixel values must be integers in [0, 255]")
            if px.min() < 0 or px.max() > 255:
                raise ValueError("pixel values out of [0, 255]")
            px = px.astype(np.uint8)
        else:
            px = px.copy() if px.flags.writeable else px
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> np.ndarray:
        """Flat row-major view of the pixel values."""
        return self.pixels.reshape(-1)

    def meets_pipeline_minimum(self) -> bool:
        return self.width >= MIN_PIPELINE_DIM and self.height >= MIN_PIPELINE_DIM


def require_pipeline_size(img: GrayImage) -> None:
    """Reject images too small for the detection pipeline."""
    if not img.meets_pipeline_minimum():
        raise ValueError(
            f"image {img.width}x{img.height} below pipeline minimum "
            f"{MIN_PIPELINE_DIM}x{MIN_PIPELINE_DIM}"
        )


@dataclass(frozen=True)
class IntegralImage:
    """Exclusive-prefix cumulative-sum table of a GrayImage.

    ``table`` has shape (height+1, width+1); entry (y, x) is the sum of all
    pixels with row < y and column < x, so row 0 and column 0 are zero and
    no boundary special-casing is needed in box sums.
    """

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def height(self) -> int:
        return self.table.shape[0] - 1


def integral(img: GrayImage) -> IntegralImage:
    """Build the exclusive-prefix integral table (wide-integer valued)."""
    h, w = img.pixels.shape
    t = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(img.pixels, axis=0, dtype=np.int64, out=t[1:, 1:])
    np.cumsum(t[1:, 1:], axis=1, out=t[1:, 1:])
    return IntegralImage(t)


def integral_of_array(px: np.ndarray) -> np.ndarray:
    """Exclusive-prefix integral table for a bare array (detector internals)."""
    h, w = px.shape
    t = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(px, axis=0, dtype=np.int64, out=t[1:, 1:])
    np.cumsum(t[1:, 1:], axis=1, out=t[1:, 1:])
    return t


def box_sum(ii: IntegralImage, x: int, y: int, w: int, h: int) -> int:
    """Sum of pixel intensities in the w x h rectangle anchored at (x, y).

    O(1) table lookups. Zero-size rectangles sum to 0.
    """
    if w < 0 or h < 0 or x < 0 or y < 0 or x + w > ii.width or y + h > ii.height:
        raise ValueError(
            f"rectangle (x={x}, y={y}, w={w}, h={h}) out of bounds "
            f"for {ii.width}x{ii.height} image"
        )
    t = ii.table
    return int(t[y + h, x + w] - t[y, x + w] - t[y + h, x] + t[y, x])


def resize_bilinear(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resampling with pixel-centre alignment; returns float64.

    Output pixel (i, j) samples source coords ((i+0.5)*h/out_h - 0.5, ...)
    clamped to the source grid.
    """
    src = np.asarray(arr, dtype=np.float64)
    h, w = src.shape
    if out_h < 1 or out_w < 1:
        raise ValueError("output dimensions must be >= 1")
    ys = np.clip((np.arange(out_h) + 0.5) * (h / out_h) - 0.5, 0.0, h - 1.0)
    xs = np.clip((np.arange(out_w) + 0.5) * (w / out_w) - 0.5, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = src[np.ix_(y0, x0)] * (1.0 - fx) + src[np.ix_(y0, x1)] * fx
    bot = src[np.ix_(y1, x0)] * (1.0 - fx) + src[np.ix_(y1, x1)] * fx
    return top * (1.0 - fy) + bot * fy


# ---------------------------------------------------------------------------
# File I/O: 8-bit grayscale PNG and binary PGM (P5)
# ---------------------------------------------------------------------------

_PGM_HEADER = re.compile(rb"^P5\s")


def _luminance_average(arr: np.ndarray) -> np.ndarray:
    # Color inputs are tolerated: real B-mode exports are sometimes
    # RGB-encoded grayscale. Plain channel average, not ITU-R weights.
    return np.rint(arr[:, :, :3].astype(np.float64).mean(axis=2)).astype(np.uint8)


def image_from_bytes(data: bytes) -> GrayImage:
    """Decode PNG or binary PGM bytes into a GrayImage."""
    if _PGM_HEADER.match(data):
        return _decode_pgm(data)
    try:
        with PILImage.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8)
            elif im.mode == "1":
                arr = np.asarray(im.convert("L"), dtype=np.uint8)
            elif im.mode in ("LA", "RGB", "RGBA"):
                rgb = im.convert("RGB") if im.mode != "RGB" else im
                arr = _luminance_average(np.asarray(rgb, dtype=np.uint8))
            elif im.mode == "P":
                arr = _luminance_average(
                    np.asarray(im.convert("RGB"), dtype=np.uint8)
                )
            else:
                raise ImageLoadError(f"unsupported bit depth or mode: {im.mode}")
    except UnidentifiedImageError as exc:
        raise ImageLoadError("unreadable file: not a PNG or PGM image") from exc
    except (OSError, SyntaxError) as exc:
        raise ImageLoadError(f"unreadable file: {exc}") from exc
    try:
        return GrayImage(arr)
    except ValueError as exc:
        raise ImageLoadError(str(exc)) from exc


def _decode_pgm(data: bytes) -> GrayImage:
    # Binary PGM: "P5" <w> <h> <maxval> then raw bytes. '#' comments allowed.
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise ImageLoadError("unreadable file: truncated PGM header")
            pos = nl + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageLoadError("unreadable file: truncated PGM header")
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        w, h, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise ImageLoadError("unreadable file: malformed PGM header") from exc
    if maxval > 255:
        raise ImageLoadError(f"unsupported bit depth: PGM maxval {maxval}")
    if maxval < 1 or w < 1 or h < 1:
        raise ImageLoadError("unreadable file: malformed PGM header")
    raw = data[pos : pos + w * h]
    if len(raw) < w * h:
        raise ImageLoadError("unreadable file: truncated PGM pixel data")
    return GrayImage(np.frombuffer(raw, dtype=np.uint8).reshape(h, w))


def load_image(path) -> GrayImage:
    """Load an 8-bit grayscale PNG or binary PGM from disk."""
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise ImageLoadError(f"unreadable file: {exc}") from exc
    return image_from_bytes(data)


def image_to_bytes(img: GrayImage, fmt: str = "png") -> bytes:
    """Encode as PNG or binary PGM bytes."""
    fmt = fmt.lower().lstrip(".")
    if fmt == "png":
        buf = io.BytesIO()
        PILImage.fromarray(img.pixels, mode="L").save(buf, format="PNG")
        return buf.getvalue()
    if fmt == "pgm":
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        return header + img.pixels.tobytes()
    raise ValueError(f"unsupported image format: {fmt}")


def save_image(img: GrayImage, path) -> None:
    """Write a GrayImage to disk; format chosen by file extension."""
    p = Path(path)
    fmt = p.suffix.lstrip(".").lower() or "png"
    p.write_bytes(image_to_bytes(img, fmt))
