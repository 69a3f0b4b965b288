"""Raster containers, image file I/O and quantization.

Gray images are 2-D ``float64`` arrays of shape ``(height, width)``; RGB
images are 3-D arrays of shape ``(height, width, 3)``.  Values are in
8-bit intensity levels but kept real-valued until output.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "IntensityRange",
    "ImageError",
    "ImageReadError",
    "ImageWriteError",
    "UnsupportedFormatError",
    "as_gray",
    "as_rgb",
    "round_half_away",
    "quantize",
    "load_image",
    "save_image",
]

SUPPORTED_EXTENSIONS = {".png": "PNG", ".ppm": "PPM", ".pgm": "PPM", ".pnm": "PPM"}


class ImageError(Exception):
    """Base class for image I/O failures."""


class ImageReadError(ImageError):
    pass


class ImageWriteError(ImageError):
    pass


class UnsupportedFormatError(ImageError):
    pass


@dataclass(frozen=True)
class IntensityRange:
    """Closed box ``[r_min, r_max]`` for output intensities."""

    r_min: float = 0.0
    r_max: float = 255.0

    def __post_init__(self):
        if not (np.isfinite(self.r_min) and np.isfinite(self.r_max)):
            raise ValueError("intensity range bounds must be finite")
        if not self.r_min < self.r_max:
            raise ValueError(f"need r_min < r_max, got [{self.r_min}, {self.r_max}]")

    @classmethod
    def parse(cls, text: str) -> "IntensityRange":
        """Parse ``"MIN:MAX"``."""
        lo, sep, hi = text.partition(":")
        if not sep:
            raise ValueError(f"range must look like MIN:MAX, got {text!r}")
        return cls(float(lo), float(hi))

    def clip(self, x):
        return np.clip(x, self.r_min, self.r_max)

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all((x >= self.r_min) & (x <= self.r_max)))

    def as_tuple(self) -> tuple[float, float]:
        return (float(self.r_min), float(self.r_max))


def as_gray(img) -> np.ndarray:
    """Validate and return ``img`` as a finite 2-D float64 array."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"gray image must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("gray image contains non-finite values")
    return a


def as_rgb(img) -> np.ndarray:
    """Validate and return ``img`` as a finite (H, W, 3) float64 array."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 3 or a.shape[2] != 3 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"RGB image must have shape (H, W, 3), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("RGB image contains non-finite values")
    return a


def round_half_away(x):
    """Round to nearest integer, ties away from zero (127.5 -> 128, -0.5 -> -1)."""
    x = np.asarray(x, dtype=np.float64)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def quantize(img, rng: IntensityRange = IntensityRange()) -> np.ndarray:
    """Clamp to ``rng`` then round half away from zero."""
    a = np.asarray(img, dtype=np.float64)
    out = round_half_away(rng.clip(a))
    # copysign keeps -0.0 for tiny negatives; normalise for byte-exact equality
    return out + 0.0


def load_image(path) -> np.ndarray:
    """Read a PNG or binary PPM/PGM file.

    Returns a 2-D array for grayscale files and an (H, W, 3) array for colour
    files.  Samples are the raw 8-bit values as floats, no rescaling.  Palette
    images are expanded to RGB; alpha channels are dropped.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise ImageReadError(f"unreadable file: {path} does not exist")
    try:
        with Image.open(path) as im:
            fmt = im.format
            if fmt not in ("PNG", "PPM"):
                raise UnsupportedFormatError(f"unsupported format {fmt!r} in {path}")
            im.load()
            mode = im.mode
            if mode in ("1", "P"):
                im = im.convert("RGB" if mode == "P" else "L")
            elif mode == "LA":
                im = im.convert("L")
            elif mode == "RGBA":
                im = im.convert("RGB")
            elif mode not in ("L", "RGB"):
                raise UnsupportedFormatError(f"unsupported pixel mode {mode!r} (8-bit gray/RGB only)")
            data = np.asarray(im, dtype=np.uint8)
    except UnsupportedFormatError:
        raise
    except (OSError, UnidentifiedImageError, SyntaxError, ValueError) as exc:
        raise ImageReadError(f"unreadable file: {path}: {exc}") from exc
    if data.shape[0] == 0 or data.shape[1] == 0:
        raise ImageReadError(f"unreadable file: {path} has a zero dimension")
    return data.astype(np.float64)


def _to_bytes(img: np.ndarray, rng: IntensityRange) -> np.ndarray:
    a = rng.clip(img)
    if rng.as_tuple() != (0.0, 255.0):
        a = (a - rng.r_min) * (255.0 / (rng.r_max - rng.r_min))
    return round_half_away(a).astype(np.uint8)


def save_image(img, path, rng: IntensityRange = IntensityRange()) -> None:
    """Write ``img`` as 8-bit PNG or PPM/PGM, chosen by file extension.

    Samples are clamped to ``rng``, mapped affinely onto [0, 255] if ``rng``
    is not already that interval, and rounded half away from zero.  A gray
    image written to ``.ppm`` is stored as P5 by Pillow; use ``.pgm`` for
    clarity.
    """
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    if ext not in SUPPORTED_EXTENSIONS:
        raise UnsupportedFormatError(f"unsupported output extension {ext!r}")
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        a = as_gray(a)
        mode = "L"
    else:
        a = as_rgb(a)
        mode = "RGB"
    if ext == ".pgm" and mode == "RGB":
        raise UnsupportedFormatError("cannot store an RGB image as PGM")
    data = _to_bytes(a, rng)
    try:
        Image.fromarray(data).save(path, format=SUPPORTED_EXTENSIONS[ext])
    except OSError as exc:
        raise ImageWriteError(f"cannot write {path}: {exc}") from exc
