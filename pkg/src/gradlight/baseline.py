"""Intensity-domain reference methods for comparison runs."""

from __future__ import annotations

import numpy as np

from .gradient import EnhancementParams, enhancement_gain
from .image import IntensityRange, as_gray, round_half_away

__all__ = ["histogram_equalize", "gain_map_enhance"]


def histogram_equalize(img) -> np.ndarray:
    """Textbook 256-bin CDF remap.

    Level ``v`` goes to ``round(255 * (cdf(v) - cdf_min) / (N - cdf_min))``
    with ``cdf_min`` the smallest non-zero CDF value.  Non-integer input is
    binned by rounding.  A constant image is returned unchanged.
    """
    f = as_gray(img)
    levels = round_half_away(np.clip(f, 0, 255)).astype(np.intp)
    cdf = np.cumsum(np.bincount(levels.ravel(), minlength=256))
    n = cdf[-1]
    cdf_min = cdf[cdf > 0][0]
    if cdf_min == n:
        return f.copy()
    lut = round_half_away(255.0 * (cdf - cdf_min) / (n - cdf_min))
    return np.maximum(lut, 0.0)[levels]


def gain_map_enhance(img, p: EnhancementParams = EnhancementParams(), rng: IntensityRange = IntensityRange()):
    """Multiply each pixel by its own gradient gain, with no integration."""
    f = as_gray(img)
    return rng.clip(f * enhancement_gain(f, p))
