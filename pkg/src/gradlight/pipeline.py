"""End-to-end gradient-domain enhancement for gray and colour images."""

from __future__ import annotations

import dataclasses

import numpy as np

from .color import YccImage, rgb_to_ycc, ycc_to_rgb
from .gradient import EnhancementParams, compute_gradients, enhance_gradients, manipulate
from .image import IntensityRange, as_gray, as_rgb
from .integrator import SolveReport, SolverConfig, integrate

__all__ = ["enhanced_field", "enhance_gray", "enhance_color", "enhance"]


def enhanced_field(f, p: EnhancementParams, hook=None):
    """Target gradient field for luminance ``f``: gradients, gain, then ``hook``."""
    f = as_gray(f)
    return manipulate(enhance_gradients(f, compute_gradients(f), p), hook)


def enhance_gray(
    f,
    p: EnhancementParams = EnhancementParams(),
    rng: IntensityRange = IntensityRange(),
    cfg: SolverConfig = SolverConfig(),
    hook=None,
) -> tuple[np.ndarray, SolveReport]:
    """Enhance a gray image.

    The solver is warm-started from ``f`` clipped to ``rng`` and, unless
    ``cfg.anchor_mean`` is set, the result is anchored to the mean of ``f``.
    """
    f = as_gray(f)
    q = enhanced_field(f, p, hook)
    if cfg.anchor_mean is None:
        cfg = dataclasses.replace(cfg, anchor_mean=float(f.mean()))
    return integrate(q, rng, cfg, init=rng.clip(f))


def enhance_color(
    img,
    p: EnhancementParams = EnhancementParams(),
    rng: IntensityRange = IntensityRange(),
    cfg: SolverConfig = SolverConfig(),
    hook=None,
) -> tuple[np.ndarray, SolveReport]:
    """Enhance the luminance of an RGB image and keep its chroma.

    The returned RGB array is not clamped; out-of-gamut values are handled
    when the image is saved.
    """
    ycc = rgb_to_ycc(as_rgb(img))
    y, report = enhance_gray(ycc.y, p, rng, cfg, hook)
    return ycc_to_rgb(YccImage(y, ycc.cb, ycc.cr)), report


def enhance(img, p=EnhancementParams(), rng=IntensityRange(), cfg=SolverConfig(), hook=None):
    """Dispatch on dimensionality: 2-D arrays are gray, (H, W, 3) arrays colour."""
    if np.ndim(img) == 2:
        return enhance_gray(img, p, rng, cfg, hook)
    return enhance_color(img, p, rng, cfg, hook)
