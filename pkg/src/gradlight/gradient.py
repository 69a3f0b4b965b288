"""Forward-difference gradients, their adjoint, and dark-region gradient gain."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .image import as_gray

__all__ = [
    "GradientField",
    "EnhancementParams",
    "compute_gradients",
    "divergence",
    "enhancement_gain",
    "enhance_gradients",
    "manipulate",
    "identity_hook",
]

GAIN_MODES = ("continuous", "literal")


@dataclass(frozen=True)
class GradientField:
    """Horizontal/vertical forward differences of a ``height x width`` image.

    ``gh`` has shape ``(height, width - 1)`` and ``gv`` has shape
    ``(height - 1, width)``; there is no padded boundary row or column.
    """

    gh: np.ndarray
    gv: np.ndarray

    def __post_init__(self):
        gh = np.asarray(self.gh, dtype=np.float64)
        gv = np.asarray(self.gv, dtype=np.float64)
        if gh.ndim != 2 or gv.ndim != 2:
            raise ValueError("gradient planes must be 2-D")
        h, w = gh.shape[0], gh.shape[1] + 1
        if gv.shape != (h - 1, w):
            raise ValueError(f"inconsistent gradient planes gh{gh.shape} gv{gv.shape}")
        if h < 1:
            raise ValueError("gradient field of an empty image")
        if not (np.all(np.isfinite(gh)) and np.all(np.isfinite(gv))):
            raise ValueError("gradient field contains non-finite values")
        object.__setattr__(self, "gh", gh)
        object.__setattr__(self, "gv", gv)

    @property
    def height(self) -> int:
        return self.gh.shape[0]

    @property
    def width(self) -> int:
        return self.gh.shape[1] + 1

    @property
    def shape(self) -> tuple[int, int]:
        """Shape ``(height, width)`` of the image the field belongs to."""
        return (self.height, self.width)

    @classmethod
    def zeros(cls, height: int, width: int) -> "GradientField":
        return cls(np.zeros((height, width - 1)), np.zeros((height - 1, width)))

    def __add__(self, other: "GradientField") -> "GradientField":
        return GradientField(self.gh + other.gh, self.gv + other.gv)

    def __mul__(self, k: float) -> "GradientField":
        return GradientField(self.gh * k, self.gv * k)

    __rmul__ = __mul__

    def dot(self, other: "GradientField") -> float:
        return float(np.sum(self.gh * other.gh) + np.sum(self.gv * other.gv))

    def norm(self) -> float:
        return float(np.sqrt(self.dot(self)))


@dataclass(frozen=True)
class EnhancementParams:
    """Gain parameters: ``beta`` is the gain at intensity zero, ``tau`` the
    intensity above which gradients are left alone.

    ``mode="continuous"`` uses ``(beta-1)(1 - xi/tau)**2 + 1`` which falls
    smoothly to 1 at ``tau``.  ``mode="literal"`` uses the quadratic with
    coefficients ``(beta-1)/(2 tau^2)``, ``-(beta-1)/tau``, ``beta``; it
    reaches ``(beta+1)/2`` at ``tau`` and then drops to 1.
    """

    beta: float = 15.0
    tau: float = 50.0
    mode: str = "continuous"

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not np.isfinite(self.tau) or self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.mode not in GAIN_MODES:
            raise ValueError(f"mode must be one of {GAIN_MODES}, got {self.mode!r}")


def compute_gradients(img) -> GradientField:
    """Forward differences ``f(x+1, y) - f(x, y)`` and ``f(x, y+1) - f(x, y)``."""
    f = as_gray(img)
    return GradientField(f[:, 1:] - f[:, :-1], f[1:, :] - f[:-1, :])


def divergence(g: GradientField) -> np.ndarray:
    """Negative adjoint of :func:`compute_gradients`.

    Satisfies ``<D u, g> == -<u, divergence(g)>`` for every image ``u``.
    At pixel ``x`` it is ``g[x] - g[x-1]`` along each axis, with samples
    outside the field counted as zero.
    """
    h, w = g.shape
    div = np.zeros((h, w))
    div[:, :-1] += g.gh
    div[:, 1:] -= g.gh
    div[:-1, :] += g.gv
    div[1:, :] -= g.gv
    return div


def enhancement_gain(xi, p: EnhancementParams):
    """Gradient gain for pixel intensity ``xi`` (scalar or array).

    Negative intensities are treated as 0.
    """
    scalar = np.ndim(xi) == 0
    x = np.maximum(np.asarray(xi, dtype=np.float64), 0.0)
    b, t = float(p.beta), float(p.tau)
    if p.mode == "continuous":
        s = 1.0 - x / t
        low = (b - 1.0) * s * s + 1.0
    else:
        low = (b - 1.0) / (2.0 * t * t) * x * x - (b - 1.0) / t * x + b
    out = np.where(x <= t, low, 1.0)
    return float(out) if scalar else out


def enhance_gradients(img, g: GradientField, p: EnhancementParams) -> GradientField:
    """Scale each forward difference by the gain of its base pixel.

    ``qh[y, x] = gh[y, x] * L(f[y, x])`` and ``qv[y, x] = gv[y, x] * L(f[y, x])``.
    """
    f = as_gray(img)
    if f.shape != g.shape:
        raise ValueError(f"image shape {f.shape} does not match gradient field {g.shape}")
    gain = enhancement_gain(f, p)
    return GradientField(g.gh * gain[:, :-1], g.gv * gain[:-1, :])


def identity_hook(g: GradientField) -> GradientField:
    return g


def manipulate(g: GradientField, hook: Callable[[GradientField], GradientField] | None = None) -> GradientField:
    """Apply a caller-supplied gradient transform before integration.

    The hook may return a :class:`GradientField` or a ``(gh, gv)`` pair; the
    result must have the same plane shapes as ``g``.
    """
    if hook is None:
        return g
    out = hook(g)
    if not isinstance(out, GradientField):
        gh, gv = out
        gh, gv = np.asarray(gh, dtype=np.float64), np.asarray(gv, dtype=np.float64)
    else:
        gh, gv = out.gh, out.gv
    if gh.shape != g.gh.shape or gv.shape != g.gv.shape:
        raise ValueError(
            f"hook changed field shape: gh {g.gh.shape}->{gh.shape}, gv {g.gv.shape}->{gv.shape}"
        )
    return out if isinstance(out, GradientField) else GradientField(gh, gv)
