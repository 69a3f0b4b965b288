"""Box-constrained least-squares integration of a gradient field.

Finds ``u`` minimising

    O(u) = sum((D u - q)**2)      subject to  r_min <= u <= r_max

where ``D`` is the forward-difference operator of :mod:`gradlight.gradient`.
The normal equations are a Neumann Poisson problem, solved here by projected
successive over-relaxation: each pixel is moved toward the value that zeroes
its own residual and clamped into the box before the next pixel is visited.

Sign convention for the per-pixel residual used throughout::

    r = grad(O)/2 = D^T (D u - q) = n_p u_p - sum(neighbours) + div(q)_p

so an interior optimum has ``r == 0``, a pixel on the lower bound needs
``r >= 0`` and one on the upper bound needs ``r <= 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from .gradient import GradientField, divergence
from .image import IntensityRange, as_gray

__all__ = [
    "SolverConfig",
    "optimal_omega",
    "SolveReport",
    "KKTReport",
    "integrate",
    "anchor",
    "objective",
    "residual",
    "projected_residual",
    "kkt_report",
]

log = logging.getLogger(__name__)

ORDERINGS = ("lexicographic", "red-black")


def optimal_omega(shape: tuple[int, int]) -> float:
    """Classical SOR-optimal relaxation ``2 / (1 + sin(pi / N))`` for an N-pixel side."""
    n = max(shape)
    if n < 2:
        return 1.0
    return 2.0 / (1.0 + np.sin(np.pi / n))


@dataclass(frozen=True)
class SolverConfig:
    """Projected SOR settings.

    ``omega=None`` selects :func:`optimal_omega` for the image being solved.
    ``anchor_mean=None`` anchors to the mean of the starting image.
    """

    tol: float = 1e-3
    max_sweeps: int = 10000
    omega: float | None = None
    anchor_mean: float | None = None
    ordering: str = "lexicographic"
    threads: int = 1

    def __post_init__(self):
        if self.omega is not None and not (0.0 < self.omega < 2.0):
            raise ValueError(f"omega must lie in (0, 2), got {self.omega}")
        if not (self.tol >= 0.0):
            raise ValueError(f"tol must be >= 0, got {self.tol}")
        if int(self.max_sweeps) < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.anchor_mean is not None and not np.isfinite(self.anchor_mean):
            raise ValueError("anchor_mean must be finite")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        if int(self.threads) < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class SolveReport:
    sweeps_used: int
    final_residual: float
    objective: float
    converged: bool
    history: list[float] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "sweeps_used": int(self.sweeps_used),
            "final_residual": float(self.final_residual),
            "objective": float(self.objective),
            "converged": bool(self.converged),
        }


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True, inline="always")
def _clamp(v, lo, hi):
    return min(max(v, lo), hi)


@numba.njit(cache=True)
def _relax_pixel(u, divq, y, x, lo, hi, omega):
    h, w = u.shape
    n = 0
    s = 0.0
    if x > 0:
        s += u[y, x - 1]
        n += 1
    if x < w - 1:
        s += u[y, x + 1]
        n += 1
    if y > 0:
        s += u[y - 1, x]
        n += 1
    if y < h - 1:
        s += u[y + 1, x]
        n += 1
    if n == 0:
        return
    old = u[y, x]
    u[y, x] = _clamp(old + omega * ((s - divq[y, x]) / n - old), lo, hi)


@numba.njit(cache=True)
def _sweep_lexicographic(u, divq, lo, hi, omega):
    h, w = u.shape
    keep = 1.0 - omega
    quarter = 0.25 * omega
    for y in range(h):
        if y == 0 or y == h - 1 or w < 3:
            for x in range(w):
                _relax_pixel(u, divq, y, x, lo, hi, omega)
            continue
        _relax_pixel(u, divq, y, 0, lo, hi, omega)
        # interior pixels have four neighbours; carry the just-updated left value
        left = u[y, 0]
        for x in range(1, w - 1):
            v = keep * u[y, x] + quarter * (left + u[y, x + 1] + u[y - 1, x] + u[y + 1, x] - divq[y, x])
            left = _clamp(v, lo, hi)
            u[y, x] = left
        _relax_pixel(u, divq, y, w - 1, lo, hi, omega)


@numba.njit(cache=True, parallel=True)
def _sweep_red_black(u, divq, lo, hi, omega):
    h, w = u.shape
    for color in range(2):
        for y in numba.prange(h):
            for x in range((y + color) % 2, w, 2):
                _relax_pixel(u, divq, y, x, lo, hi, omega)


@numba.njit(cache=True)
def _max_projected_residual(u, divq, lo, hi):
    h, w = u.shape
    worst = 0.0
    for y in range(h):
        for x in range(w):
            n = 0
            s = 0.0
            if x > 0:
                s += u[y, x - 1]
                n += 1
            if x < w - 1:
                s += u[y, x + 1]
                n += 1
            if y > 0:
                s += u[y - 1, x]
                n += 1
            if y < h - 1:
                s += u[y + 1, x]
                n += 1
            r = n * u[y, x] - s + divq[y, x]
            step = u[y, x] - r
            if step < lo:
                step = lo
            elif step > hi:
                step = hi
            d = abs(u[y, x] - step)
            if d > worst:
                worst = d
    return worst


# ---------------------------------------------------------------------------
# vectorised helpers (also used for verification)


def objective(u, q: GradientField) -> float:
    """Gradient-fidelity sum of squares ``sum((D u - q)**2)``."""
    u = np.asarray(u, dtype=np.float64)
    eh = (u[:, 1:] - u[:, :-1]) - q.gh
    ev = (u[1:, :] - u[:-1, :]) - q.gv
    return float(np.sum(eh * eh) + np.sum(ev * ev))


def residual(u, q: GradientField) -> np.ndarray:
    """Per-pixel normal-equation residual ``D^T (D u - q)``."""
    u = np.asarray(u, dtype=np.float64)
    eh = (u[:, 1:] - u[:, :-1]) - q.gh
    ev = (u[1:, :] - u[:-1, :]) - q.gv
    return -divergence(GradientField(eh, ev))


def projected_residual(u, q: GradientField, rng: IntensityRange) -> np.ndarray:
    """``|u - clip(u - r)|`` per pixel; zero exactly at a box-constrained optimum."""
    u = np.asarray(u, dtype=np.float64)
    return np.abs(u - rng.clip(u - residual(u, q)))


def anchor(u, rng: IntensityRange, anchor_mean: float) -> np.ndarray:
    """Shift ``u`` by a constant toward mean ``anchor_mean`` while staying in range.

    The shift is ``clip(anchor_mean - mean(u), r_min - min(u), r_max - max(u))``.
    Adding a constant does not change any pixel difference, so the objective
    is unaffected.
    """
    u = as_gray(u)
    lo = rng.r_min - u.min()
    hi = rng.r_max - u.max()
    if lo > hi:
        raise ValueError("image does not fit in the intensity range")
    c = min(max(anchor_mean - float(u.mean()), lo), hi)
    # u + (r_min - min u) can miss r_min by an ulp
    return rng.clip(u + c)


def integrate(
    q: GradientField,
    rng: IntensityRange = IntensityRange(),
    cfg: SolverConfig = SolverConfig(),
    init=None,
    callback: Callable[[int, np.ndarray], None] | None = None,
    record_history: bool = False,
) -> tuple[np.ndarray, SolveReport]:
    """Integrate ``q`` into an image that stays inside ``rng``.

    Iterates projected SOR sweeps until the max-norm projected residual is at
    most ``cfg.tol`` or ``cfg.max_sweeps`` is reached.  Without ``init`` the
    iterate starts as a constant (``cfg.anchor_mean`` clipped, else the range
    midpoint).  After the loop the result is shifted toward
    ``cfg.anchor_mean``, or toward the mean of the starting image when that is
    ``None``.

    If the sweep budget runs out, the iterate with the smallest residual is
    returned and ``report.converged`` is False.  ``callback(k, u)`` is called
    after every sweep; ``record_history`` stores the objective before the
    first sweep and after each sweep in ``report.history``.
    """
    h, w = q.shape
    if init is None:
        start = cfg.anchor_mean if cfg.anchor_mean is not None else 0.5 * (rng.r_min + rng.r_max)
        u = np.full((h, w), float(rng.clip(start)))
    else:
        u = as_gray(init).copy()
        if u.shape != (h, w):
            raise ValueError(f"init shape {u.shape} does not match field {q.shape}")
        if not rng.contains(u):
            raise ValueError("init lies outside the intensity range")
    target_mean = cfg.anchor_mean if cfg.anchor_mean is not None else float(u.mean())

    divq = np.ascontiguousarray(divergence(q))
    lo, hi = float(rng.r_min), float(rng.r_max)
    omega = float(cfg.omega) if cfg.omega is not None else optimal_omega((h, w))
    if cfg.ordering == "red-black":
        sweep = _sweep_red_black
        numba.set_num_threads(min(int(cfg.threads), numba.config.NUMBA_NUM_THREADS))
    else:
        sweep = _sweep_lexicographic

    history = [objective(u, q)] if record_history else []
    res = _max_projected_residual(u, divq, lo, hi)
    best, best_res = u.copy(), res
    k = 0
    while res > cfg.tol and k < cfg.max_sweeps:
        sweep(u, divq, lo, hi, omega)
        k += 1
        res = _max_projected_residual(u, divq, lo, hi)
        if record_history:
            history.append(objective(u, q))
        if callback is not None:
            callback(k, u)
        if res < best_res:
            best_res = res
            best[...] = u

    converged = best_res <= cfg.tol
    if not converged:
        log.warning("integration stopped after %d sweeps, residual %.3g > tol %.3g", k, best_res, cfg.tol)
    out = anchor(best, rng, target_mean)
    report = SolveReport(
        sweeps_used=k,
        final_residual=float(best_res),
        objective=objective(out, q),
        converged=bool(converged),
        history=history,
    )
    return out, report


@dataclass
class KKTReport:
    """First-order optimality check of a box-constrained integration result.

    ``status`` holds 0 for interior pixels, -1 for pixels on the lower bound
    and +1 for pixels on the upper bound.  ``violation`` is the amount by
    which each pixel breaks its condition (0 when satisfied).
    """

    residual: np.ndarray
    status: np.ndarray
    violation: np.ndarray
    tol: float

    @property
    def violating(self) -> np.ndarray:
        return self.violation > self.tol

    @property
    def n_violations(self) -> int:
        return int(np.count_nonzero(self.violating))

    @property
    def max_violation(self) -> float:
        return float(self.violation.max()) if self.violation.size else 0.0

    def summary(self) -> dict:
        v = self.violating
        return {
            "pixels": int(self.residual.size),
            "interior": int(np.count_nonzero(self.status == 0)),
            "at_lower": int(np.count_nonzero(self.status < 0)),
            "at_upper": int(np.count_nonzero(self.status > 0)),
            "violations": int(np.count_nonzero(v)),
            "interior_violations": int(np.count_nonzero(v & (self.status == 0))),
            "lower_violations": int(np.count_nonzero(v & (self.status < 0))),
            "upper_violations": int(np.count_nonzero(v & (self.status > 0))),
            "max_violation": self.max_violation,
            "tol": float(self.tol),
        }


def kkt_report(
    u,
    q: GradientField,
    rng: IntensityRange,
    tol: float = 1e-5,
    bound_tol: float | None = None,
) -> KKTReport:
    """Classify pixels and measure their optimality-condition violations.

    Interior pixels need ``|r| <= tol``; pixels at ``r_min`` need
    ``r >= -tol``; pixels at ``r_max`` need ``r <= tol``.  A pixel counts as
    on a bound when it is within ``bound_tol`` of it (default ``1e-9`` of the
    range width, enough to absorb colour round-trip rounding).  Pixels
    outside the range are flagged as violations by their distance to it.
    """
    u = as_gray(u)
    if u.shape != q.shape:
        raise ValueError(f"image shape {u.shape} does not match field {q.shape}")
    if bound_tol is None:
        bound_tol = 1e-9 * (rng.r_max - rng.r_min)
    r = residual(u, q)
    status = np.where(
        u <= rng.r_min + bound_tol, -1, np.where(u >= rng.r_max - bound_tol, 1, 0)
    ).astype(np.int8)
    violation = np.where(
        status == 0,
        np.abs(r),
        np.where(status < 0, np.maximum(-r, 0.0), np.maximum(r, 0.0)),
    )
    outside = np.maximum(rng.r_min - u, 0.0) + np.maximum(u - rng.r_max, 0.0)
    violation = np.maximum(violation, outside)
    return KKTReport(residual=r, status=status, violation=violation, tol=float(tol))
