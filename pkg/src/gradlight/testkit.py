"""Independent reference solvers and seeded instance generators for tests.

Nothing here calls the production integrator or the gradient module's
numerics; the difference operator is rebuilt as an explicit dense matrix.
"""

from __future__ import annotations

import numpy as np

from .gradient import GradientField
from .image import IntensityRange

__all__ = [
    "MAX_ORACLE_SIDE",
    "difference_matrix",
    "stack_field",
    "oracle_objective",
    "qp_oracle",
    "unconstrained_solution",
    "make_instance",
]

MAX_ORACLE_SIDE = 16
INSTANCE_KINDS = ("integrable", "random", "saturating")


def difference_matrix(h: int, w: int) -> np.ndarray:
    """Dense forward-difference matrix: rows are horizontal pairs then vertical pairs."""
    rows = []
    idx = np.arange(h * w).reshape(h, w)
    for y in range(h):
        for x in range(w - 1):
            rows.append((idx[y, x], idx[y, x + 1]))
    for y in range(h - 1):
        for x in range(w):
            rows.append((idx[y, x], idx[y + 1, x]))
    d = np.zeros((len(rows), h * w))
    for k, (a, b) in enumerate(rows):
        d[k, a] = -1.0
        d[k, b] = 1.0
    return d


def stack_field(q: GradientField) -> np.ndarray:
    """Flatten a field in the row order of :func:`difference_matrix`."""
    return np.concatenate([np.ravel(q.gh), np.ravel(q.gv)])


def oracle_objective(u, q: GradientField) -> float:
    u = np.asarray(u, dtype=np.float64)
    h, w = u.shape
    e = difference_matrix(h, w) @ u.ravel() - stack_field(q)
    return float(e @ e)


def qp_oracle(
    q: GradientField,
    rng: IntensityRange = IntensityRange(),
    max_iter: int = 200_000,
    min_change: float = 1e-12,
) -> tuple[np.ndarray, float]:
    """Box-constrained least squares by projected gradient descent.

    Step size is 1/16, the reciprocal of the Lipschitz bound ``2 * 8`` on
    the objective's gradient.  Stops after ``max_iter`` steps or when one
    step changes the objective by less than ``min_change``.
    """
    h, w = q.shape
    if h > MAX_ORACLE_SIDE or w > MAX_ORACLE_SIDE:
        raise ValueError(f"oracle limited to {MAX_ORACLE_SIDE}x{MAX_ORACLE_SIDE}, got {h}x{w}")
    d = difference_matrix(h, w)
    b = stack_field(q)
    u = np.full(h * w, 0.5 * (rng.r_min + rng.r_max))
    if d.shape[0] == 0:
        return u.reshape(h, w), 0.0
    e = d @ u - b
    obj = float(e @ e)
    for _ in range(max_iter):
        u = np.clip(u - (2.0 / 16.0) * (d.T @ e), rng.r_min, rng.r_max)
        e = d @ u - b
        new = float(e @ e)
        done = abs(obj - new) < min_change
        obj = new
        if done:
            break
    return u.reshape(h, w), obj


def unconstrained_solution(q: GradientField, mean: float = 127.5) -> np.ndarray:
    """Least-squares integral without the box, shifted to the given mean."""
    h, w = q.shape
    d = difference_matrix(h, w)
    if d.shape[0] == 0:
        return np.full((h, w), float(mean))
    u = np.linalg.lstsq(d, stack_field(q), rcond=None)[0]
    return (u - u.mean() + mean).reshape(h, w)


def _diff_field(img: np.ndarray) -> GradientField:
    return GradientField(np.diff(img, axis=1), np.diff(img, axis=0))


def make_instance(seed: int, w: int, h: int, kind: str = "random") -> tuple[np.ndarray, GradientField]:
    """Seeded ``(image, field)`` pair.

    ``integrable``: field is the exact difference field of the random
    in-range image.  ``saturating``: that field scaled up so any exact
    integral spans more than 255 levels.  ``random``: i.i.d. samples in
    [-64, 64]; the image is an unrelated random in-range image.
    """
    if w < 1 or h < 1:
        raise ValueError("instance dimensions must be positive")
    if kind not in INSTANCE_KINDS:
        raise ValueError(f"kind must be one of {INSTANCE_KINDS}")
    gen = np.random.default_rng(seed)
    img = gen.uniform(0.0, 255.0, size=(h, w))
    if kind == "random":
        return img, GradientField(gen.uniform(-64, 64, (h, w - 1)), gen.uniform(-64, 64, (h - 1, w)))
    field = _diff_field(img)
    if kind == "saturating":
        span = float(np.ptp(img))
        field = field * (max(3.0, 2.0 * 255.0 / span) if span > 0 else 3.0)
    return img, field
