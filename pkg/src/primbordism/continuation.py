"""Predictor-corrector continuation of 1-dimensional solution sets.

The solution set lives in a product of copies of a charted domain.  A state
is an array of shape ``(copies, point_dim)``; local coordinates are the
concatenated chart offsets.  Tangents are carried between charts as ambient
vectors so their orientation survives re-centering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ProductSpace:
    def __init__(self, domain, copies: int):
        self.domain = domain
        self.copies = copies
        self.local_dim = domain.dim * copies

    def _split(self, u):
        d = self.domain.dim
        return [u[i * d:(i + 1) * d] for i in range(self.copies)]

    def push(self, x, u):
        return np.stack([self.domain.push(x[i], ui) for i, ui in enumerate(self._split(u))])

    def to_ambient(self, x, t):
        return np.concatenate([self.domain.to_ambient(x[i], ti) for i, ti in enumerate(self._split(t))])

    def from_ambient(self, x, v):
        pd = self.domain.point_dim
        return np.concatenate(
            [self.domain.from_ambient(x[i], v[i * pd:(i + 1) * pd]) for i in range(self.copies)]
        )

    def offset(self, x, y):
        """Chart coordinates of ``y`` in the charts at ``x``."""
        return np.concatenate([self.domain.chart_offset(x[i], y[i]) for i in range(self.copies)])

    def distance(self, x, y) -> float:
        return float(max(self.domain.distance(x[i], y[i]) for i in range(self.copies)))

    def lift_distance(self, x, y) -> float:
        return float(max(self.domain.lift_distance(x[i], y[i]) for i in range(self.copies)))


Residual = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass
class TraceResult:
    points: list[np.ndarray]
    status: str  # closed | event | stalled | max_steps
    arclength: float = 0.0
    steps: int = 0
    halvings: int = 0
    event_state: np.ndarray | None = None
    info: dict = field(default_factory=dict)


def null_tangent(J: np.ndarray) -> np.ndarray:
    """Unit null vector of a full-rank ``(m, m+1)`` Jacobian."""
    J = np.atleast_2d(J)
    if J.shape == (1, 2):
        t = np.array([-J[0, 1], J[0, 0]])
        return t / np.linalg.norm(t)
    _, _, vt = np.linalg.svd(J)
    return vt[-1]


def smallest_singular_value(J: np.ndarray) -> float:
    J = np.atleast_2d(J)
    if J.shape[0] == 1:
        return float(np.linalg.norm(J))
    return float(np.linalg.svd(J, compute_uv=False)[-1])


def newton_project(space: ProductSpace, residual: Residual, x, tol=1e-12, max_iter=30):
    """Minimum-norm Newton onto the solution set; returns ``(x, residual_norm, ok)``."""
    for _ in range(max_iter):
        F, J = residual(x)
        du = -np.linalg.pinv(np.atleast_2d(J)) @ F
        x = space.push(x, du)
        if np.linalg.norm(du) < tol:
            break
    F, _ = residual(x)
    res = float(np.linalg.norm(F))
    return x, res, bool(np.isfinite(res))


def _correct(space, residual, xp, T, ftol, max_iter):
    y = xp
    for it in range(max_iter):
        F, J = residual(y)
        ty = space.from_ambient(y, T)
        ty /= np.linalg.norm(ty)
        w = space.offset(y, xp)
        A = np.vstack([np.atleast_2d(J), ty])
        rhs = np.concatenate([-F, [ty @ w]])
        try:
            du = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            du = np.linalg.lstsq(A, rhs, rcond=None)[0]
        y = space.push(y, du)
        if np.linalg.norm(du) < 1e-13 or (np.linalg.norm(F) < ftol and np.linalg.norm(du) < 1e-10):
            F, J = residual(y)
            return y, F, J, it + 1, np.linalg.norm(F) < 10 * ftol
    F, J = residual(y)
    return y, F, J, max_iter, False


def trace(
    space: ProductSpace,
    residual: Residual,
    x0: np.ndarray,
    T0: np.ndarray,
    step: float = 1e-2,
    max_steps: int = 20000,
    max_arclength: float = 200.0,
    closure: bool = True,
    event: Callable[[np.ndarray, np.ndarray], bool] | None = None,
    max_angle: float = 0.5,
    min_step: float = 1e-9,
    ftol: float = 1e-11,
) -> TraceResult:
    """Follow the curve ``residual = 0`` from ``x0`` in ambient direction ``T0``.

    Each step predicts along the tangent, corrects on the hyperplane
    orthogonal to it, and halves the step when the corrector fails, the
    tangent turns by more than ``max_angle`` radians or the point jumps.
    The tangent is oriented by continuity, which lets the tracer pass
    straight through transversal self-crossings of the solution set.
    """
    x = np.array(x0, dtype=float)
    T = np.asarray(T0, dtype=float)
    T = T / np.linalg.norm(T)
    h = step
    pts = [x]
    arclength = 0.0
    halvings = 0
    cos_max = np.cos(max_angle)
    far = False
    for n in range(max_steps):
        t = space.from_ambient(x, T)
        t /= np.linalg.norm(t)
        xp = space.push(x, h * t)
        y, F, J, iters, ok = _correct(space, residual, xp, T, ftol, 12)
        if ok:
            tn = null_tangent(J)
            Tn = space.to_ambient(y, tn)
            c = float(Tn @ T) / (np.linalg.norm(Tn) * np.linalg.norm(T))
            if c < 0:
                Tn, c = -Tn, -c
            moved = float(np.linalg.norm(space.offset(x, y)))
            # near a crossing the null direction is unreliable: keep the old one
            if smallest_singular_value(J) < 1e-6:
                Tn, c = T, 1.0
            ok = c > cos_max and moved < 2.0 * h
        if not ok:
            h *= 0.5
            halvings += 1
            if h < min_step:
                return TraceResult(pts, "stalled", arclength, n, halvings, info={"at": x})
            continue
        arclength += h
        if event is not None and event(x, y):
            pts.append(y)
            return TraceResult(pts, "event", arclength, n + 1, halvings, event_state=y)
        pts.append(y)
        x, T = y, Tn / np.linalg.norm(Tn)
        if iters <= 3:
            h = min(step, 1.5 * h)
        if closure:
            d0 = space.lift_distance(x, x0)
            if d0 > 4 * step:
                far = True
            elif far and d0 < 1.5 * step:
                pts.append(np.array(x0))
                return TraceResult(pts, "closed", arclength + d0, n + 1, halvings)
        if arclength > max_arclength:
            break
    return TraceResult(pts, "max_steps", arclength, max_steps, halvings)
