"""Explicit parametrization of the local pair manifold of a Morin germ.

For a stratum level ``j`` the pairs are ``(u, v)`` with ``u`` in the level-``j``
stratum, ``F(u) = F(v)`` and ``t(v) > t(u)``.  Given ``t(u)``, ``t(v)`` and the
coefficients of degree ``>= j + 2`` the remaining coefficients are unique; at
the top level ``j = r - 1`` the pair is determined by ``t(v)`` alone.  As
``t(v) - t(u) -> 0`` the pairs converge onto the diagonal over the level
``j + 1`` stratum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, sqrt
from typing import Mapping, Sequence

from .normal_form import (
    ContractError,
    NormalFormSpec,
    Slot,
    SourcePoint,
    component_polys,
    stratum_membership,
)
from .poly import RationalPoly, derivative, taylor_shift


@dataclass(frozen=True)
class PairSolution:
    spec: NormalFormSpec
    j: int
    tu: Fraction
    tv: Fraction
    coeffs: Mapping[Slot, Fraction]
    u: SourcePoint
    v: SourcePoint

    def polys(self) -> list[RationalPoly]:
        return component_polys(self.spec, self.coeffs)

    def coefficient_vector(self) -> tuple[Fraction, ...]:
        return tuple(self.coeffs[sl] for sl in self.spec.slots())


def _known_part(spec: NormalFormSpec, i: int, j: int, high: Mapping[Slot, Fraction]) -> RationalPoly:
    cs = [Fraction(0)] * (spec.r + 2)
    for m in range(j + 2, spec.r + 1):
        if (i, m) in high:
            cs[m] = high[(i, m)]
    if i == 0:
        cs[spec.r + 1] = Fraction(1)
    return RationalPoly(cs)


def pair_high_slots(spec: NormalFormSpec, j: int) -> list[Slot]:
    return spec.high_slots(j + 1)


def solve_pair(
    spec: NormalFormSpec,
    j: int,
    tu,
    tv,
    high: Mapping[Slot, Fraction] | None = None,
    s: Sequence = (),
) -> PairSolution:
    """Solve for the low coefficients of every ``p_i`` from the pair constraints.

    Per component the polynomial splits as ``p = q + known`` where ``known``
    holds the prescribed coefficients of degree ``>= j + 2`` (plus the
    leading ``t^(r+1)`` of ``p_0``).  Writing ``q`` around ``tu``::

        q(t) = q(tu) + sum_{m=1..j} q^(m)(tu) (t - tu)^m / m! + lam (t - tu)^(j+1)

    the derivative conditions give ``q^(m)(tu) = -known^(m)(tu)``, matching
    ``p(tu) = p(tv)`` gives ``lam``, and ``q(0) = 0`` pins ``q(tu)``.
    """
    if j >= spec.r - 1:
        raise ContractError("use solve_pair_top for j = r - 1")
    if j < 0:
        raise ContractError("stratum level must be >= 0")
    tu, tv = Fraction(tu), Fraction(tv)
    if not tv > tu:
        raise ContractError(f"outside half-space: need tv > tu, got tu={tu}, tv={tv}")
    high = {tuple(k): Fraction(v) for k, v in (high or {}).items()}
    expected = set(pair_high_slots(spec, j))
    if set(high) != expected:
        raise ContractError(f"high block must have slots {sorted(expected)}, got {sorted(high)}")
    if len(s) != spec.z:
        raise ContractError(f"need {spec.z} s-coordinates")

    gap = tv - tu
    coeffs = dict(high)
    for i in range(spec.k + 1):
        known = _known_part(spec, i, j, high)
        qd = [-derivative(known, m)(tu) for m in range(j + 1)]  # qd[0] unused
        taylor_sum = sum((qd[m] * gap**m / factorial(m) for m in range(1, j + 1)), Fraction(0))
        lam = (known(tu) - known(tv) - taylor_sum) / gap ** (j + 1)
        # Q(s) = q(tu + s) without its constant term
        Q = RationalPoly([0] + [qd[m] / factorial(m) for m in range(1, j + 1)] + [lam])
        q_at_tu = -Q(-tu)  # from q(0) = Q(-tu) + q(tu) = 0
        q = taylor_shift(Q + q_at_tu, -tu)
        assert q.degree <= j + 1 and (not q.coeffs or q.coeffs[0] == 0)
        for m in range(1, j + 2):
            coeffs[(i, m)] = q.coeffs[m] if m < len(q.coeffs) else Fraction(0)
    u = SourcePoint(tu, coeffs, tuple(s))
    v = SourcePoint(tv, coeffs, tuple(s))
    return PairSolution(spec, j, tu, tv, coeffs, u, v)


def solve_pair_top(spec: NormalFormSpec, tv, s: Sequence = ()) -> PairSolution:
    """The pair at the top level ``j = r - 1``.

    Only ``p_0`` survives; it must be ``p(tu) + (t + r tu)(t - tu)^r`` and
    the missing ``t^r`` term forces ``tu = -tv / r``.
    """
    tv = Fraction(tv)
    if not tv > 0:
        raise ContractError(f"outside half-space: need tv > 0, got {tv}")
    if len(s) != spec.z:
        raise ContractError(f"need {spec.z} s-coordinates")
    r = spec.r
    tu = -tv / r
    core = RationalPoly([r * tu, 1]) * RationalPoly([-tu, 1]) ** r
    p0 = core - core(0)
    assert len(p0.coeffs) == r + 2 and p0.coeffs[r] == 0 and p0.coeffs[0] == 0
    coeffs = {sl: Fraction(0) for sl in spec.slots()}
    for m in range(1, r):
        coeffs[(0, m)] = p0.coeffs[m] if m < len(p0.coeffs) else Fraction(0)
    u = SourcePoint(tu, coeffs, tuple(s))
    v = SourcePoint(tv, coeffs, tuple(s))
    return PairSolution(spec, r - 1, tu, tv, coeffs, u, v)


def pair_residuals(sol: PairSolution) -> list[Fraction]:
    """Every defining constraint of the pair; all zero for a valid solution."""
    out = []
    for p in sol.polys():
        for m in range(1, sol.j + 1):
            out.append(derivative(p, m)(sol.tu))
        out.append(p(sol.tu) - p(sol.tv))
    return out


@dataclass
class ConvergenceReport:
    gaps: list[Fraction]
    distances: list[float]
    extrapolated: SourcePoint
    limit_in_stratum: bool
    monotone: bool
    reached_gap: bool
    within_tolerance: bool
    passed: bool


def _neville_at_zero(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> Fraction:
    """Value at 0 of the interpolating polynomial through ``(xs, ys)``."""
    p = list(ys)
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            p[i] = (x1 * p[i] - x0 * p[i + 1]) / (x1 - x0)
    return p[0]


def boundary_limit_check(
    spec: NormalFormSpec,
    j: int,
    param_path: Sequence[tuple],
    limit_point: SourcePoint,
    tol: float = 1e-6,
    gap_threshold: float = 1e-4,
) -> ConvergenceReport:
    """Follow pair solutions towards the diagonal and test the limit.

    Each path entry is ``(tu, tv, high)``; at the top level ``j = r - 1``
    ``tu`` may be ``None`` (it is determined by ``tv``) and ``high`` is empty.
    Passes when the coefficient distance to ``limit_point`` strictly
    decreases, stays below ``tol`` once the gap is ``<= gap_threshold``, and
    the polynomial extrapolation of the path to gap zero lies exactly in the
    level ``j + 1`` stratum.
    """
    if not param_path:
        raise ContractError("empty path")
    limit_point.check(spec)
    if not stratum_membership(spec, limit_point, j + 1):
        raise ContractError("limit point is not in the level j+1 stratum")
    top = j == spec.r - 1
    expected = set() if top else set(pair_high_slots(spec, j))
    sols = []
    for entry in param_path:
        tu, tv, high = entry
        high = dict(high or {})
        if set(map(tuple, high)) != expected:
            raise ContractError(f"path entry {entry!r} does not belong to level j={j}")
        if top:
            sol = solve_pair_top(spec, tv, limit_point.s)
            if tu is not None and Fraction(tu) != sol.tu:
                raise ContractError("top-level path entries must have tu = -tv/r")
        else:
            sol = solve_pair(spec, j, tu, tv, high, limit_point.s)
        sols.append(sol)

    target = limit_point.coefficient_vector(spec)
    gaps = [sol.tv - sol.tu for sol in sols]
    distances = [
        sqrt(sum(float(a - b) ** 2 for a, b in zip(sol.coefficient_vector(), target)))
        for sol in sols
    ]
    monotone = len(distances) > 1 and all(
        b < a or (a == 0 and b == 0) for a, b in zip(distances, distances[1:])
    )
    near = [d for g, d in zip(gaps, distances) if g <= Fraction(gap_threshold)]
    reached = bool(near)
    within = reached and all(d <= tol for d in near)

    m = min(len(sols), spec.r + 3)
    xs = gaps[-m:]
    if len(set(xs)) < len(xs):
        # repeated gaps carry no extrapolation information
        xs_last, sols_last = [gaps[-1]], [sols[-1]]
    else:
        xs_last, sols_last = xs, sols[-m:]
    t_lim = _neville_at_zero(xs_last, [s.tu for s in sols_last])
    y_lim = {
        sl: _neville_at_zero(xs_last, [s.coeffs[sl] for s in sols_last]) for sl in spec.slots()
    }
    extrapolated = SourcePoint(t_lim, y_lim, limit_point.s)
    in_stratum = stratum_membership(spec, extrapolated, j + 1)
    return ConvergenceReport(
        gaps=gaps,
        distances=distances,
        extrapolated=extrapolated,
        limit_in_stratum=in_stratum,
        monotone=monotone,
        reached_gap=reached,
        within_tolerance=within,
        passed=monotone and within and in_stratum,
    )
