"""Local normal form of a prim map at a Morin singular point.

The germ lives on ``R^n`` with ``n = r(k+1) + z``.  Coordinates are the
distinguished variable ``t``, the coefficient block ``y[(i, j)]``
(``0 <= i <= k``, ``1 <= j <= r``, the slot ``(0, r)`` does not exist) and
the parameter block ``s`` of length ``z``.  The map is

    F(t, y, s) = (p_0(t), ..., p_k(t), y, s)

with ``p_0(t) = t^(r+1) + sum_{j<r} y[0, j] t^j`` and
``p_i(t) = sum_{j<=r} y[i, j] t^j`` for ``i >= 1``.  The lift to an
immersion appends ``t`` as the last (height) coordinate.

Everything here is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .poly import (
    RationalPoly,
    RootInterval,
    cauchy_bound,
    derivative,
    isolate_real_roots,
    poly_gcd,
    squarefree_part,
)


class ContractError(ValueError):
    """A caller passed data that does not conform to the declared shape."""


class EmptyStratumError(ValueError):
    pass


Slot = tuple[int, int]


@dataclass(frozen=True)
class NormalFormSpec:
    r: int
    k: int = 0
    z: int = 0

    def __post_init__(self):
        if self.r < 1 or self.k < 0 or self.z < 0:
            raise ContractError(f"invalid normal form indices {self}")

    @property
    def n(self) -> int:
        """Source dimension."""
        return self.r * (self.k + 1) + self.z

    @property
    def target_dim(self) -> int:
        return 1 + self.k + (self.r * (self.k + 1) - 1) + self.z

    @property
    def lift_dim(self) -> int:
        return self.target_dim + 1

    def slots(self) -> list[Slot]:
        """Coefficient slots in the source ordering ``y^r, y^(r-1), ..., y^1``."""
        return [
            (i, j)
            for j in range(self.r, 0, -1)
            for i in range(self.k + 1)
            if (i, j) != (0, self.r)
        ]

    def high_slots(self, j: int) -> list[Slot]:
        """Slots ``(i, m)`` with ``m > j`` -- the free block of the level-``j`` stratum."""
        return [s for s in self.slots() if s[1] > j]


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise ContractError("normal-form coordinates must be exact rationals")
    return Fraction(x)


@dataclass(frozen=True)
class RealAlgebraic:
    """A real algebraic number: a root of ``poly`` isolated in ``(lo, hi)``."""

    poly: RationalPoly
    lo: Fraction
    hi: Fraction
    approx: float

    def __float__(self) -> float:
        return self.approx


@dataclass(frozen=True)
class SourcePoint:
    t: Fraction | RealAlgebraic
    y: Mapping[Slot, Fraction] = field(default_factory=dict)
    s: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if not isinstance(self.t, RealAlgebraic):
            object.__setattr__(self, "t", _q(self.t))
        object.__setattr__(self, "y", {tuple(k): _q(v) for k, v in self.y.items()})
        object.__setattr__(self, "s", tuple(_q(v) for v in self.s))

    def check(self, spec: NormalFormSpec) -> None:
        if set(self.y) != set(spec.slots()):
            raise ContractError(
                f"point has coefficient slots {sorted(self.y)}, "
                f"spec {spec} needs {spec.r * (spec.k + 1) - 1} slots {spec.slots()}"
            )
        if len(self.s) != spec.z:
            raise ContractError(f"point has {len(self.s)} s-coordinates, spec needs {spec.z}")

    def coefficient_vector(self, spec: NormalFormSpec) -> tuple[Fraction, ...]:
        return tuple(self.y[sl] for sl in spec.slots())


def zero_point(spec: NormalFormSpec) -> SourcePoint:
    return SourcePoint(0, {sl: 0 for sl in spec.slots()}, (0,) * spec.z)


def component_polys(spec: NormalFormSpec, y: Mapping[Slot, Fraction]) -> list[RationalPoly]:
    """The polynomials ``p_0, ..., p_k`` in ``t`` for coefficient block ``y``."""
    polys = []
    for i in range(spec.k + 1):
        cs = [Fraction(0)] * (spec.r + 2)
        for j in range(1, spec.r + 1):
            if (i, j) in y:
                cs[j] = y[(i, j)]
        if i == 0:
            cs[spec.r + 1] = Fraction(1)
        polys.append(RationalPoly(cs))
    return polys


def _require_rational_t(x: SourcePoint) -> Fraction:
    if isinstance(x.t, RealAlgebraic):
        raise ContractError("exact evaluation needs a rational t")
    return x.t


def eval_normal_form(spec: NormalFormSpec, x: SourcePoint) -> tuple[Fraction, ...]:
    x.check(spec)
    t = _require_rational_t(x)
    values = [p(t) for p in component_polys(spec, x.y)]
    return tuple(values) + x.coefficient_vector(spec) + x.s


def eval_lift(spec: NormalFormSpec, x: SourcePoint) -> tuple[Fraction, ...]:
    """The immersion ``G = (F, t)``; height is the last coordinate."""
    return eval_normal_form(spec, x) + (_require_rational_t(x),)


def stratum_membership(spec: NormalFormSpec, x: SourcePoint, j: int) -> bool:
    """Whether ``x`` lies in the (closed) Morin stratum of level ``j``.

    Level ``j`` means ``p_i^(m)(t) = 0`` for every component ``i`` and every
    ``1 <= m <= j``.
    """
    if j > spec.r:
        raise EmptyStratumError(
            f"stratum empty for this normal form (level {j} > r = {spec.r})"
        )
    if j < 0:
        raise ContractError("stratum level must be >= 0")
    x.check(spec)
    t = _require_rational_t(x)
    for p in component_polys(spec, x.y):
        for m in range(1, j + 1):
            if derivative(p, m)(t) != 0:
                return False
    return True


def stratum_parametrize(
    spec: NormalFormSpec,
    j: int,
    t,
    high: Mapping[Slot, Fraction] | None = None,
    s: Sequence = (),
) -> SourcePoint:
    """The unique point of the level-``j`` stratum with prescribed free data.

    Free data: ``t``, ``s`` and the coefficients ``y[(i, m)]`` with ``m > j``.
    The coefficients with ``m <= j`` are solved from ``p_i^(m)(t) = 0`` by
    back-substitution, ``m = j, j-1, ..., 1``.
    """
    if not 0 <= j < spec.r:
        raise ContractError(f"parametrized strata need 0 <= j < r, got j={j}")
    high = {tuple(k): _q(v) for k, v in (high or {}).items()}
    expected = set(spec.high_slots(j))
    if set(high) != expected:
        raise ContractError(f"high block must have slots {sorted(expected)}, got {sorted(high)}")
    if len(s) != spec.z:
        raise ContractError(f"need {spec.z} s-coordinates")
    t = _q(t)
    y = dict(high)
    for i in range(spec.k + 1):
        # coefficients c[l] of p_i, known for l > m as we descend
        c = {l: y[(i, l)] for l in range(j + 1, spec.r + 1) if (i, l) in y}
        if i == 0:
            c[spec.r + 1] = Fraction(1)
        for m in range(j, 0, -1):
            # p^(m)(t) = m! c_m + sum_{l>m} c_l l!/(l-m)! t^(l-m)
            rest = sum(
                (cl * (factorial(l) // factorial(l - m)) * t ** (l - m) for l, cl in c.items() if l > m),
                Fraction(0),
            )
            c[m] = -rest / factorial(m)
            y[(i, m)] = c[m]
    return SourcePoint(t, y, tuple(s))


def top_stratum_point(spec: NormalFormSpec, s: Sequence = ()) -> SourcePoint:
    """The unique level-``r`` point over ``s``: ``t = 0`` and ``y = 0``."""
    if len(s) != spec.z:
        raise ContractError(f"need {spec.z} s-coordinates")
    return SourcePoint(0, {sl: 0 for sl in spec.slots()}, tuple(s))


def stratum_dimension(spec: NormalFormSpec, j: int) -> int:
    """Number of free rational parameters of the level-``j`` stratum."""
    if j == spec.r:
        return spec.z
    return 1 + spec.z + len(spec.high_slots(j))


def solve_fiber(spec: NormalFormSpec, x0: SourcePoint) -> list[SourcePoint]:
    """All real points ``x`` with ``F(x) = F(x0)``, sorted by ``t``.

    ``F(x) = F(x0)`` pins the ``y`` and ``s`` blocks, so the fiber is the
    common real zero set of ``p_i(t) - p_i(t0)``.  The common zeros are
    those of the exact gcd, so no filtering tolerance is involved.
    """
    x0.check(spec)
    t0 = _require_rational_t(x0)
    polys = [p - p(t0) for p in component_polys(spec, x0.y)]
    g = polys[0]
    for p in polys[1:]:
        g = poly_gcd(g, p) if p else g
    g = g.monic()
    bound = cauchy_bound(g)
    roots: list[RootInterval] = isolate_real_roots(g, (-bound, bound))
    sf = squarefree_part(g)
    out = []
    for rt in roots:
        if rt.exact is not None:
            t = rt.exact
        elif rt.lo < t0 < rt.hi:
            t = t0
        else:
            t = RealAlgebraic(sf, rt.lo, rt.hi, rt.root)
        out.append(SourcePoint(t, x0.y, x0.s))
    return out
