"""Concrete prim maps: an immersion ``g`` of a compact domain whose last
coordinate is the height, and its projection ``f`` (``g`` minus the height).

Builtin families
----------------
``trig_curve``     ``g(theta) = (F(theta), H(theta))`` for two trigonometric
                   polynomials with rational coefficients.
``round_circle``   ``(cos t, sin t)``.
``figure_eight``   ``(sin 2t, sin t)``.
``round_torus``    the standard torus with radii ``(R, rho)``, height ``z``.
``tilted_torus``   the same torus rotated by ``tilt`` about the x-axis (and a
                   small fixed twist about y) before taking the height.
``boy_surface``    the Bryant-Kusner parametrization of Boy's surface
                   (R. Bryant, "Surfaces in conformal geometry", Proc. Symp.
                   Pure Math. 48 (1988); R. Kusner, "Conformal geometry and
                   complete minimal surfaces", Bull. AMS 17 (1987)), rotated by
                   the given angles before taking the height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .domains import PeriodicBox, ProjectiveSphere, rotation_matrix
from .jets import Jet
from .poly import RationalPoly, isolate_real_roots, cauchy_bound


class UnknownModelError(ValueError):
    pass


def _frac(x) -> Fraction:
    return Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10**12)


# ---------------------------------------------------------------------------
# trigonometric polynomials


def _gauss_mul(p, q):
    out = [(Fraction(0), Fraction(0))] * (len(p) + len(q) - 1)
    out = list(out)
    for i, (a, b) in enumerate(p):
        for j, (c, d) in enumerate(q):
            re, im = out[i + j]
            out[i + j] = (re + a * c - b * d, im + a * d + b * c)
    return out


def _gauss_binomial(sign: int, n: int):
    """Coefficients of ``(1 + sign*i*t)^n`` as (re, im) pairs."""
    out = []
    for j in range(n + 1):
        c = Fraction(math.comb(n, j))
        ij = [(1, 0), (0, 1), (-1, 0), (0, -1)][j % 4]
        s = sign**j
        out.append((c * ij[0] * s, c * ij[1] * s))
    return out


@dataclass(frozen=True)
class TrigPoly:
    """``a_0 + sum_k a_k cos(k t) + b_k sin(k t)`` with exact coefficients.

    ``cos = (a_0, ..., a_d)`` and ``sin = (b_1, ..., b_d)``.
    """

    cos: tuple = (Fraction(0),)
    sin: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(_frac(c) for c in self.cos) or (Fraction(0),))
        object.__setattr__(self, "sin", tuple(_frac(c) for c in self.sin))

    @property
    def degree(self) -> int:
        return max(len(self.cos) - 1, len(self.sin))

    def a(self, k: int) -> Fraction:
        return self.cos[k] if k < len(self.cos) else Fraction(0)

    def b(self, k: int) -> Fraction:
        return self.sin[k - 1] if 1 <= k <= len(self.sin) else Fraction(0)

    def float_arrays(self):
        d = self.degree
        ks = np.arange(1, d + 1, dtype=float)
        a = np.array([float(self.a(k)) for k in range(1, d + 1)])
        b = np.array([float(self.b(k)) for k in range(1, d + 1)])
        return float(self.a(0)), ks, a, b

    def __call__(self, theta, m: int = 0):
        """The ``m``-th derivative at float angles."""
        a0, ks, a, b = self.float_arrays()
        th = np.asarray(theta, dtype=float)[..., None]
        # d^m/dt^m cos(kt) = k^m cos(kt + m pi/2)
        ph = ks * th + m * np.pi / 2
        val = (ks**m * (a * np.cos(ph) + b * np.sin(ph))).sum(-1)
        return val + (a0 if m == 0 else 0.0)

    def jet(self, theta: Jet) -> Jet:
        out = theta * 0.0 + float(self.a(0))
        for k in range(1, self.degree + 1):
            ak, bk = float(self.a(k)), float(self.b(k))
            if ak == 0 and bk == 0:
                continue
            kt = theta * float(k)
            if ak:
                out = out + kt.cos() * ak
            if bk:
                out = out + kt.sin() * bk
        return out

    def derivative_at_pi(self) -> Fraction:
        """Exact ``F'(pi) = sum_k k b_k (-1)^k``."""
        return sum((k * self.b(k) * (-1) ** k for k in range(1, self.degree + 1)), Fraction(0))

    def halfangle_derivative(self) -> RationalPoly:
        """``F'(theta) (1 + t^2)^d`` as a polynomial in ``t = tan(theta/2)``."""
        d = self.degree
        total = RationalPoly()
        for k in range(1, d + 1):
            ak, bk = self.a(k), self.b(k)
            if ak == 0 and bk == 0:
                continue
            e = _gauss_mul(_gauss_binomial(1, d + k), _gauss_binomial(-1, d - k))
            re = RationalPoly([c[0] for c in e])
            im = RationalPoly([c[1] for c in e])
            # F' = sum k(-a_k sin + b_k cos)
            total = total + im * (-k * ak) + re * (k * bk)
        return total

    def critical_points(self) -> list[float]:
        """All zeros of ``F'`` in ``[0, 2pi)``, isolated exactly, then polished."""
        p = self.halfangle_derivative()
        if p.is_zero():
            return []
        bound = cauchy_bound(p)
        roots = [2.0 * math.atan(float(rt.root)) for rt in isolate_real_roots(p, (-bound, bound))]
        if self.derivative_at_pi() == 0:
            roots.append(math.pi)
        out = []
        for th in roots:
            for _ in range(3):
                d2 = float(self(th, 2))
                if d2 == 0:
                    break
                th = th - float(self(th, 1)) / d2
            th %= 2 * math.pi
            out.append(0.0 if abs(th - 2 * math.pi) < 1e-12 else th)
        return sorted(out)


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True, eq=False)
class PrimMapModel:
    """An immersion ``g: M -> R^(n+k+1)``; the height is the last coordinate."""

    name: str
    params: tuple
    domain: PeriodicBox | ProjectiveSphere
    n: int
    k: int
    evaluator: Callable[[list[Jet]], list[Jet]] = field(repr=False)
    euler_characteristic: int
    curve: tuple | None = None
    citation: str = ""
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.n + self.k + 1

    def g_jets(self, points, order: int) -> list[Jet]:
        """Jets of the components of ``g`` around ``points`` in the local charts."""
        pts = np.asarray(points, dtype=float)
        return self.evaluator(self.domain.coordinate_jets(pts, order))

    def g(self, points) -> np.ndarray:
        """Values of ``g``, shape ``(..., ambient_dim)``."""
        return np.stack([j.value for j in self.g_jets(points, 0)], axis=-1)

    def f(self, points) -> np.ndarray:
        return self.g(points)[..., :-1]

    def height(self, points) -> np.ndarray:
        return self.g(points)[..., -1]

    def describe(self) -> dict:
        return {
            "name": self.name,
            "params": [str(p) for p in self.params],
            "domain": self.domain.name,
            "n": self.n,
            "k": self.k,
            "ambient_dim": self.ambient_dim,
            "euler_characteristic": self.euler_characteristic,
            "citation": self.citation,
        }


def trig_curve(F: TrigPoly, H: TrigPoly, name: str = "trig_curve", params: tuple = ()) -> PrimMapModel:
    def ev(c):
        return [F.jet(c[0]), H.jet(c[0])]

    if not params:
        params = (F.cos, F.sin, H.cos, H.sin)
    return PrimMapModel(name, params, PeriodicBox(1), 1, 0, ev, 0, curve=(F, H))


def _torus(name: str, R: float, rho: float, rot: np.ndarray | None, params) -> PrimMapModel:
    def ev(c):
        th, ph = c
        rad = ph.cos() * rho + R
        xyz = [rad * th.cos(), rad * th.sin(), ph.sin() * rho]
        if rot is None:
            return xyz
        return [sum((xyz[j] * rot[i, j] for j in range(3)), xyz[0] * 0.0) for i in range(3)]

    return PrimMapModel(name, tuple(params), PeriodicBox(2), 2, 0, ev, 0)


SQRT5 = math.sqrt(5.0)


def boy_xyz(c: Sequence[Jet]) -> list[Jet]:
    """Bryant-Kusner Boy surface on unit vectors (antipodally invariant).

    ``w`` is the stereographic coordinate from the north pole; base points in
    the upper hemisphere are replaced by their antipodes so ``|w| <= 1``.
    """
    x, y, z = c
    flip = np.where(z.value > 0, -1.0, 1.0)
    x, y, z = x * flip, y * flip, z * flip
    w = Jet(x.nvars, x.order, x.c + 1j * y.c) * (1.0 - z).reciprocal()
    w3 = w * w * w
    w4 = w3 * w
    w6 = w3 * w3
    D = w6 + w3 * SQRT5 - 1.0
    Di = D.reciprocal()
    g1 = (w * (1.0 - w4) * Di).imag * -1.5
    g2 = (w * (1.0 + w4) * Di).real * -1.5
    g3 = ((1.0 + w6) * Di).imag - 0.5
    r2 = (g1 * g1 + g2 * g2 + g3 * g3).reciprocal()
    return [g1 * r2, g2 * r2, g3 * r2]


def _boy(angles, params) -> PrimMapModel:
    rot = rotation_matrix(angles)

    def ev(c):
        X = boy_xyz(c)
        return [sum((X[j] * rot[i, j] for j in range(3)), X[0] * 0.0) for i in range(3)]

    return PrimMapModel(
        "boy_surface",
        tuple(params),
        ProjectiveSphere(),
        2,
        0,
        ev,
        1,
        citation="Bryant-Kusner parametrization (Bryant 1988; Kusner 1987)",
    )


MODEL_NAMES = ("trig_curve", "round_circle", "figure_eight", "round_torus", "tilted_torus", "boy_surface")


def builtin_model(name: str, params: Sequence = ()) -> PrimMapModel:
    """Instantiate a builtin family.

    ``trig_curve`` takes a sequence of four coefficient lists
    ``(F.cos, F.sin, H.cos, H.sin)``.  ``round_torus`` takes ``(R, rho)``,
    ``tilted_torus`` takes ``(R, rho, tilt)`` and ``boy_surface`` takes up to
    three rotation angles.
    """
    params = list(params)
    if name == "trig_curve":
        if len(params) != 4:
            raise ValueError("trig_curve needs four coefficient lists: F.cos, F.sin, H.cos, H.sin")
        fc, fs, hc, hs = (tuple(p) for p in params)
        return trig_curve(TrigPoly(fc, fs), TrigPoly(hc, hs), params=(fc, fs, hc, hs))
    if name == "round_circle":
        return trig_curve(TrigPoly((0, 1)), TrigPoly((0,), (1,)), "round_circle", ())
    if name == "figure_eight":
        return trig_curve(TrigPoly((0,), (0, 1)), TrigPoly((0,), (1,)), "figure_eight", ())
    if name == "round_torus":
        R, rho = (params + [2, 1][len(params):])[:2]
        return _torus(name, float(R), float(rho), None, (R, rho))
    if name == "tilted_torus":
        R, rho, tilt = (params + [2, 1, Fraction(6, 5)][len(params):])[:3]
        rot = rotation_matrix((float(tilt), 0.13, 0.0))
        return _torus(name, float(R), float(rho), rot, (R, rho, tilt))
    if name == "boy_surface":
        angles = (params + [Fraction(3, 10), Fraction(1, 5), Fraction(0)][len(params):])[:3]
        return _boy([float(a) for a in angles], angles)
    raise UnknownModelError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")


# ---------------------------------------------------------------------------
# jets


@dataclass
class ModelJet:
    """Value and derivative tensors of ``g`` at one point.

    ``derivatives[m - 1]`` has shape ``(ambient_dim,) + (dim,) * m``; on the
    projective sphere the derivatives are taken in the chart at the point.
    """

    value: np.ndarray
    derivatives: list[np.ndarray]


def eval_jet(model: PrimMapModel, x, order: int = 1) -> ModelJet:
    if not 0 <= order <= 3:
        raise ValueError("jet order must be in 0..3")
    x = np.asarray(x, dtype=float)
    if model.domain.dim == 1 and x.ndim == 0:
        x = x[None]
    jets = model.g_jets(x, order)
    value = np.array([j.value for j in jets], dtype=float)
    derivs = [np.array([j.derivative_tensor(m) for j in jets], dtype=float) for m in range(1, order + 1)]
    return ModelJet(value, derivs)


# ---------------------------------------------------------------------------
# genericity


DEFAULT_THRESHOLDS = {
    "immersion": 1e-3,
    "transversality": 1e-3,
    "fold": 1e-3,
    "cusp": 1e-3,
    "gap": 1e-3,
}


@dataclass
class GenericityReport:
    immersion_margin: float
    transversality_min: float
    fold_nondegeneracy_min: float
    cusp_regularity_min: float
    gap_min: float
    verdict: str
    failures: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def generic(self) -> bool:
        return self.verdict == "generic"

    def as_dict(self) -> dict:
        def num(x):
            return None if not math.isfinite(x) else x

        return {
            "immersion_margin": num(self.immersion_margin),
            "transversality_min": num(self.transversality_min),
            "fold_nondegeneracy_min": num(self.fold_nondegeneracy_min),
            "cusp_regularity_min": num(self.cusp_regularity_min),
            "gap_min": num(self.gap_min),
            "verdict": self.verdict,
            "failures": list(self.failures),
            "info": {k: num(v) if isinstance(v, float) else v for k, v in self.info.items()},
        }


def _verdict(margins: dict, thresholds: dict) -> list[str]:
    keys = {
        "immersion": "immersion_margin",
        "transversality": "transversality_min",
        "fold": "fold_nondegeneracy_min",
        "cusp": "cusp_regularity_min",
        "gap": "gap_min",
    }
    return [
        f"{field_} = {margins[field_]:.3g} below threshold {thresholds[key]:.3g}"
        for key, field_ in keys.items()
        if not margins[field_] > thresholds[key]
    ]


def genericity_report(model: PrimMapModel, resolution: int | None = None, thresholds: dict | None = None) -> GenericityReport:
    """Numerical genericity margins; never raises on degenerate models."""
    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    if model.domain.dim == 1:
        from .curves import curve_margins

        margins, info = curve_margins(model, resolution or 4096)
    else:
        from .surfaces import surface_margins

        margins, info = surface_margins(model, resolution)
    failures = _verdict(margins, th)
    return GenericityReport(
        verdict="rejected" if failures else "generic", failures=failures, info=info, **margins
    )
