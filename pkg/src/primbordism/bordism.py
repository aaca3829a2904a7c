"""Parity chain across the mixed sets and explicit cobordism arcs between them.

At dimension 0 the bordism class of a finite set over a connected space is
its count mod 2, so neighbouring mixed sets must share a parity.  The arcs
make this concrete: every arc of the 1-dimensional cobordism has two ends,
each either a point of ``Lambda^r_i`` (height slack zero) or a point of
``Lambda^r_{i-1}`` (two tuple entries collide).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import curves, surfaces
from .multipoint import find_mixed, find_strata
from .prim_map import GenericityReport, genericity_report

ARC_RESIDUAL_BOUND = 1e-8
SLACK_TOLERANCE = 1e-12


@dataclass
class ParityReport:
    model: str
    r: int
    counts: list[int] | None
    parities: list[int] | None
    verdict: str  # pass | fail | rejected
    genericity: GenericityReport
    provenance: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    sets: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "r": self.r,
            "counts": self.counts,
            "parities": self.parities,
            "verdict": self.verdict,
            "genericity": self.genericity.as_dict(),
            "sets": [s.as_dict() for s in self.sets],
            "warnings": list(self.warnings),
        }


def parity_chain(
    model,
    r: int,
    thresholds: dict | None = None,
    resolution: int | None = None,
    tube: float = 1e-3,
    dedup: float = 1e-6,
) -> ParityReport:
    gen = genericity_report(model, resolution, thresholds)
    if not gen.generic:
        return ParityReport(model.name, r, None, None, "rejected", gen, warnings=list(gen.failures))
    sets = [find_mixed(model, r, i, resolution, tube, dedup) for i in range(1, r + 1)]
    counts = [len(s) for s in sets]
    parities = [c % 2 for c in counts]
    warnings = list(dict.fromkeys(w for s in sets for w in s.warnings))
    warnings += [w for w in gen.info.get("solver_warnings", []) if w not in warnings]
    verdict = "pass" if len(set(parities)) == 1 else "fail"
    return ParityReport(model.name, r, counts, parities, verdict, gen, [s.provenance for s in sets], warnings, sets)


# ---------------------------------------------------------------------------
# arcs


@dataclass
class CobordismArc:
    i: int
    polyline: np.ndarray  # (N, i, point_dim) tuples of domain points
    slack: np.ndarray
    endpoint_a: tuple[str, int]
    endpoint_b: tuple[str, int] | None
    arclength: float
    max_residual: float
    min_slack: float
    status: str
    note: str = ""

    def as_dict(self, max_samples: int = 64) -> dict:
        stride = max(1, math.ceil(len(self.polyline) / max_samples))
        poly = self.polyline[::stride]
        if len(self.polyline) and (len(self.polyline) - 1) % stride:
            poly = np.concatenate([poly, self.polyline[-1:]])
        return {
            "i": self.i,
            "endpoint_a": list(self.endpoint_a),
            "endpoint_b": None if self.endpoint_b is None else list(self.endpoint_b),
            "arclength": f"{self.arclength:.9f}",
            "samples": len(self.polyline),
            "max_residual": f"{self.max_residual:.3e}",
            "min_slack": f"{self.min_slack:.3e}",
            "status": self.status,
            "note": self.note,
            "polyline": np.round(poly.reshape(len(poly), -1), 9).tolist(),
        }


@dataclass
class CobordismResult:
    model: str
    r: int
    i: int
    arcs: list[CobordismArc]
    upper_count: int
    lower_count: int
    verdict: str  # pass | fail | inconclusive | rejected
    reasons: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "r": self.r,
            "i": self.i,
            "arcs": len(self.arcs),
            "upper_count": self.upper_count,
            "lower_count": self.lower_count,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "warnings": list(self.warnings),
            "arc_list": [a.as_dict() for a in self.arcs],
        }


def _names(r: int, i: int) -> dict:
    return {"upper": f"Lambda^{r}_{i}", "lower": f"Lambda^{r}_{i - 1}"}


def _curve_arcs(model, r, i, upper, lower, step):
    folds = [float(rec.entries[0][0]) for rec in lower.points]
    doubles = [(float(rec.entries[0][0]), float(rec.entries[1][0])) for rec in upper.points]
    kinds = {"double": "upper", "fold": "lower"}
    out = []
    for a in curves.trace_pair_arcs(model, folds, doubles, step=step):
        poly = a.samples[:, :2].reshape(-1, 2, 1)
        out.append(
            CobordismArc(
                i,
                poly,
                a.samples[:, 2],
                (kinds[a.seed[0]], a.seed[1]),
                None if a.end is None else (kinds[a.end[0]], a.end[1]),
                a.arclength,
                a.max_residual,
                a.min_slack,
                a.status,
                a.note,
            )
        )
    return out


def _surface_arcs(model, r, i, upper, lower, step):
    up = [rec.entries for rec in upper.points]
    lo = [rec.entries for rec in lower.points]
    out = []
    for a in surfaces.trace_surface_arcs(model, i, up, lo, step=step):
        out.append(
            CobordismArc(i, a.samples, a.slack, a.seed, a.end, a.arclength, a.max_residual, a.min_slack, a.status, a.note)
        )
    return out


def trace_cobordism(
    model,
    r: int,
    i: int,
    thresholds: dict | None = None,
    resolution: int | None = None,
    step: float = 1e-2,
    tube: float = 1e-3,
    dedup: float = 1e-6,
) -> CobordismResult:
    """Trace every arc joining ``Lambda^r_i`` and ``Lambda^r_{i-1}`` and check the pairing."""
    if not 2 <= i <= r:
        raise ValueError(f"arc level i={i} outside 2..{r}")
    gen = genericity_report(model, resolution, thresholds)
    upper = find_mixed(model, r, i, resolution, tube, dedup)
    lower = find_mixed(model, r, i - 1, resolution, tube, dedup)
    warnings = list(dict.fromkeys(upper.warnings + lower.warnings))
    if not gen.generic:
        return CobordismResult(model.name, r, i, [], len(upper), len(lower), "rejected", list(gen.failures), warnings)
    if model.domain.dim == 1:
        arcs = _curve_arcs(model, r, i, upper, lower, step)
    elif model.domain.dim == 2 and r == 3:
        arcs = _surface_arcs(model, r, i, upper, lower, step)
    else:
        raise ValueError(f"arc tracing unsupported for r={r} on a {model.domain.dim}-dimensional source")

    names = _names(r, i)
    reasons: list[str] = []
    inconclusive = False
    ends: Counter = Counter()
    for a in arcs:
        ends[a.endpoint_a] += 1
        if a.endpoint_b is None:
            inconclusive = True
            reasons.append(a.note or f"arc from {a.endpoint_a} has no classified end")
            continue
        ends[a.endpoint_b] += 1
        if a.max_residual > ARC_RESIDUAL_BOUND:
            reasons.append(f"arc {a.endpoint_a}->{a.endpoint_b}: residual {a.max_residual:.2e} above bound")
        if a.min_slack < -SLACK_TOLERANCE:
            reasons.append(f"arc {a.endpoint_a}->{a.endpoint_b}: height slack {a.min_slack:.2e} negative")
    expected = Counter({("upper", k): 1 for k in range(len(upper))})
    expected.update({("lower", k): 1 for k in range(len(lower))})
    if not inconclusive:
        if ends != expected:
            extra = sorted((k for k in ends if ends[k] != expected.get(k, 0)), key=str)
            missing = sorted((k for k in expected if k not in ends), key=str)
            reasons.append(
                "endpoint multiset mismatch: "
                + ", ".join(f"{names[k[0]]}[{k[1]}] used {ends[k]}x" for k in extra)
                + ("; unused " + ", ".join(f"{names[k[0]]}[{k[1]}]" for k in missing) if missing else "")
            )
        if 2 * len(arcs) != len(upper) + len(lower):
            reasons.append(f"{len(arcs)} arcs for {len(upper) + len(lower)} boundary points")
    if inconclusive:
        verdict = "inconclusive"
    else:
        verdict = "fail" if reasons else "pass"
    return CobordismResult(model.name, r, i, arcs, len(upper), len(lower), verdict, reasons, warnings)


# ---------------------------------------------------------------------------
# classical cross-check


@dataclass
class EulerCheck:
    kind: str
    count: int
    expected_parity: int
    passed: bool

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {"kind": self.kind, "count": self.count, "expected_parity": self.expected_parity, "passed": self.passed}


def euler_cross_check(model, resolution: int | None = None) -> EulerCheck:
    """Curves: the fold count is even.  Surfaces: cusp count equals the Euler characteristic mod 2."""
    if model.domain.dim == 1:
        n = len(find_strata(model, 1, resolution))
        return EulerCheck("folds", n, 0, n % 2 == 0)
    n = len(find_strata(model, 2, resolution))
    chi = model.euler_characteristic % 2
    return EulerCheck("cusps", n, chi, n % 2 == chi)
