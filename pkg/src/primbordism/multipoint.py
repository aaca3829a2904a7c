"""Resolved multiple-point sets, singular strata and mixed sets at dimension 0.

Records are tuples ``(x_1, [x_2, ..., x_i])``: the first entry is
distinguished and the remaining ones are sorted, which realizes the
quotient by the symmetric group on the last ``i - 1`` entries.  The full
quotient (all entries sorted) is used for the target-side set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import curves, surfaces

RESIDUAL_BOUND = 1e-10


class DimensionError(ValueError):
    pass


class UnsupportedStratumError(ValueError):
    pass


@dataclass
class PointRecord:
    entries: tuple  # domain points, canonical representatives
    target: np.ndarray
    residual: float
    label: str

    def as_dict(self) -> dict:
        return {
            "entries": [np.atleast_1d(np.asarray(e, dtype=float)).tolist() for e in self.entries],
            "target": np.asarray(self.target, dtype=float).tolist(),
            "residual": f"{self.residual:.3e}",
            "label": self.label,
        }


@dataclass
class ResolvedPointSet:
    kind: str
    r: int
    index: int
    points: list[PointRecord]
    model: object = field(repr=False)
    provenance: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def max_residual(self) -> float:
        return max((p.residual for p in self.points), default=0.0)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "count": len(self.points),
            "parity": len(self.points) % 2,
            "max_residual": f"{self.max_residual:.3e}",
            "points": [p.as_dict() for p in self.points],
            "provenance": self.provenance,
            "warnings": list(self.warnings),
        }


@dataclass
class FoldCurveSet:
    """Traced fold curves of a surface map (the 1-dimensional stratum)."""

    polylines: list[np.ndarray]
    statuses: list[str]
    arclengths: list[float]
    max_residual: float
    model: object = field(repr=False)
    provenance: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    kind: str = "Sigma^1"

    def __len__(self) -> int:
        return len(self.polylines)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "curves": len(self.polylines),
            "statuses": list(self.statuses),
            "arclengths": [f"{a:.6f}" for a in self.arclengths],
            "samples": [len(p) for p in self.polylines],
            "max_residual": f"{self.max_residual:.3e}",
            "provenance": self.provenance,
            "warnings": list(self.warnings),
        }


def multipoint_dimension(model, r: int) -> int:
    return model.n - (r - 1) * (model.k + 1)


def _check_dimension(model, r: int) -> None:
    if r < 2:
        raise ValueError("multiplicity r must be at least 2")
    d = multipoint_dimension(model, r)
    if d > 0:
        raise DimensionError(
            f"positive-dimensional; unsupported: n - (r-1)(k+1) = {model.n} - {r - 1}*{model.k + 1} = {d}"
        )
    if d < 0:
        raise DimensionError(
            f"dimension n - (r-1)(k+1) = {model.n} - {r - 1}*{model.k + 1} = {d} is negative; unsupported"
        )


def _key(p) -> tuple:
    return tuple(np.round(np.atleast_1d(np.asarray(p, dtype=float)), 12))


def _resolved(x1, others) -> tuple:
    rest = sorted((np.asarray(o, dtype=float) for o in others), key=_key)
    return (np.asarray(x1, dtype=float),) + tuple(rest)


def _sort_records(records: list[PointRecord]) -> list[PointRecord]:
    return sorted(records, key=lambda rec: tuple(_key(e) for e in rec.entries))


def _min_separation(model, records: list[PointRecord]) -> float:
    dom = model.domain
    sep = math.inf
    for rec in records:
        e = rec.entries
        for a in range(len(e)):
            for b in range(a + 1, len(e)):
                sep = min(sep, float(dom.distance(e[a], e[b])))
    return sep


def _finish(kind, r, index, records, model, provenance, warnings, dedup=None) -> ResolvedPointSet:
    warnings = list(warnings)
    kept = []
    for rec in records:
        if rec.residual > RESIDUAL_BOUND:
            warnings.append(f"{kind}: record {rec.label} residual {rec.residual:.2e} above bound")
        kept.append(rec)
    if dedup is not None and kept:
        sep = _min_separation(model, kept)
        provenance = dict(provenance, min_separation=None if not math.isfinite(sep) else float(sep))
        if sep < 10 * dedup:
            warnings.append(f"{kind}: tuple entries only {sep:.2e} apart; degenerate near the fat diagonal")
    return ResolvedPointSet(kind, r, index, _sort_records(kept), model, provenance, warnings)


# ---------------------------------------------------------------------------
# multiple points


def find_multiple_points(model, r: int, resolution: int | None = None, tube: float = 1e-3, dedup: float = 1e-6):
    """Return ``(M, N)``: resolved ``r``-tuple points and their target quotient."""
    _check_dimension(model, r)
    dom = model.domain
    M: list[PointRecord] = []
    N: list[PointRecord] = []
    if dom.dim == 1:
        samples = resolution or 4096
        search = curves.find_double_points(model, samples, tube, dedup)
        for (a, b), res in zip(search.pairs, search.residuals):
            pa, pb = np.array([a]), np.array([b])
            target = model.g(pa)
            for x1, x2 in ((pa, pb), (pb, pa)):
                M.append(PointRecord(_resolved(x1, [x2]), target, res, "double"))
            N.append(PointRecord(_resolved(pa, [pb]), target, res, "double"))
        prov = {
            "solver": "polyline segment crossings + Newton",
            "samples": samples,
            "candidates": search.candidates,
            "newton_iterations": search.newton_iterations,
            "tube": tube,
            "dedup": dedup,
        }
        warnings = list(search.warnings)
    else:
        resolution = resolution or surfaces.default_resolution(model)
        triples, warnings = surfaces.find_triple_points(model, resolution, dedup=dedup)
        search = surfaces.double_curves(model, resolution)
        for t in triples:
            pts = [np.asarray(p) for p in t.points]
            target = model.g(pts[0])
            for m in range(3):
                M.append(PointRecord(_resolved(pts[m], pts[:m] + pts[m + 1:]), target, t.residual, "triple"))
            N.append(PointRecord(_resolved(pts[0], pts[1:]), target, t.residual, "triple"))
        prov = {
            "solver": "double-curve continuation + image/face crossings + Newton",
            "resolution": resolution,
            "double_curves": len(search.curves),
            "double_curve_seeds_refined": search.seeds,
            "tube": tube,
            "dedup": dedup,
        }
        warnings = list(warnings) + list(search.warnings)
    # the target-side set is the quotient by the full symmetric group
    for rec in N:
        rec.entries = tuple(sorted(rec.entries, key=_key))
    Mset = _finish(f"M~_{r}", r, r, M, model, prov, warnings, dedup)
    Nset = _finish(f"N~_{r}", r, r, N, model, prov, warnings, dedup)
    return Mset, Nset


# ---------------------------------------------------------------------------
# strata


def find_strata(model, j: int, resolution: int | None = None, step: float = 1e-2):
    """``Sigma^{1_j}(f)``: a point set when it is 0-dimensional, else traced polylines."""
    dom = model.domain
    kind = "Sigma^1" if j == 1 else "Sigma^{1_%d}" % j
    if dom.dim == 1 and j == 1:
        ev = curves.evaluator(model)
        recs = []
        for t in curves.fold_points(model):
            p = np.array([t])
            sgn = "+" if float(ev.f(t, 2)) > 0 else "-"
            recs.append(PointRecord((p,), model.f(p), abs(float(ev.f(t, 1))), "fold" + sgn))
        prov = {"solver": "half-angle substitution + Sturm isolation + Newton polish"}
        return _finish(kind, j + 1, 1, recs, model, prov, [])
    if dom.dim == 2 and j == 1:
        resolution = resolution or surfaces.default_resolution(model)
        loops = surfaces.trace_folds(model, resolution, step)
        res = 0.0
        for loop in loops:
            res = max(res, float(np.abs(surfaces.det_jet(model, loop.points, 0).value).max()))
        warnings = [f"fold curve {i} did not close ({lp.status})" for i, lp in enumerate(loops) if lp.status != "closed"]
        prov = {"solver": "mesh-edge seeds + predictor-corrector continuation", "resolution": resolution, "step": step}
        return FoldCurveSet(
            [lp.points for lp in loops], [lp.status for lp in loops], [lp.arclength for lp in loops], res, model, prov, warnings
        )
    if dom.dim == 2 and j == 2:
        resolution = resolution or surfaces.default_resolution(model)
        cusps, warnings = surfaces.find_cusps(model, resolution, step)
        recs = [PointRecord((c.points[0],), model.f(c.points[0]), c.residual, "cusp") for c in cusps]
        prov = {"solver": "kernel tangency sign changes along fold curves + Newton", "resolution": resolution, "step": step}
        return _finish(kind, j + 1, 1, recs, model, prov, warnings)
    raise UnsupportedStratumError(f"stratum j={j} unsupported for source dimension {dom.dim}")


# ---------------------------------------------------------------------------
# mixed sets


def find_mixed(model, r: int, i: int, resolution: int | None = None, tube: float = 1e-3, dedup: float = 1e-6):
    """``Lambda^r_i``: ``i``-tuple points of ``g`` whose first entry lies in ``Sigma^{1_{r-i}}(f)``."""
    _check_dimension(model, r)
    if not 1 <= i <= r:
        raise ValueError(f"mixed index i={i} outside 1..{r}")
    kind = f"Lambda^{r}_{i}"
    if i == r:
        M, _ = find_multiple_points(model, r, resolution, tube, dedup)
        return ResolvedPointSet(kind, r, i, list(M.points), model, dict(M.provenance), list(M.warnings))
    if i == 1:
        S = find_strata(model, r - 1, resolution)
        return ResolvedPointSet(kind, r, i, list(S.points), model, dict(S.provenance), list(S.warnings))
    if model.domain.dim == 2 and r == 3 and i == 2:
        resolution = resolution or surfaces.default_resolution(model)
        mixed, warnings = surfaces.find_mixed_folds(model, resolution, dedup=dedup)
        recs = [
            PointRecord(_resolved(m.points[0], m.points[1:]), model.g(m.points[0]), m.residual, "fold-double")
            for m in mixed
        ]
        prov = {"solver": "fold sign changes along double curves + Newton", "resolution": resolution, "dedup": dedup}
        return _finish(kind, r, i, recs, model, prov, warnings, dedup)
    raise UnsupportedStratumError(f"mixed set r={r}, i={i} unsupported for this model")


def covering_check(M: ResolvedPointSet, N: ResolvedPointSet, tol: float = 1e-8) -> bool:
    """``M -> N`` is ``r``-sheeted: every target carries exactly ``r`` resolved tuples."""
    r = M.r
    if len(M) != r * len(N):
        return False
    counts = [0] * len(N)
    for rec in M.points:
        hits = [k for k, n in enumerate(N.points) if np.linalg.norm(np.asarray(rec.target) - n.target) <= tol]
        if len(hits) != 1:
            return False
        counts[hits[0]] += 1
    return all(c == r for c in counts)
