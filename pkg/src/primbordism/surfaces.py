"""Numerical geometry of immersed surfaces ``g: M -> R^3`` with ``f = (g_1, g_2)``.

* Fold curves: the zero set of ``det df``, seeded from sign changes on mesh
  edges and traced by continuation.  On the projective sphere ``det`` is
  taken in oriented charts of the covering sphere, and loops close in the
  sphere, so one-sided fold loops are traversed twice.
* Cusps: zeros along each fold loop of ``tau = grad(det) . k`` with ``k``
  the kernel of ``df`` carried continuously; refined by 2x2 Newton.
* Double curves: ordered pairs ``(x1, x2)`` with ``g(x1) = g(x2)``, seeded by
  mesh-edge / mesh-face crossings of the image and traced in pair space.
* Mixed points: double-curve points where ``det df(x1)`` vanishes.
* Triple points: crossings of the image of a double curve with a third sheet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .continuation import ProductSpace, null_tangent, trace
from .domains import PeriodicBox, ProjectiveSphere, face_edges
from .jets import Jet, det2


def default_resolution(model) -> int:
    return 48 if isinstance(model.domain, PeriodicBox) else 4


def mesh(model, resolution: int):
    key = ("mesh", resolution)
    if key not in model.cache:
        verts, faces = model.domain.triangulation(resolution)
        model.cache[key] = (verts, faces, face_edges(faces))
    return model.cache[key]


# ---------------------------------------------------------------------------
# jets of df


def det_jet(model, pts, order: int) -> Jet:
    g = model.g_jets(pts, order + 1)
    return det2(g[0].diff(0), g[0].diff(1), g[1].diff(0), g[1].diff(1))


def df_jets(model, pts, order: int):
    g = model.g_jets(pts, order + 1)
    return [[g[a].diff(b) for b in range(2)] for a in range(2)], g


def dg_matrix(model, pts) -> np.ndarray:
    """``dg`` in the local charts, shape ``(..., 3, 2)``."""
    g = model.g_jets(pts, 1)
    return np.stack([np.stack([j.gradient()[b] for b in range(2)], -1) for j in g], -2)


def unit_normal(model, pts) -> np.ndarray:
    A = dg_matrix(model, pts)
    n = np.cross(A[..., 0], A[..., 1])
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def _kernel(a11, a12, a21, a22):
    """Kernel vector of a rank-one 2x2 matrix: the larger adjugate column."""
    c1 = np.stack([a22, -a21], -1)
    c2 = np.stack([-a12, a11], -1)
    use2 = np.linalg.norm(c2, axis=-1) > np.linalg.norm(c1, axis=-1)
    return np.where(use2[..., None], c2, c1), use2


# ---------------------------------------------------------------------------
# folds


@dataclass
class FoldLoop:
    points: np.ndarray  # (N, point_dim)
    status: str
    arclength: float


def fold_seeds(model, resolution: int) -> np.ndarray:
    verts, faces, edges = mesh(model, resolution)
    d = det_jet(model, verts, 0).value
    sc = np.sign(d[edges[:, 0]]) * np.sign(d[edges[:, 1]]) < 0
    e = edges[sc]
    if len(e) == 0:
        return np.zeros((0, model.domain.point_dim))
    a, b = verts[e[:, 0]], verts[e[:, 1]]
    off = model.domain.chart_offset(a, b)
    lo, hi = np.zeros(len(e)), np.ones(len(e))
    da = d[e[:, 0]]
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        dm = det_jet(model, model.domain.push(a, mid[:, None] * off), 0).value
        same = np.sign(dm) == np.sign(da)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return model.domain.push(a, (0.5 * (lo + hi))[:, None] * off)


def _fold_residual(model):
    def residual(x):
        dj = det_jet(model, x[0], 1)
        return np.array([float(dj.value)]), dj.gradient()[None, :]

    return residual


def trace_folds(model, resolution: int | None = None, step: float = 1e-2) -> list[FoldLoop]:
    resolution = resolution or default_resolution(model)
    key = ("folds", resolution, step)
    if key in model.cache:
        return model.cache[key]
    dom = model.domain
    seeds = fold_seeds(model, resolution)
    space = ProductSpace(dom, 1)
    residual = _fold_residual(model)
    covered = np.zeros(len(seeds), dtype=bool)
    loops = []
    seed_tree = cKDTree(dom.embed(seeds)) if len(seeds) else None
    for i in range(len(seeds)):
        if covered[i]:
            continue
        F, J = residual(seeds[i][None])
        T0 = space.to_ambient(seeds[i][None], null_tangent(J))
        res = trace(space, residual, seeds[i][None], T0, step=step, closure=True)
        pts = np.array([p[0] for p in res.points])
        loops.append(FoldLoop(pts, res.status, res.arclength))
        for hit in seed_tree.query_ball_point(dom.embed(pts), 4 * step):
            covered[hit] = True
        covered[i] = True
    model.cache[key] = loops
    return loops


# ---------------------------------------------------------------------------
# cusps


@dataclass
class SurfacePoint:
    points: tuple  # domain points
    residual: float
    regularity: float = math.nan


def _cusp_system(model, p, use2: bool):
    df, _ = df_jets(model, p, 2)
    det = det2(df[0][0], df[0][1], df[1][0], df[1][1])
    d0, d1 = det.diff(0), det.diff(1)
    a11, a12, a21, a22 = (df[0][0].truncate(1), df[0][1].truncate(1), df[1][0].truncate(1), df[1][1].truncate(1))
    k0, k1 = (-a12, a11) if use2 else (a22, -a21)
    tau = d0 * k0 + d1 * k1
    det1 = det.truncate(1)
    F = np.array([float(det1.value), float(tau.value)])
    J = np.stack([det1.gradient(), tau.gradient()])
    return F, J


def _dedup(points: list[SurfacePoint], dom, radius: float) -> list[SurfacePoint]:
    out: list[SurfacePoint] = []
    for sp in points:
        if any(
            max(float(dom.distance(a, b)) for a, b in zip(sp.points, q.points)) < radius for q in out
        ):
            continue
        out.append(sp)
    return out


def find_cusps(model, resolution: int | None = None, step: float = 1e-2, dedup: float = 1e-6):
    resolution = resolution or default_resolution(model)
    key = ("cusps", resolution, step)
    if key in model.cache:
        return model.cache[key]
    dom = model.domain
    found: list[SurfacePoint] = []
    warnings: list[str] = []
    for loop in trace_folds(model, resolution, step):
        P = loop.points
        df, _ = df_jets(model, P, 1)
        det = det2(df[0][0], df[0][1], df[1][0], df[1][1])
        grad = det.gradient().T  # (N, 2)
        k, use2 = _kernel(df[0][0].value, df[0][1].value, df[1][0].value, df[1][1].value)
        K = dom.to_ambient(P, k)
        sign = np.ones(len(P))
        for i in range(1, len(P)):
            if (K[i] * K[i - 1]).sum() * sign[i - 1] < 0:
                sign[i] = -1.0
        tau = (grad * k).sum(-1) * sign
        for i in np.nonzero(np.sign(tau[:-1]) * np.sign(tau[1:]) < 0)[0]:
            x = P[i]
            u2 = bool(use2[i])
            for _ in range(40):
                F, J = _cusp_system(model, x, u2)
                try:
                    du = np.linalg.solve(J, -F)
                except np.linalg.LinAlgError:
                    break
                x = dom.push(x, du)
                if np.linalg.norm(du) < 1e-14:
                    break
            F, J = _cusp_system(model, x, u2)
            res = float(np.linalg.norm(F))
            if not res <= 1e-10 or float(dom.distance(x, P[i])) > 10 * step:
                warnings.append(f"cusp candidate near {np.round(P[i], 6).tolist()} did not converge ({res:.2e})")
                continue
            reg = abs(np.linalg.det(J)) / (np.linalg.norm(J[0]) * np.linalg.norm(J[1]))
            found.append(SurfacePoint((dom.canonical(x),), res, float(reg)))
    out = (_dedup(found, dom, dedup), warnings)
    model.cache[key] = out
    return out


# ---------------------------------------------------------------------------
# double curves


def _moller_trumbore(o, d, v0, v1, v2, eps=1e-12):
    """Ray ``o + s d`` against triangles; returns ``(hit, s, b1, b2)``."""
    e1, e2 = v1 - v0, v2 - v0
    p = np.cross(d, e2)
    det = (e1 * p).sum(-1)
    ok = np.abs(det) > eps
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tv = o - v0
    b1 = (tv * p).sum(-1) * inv
    q = np.cross(tv, e1)
    b2 = (d * q).sum(-1) * inv
    s = (e2 * q).sum(-1) * inv
    tol = 1e-9
    hit = ok & (b1 >= -tol) & (b2 >= -tol) & (b1 + b2 <= 1 + tol) & (s >= -tol) & (s <= 1 + tol)
    return hit, s, b1, b2


def _segment_face_hits(model, resolution, seg_a, seg_b, exclude_pts, excl_radius):
    """Image segments ``g(seg_a) -> g(seg_b)`` (domain points) crossing mesh faces.

    ``exclude_pts`` is a list of point arrays (one per segment) whose
    neighbourhoods are not allowed to contain the face.
    Returns ``(segment index, face index, s, b1, b2)`` arrays.
    """
    verts, faces, _ = mesh(model, resolution)
    dom = model.domain
    V = model.g(verts)
    A, B = model.g(seg_a), model.g(seg_b)
    cent = V[faces].mean(1)
    rad = np.linalg.norm(V[faces] - cent[:, None], axis=-1).max()
    tree = cKDTree(cent)
    mid = 0.5 * (A + B)
    half = 0.5 * np.linalg.norm(B - A, axis=1)
    si, fi = [], []
    for i, nb in enumerate(tree.query_ball_point(mid, half.max() + rad + 1e-12)):
        si.extend([i] * len(nb))
        fi.extend(nb)
    si, fi = np.array(si, dtype=int), np.array(fi, dtype=int)
    if len(si) == 0:
        return (np.zeros(0, int),) * 2 + (np.zeros(0),) * 3
    keep = np.ones(len(si), dtype=bool)
    fv = verts[faces[fi]]  # (M, 3, pd)
    for ex in exclude_pts:
        dmin = np.min(dom.distance(ex[si][:, None, :], fv), axis=1)
        keep &= dmin > excl_radius
    si, fi = si[keep], fi[keep]
    tri = V[faces[fi]]
    hit, s, b1, b2 = _moller_trumbore(A[si], B[si] - A[si], tri[:, 0], tri[:, 1], tri[:, 2])
    return si[hit], fi[hit], s[hit], b1[hit], b2[hit]


def _in_face(model, resolution, fi, b1, b2):
    verts, faces, _ = mesh(model, resolution)
    dom = model.domain
    v0, v1, v2 = verts[faces[fi, 0]], verts[faces[fi, 1]], verts[faces[fi, 2]]
    return dom.push(v0, b1[:, None] * dom.chart_offset(v0, v1) + b2[:, None] * dom.chart_offset(v0, v2))


def _mesh_scale(model, resolution) -> float:
    verts, _, edges = mesh(model, resolution)
    return float(model.domain.distance(verts[edges[:, 0]], verts[edges[:, 1]]).max())


def _pair_residual(model):
    def residual(x):
        g = model.g_jets(x, 1)  # batch of two points
        val = np.array([j.value for j in g])  # (3, 2)
        grad = np.array([j.gradient() for j in g])  # (3, 2 vars, 2 points)
        F = val[:, 0] - val[:, 1]
        J = np.concatenate([grad[:, :, 0], -grad[:, :, 1]], axis=1)
        return F, J

    return residual


def _newton(space, residual, x, tol=1e-14, max_iter=40):
    for _ in range(max_iter):
        F, J = residual(x)
        du = np.linalg.lstsq(J, -F, rcond=None)[0]
        x = space.push(x, du)
        if np.linalg.norm(du) < tol:
            break
    F, J = residual(x)
    return x, float(np.linalg.norm(F)), J


@dataclass
class DoubleCurve:
    points: np.ndarray  # (N, 2, point_dim)
    status: str
    arclength: float


@dataclass
class DoubleCurveSearch:
    curves: list[DoubleCurve]
    seeds: int
    warnings: list[str] = field(default_factory=list)


def double_curves(model, resolution: int | None = None, step: float = 1e-2) -> DoubleCurveSearch:
    resolution = resolution or default_resolution(model)
    key = ("double_curves", resolution, step)
    if key in model.cache:
        return model.cache[key]
    verts, faces, edges = mesh(model, resolution)
    dom = model.domain
    excl = 3.0 * _mesh_scale(model, resolution)
    a, b = verts[edges[:, 0]], verts[edges[:, 1]]
    si, fi, s, b1, b2 = _segment_face_hits(model, resolution, a, b, [a, b], excl)
    space = ProductSpace(dom, 2)
    residual = _pair_residual(model)
    warnings: list[str] = []
    curves: list[DoubleCurve] = []
    if not len(si):
        out = DoubleCurveSearch(curves, 0, warnings)
        model.cache[key] = out
        return out
    x1 = dom.push(a[si], s[:, None] * dom.chart_offset(a[si], b[si]))
    x2 = _in_face(model, resolution, fi, b1, b2)
    # both orderings; raw seeds are refined only when not yet covered
    raw = np.concatenate([np.stack([x1, x2], 1), np.stack([x2, x1], 1)])
    emb = np.concatenate([dom.embed(raw[:, 0]), dom.embed(raw[:, 1])], axis=1)
    tree = cKDTree(emb)
    radius = max(6 * step, 2.0 * _mesh_scale(model, resolution))
    covered = np.zeros(len(raw), dtype=bool)
    refined = 0
    for i in range(len(raw)):
        if covered[i]:
            continue
        covered[i] = True
        y, res, J = _newton(space, residual, raw[i])
        refined += 1
        if not (res <= 1e-11 and float(dom.distance(y[0], y[1])) > excl / 3):
            warnings.append(f"double-curve seed {i} rejected (residual {res:.2e})")
            continue
        T0 = space.to_ambient(y, null_tangent(J))
        tr = trace(space, residual, y, T0, step=step, closure=True, max_arclength=400.0)
        pts = np.array(tr.points)
        curves.append(DoubleCurve(pts, tr.status, tr.arclength))
        pe = np.concatenate([dom.embed(pts[:, 0]), dom.embed(pts[:, 1])], axis=1)
        for hit in tree.query_ball_point(pe, radius):
            covered[hit] = True
        if tr.status != "closed":
            warnings.append(f"double curve from seed {i} did not close ({tr.status})")
    out = DoubleCurveSearch(curves, refined, warnings)
    model.cache[key] = out
    return out


def find_mixed_folds(model, resolution: int | None = None, step: float = 1e-2, dedup: float = 1e-6):
    """Ordered pairs ``(x1, x2)`` with ``g(x1) = g(x2)`` and ``x1`` a fold point."""
    resolution = resolution or default_resolution(model)
    key = ("mixed_folds", resolution, step)
    if key in model.cache:
        return model.cache[key]
    dom = model.domain
    space = ProductSpace(dom, 2)
    pair_res = _pair_residual(model)

    def residual(x):
        F, J = pair_res(x)
        dj = det_jet(model, x[0], 1)
        return np.append(F, float(dj.value)), np.vstack([J, np.concatenate([dj.gradient(), [0.0, 0.0]])])

    found: list[SurfacePoint] = []
    warnings: list[str] = []
    search = double_curves(model, resolution, step)
    for curve in search.curves:
        P = curve.points
        d = det_jet(model, P[:, 0], 0).value
        for i in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
            x, res, J = _newton(space, residual, P[i])
            if not res <= 1e-10:
                warnings.append(f"mixed-point candidate at double-curve sample {i} did not converge ({res:.2e})")
                continue
            reg = float(np.linalg.svd(J, compute_uv=False)[-1])
            found.append(SurfacePoint((dom.canonical(x[0]), dom.canonical(x[1])), res, reg))
    out = (_dedup(found, dom, dedup), warnings + search.warnings)
    model.cache[key] = out
    return out


def find_triple_points(model, resolution: int | None = None, step: float = 1e-2, dedup: float = 1e-6):
    """Unordered triples of preimages of triple points of ``g``."""
    resolution = resolution or default_resolution(model)
    key = ("triples", resolution, step)
    if key in model.cache:
        return model.cache[key]
    dom = model.domain
    space = ProductSpace(dom, 3)

    def residual(x):
        g = model.g_jets(x, 1)
        val = np.array([j.value for j in g])
        grad = np.array([j.gradient() for j in g])  # (3, 2, 3)
        F = np.concatenate([val[:, 0] - val[:, 1], val[:, 0] - val[:, 2]])
        Z = np.zeros((3, 2))
        J = np.block([[grad[:, :, 0], -grad[:, :, 1], Z], [grad[:, :, 0], Z, -grad[:, :, 2]]])
        return F, J

    excl = 3.0 * _mesh_scale(model, resolution)
    found: list[SurfacePoint] = []
    warnings: list[str] = []
    search = double_curves(model, resolution, step)
    for curve in search.curves:
        P = curve.points
        if len(P) < 2:
            continue
        si, fi, s, b1, b2 = _segment_face_hits(
            model, resolution, P[:-1, 0], P[1:, 0], [P[:-1, 0], P[:-1, 1]], excl
        )
        if not len(si):
            continue
        x3 = _in_face(model, resolution, fi, b1, b2)
        for k in range(len(si)):
            i = si[k]
            x0 = np.stack([P[i, 0], P[i, 1], x3[k]])
            x, res, J = _newton(space, residual, x0)
            if not res <= 1e-10:
                warnings.append(f"triple-point candidate at double-curve sample {i} did not converge ({res:.2e})")
                continue
            if min(float(dom.distance(x[p], x[q])) for p, q in ((0, 1), (0, 2), (1, 2))) < excl / 3:
                continue
            reg = float(np.linalg.svd(J, compute_uv=False)[-1])
            pts = sorted((dom.canonical(p) for p in x), key=lambda v: tuple(np.round(v, 9)))
            found.append(SurfacePoint(tuple(pts), res, reg))
    # unordered dedup
    out: list[SurfacePoint] = []
    for sp in found:
        dup = False
        for q in out:
            dmat = np.array([[float(dom.distance(a, b)) for b in q.points] for a in sp.points])
            if all(dmat[i].min() < dedup for i in range(3)):
                dup = True
                break
        if not dup:
            out.append(sp)
    result = (out, warnings)
    model.cache[key] = result
    return result


# ---------------------------------------------------------------------------
# genericity


def surface_margins(model, resolution: int | None = None) -> tuple[dict, dict]:
    resolution = resolution or default_resolution(model)
    dom = model.domain
    verts, _, _ = mesh(model, resolution)
    sv = np.linalg.svd(dg_matrix(model, verts), compute_uv=False)[:, -1]
    imm = float(sv.min())
    for i in np.argsort(sv)[:3]:
        p = verts[i]

        def smin(u, p=p):
            q = dom.push(p, u)
            return float(np.linalg.svd(dg_matrix(model, q), compute_uv=False)[-1])

        r = minimize(smin, np.zeros(2), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        imm = min(imm, float(r.fun))

    loops = trace_folds(model, resolution)
    fold_nd = math.inf
    for loop in loops:
        fold_nd = min(fold_nd, float(np.linalg.norm(det_jet(model, loop.points, 1).gradient(), axis=0).min()))
    cusps, cusp_warn = find_cusps(model, resolution)
    cusp_reg = min((c.regularity for c in cusps), default=math.inf)

    search = double_curves(model, resolution)
    trans = math.inf
    for curve in search.curves:
        n1, n2 = unit_normal(model, curve.points[:, 0]), unit_normal(model, curve.points[:, 1])
        trans = min(trans, float(np.linalg.norm(np.cross(n1, n2), axis=-1).min()))
    mixed, mixed_warn = find_mixed_folds(model, resolution)
    triples, triple_warn = find_triple_points(model, resolution)
    for t in triples:
        n = unit_normal(model, np.array(t.points))
        trans = min(trans, abs(float(np.linalg.det(n))))

    gap = math.inf
    for m in mixed:
        for c in cusps:
            gap = min(gap, float(dom.distance(m.points[0], c.points[0])))
    fold_pts = np.concatenate([loop.points for loop in loops]) if loops else np.zeros((0, dom.point_dim))
    for t in triples:
        for p in t.points:
            if len(fold_pts):
                gap = min(gap, float(dom.distance(p, fold_pts).min()))
    info = {
        "fold_loops": len(loops),
        "fold_loop_status": [loop.status for loop in loops],
        "cusps": len(cusps),
        "double_curves": len(search.curves),
        "mixed_points": len(mixed),
        "triple_points": len(triples),
        "solver_warnings": cusp_warn + mixed_warn + triple_warn,
        "resolution": resolution,
    }
    margins = {
        "immersion_margin": imm,
        "transversality_min": trans,
        "fold_nondegeneracy_min": fold_nd,
        "cusp_regularity_min": cusp_reg,
        "gap_min": gap,
    }
    return margins, info


# ---------------------------------------------------------------------------
# cobordism arcs
#
# Level 2 arcs: pairs (x1, x2) with x1 on the fold curve, f(x1) = f(x2) and
# slack h(x1) - h(x2) >= 0.  Level 3 arcs: triples with (x2, x3) on a double
# curve of g, f(x1) = f(x2) and the same slack.  Both end either where the
# slack vanishes (a point of the upper set) or where x1 collides with another
# entry (a point of the lower set).  Collision ends are seeded from local
# normal forms: near a cusp c the partner of a fold point c + u sits at
# about c - 2u; near a fold point p the partner of p + a tau + b k is about
# p + a tau - b k, with tau the fold tangent and k the kernel of df.


@dataclass
class SurfaceArc:
    seed: tuple[str, int]
    end: tuple[str, int] | None
    samples: np.ndarray  # (N, i, point_dim)
    slack: np.ndarray
    status: str
    arclength: float
    max_residual: float
    min_slack: float
    end_residual: float
    note: str = ""


class _ArcSystem:
    def __init__(self, model, level: int):
        self.model = model
        self.level = level
        self.dom = model.domain
        self.space = ProductSpace(self.dom, level)

    def residual(self, x):
        m = self.model
        gj = m.g_jets(x, 1)
        val = np.array([j.value for j in gj])  # (3, level)
        grad = np.array([j.gradient() for j in gj])  # (3, 2, level)
        if self.level == 2:
            dj = det_jet(m, x[0], 1)
            F = np.concatenate([[float(dj.value)], val[:2, 0] - val[:2, 1]])
            J = np.zeros((3, 4))
            J[0, :2] = dj.gradient()
            J[1:, :2] = grad[:2, :, 0]
            J[1:, 2:] = -grad[:2, :, 1]
            return F, J
        F = np.concatenate([val[:, 1] - val[:, 2], val[:2, 0] - val[:2, 1]])
        J = np.zeros((5, 6))
        J[:3, 2:4] = grad[:, :, 1]
        J[:3, 4:] = -grad[:, :, 2]
        J[3:, :2] = grad[:2, :, 0]
        J[3:, 2:4] = -grad[:2, :, 1]
        return F, J

    def slack(self, x):
        gj = self.model.g_jets(x[:2], 1)
        h = gj[-1]
        grad = np.zeros(2 * self.level)
        grad[:2] = h.gradient()[:, 0]
        grad[2:4] = -h.gradient()[:, 1]
        return float(h.value[0] - h.value[1]), grad

    def boundary(self, x):
        F, J = self.residual(x)
        s, ds = self.slack(x)
        return np.append(F, s), np.vstack([J, ds])

    def separation(self, x) -> tuple[float, int]:
        d = [float(self.dom.distance(x[0], x[j])) for j in range(1, self.level)]
        j = int(np.argmin(d))
        return d[j], j + 1

    def orient_away(self, x, t):
        """Flip ``t`` so that the collision separation grows along it."""
        s0 = self.separation(x)[0]
        s1 = self.separation(self.space.push(x, 1e-6 * t))[0]
        return t if s1 >= s0 else -t


def _project_fold(model, p, iters=30):
    dom = model.domain
    for _ in range(iters):
        dj = det_jet(model, p, 1)
        g = dj.gradient()
        du = -float(dj.value) * g / float(g @ g)
        p = dom.push(p, du)
        if np.linalg.norm(du) < 1e-15:
            break
    return p


def _solve_partner(model, x1, guess, iters=40):
    """Newton for ``x2`` with ``f(x2) = f(x1)`` started at ``guess``."""
    dom = model.domain
    target = model.f(x1)
    x2 = guess
    for _ in range(iters):
        gj = model.g_jets(x2, 1)
        F = np.array([float(gj[a].value) for a in range(2)]) - target
        J = np.stack([gj[a].gradient() for a in range(2)])
        try:
            du = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return x2, math.inf
        x2 = dom.push(x2, du)
        if np.linalg.norm(du) < 1e-15:
            break
    return x2, float(np.linalg.norm(model.f(x2) - target))


def _fold_frame(model, p):
    """Fold tangent and kernel direction of ``df`` at a fold point, chart coordinates."""
    df, _ = df_jets(model, p, 1)
    det = det2(df[0][0], df[0][1], df[1][0], df[1][1])
    gd = det.gradient()
    tau = np.array([-gd[1], gd[0]])
    k, _ = _kernel(df[0][0].value, df[0][1].value, df[1][0].value, df[1][1].value)
    return tau / np.linalg.norm(tau), np.asarray(k, dtype=float) / np.linalg.norm(k)


def _collision_seed(system: _ArcSystem, rec, delta: float):
    """A point of the arc near the collision boundary ``rec``; ``None`` if not found."""
    model, dom, space = system.model, system.dom, system.space
    best = None
    if system.level == 2:
        (c,) = rec
        tau, _ = _fold_frame(model, c)
        for sgn in (1.0, -1.0):
            u = sgn * delta * tau
            x1 = _project_fold(model, dom.push(c, u))
            x2, res = _solve_partner(model, x1, dom.push(c, -2.0 * dom.chart_offset(c, x1)))
            x = np.stack([x1, x2])
            if not (res < 1e-12 and system.separation(x)[0] > delta):
                continue
            s, _ = system.slack(x)
            if s > 0 and (best is None or s > best[1]):
                best = (x, s)
    else:
        p, q = rec
        pair = _pair_residual(model)
        pspace = ProductSpace(dom, 2)
        _, Jp = pair(np.stack([p, q]))
        d = null_tangent(Jp)
        tau, k = _fold_frame(model, p)
        basis = np.column_stack([tau, k])
        for sgn in (1.0, -1.0):
            y, res, _ = _newton(pspace, pair, pspace.push(np.stack([p, q]), sgn * delta * d))
            if not res < 1e-12:
                continue
            a, b = np.linalg.solve(basis, dom.chart_offset(p, y[0]))
            x1, fres = _solve_partner(model, y[0], dom.push(p, a * tau - b * k))
            x = np.stack([x1, y[0], y[1]])
            if not (fres < 1e-12 and system.separation(x)[0] > 0.5 * delta):
                continue
            s, _ = system.slack(x)
            if s > 0 and (best is None or s > best[1]):
                best = (x, s)
    return None if best is None else best[0]


def _match_upper(system, x, upper, tol):
    dom = system.dom
    for idx, rec in enumerate(upper):
        if float(dom.distance(x[0], rec[0])) >= tol:
            continue
        rest = list(rec[1:])
        ok = True
        for e in x[1:]:
            dists = [float(dom.distance(e, r_)) for r_ in rest]
            if not dists or min(dists) >= tol:
                ok = False
                break
            rest.pop(int(np.argmin(dists)))
        if ok:
            return ("upper", idx)
    return None


def _match_lower(system, x, lower, tol):
    dom = system.dom
    _, j = system.separation(x)
    others = [x[m] for m in range(1, system.level) if m != j]
    best, best_d = None, tol
    for idx, rec in enumerate(lower):
        d = float(dom.distance(x[0], rec[0]))
        for e, r_ in zip(others, rec[1:]):
            d = max(d, float(dom.distance(e, r_)))
        if d < best_d:
            best, best_d = ("lower", idx), d
    return best


def trace_surface_arcs(
    model,
    level: int,
    upper: list,
    lower: list,
    step: float = 1e-2,
    max_arclength: float = 60.0,
    collision_radius: float = 2e-3,
    match_tol: float = 1e-6,
) -> list[SurfaceArc]:
    """Trace the level-``level`` cobordism arcs from every boundary point.

    ``upper`` holds the slack-zero boundary tuples, ``lower`` the collision
    boundary tuples (one entry fewer).  Each arc is traced once; its far end
    is marked used so it is not seeded again.
    """
    system = _ArcSystem(model, level)
    space, dom = system.space, system.dom
    rc = collision_radius
    delta = 4.0 * rc

    def event(x, y):
        return system.slack(y)[0] <= 0 or system.separation(y)[0] < rc

    seeds = []
    for idx, rec in enumerate(upper):
        x0 = np.stack([np.asarray(e, dtype=float) for e in rec])
        seeds.append((("upper", idx), x0))
    for idx, rec in enumerate(lower):
        seeds.append((("lower", idx), tuple(np.asarray(e, dtype=float) for e in rec)))

    used: set = set()
    arcs: list[SurfaceArc] = []
    for label, data in seeds:
        if label in used:
            continue
        used.add(label)
        if label[0] == "upper":
            x0 = data
            F, J = system.residual(x0)
            t = null_tangent(J)
            _, ds = system.slack(x0)
            if t @ ds < 0:
                t = -t
            start = [x0]
        else:
            x0 = _collision_seed(system, data, delta)
            if x0 is None:
                arcs.append(
                    SurfaceArc(label, None, np.zeros((0, level, dom.point_dim)), np.zeros(0), "no-seed",
                               0.0, math.nan, math.nan, math.nan, f"no arc found near collision point {label}")
                )
                continue
            _, J = system.residual(x0)
            t = system.orient_away(x0, null_tangent(J))
            # the collision point itself: x1 doubled
            start = [np.stack((data[0],) + tuple(data)), x0]
        T0 = space.to_ambient(x0, t)
        res = trace(space, system.residual, x0, T0, step=step, max_arclength=max_arclength, closure=False, event=event)
        pts = list(start) + [np.asarray(p) for p in res.points[1:]]
        end = None
        end_res = math.nan
        note = ""
        if res.status == "event":
            y = res.points[-1]
            if system.separation(y)[0] < rc:
                end = _match_lower(system, y, lower, 10 * rc)
                end_res = float(np.linalg.norm(system.residual(y)[0]))
            else:
                prev = res.points[-2]
                sp, sc = system.slack(prev)[0], system.slack(y)[0]
                lam = sp / (sp - sc) if sp != sc else 1.0
                x = space.push(prev, lam * space.offset(prev, y))
                for _ in range(80):
                    F, J = system.boundary(x)
                    du = np.linalg.lstsq(J, -F, rcond=None)[0]
                    x = space.push(x, du)
                    if np.linalg.norm(du) < 1e-15:
                        break
                F, _ = system.boundary(x)
                end_res = float(np.linalg.norm(F))
                pts[-1] = x
                if system.separation(x)[0] < 1e-4:
                    end = _match_lower(system, x, lower, 10 * rc)
                else:
                    end = _match_upper(system, x, upper, max(match_tol, 1e-6))
            if end is None:
                note = f"arc from {label} ended at an unclassified boundary point"
        else:
            note = f"arc from {label} did not reach a boundary ({res.status})"
        samples = np.array([[dom.canonical(e) for e in p] for p in pts])
        interior = pts[1:-1] if len(pts) > 2 else []
        slack = np.array([system.slack(p)[0] for p in pts])
        max_res = max((float(np.linalg.norm(system.residual(p)[0])) for p in interior), default=0.0)
        arcs.append(
            SurfaceArc(
                seed=label,
                end=end,
                samples=samples,
                slack=slack,
                status=res.status,
                arclength=res.arclength,
                max_residual=max_res,
                min_slack=float(slack[1:-1].min()) if len(slack) > 2 else 0.0,
                end_residual=end_res,
                note=note,
            )
        )
        if end is not None:
            used.add(end)
    return arcs
