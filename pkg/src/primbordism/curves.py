"""Numerical geometry of immersed trigonometric curves ``g = (F, H)``.

Folds of ``f = F`` are found exactly (half-angle substitution and Sturm
isolation).  Double points come from a sampled polyline: segment pairs
crossing in the plane are refined by Newton.  The cobordism arcs are traced
in the pair space ``(t1, t2)`` as the zero set of the divided difference

    D(t1, t2) = (F(t1) - F(t2)) / (2 sin((t1 - t2)/2))
              = sum_k U_k(x) (-a_k sin k s + b_k cos k s),

with ``s = (t1 + t2)/2``, ``x = (t1 - t2)/2`` and ``U_k(x) = sin kx / sin x``.
``D`` extends smoothly across the diagonal, where it equals ``F'``, so the
arcs meet the diagonal transversally at the folds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from .continuation import ProductSpace, TraceResult, trace
from .domains import PeriodicBox, angle_diff, wrap_angle

TWO_PI = 2.0 * math.pi
_BOX = PeriodicBox(1)


class CurveEval:
    """Fast float evaluation of ``F``, ``H`` and the divided difference."""

    def __init__(self, model):
        F, H = model.curve
        self.F, self.H = F, H
        self.fa0, self.ks, self.fa, self.fb = F.float_arrays()
        self.ha0, self.hks, self.ha, self.hb = H.float_arrays()

    def f(self, th, m: int = 0):
        return self.F(th, m)

    def h(self, th, m: int = 0):
        return self.H(th, m)

    def g(self, th):
        return np.stack([self.F(th), self.H(th)], axis=-1)

    def dg(self, th):
        return np.stack([self.F(th, 1), self.H(th, 1)], axis=-1)

    def divided_difference(self, t1: float, t2: float) -> tuple[float, np.ndarray]:
        ks, a, b = self.ks, self.fa, self.fb
        d = len(ks)
        if d == 0:
            return 0.0, np.zeros(2)
        s = 0.5 * (t1 + t2)
        x = 0.5 * (t1 - t2)
        c, sx = math.cos(x), math.sin(x)
        U = np.empty(d)
        V = np.empty(d)
        U[0], V[0] = 1.0, 0.0
        if d > 1:
            U[1], V[1] = 2 * c, -2 * sx
        for i in range(2, d):
            U[i] = 2 * c * U[i - 1] - U[i - 2]
            V[i] = -2 * sx * U[i - 1] + 2 * c * V[i - 1] - V[i - 2]
        ck, sk = np.cos(ks * s), np.sin(ks * s)
        A = -a * sk + b * ck
        dA = -ks * (a * ck + b * sk)
        D = float(U @ A)
        Ds = float(U @ dA)
        Dx = float(V @ A)
        return D, np.array([0.5 * (Ds + Dx), 0.5 * (Ds - Dx)])

    def slack(self, t1: float, t2: float) -> tuple[float, np.ndarray]:
        return float(self.H(t1) - self.H(t2)), np.array([float(self.H(t1, 1)), -float(self.H(t2, 1))])


def evaluator(model) -> CurveEval:
    ev = model.cache.get("curve_eval")
    if ev is None:
        ev = model.cache["curve_eval"] = CurveEval(model)
    return ev


# ---------------------------------------------------------------------------
# folds and double points


def fold_points(model) -> list[float]:
    key = "folds"
    if key not in model.cache:
        model.cache[key] = model.curve[0].critical_points()
    return model.cache[key]


@dataclass
class DoublePointSearch:
    pairs: list[tuple[float, float]]  # unordered, a < b
    residuals: list[float]
    samples: int
    candidates: int
    newton_iterations: int
    warnings: list[str]


def _segment_hits(P: np.ndarray, pairs: np.ndarray, eps: float = 1e-9):
    p, r = P[pairs[:, 0]], P[pairs[:, 0] + 1] - P[pairs[:, 0]]
    q, s = P[pairs[:, 1]], P[pairs[:, 1] + 1] - P[pairs[:, 1]]
    rxs = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    qp = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / rxs
        u = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / rxs
    hit = (np.abs(rxs) > 0) & (t >= -eps) & (t <= 1 + eps) & (u >= -eps) & (u <= 1 + eps)
    return hit, t, u


def find_double_points(model, samples: int = 4096, tube: float = 1e-3, dedup: float = 1e-6) -> DoublePointSearch:
    key = ("doubles", samples, tube, dedup)
    if key in model.cache:
        return model.cache[key]
    ev = evaluator(model)
    dth = TWO_PI / samples
    th = np.arange(samples + 1) * dth
    P = ev.g(th)
    mids = 0.5 * (P[:-1] + P[1:])
    seglen = np.linalg.norm(P[1:] - P[:-1], axis=1)
    tree = cKDTree(mids)
    cand = np.array(sorted(tree.query_pairs(float(seglen.max()) * 1.0001 + 1e-12)), dtype=int).reshape(-1, 2)
    # drop neighbouring segments (the fat diagonal)
    gap = np.abs(cand[:, 0] - cand[:, 1])
    gap = np.minimum(gap, samples - gap)
    cand = cand[gap * dth > max(tube, 1.5 * dth)]
    warnings = []
    found: list[tuple[float, float]] = []
    residuals: list[float] = []
    iters_total = 0
    if len(cand):
        hit, t, u = _segment_hits(P, cand)
        for (i, j), ti, ui in zip(cand[hit], t[hit], u[hit]):
            a, b = th[i] + ti * dth, th[j] + ui * dth
            for it in range(30):
                r = ev.g(a) - ev.g(b)
                J = np.stack([ev.dg(a), -ev.dg(b)], axis=-1)
                try:
                    step = np.linalg.solve(J, -r)
                except np.linalg.LinAlgError:
                    break
                a, b = a + step[0], b + step[1]
                iters_total += 1
                if np.linalg.norm(step) < 1e-15:
                    break
            a, b = float(_BOX.canonical(a)), float(_BOX.canonical(b))
            res = float(np.linalg.norm(ev.g(a) - ev.g(b)))
            if not res <= 1e-10:
                warnings.append(f"double-point candidate at cell ({i},{j}) did not converge (residual {res:.2e})")
                continue
            if abs(float(angle_diff(a, b))) < tube:
                continue
            a, b = min(a, b), max(a, b)
            if any(
                max(abs(angle_diff(a, x)), abs(angle_diff(b, y))) < dedup
                or max(abs(angle_diff(a, y)), abs(angle_diff(b, x))) < dedup
                for x, y in found
            ):
                continue
            found.append((a, b))
            residuals.append(res)
    order = np.argsort([p[0] for p in found], kind="stable")
    out = DoublePointSearch(
        [found[i] for i in order], [residuals[i] for i in order], samples, int(len(cand)), iters_total, warnings
    )
    model.cache[key] = out
    return out


# ---------------------------------------------------------------------------
# genericity


def curve_margins(model, samples: int = 4096) -> tuple[dict, dict]:
    ev = evaluator(model)
    th = np.arange(samples) * (TWO_PI / samples)
    speed = np.linalg.norm(ev.dg(th), axis=1)
    imm = float(speed.min())
    for i in np.argsort(speed)[:4]:
        res = minimize_scalar(
            lambda x: float(np.linalg.norm(ev.dg(x))),
            bounds=(th[i] - TWO_PI / samples, th[i] + TWO_PI / samples),
            method="bounded",
            options={"xatol": 1e-12},
        )
        imm = min(imm, float(res.fun))

    folds = fold_points(model)
    fold_nd = min(
        (min(abs(float(ev.f(t, 2))), abs(float(ev.h(t, 1)))) for t in folds), default=math.inf
    )
    dps = find_double_points(model, samples)
    trans = math.inf
    gap = math.inf
    for a, b in dps.pairs:
        ga, gb = ev.dg(a), ev.dg(b)
        cross = abs(ga[0] * gb[1] - ga[1] * gb[0]) / (np.linalg.norm(ga) * np.linalg.norm(gb))
        trans = min(trans, float(cross))
        for t in folds:
            gap = min(gap, abs(float(angle_diff(a, t))), abs(float(angle_diff(b, t))))
    targets = [ev.g(a) for a, _ in dps.pairs]
    for i in range(len(targets)):
        for j in range(i + 1, len(targets)):
            gap = min(gap, float(np.linalg.norm(targets[i] - targets[j])))
    info = {
        "folds": len(folds),
        "double_points": len(dps.pairs),
        "solver_warnings": list(dps.warnings),
    }
    # coincident critical values make the pair curve cross itself; the tracer
    # passes straight through such crossings, so this is informational only
    values = sorted(float(ev.f(t)) for t in folds)
    info["critical_value_gap"] = float(min(np.diff(values), default=math.inf)) if len(values) > 1 else math.inf
    margins = {
        "immersion_margin": imm,
        "transversality_min": trans,
        "fold_nondegeneracy_min": float(fold_nd),
        "cusp_regularity_min": math.inf,
        "gap_min": gap,
    }
    return margins, info


# ---------------------------------------------------------------------------
# cobordism arcs


@dataclass
class ArcTrace:
    seed: tuple[str, int]
    end: tuple[str, int] | None
    samples: np.ndarray  # rows (t1, t2, slack)
    status: str
    arclength: float
    max_residual: float
    min_slack: float
    end_residual: float
    note: str = ""


def _classify(endpoint, folds, doubles, tol):
    a, b = endpoint
    if abs(float(angle_diff(a, b))) < 1e-5:
        for idx, t in enumerate(folds):
            if abs(float(angle_diff(a, t))) < tol:
                return ("fold", idx)
        return None
    for idx, (x, y) in enumerate(doubles):
        if abs(float(angle_diff(a, x))) < tol and abs(float(angle_diff(b, y))) < tol:
            return ("double", idx)
    return None


def trace_pair_arcs(
    model,
    folds: list[float],
    doubles: list[tuple[float, float]],
    step: float = 1e-2,
    max_arclength: float = 60.0,
    match_tol: float = 1e-6,
) -> list[ArcTrace]:
    """Trace every arc of ``{D = 0, slack >= 0}`` from its seeds.

    ``doubles`` are ordered pairs (both orderings of each double point).
    An arc whose far end is already used is still returned so the caller can
    flag the conflict.
    """
    ev = evaluator(model)
    space = ProductSpace(PeriodicBox(1), 2)

    def residual(x):
        D, dD = ev.divided_difference(x[0, 0], x[1, 0])
        return np.array([D]), dD[None, :]

    def boundary(x):
        D, dD = ev.divided_difference(x[0, 0], x[1, 0])
        s, ds = ev.slack(x[0, 0], x[1, 0])
        return np.array([D, s]), np.stack([dD, ds])

    def event(x, y):
        return ev.slack(x[0, 0], x[1, 0])[0] > 0 and ev.slack(y[0, 0], y[1, 0])[0] <= 0

    seeds: list[tuple[tuple[str, int], np.ndarray, np.ndarray]] = []
    for i, t in enumerate(folds):
        T = np.array([1.0, -1.0]) * math.copysign(1.0, float(ev.h(t, 1)))
        seeds.append((("fold", i), np.array([[t], [t]]), T))
    for i, (a, b) in enumerate(doubles):
        _, dD = ev.divided_difference(a, b)
        _, ds = ev.slack(a, b)
        T = np.array([-dD[1], dD[0]])
        if T @ ds < 0:
            T = -T
        seeds.append((("double", i), np.array([[a], [b]]), T))

    used: set = set()
    arcs = []
    for label, x0, T0 in seeds:
        if label in used:
            continue
        used.add(label)
        res: TraceResult = trace(
            space, residual, x0, T0, step=step, max_arclength=max_arclength, closure=False, event=event
        )
        pts = np.array([p[:, 0] for p in res.points])
        end = None
        end_res = math.nan
        note = ""
        if res.status == "event":
            prev, cur = res.points[-2], res.points[-1]
            sp, sc = ev.slack(prev[0, 0], prev[1, 0])[0], ev.slack(cur[0, 0], cur[1, 0])[0]
            lam = sp / (sp - sc) if sp != sc else 1.0
            guess = prev + lam * angle_diff(cur, prev)
            x = guess
            for _ in range(40):
                F, J = boundary(x)
                du = np.linalg.lstsq(J, -F, rcond=None)[0]
                x = x + du[:, None]
                if np.linalg.norm(du) < 1e-15:
                    break
            F, _ = boundary(x)
            end_res = float(np.linalg.norm(F))
            endpoint = (float(_BOX.canonical(x[0, 0])), float(_BOX.canonical(x[1, 0])))
            end = _classify(endpoint, folds, doubles, max(match_tol, 1e-6))
            pts[-1] = endpoint
            if end is None:
                note = f"arc ended at unclassified boundary point {endpoint}"
        else:
            note = f"arc from {label} did not reach a boundary ({res.status})"
        samples = np.column_stack(
            [_BOX.canonical(pts[:, 0]), _BOX.canonical(pts[:, 1]), ev.h(pts[:, 0]) - ev.h(pts[:, 1])]
        )
        fres = np.abs(ev.f(pts[:, 0]) - ev.f(pts[:, 1]))
        arcs.append(
            ArcTrace(
                seed=label,
                end=end,
                samples=samples,
                status=res.status,
                arclength=res.arclength,
                max_residual=float(fres.max()),
                min_slack=float(samples[1:-1, 2].min()) if len(samples) > 2 else 0.0,
                end_residual=end_res,
                note=note,
            )
        )
        if end is not None:
            used.add(end)
    return arcs
