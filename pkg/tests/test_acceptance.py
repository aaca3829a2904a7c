"""Acceptance criteria C1-C10, each printing one pass/fail line."""

import time
from collections import Counter
from fractions import Fraction as Q

import numpy as np
from primbordism.bordism import euler_cross_check, parity_chain, trace_cobordism
from primbordism.cli import run
from primbordism.config import parse_config
from primbordism.local_cobordism import (
    boundary_limit_check,
    pair_high_slots,
    pair_residuals,
    solve_pair,
    solve_pair_top,
)
from primbordism.multipoint import covering_check, find_mixed, find_multiple_points, find_strata
from primbordism.normal_form import (
    NormalFormSpec,
    component_polys,
    solve_fiber,
    stratum_membership,
    stratum_parametrize,
    top_stratum_point,
)
from primbordism.poly import RationalPoly, derivative
from primbordism.prim_map import builtin_model
from primbordism.report import dumps

SWEEP_SEED = 7
_cache: dict = {}


def verdict(capsys, tag, ok, detail="", skipped=False):
    state = "SKIP" if skipped else ("PASS" if ok else "FAIL")
    with capsys.disabled():
        print(f"\n[{tag}] {state} {detail}")
    assert ok or skipped, f"{tag}: {detail}"


def _rational(rng, bound=6, den=7):
    return Q(int(rng.integers(-bound * den, bound * den + 1)), int(rng.integers(1, den + 1)))


def test_c1_stratum_parametrize_suite(capsys):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(200):
        spec = NormalFormSpec(int(rng.integers(1, 6)), int(rng.integers(0, 4)), int(rng.integers(0, 3)))
        j = int(rng.integers(0, spec.r))
        high = {sl: _rational(rng) for sl in spec.high_slots(j)}
        x = stratum_parametrize(spec, j, _rational(rng), high, [_rational(rng) for _ in range(spec.z)])
        exact = all(derivative(p, m)(x.t) == 0 for p in component_polys(spec, x.y) for m in range(1, j + 1))
        bad += not (exact and stratum_membership(spec, x, j))
    dt = time.perf_counter() - t0
    verdict(capsys, "C1", bad == 0 and dt < 10, f"200 cases, {bad} failures, {dt:.2f}s (< 10s)")


def test_c2_pair_suite(capsys):
    rng = np.random.default_rng(202)
    bad = 0
    for _ in range(200):
        spec = NormalFormSpec(int(rng.integers(2, 6)), int(rng.integers(0, 4)), int(rng.integers(0, 3)))
        j = int(rng.integers(0, spec.r - 1))
        a, b = _rational(rng), _rational(rng)
        if a == b:
            b = a + 1
        tu, tv = min(a, b), max(a, b)
        high = {sl: _rational(rng) for sl in pair_high_slots(spec, j)}
        sol = solve_pair(spec, j, tu, tv, high, [_rational(rng) for _ in range(spec.z)])
        res = pair_residuals(sol)
        bad += not (len(res) > 0 and all(v == 0 for v in res) and stratum_membership(spec, sol.u, j))
        tvt = abs(_rational(rng)) + Q(1, 3)
        top = solve_pair_top(spec, tvt, [_rational(rng) for _ in range(spec.z)])
        bad += not (top.tu == -tvt / spec.r and all(v == 0 for v in pair_residuals(top)))
    example = solve_pair_top(NormalFormSpec(2, 0, 0), 1).polys()[0]
    ok = bad == 0 and example == RationalPoly([0, Q(-3, 4), 0, 1])
    verdict(capsys, "C2", ok, f"200 cases, {bad} failures; r=2, tv=1: p0 = {example}")


def test_c3_boundary_limit(capsys):
    spec = NormalFormSpec(2, 0, 0)
    path = [(None, Q(1, 2**n), {}) for n in range(1, 21)]
    rep = boundary_limit_check(spec, 1, path, top_stratum_point(spec))
    ok = rep.passed and rep.distances[-1] <= 1e-6 and rep.limit_in_stratum
    verdict(capsys, "C3", ok, f"distance at n=20 {rep.distances[-1]:.3e} (<= 1e-6), extrapolated limit in stratum: {rep.limit_in_stratum}")


def test_c4_top_fiber_singleton(capsys):
    rng = np.random.default_rng(404)
    bad = 0
    for _ in range(50):
        spec = NormalFormSpec(int(rng.integers(1, 5)), int(rng.integers(0, 3)), int(rng.integers(0, 3)))
        x0 = top_stratum_point(spec, [_rational(rng) for _ in range(spec.z)])
        bad += solve_fiber(spec, x0) != [x0]
    verdict(capsys, "C4", bad == 0, f"50 specs, {bad} non-singleton fibers")


def _figure_eight_reports():
    cfg = "model = figure_eight"
    return [dumps(run(cmd, parse_config(cfg))[0], include_meta=False) for cmd in ("multipoints", "chain-verify", "trace-cobordism")]


def test_c5_figure_eight(capsys):
    t0 = time.perf_counter()
    model = builtin_model("figure_eight")
    folds = find_strata(model, 1)
    M, N = find_multiple_points(model, 2)
    cov = covering_check(M, N)
    chain = parity_chain(model, 2)
    arcs = trace_cobordism(model, 2, 2)
    dt = time.perf_counter() - t0
    ends = Counter(e for a in arcs.arcs for e in (a.endpoint_a, a.endpoint_b))
    expected = Counter([("upper", 0), ("upper", 1)] + [("lower", k) for k in range(4)])
    ok = (
        (len(folds), len(M), len(N)) == (4, 2, 1)
        and cov
        and chain.passed
        and arcs.passed
        and len(arcs.arcs) == 3
        and ends == expected
        and dt < 5
    )
    _cache["c5"] = _figure_eight_reports()
    verdict(
        capsys,
        "C5",
        ok,
        f"|Sigma1|={len(folds)} |M2|={len(M)} |N2|={len(N)} covering={cov} chain={chain.verdict} "
        f"arcs={len(arcs.arcs)} endpoints bijective={ends == expected} {dt:.2f}s (< 5s)",
    )


def test_c6_round_models(capsys):
    circle, torus = builtin_model("round_circle"), builtin_model("round_torus")
    cc, tc = parity_chain(circle, 2), parity_chain(torus, 3)
    ca = trace_cobordism(circle, 2, 2)
    ta = [trace_cobordism(torus, 3, i) for i in (2, 3)]
    ok = (
        cc.counts == [2, 0]
        and tc.counts == [0, 0, 0]
        and cc.passed
        and tc.passed
        and ca.passed
        and len(ca.arcs) == 1
        and all(a.passed and not a.arcs for a in ta)
    )
    verdict(capsys, "C6", ok, f"circle {tuple(cc.counts)} with {len(ca.arcs)} arc, torus {tuple(tc.counts)} vacuous")


def _sweep():
    cfg = parse_config(f"seed = {SWEEP_SEED}\ncount = 100\nmax_degree = 4")
    rep, status, _ = run("sweep", cfg)
    return rep, status


def test_c7_random_sweep(capsys):
    t0 = time.perf_counter()
    rep, _ = _sweep()
    dt = time.perf_counter() - t0
    _cache["c7"] = rep
    s = rep["results"]["summary"]
    f = s["failures"]
    accepted = [x for x in rep["results"]["samples"] if x["verdict"] != "rejected"]
    ok = s["count"] == 100 and f["chain"] == 0 and f["covering"] == 0 and dt < 120 and len(accepted) == s["accepted"]
    verdict(
        capsys,
        "C7",
        ok,
        f"seed {SWEEP_SEED}: {s['accepted']} accepted, {s['rejected']} rejected; chain failures {f['chain']}, "
        f"covering failures {f['covering']}; {dt:.1f}s (< 120s)",
    )


def test_c8_euler_cross_check(capsys):
    models = [builtin_model(n) for n in ("figure_eight", "round_circle", "round_torus")]
    checks = [euler_cross_check(m) for m in models]
    rep = _cache.get("c7") or _sweep()[0]
    sweep_fail = rep["results"]["summary"]["failures"]["euler"]
    accepted = [x for x in rep["results"]["samples"] if x["verdict"] != "rejected"]
    ok = all(checks) and sweep_fail == 0 and all(x["euler"] for x in accepted)
    verdict(capsys, "C8", ok, f"builtin {[c.count for c in checks]} ok={all(checks)}; sweep {len(accepted)} accepted, {sweep_fail} failures")


def test_c9_boy_surface(capsys, boy):
    M, N = find_multiple_points(boy, 3)
    cusps = find_strata(boy, 2)
    mixed = find_mixed(boy, 3, 2)
    chain = parity_chain(boy, 3)
    ok = len(N) == 1 and len(M) == 3 and len(cusps) % 2 == 1 and len(mixed) % 2 == 1 and chain.passed
    verdict(
        capsys,
        "C9",
        ok,
        f"triple points {len(N)}, |M3|={len(M)}, cusps {len(cusps)}, |Lambda3_2|={len(mixed)}, chain {chain.counts} {chain.verdict}",
    )


def test_c10_determinism(capsys):
    first5 = _cache.get("c5") or _figure_eight_reports()
    first7 = _cache.get("c7") or _sweep()[0]
    same5 = first5 == _figure_eight_reports()
    same7 = dumps(first7, include_meta=False) == dumps(_sweep()[0], include_meta=False)
    verdict(capsys, "C10", same5 and same7, f"C5 reports identical: {same5}; C7 report identical: {same7}")
