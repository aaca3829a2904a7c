"""Command-line entry point.

Subcommands: strata, multipoints, chain-verify, trace-cobordism,
normal-form, sweep.  Exit status: 0 all verdicts pass, 1 a mathematical
verdict failed, 2 usage or config error, 3 inconclusive (solver warnings,
rejected model or untraceable arc).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import report as rpt
from .bordism import euler_cross_check, parity_chain, trace_cobordism
from .config import ConfigError, RunConfig, apply_override, load_config
from .local_cobordism import (
    boundary_limit_check,
    pair_high_slots,
    pair_residuals,
    solve_pair,
    solve_pair_top,
)
from .multipoint import DimensionError, UnsupportedStratumError, covering_check, find_multiple_points, find_strata
from .normal_form import (
    ContractError,
    EmptyStratumError,
    NormalFormSpec,
    component_polys,
    solve_fiber,
    stratum_membership,
    stratum_parametrize,
    top_stratum_point,
)
from .poly import derivative
from .prim_map import MODEL_NAMES, UnknownModelError, builtin_model, genericity_report

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

COMMANDS = ("strata", "multipoints", "chain-verify", "trace-cobordism", "normal-form", "sweep")


class UsageError(Exception):
    pass


def _status(failed: bool, inconclusive: bool) -> int:
    if failed:
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_PASS


def _model(cfg: RunConfig):
    if not cfg.model:
        raise UsageError("no model given (config key 'model' or --model)")
    try:
        return builtin_model(cfg.model, cfg.model_params())
    except (UnknownModelError, ConfigError) as exc:
        raise UsageError(str(exc)) from exc
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"bad parameters for {cfg.model}: {exc}") from exc


def _default_r(model) -> int:
    # the multiple-point set is 0-dimensional when n = (r - 1)(k + 1)
    return model.n // (model.k + 1) + 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_strata(cfg: RunConfig):
    model = _model(cfg)
    levels = [1] if model.domain.dim == 1 else [1, 2]
    sets = [find_strata(model, j, cfg.resolution, cfg.tolerances["step"]) for j in levels]
    warnings = [w for s in sets for w in s.warnings]
    results = {"strata": [s.as_dict() for s in sets]}
    return model, results, {"warnings": warnings}, _status(False, bool(warnings))


def cmd_multipoints(cfg: RunConfig):
    model = _model(cfg)
    r = cfg.r or _default_r(model)
    M, N = find_multiple_points(model, r, cfg.resolution, cfg.tolerances["tube"], cfg.tolerances["dedup"])
    cov = covering_check(M, N)
    results = {"r": r, "resolved": M.as_dict(), "target": N.as_dict(), "covering": cov}
    warnings = list(dict.fromkeys(M.warnings + N.warnings))
    return model, results, {"warnings": warnings}, _status(not cov, bool(warnings))


def cmd_chain_verify(cfg: RunConfig):
    model = _model(cfg)
    r = cfg.r or _default_r(model)
    t = cfg.tolerances
    pc = parity_chain(model, r, cfg.thresholds, cfg.resolution, t["tube"], t["dedup"])
    results = {"parity_chain": pc.as_dict()}
    if pc.verdict == "rejected":
        return model, results, {"warnings": pc.warnings}, EXIT_INCONCLUSIVE
    eu = euler_cross_check(model, cfg.resolution)
    results["euler_cross_check"] = eu.as_dict()
    failed = pc.verdict == "fail" or not eu.passed
    return model, results, {"warnings": pc.warnings}, _status(failed, bool(pc.warnings))


def cmd_trace_cobordism(cfg: RunConfig):
    model = _model(cfg)
    r = cfg.r or _default_r(model)
    levels = [cfg.i] if cfg.i else list(range(2, r + 1))
    t = cfg.tolerances
    out, warnings = [], []
    failed = inconclusive = False
    for i in levels:
        res = trace_cobordism(model, r, i, cfg.thresholds, cfg.resolution, t["step"], t["tube"], t["dedup"])
        out.append(res.as_dict())
        warnings += [w for w in res.warnings if w not in warnings]
        failed |= res.verdict == "fail"
        inconclusive |= res.verdict in ("inconclusive", "rejected")
    results = {"r": r, "levels": out}
    return model, results, {"warnings": warnings}, _status(failed, inconclusive or bool(warnings))


def _exact_list(cfg: RunConfig, key: str, n: int) -> list[Fraction]:
    vals = cfg.normal_form.get(key)
    if vals is None:
        return [Fraction(0)] * n
    if len(vals) != n:
        raise UsageError(f"nf.{key} needs {n} values, got {len(vals)}")
    return [Fraction(v) for v in vals]


def _s(x) -> str:
    return str(Fraction(x))


def cmd_normal_form(cfg: RunConfig):
    nf = cfg.normal_form
    try:
        spec = NormalFormSpec(int(nf.get("r", 2)), int(nf.get("k", 0)), int(nf.get("z", 0)))
        j = int(nf.get("j", spec.r - 1))
        if not 0 <= j < spec.r:
            raise UsageError(f"nf.j must satisfy 0 <= j < r = {spec.r}")
        t = Fraction(nf.get("t", 1))
        tu, tv = Fraction(nf.get("tu", -1)), Fraction(nf.get("tv", 1))
        steps = int(nf.get("steps", 20))
        s = _exact_list(cfg, "s", spec.z)
        high = dict(zip(spec.high_slots(j), _exact_list(cfg, "high", len(spec.high_slots(j)))))
        phigh_slots = pair_high_slots(spec, j) if j < spec.r - 1 else []
        phigh = dict(zip(phigh_slots, _exact_list(cfg, "pair_high", len(phigh_slots))))
    except ContractError as exc:
        raise UsageError(str(exc)) from exc

    checks = []
    x = stratum_parametrize(spec, j, t, high, s)
    residuals = [derivative(p, m)(x.t) for p in component_polys(spec, x.y) for m in range(1, j + 1)]
    levels = [stratum_membership(spec, x, jj) for jj in range(0, j + 1)]
    checks.append(
        {
            "name": "stratum_parametrize",
            "passed": all(levels) and all(v == 0 for v in residuals),
            "point": _point(spec, x),
            "residuals": [_s(v) for v in residuals],
            "membership_levels": levels,
        }
    )
    fiber = solve_fiber(spec, x)
    checks.append({"name": "solve_fiber", "passed": any(_same(p, x) for p in fiber), "fiber_t": [_t(p) for p in fiber]})
    top = top_stratum_point(spec, s)
    top_fiber = solve_fiber(spec, top)
    checks.append({"name": "top_stratum_fiber_singleton", "passed": len(top_fiber) == 1, "fiber_t": [_t(p) for p in top_fiber]})
    if j < spec.r - 1:
        try:
            pair = solve_pair(spec, j, tu, tv, phigh, s)
        except ContractError as exc:
            raise UsageError(str(exc)) from exc
        res = pair_residuals(pair)
        checks.append(
            {
                "name": "solve_pair",
                "passed": all(v == 0 for v in res) and stratum_membership(spec, pair.u, j),
                "tu": _s(pair.tu),
                "tv": _s(pair.tv),
                "coefficients": _coeffs(spec, pair.coeffs),
                "residuals": [_s(v) for v in res],
            }
        )
        path = [(-Fraction(1, 2**n), Fraction(1, 2**n), phigh) for n in range(1, steps + 1)]
        limit = stratum_parametrize(spec, j + 1, 0, phigh, s)
        rep = boundary_limit_check(spec, j, path, limit)
        checks.append(_limit_entry("boundary_limit", rep))
    tvt = tv if tv > 0 else Fraction(1)
    ptop = solve_pair_top(spec, tvt, s)
    res = pair_residuals(ptop)
    checks.append(
        {
            "name": "solve_pair_top",
            "passed": ptop.tu == -tvt / spec.r and all(v == 0 for v in res),
            "tu": _s(ptop.tu),
            "tv": _s(ptop.tv),
            "coefficients": _coeffs(spec, ptop.coeffs),
            "residuals": [_s(v) for v in res],
        }
    )
    path = [(None, Fraction(1, 2**n), {}) for n in range(1, steps + 1)]
    rep = boundary_limit_check(spec, spec.r - 1, path, top)
    checks.append(_limit_entry("boundary_limit_top", rep))
    results = {"spec": {"r": spec.r, "k": spec.k, "z": spec.z, "j": j}, "checks": checks}
    failed = not all(c["passed"] for c in checks)
    return None, results, {"warnings": []}, _status(failed, False)


def _coeffs(spec, y) -> dict:
    return {f"y[{i},{m}]": _s(y[(i, m)]) for (i, m) in spec.slots()}


def _point(spec, x) -> dict:
    return {"t": _s(x.t), "y": _coeffs(spec, x.y), "s": [_s(v) for v in x.s]}


def _t(p) -> str:
    return _s(p.t) if isinstance(p.t, Fraction) else repr(float(p.t))


def _same(p, x) -> bool:
    return isinstance(p.t, Fraction) and p.t == x.t and p.y == x.y and p.s == x.s


def _limit_entry(name, rep) -> dict:
    return {
        "name": name,
        "passed": bool(rep.passed),
        "final_gap": _s(rep.gaps[-1]),
        "final_distance": f"{rep.distances[-1]:.3e}",
        "monotone": rep.monotone,
        "limit_in_stratum": rep.limit_in_stratum,
        "extrapolated_t": _s(rep.extrapolated.t),
    }


def random_trig_params(rng: np.random.Generator, max_degree: int, scale: int = 8, bound: int = 16) -> tuple[int, list]:
    """Random rational coefficients ``n / scale`` with ``|n| <= bound``."""
    d = int(rng.integers(1, max_degree + 1))

    def draw(n):
        return [Fraction(int(v), scale) for v in rng.integers(-bound, bound + 1, size=n)]

    return d, [draw(d + 1), draw(d), draw(d + 1), draw(d)]


def cmd_sweep(cfg: RunConfig):
    if cfg.seed is None:
        raise UsageError("sweep needs a seed (config key 'seed' or --seed)")
    rng = np.random.default_rng(cfg.seed)
    t = cfg.tolerances
    samples = []
    failures = {"chain": 0, "covering": 0, "euler": 0, "arcs": 0}
    warned = 0
    for idx in range(cfg.count):
        d, params = random_trig_params(rng, cfg.max_degree)
        model = builtin_model("trig_curve", params)
        entry = {"index": idx, "degree": d, "coefficients": [[str(c) for c in p] for p in params]}
        gen = genericity_report(model, cfg.resolution, cfg.thresholds)
        if not gen.generic:
            entry.update(verdict="rejected", failures=gen.failures)
            samples.append(entry)
            continue
        pc = parity_chain(model, 2, cfg.thresholds, cfg.resolution, t["tube"], t["dedup"])
        M, N = find_multiple_points(model, 2, cfg.resolution, t["tube"], t["dedup"])
        cov = covering_check(M, N)
        eu = euler_cross_check(model, cfg.resolution)
        entry.update(
            verdict=pc.verdict,
            counts=pc.counts,
            parities=pc.parities,
            covering=cov,
            euler=eu.passed,
            max_residual=f"{max(s.max_residual for s in pc.sets):.3e}",
            warnings=pc.warnings,
        )
        failures["chain"] += pc.verdict != "pass"
        failures["covering"] += not cov
        failures["euler"] += not eu.passed
        if cfg.sweep_arcs:
            tc = trace_cobordism(model, 2, 2, cfg.thresholds, cfg.resolution, t["step"], t["tube"], t["dedup"])
            entry["arcs"] = {"count": len(tc.arcs), "verdict": tc.verdict, "reasons": tc.reasons}
            failures["arcs"] += tc.verdict == "fail"
            warned += tc.verdict == "inconclusive"
        warned += bool(pc.warnings)
        samples.append(entry)
    accepted = sum(1 for s in samples if s["verdict"] != "rejected")
    rejected = len(samples) - accepted
    summary = {
        "count": cfg.count,
        "accepted": accepted,
        "rejected": rejected,
        "rejection_rate": f"{rejected / max(1, cfg.count):.4f}",
        "failures": failures,
        "samples_with_warnings": warned,
    }
    results = {"seed": cfg.seed, "max_degree": cfg.max_degree, "summary": summary, "samples": samples}
    failed = any(failures.values())
    return {"family": "trig_curve", "seed": cfg.seed}, results, {"warnings": []}, _status(failed, warned > 0)


HANDLERS = {
    "strata": cmd_strata,
    "multipoints": cmd_multipoints,
    "chain-verify": cmd_chain_verify,
    "trace-cobordism": cmd_trace_cobordism,
    "normal-form": cmd_normal_form,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# driver


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primbordism",
        description="Multiple points of immersion lifts versus Morin singularities of their projections.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="PATH", help="key = value config file")
    parser.add_argument("--model", help=f"builtin model ({', '.join(MODEL_NAMES)}); overrides the config")
    parser.add_argument("--r", type=int, help="multiplicity r")
    parser.add_argument("--i", type=int, help="arc level for trace-cobordism")
    parser.add_argument("--seed", type=int, help="sweep seed (64-bit unsigned)")
    parser.add_argument("--count", type=int, help="sweep sample count")
    parser.add_argument("--out", metavar="DIR", help="directory for the JSON report (and SVG)")
    parser.add_argument("--svg", action="store_true", help="also write an SVG plot of the model")
    parser.add_argument(
        "--tol-override", action="append", default=[], metavar="KEY=VAL", help="override a tolerance; repeatable"
    )
    return parser


def _configure(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    for key in ("model", "r", "i", "seed", "count", "out"):
        v = getattr(args, key)
        if v is not None:
            setattr(cfg, key, v)
    if cfg.seed is not None and not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    if cfg.count < 0:
        raise ConfigError("count must be non-negative")
    cfg.svg = cfg.svg or args.svg
    for item in args.tol_override:
        apply_override(cfg, item)
    return cfg


def run(command: str, cfg: RunConfig) -> tuple[dict, int, object]:
    """Run one subcommand; returns ``(report, exit status, model or None)``."""
    model, results, diagnostics, status = HANDLERS[command](cfg)
    diagnostics = dict(diagnostics, config=cfg.as_dict(), exit_status=status)
    if model is None or isinstance(model, dict):
        desc = model
        model = None
    else:
        desc = model.describe()
    return rpt.build_report(command, desc, results, diagnostics), status, model


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _configure(args)
        report, status, model = run(args.command, cfg)
    except (UsageError, ConfigError, DimensionError, UnsupportedStratumError, EmptyStratumError, ContractError) as exc:
        print(f"primbordism: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = rpt.dumps(report)
    if cfg.out:
        out = Path(cfg.out)
        rpt.write_report(report, out / f"{args.command}.json")
        if cfg.svg and model is not None:
            (out / f"{model.name}.svg").write_text(rpt.model_svg(model))
        verdict = {0: "pass", 1: "FAIL", 3: "inconclusive"}[status]
        print(f"{args.command}: {verdict} (report {out / (args.command + '.json')})")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
