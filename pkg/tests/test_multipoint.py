from fractions import Fraction as Q

import numpy as np
import pytest
from scipy.optimize import least_squares

from primbordism.multipoint import (
    DimensionError,
    ResolvedPointSet,
    UnsupportedStratumError,
    covering_check,
    find_mixed,
    find_multiple_points,
    find_strata,
    multipoint_dimension,
)
from primbordism.prim_map import builtin_model


def _q(*xs):
    return [Q(x) for x in xs]


# random degree-3 and degree-2 curves with three double points each
CURVES = {
    "deg3": [_q("5/4", "11/8", "1/4", "2"), _q("2", "-3/2", "-5/4"), _q("-3/4", "1/4", "11/8", "-1/8"), _q("2", "-5/8", "7/4")],
    "deg2": [_q("7/8", "-9/8", "3/8"), _q("5/4", "13/8"), _q("3/2", "15/8", "-3/2"), _q("9/8", "-1/8")],
}


def brute_force_double_points(model, n=900, tol=1e-9):
    """Local minima of |g(a) - g(b)| on a grid of parameter pairs, refined by least squares."""
    t = np.arange(n) * (2 * np.pi / n)
    P = model.g(t[:, None])
    D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
    gap = np.minimum(np.abs(t[:, None] - t[None, :]), 2 * np.pi - np.abs(t[:, None] - t[None, :]))
    D[gap < 0.05] = np.inf
    nb = np.stack([np.roll(np.roll(D, i, 0), j, 1) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)])
    cand = np.argwhere((D <= nb.min(0)) & (D < 0.1))
    found = []
    for a, b in cand:
        if a >= b:
            continue
        sol = least_squares(lambda x: model.g(x[:1]) - model.g(x[1:]), [t[a], t[b]], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.linalg.norm(sol.fun) > tol:
            continue
        x = np.sort(np.mod(sol.x, 2 * np.pi))
        if min(x[1] - x[0], 2 * np.pi - x[1] + x[0]) < 1e-3:
            continue  # slid onto the diagonal
        if not any(np.abs(x - y).max() < 1e-6 for y in found):
            found.append(x)
    return sorted(found, key=tuple)


@pytest.mark.parametrize("name", sorted(CURVES))
def test_double_points_match_brute_force(name):
    model = builtin_model("trig_curve", CURVES[name])
    oracle = brute_force_double_points(model)
    M, N = find_multiple_points(model, 2)
    assert len(oracle) == len(N) == 3
    got = sorted((np.sort([float(e[0]) for e in rec.entries]) for rec in N.points), key=tuple)
    for a, b in zip(got, oracle):
        np.testing.assert_allclose(a, b, atol=1e-8)
    assert M.max_residual <= 1e-10


def test_figure_eight_double_point(figure_eight):
    M, N = find_multiple_points(figure_eight, 2)
    assert len(M) == 2 and len(N) == 1
    entries = sorted(tuple(float(e[0]) for e in rec.entries) for rec in M.points)
    np.testing.assert_allclose(entries, [(0.0, np.pi), (np.pi, 0.0)], atol=1e-12)
    np.testing.assert_allclose(N.points[0].target, [0.0, 0.0], atol=1e-12)
    assert covering_check(M, N)


def test_fold_points(figure_eight):
    S = find_strata(figure_eight, 1)
    np.testing.assert_allclose([float(r.entries[0][0]) for r in S.points], np.pi / 4 * np.array([1, 3, 5, 7]))
    assert {r.label for r in S.points} == {"fold+", "fold-"}


@pytest.mark.parametrize("name", sorted(CURVES))
def test_curve_samples_refinement_is_stable(name):
    model = builtin_model("trig_curve", CURVES[name])
    _, coarse = find_multiple_points(model, 2, resolution=4096)
    _, fine = find_multiple_points(model, 2, resolution=8192)
    assert len(coarse) == len(fine)
    for a, b in zip(coarse.points, fine.points):
        np.testing.assert_allclose(np.concatenate(a.entries), np.concatenate(b.entries), atol=1e-9)


def test_torus_refinement_is_stable(tilted_torus):
    for getter in (lambda res: find_strata(tilted_torus, 2, res), lambda res: find_mixed(tilted_torus, 3, 3, res)):
        coarse, fine = getter(48), getter(96)
        assert len(coarse) == len(fine)
        for a, b in zip(coarse.points, fine.points):
            np.testing.assert_allclose(np.concatenate(a.entries), np.concatenate(b.entries), atol=1e-8)
    assert len(find_strata(tilted_torus, 1, 48)) == len(find_strata(tilted_torus, 1, 96))


def test_boy_refinement_is_stable(boy):
    _, coarse = find_multiple_points(boy, 3, resolution=4)
    _, fine = find_multiple_points(boy, 3, resolution=5)
    assert len(coarse) == len(fine) == 1
    np.testing.assert_allclose(np.concatenate(coarse.points[0].entries), np.concatenate(fine.points[0].entries), atol=1e-9)


def test_boy_triple_point_covering(boy):
    M, N = find_multiple_points(boy, 3)
    assert len(M) == 3 and len(N) == 1
    assert covering_check(M, N)
    # every record has its first entry distinguished and the rest sorted
    firsts = sorted(tuple(np.round(rec.entries[0], 9)) for rec in M.points)
    assert firsts == sorted(tuple(np.round(e, 9)) for e in N.points[0].entries)
    for rec in M.points:
        assert [tuple(e) for e in rec.entries[1:]] == sorted(tuple(e) for e in rec.entries[1:])
        np.testing.assert_allclose(boy.domain.canonical(np.stack(rec.entries)), np.stack(rec.entries))


def test_covering_negative_control():
    model = builtin_model("trig_curve", CURVES["deg3"])
    M, N = find_multiple_points(model, 2)
    assert covering_check(M, N)
    short = ResolvedPointSet(M.kind, M.r, M.index, M.points[1:], model)
    assert not covering_check(short, N)
    doubled = ResolvedPointSet(M.kind, M.r, M.index, M.points[:1] * 2 + M.points[2:], model)
    assert not covering_check(doubled, N)


def test_dimension_errors(figure_eight, round_torus):
    assert multipoint_dimension(figure_eight, 2) == 0
    assert multipoint_dimension(round_torus, 2) == 1
    with pytest.raises(DimensionError, match=r"positive-dimensional; unsupported: n - \(r-1\)\(k\+1\) = 2 - 1\*1 = 1"):
        find_multiple_points(round_torus, 2)
    with pytest.raises(DimensionError, match="negative"):
        find_mixed(figure_eight, 3, 1)
    with pytest.raises(ValueError):
        find_multiple_points(figure_eight, 1)
    with pytest.raises(UnsupportedStratumError):
        find_strata(figure_eight, 2)
    with pytest.raises(ValueError, match="outside"):
        find_mixed(figure_eight, 2, 3)


def test_mixed_delegation(figure_eight):
    assert len(find_mixed(figure_eight, 2, 2)) == 2
    assert len(find_mixed(figure_eight, 2, 1)) == 4
    assert find_mixed(figure_eight, 2, 1).kind == "Lambda^2_1"
