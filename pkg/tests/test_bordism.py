from fractions import Fraction

import numpy as np
import pytest

from primbordism.bordism import ARC_RESIDUAL_BOUND, euler_cross_check, parity_chain, trace_cobordism
from primbordism.prim_map import builtin_model

DEG3 = [["5/4", "11/8", "1/4", "2"], ["2", "-3/2", "-5/4"], ["-3/4", "1/4", "11/8", "-1/8"], ["2", "-5/8", "7/4"]]


def _deg3():
    return builtin_model("trig_curve", [[Fraction(c) for c in p] for p in DEG3])


def test_figure_eight_chain(figure_eight):
    rep = parity_chain(figure_eight, 2)
    assert rep.counts == [4, 2] and rep.parities == [0, 0]
    assert rep.passed
    assert rep.as_dict()["verdict"] == "pass"


def test_round_circle_chain(round_circle):
    rep = parity_chain(round_circle, 2)
    assert rep.counts == [2, 0] and rep.passed


def test_torus_chains(round_torus, tilted_torus):
    assert parity_chain(round_torus, 3).counts == [0, 0, 0]
    rep = parity_chain(tilted_torus, 3)
    assert rep.counts == [4, 0, 0] and rep.passed


def test_figure_eight_arcs(figure_eight):
    res = trace_cobordism(figure_eight, 2, 2)
    assert res.verdict == "pass", res.reasons
    assert len(res.arcs) == 3
    pairs = sorted(tuple(sorted([a.endpoint_a, a.endpoint_b])) for a in res.arcs)
    assert pairs == [(("lower", 0), ("lower", 2)), (("lower", 1), ("lower", 3)), (("upper", 0), ("upper", 1))]
    for a in res.arcs:
        assert a.max_residual <= ARC_RESIDUAL_BOUND
        assert a.min_slack >= -1e-12
        # the slack is the height difference along the arc
        h = figure_eight.height
        np.testing.assert_allclose(a.slack, h(a.polyline[:, 0]) - h(a.polyline[:, 1]), atol=1e-9)


def test_random_curve_arcs():
    model = _deg3()
    chain = parity_chain(model, 2)
    res = trace_cobordism(model, 2, 2)
    assert res.verdict == "pass", res.reasons
    assert 2 * len(res.arcs) == sum(chain.counts)


def test_tilted_torus_arcs(tilted_torus):
    res = trace_cobordism(tilted_torus, 3, 2)
    assert res.verdict == "pass", res.reasons
    assert (res.upper_count, res.lower_count, len(res.arcs)) == (0, 4, 2)
    vac = trace_cobordism(tilted_torus, 3, 3)
    assert vac.verdict == "pass" and vac.arcs == []


def test_rejected_model():
    bad = builtin_model("trig_curve", [[0, 1], [], [1], []])
    assert parity_chain(bad, 2).verdict == "rejected"
    assert trace_cobordism(bad, 2, 2).verdict == "rejected"


def test_arc_level_bounds(figure_eight):
    with pytest.raises(ValueError):
        trace_cobordism(figure_eight, 2, 1)


def test_euler_checks(figure_eight, tilted_torus, boy):
    e = euler_cross_check(figure_eight)
    assert (e.kind, e.count, bool(e)) == ("folds", 4, True)
    e = euler_cross_check(tilted_torus)
    assert (e.kind, e.count, e.expected_parity, bool(e)) == ("cusps", 4, 0, True)
    e = euler_cross_check(boy)
    assert (e.count, e.expected_parity, bool(e)) == (3, 1, True)
