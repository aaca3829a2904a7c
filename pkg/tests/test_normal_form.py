from fractions import Fraction as Q

import pytest
from hypothesis import given
from hypothesis import strategies as st

from primbordism.normal_form import (
    ContractError,
    EmptyStratumError,
    NormalFormSpec,
    SourcePoint,
    component_polys,
    eval_lift,
    eval_normal_form,
    solve_fiber,
    stratum_dimension,
    stratum_membership,
    stratum_parametrize,
    top_stratum_point,
    zero_point,
)
from primbordism.poly import derivative

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
CUSP = NormalFormSpec(2, 0, 0)


@st.composite
def spec_and_level(draw, max_r=5, max_k=3, max_z=2):
    spec = NormalFormSpec(draw(st.integers(1, max_r)), draw(st.integers(0, max_k)), draw(st.integers(0, max_z)))
    j = draw(st.integers(0, spec.r - 1))
    return spec, j


@st.composite
def stratum_params(draw):
    spec, j = draw(spec_and_level())
    t = draw(rationals)
    high = {sl: draw(rationals) for sl in spec.high_slots(j)}
    s = [draw(rationals) for _ in range(spec.z)]
    return spec, j, t, high, s


@st.composite
def source_points(draw):
    spec, _ = draw(spec_and_level())
    y = {sl: draw(rationals) for sl in spec.slots()}
    return spec, SourcePoint(draw(rationals), y, [draw(rationals) for _ in range(spec.z)])


def test_dimensions():
    spec = NormalFormSpec(3, 1, 2)
    assert spec.n == 3 * 2 + 2
    assert spec.target_dim == 1 + 1 + (3 * 2 - 1) + 2
    assert spec.lift_dim == spec.target_dim + 1
    assert len(spec.slots()) == spec.r * (spec.k + 1) - 1
    assert (0, spec.r) not in spec.slots()


def test_eval_examples():
    assert eval_normal_form(CUSP, SourcePoint(0, {(0, 1): 0})) == (0, 0)
    assert eval_normal_form(CUSP, SourcePoint(1, {(0, 1): Q(-3, 4)})) == (Q(1, 4), Q(-3, 4))
    spec = NormalFormSpec(2, 1, 1)
    assert set(eval_normal_form(spec, zero_point(spec))) == {0}
    assert len(eval_normal_form(spec, zero_point(spec))) == spec.target_dim


def test_eval_lift_examples():
    assert eval_lift(CUSP, SourcePoint(1, {(0, 1): Q(-3, 4)})) == (Q(1, 4), Q(-3, 4), 1)
    assert set(eval_lift(CUSP, zero_point(CUSP))) == {0}


def test_malformed_point_is_a_contract_violation():
    with pytest.raises(ContractError):
        eval_normal_form(CUSP, SourcePoint(0, {(0, 1): 0, (0, 2): 0}))
    with pytest.raises(ContractError):
        eval_normal_form(NormalFormSpec(2, 0, 1), SourcePoint(0, {(0, 1): 0}))
    with pytest.raises(ContractError):
        SourcePoint(0.5, {})


def test_membership_examples():
    assert stratum_membership(CUSP, zero_point(CUSP), 2)
    x = SourcePoint(1, {(0, 1): -3})
    assert stratum_membership(CUSP, x, 1)
    assert not stratum_membership(CUSP, x, 2)
    assert not stratum_membership(CUSP, SourcePoint(1, {(0, 1): 0}), 1)
    with pytest.raises(EmptyStratumError, match="stratum empty"):
        stratum_membership(CUSP, zero_point(CUSP), 3)


def test_parametrize_examples():
    spec = NormalFormSpec(3, 0, 0)
    x = stratum_parametrize(spec, 2, 1)
    # p0'' = 12t^2 + 2y2 and p0' = 4t^3 + 2y2 t + y1 vanish at t = 1
    assert x.y == {(0, 2): -6, (0, 1): 8}
    assert stratum_membership(spec, x, 2)
    assert stratum_parametrize(CUSP, 1, 1).y == {(0, 1): -3}
    spec = NormalFormSpec(4, 2, 1)
    x = stratum_parametrize(spec, 2, 0, {sl: 0 for sl in spec.high_slots(2)}, [0])
    assert set(x.y.values()) == {0}


def test_top_stratum_point():
    spec = NormalFormSpec(3, 1, 2)
    x = top_stratum_point(spec, [1, 2])
    assert stratum_membership(spec, x, spec.r)
    assert x.t == 0 and set(x.y.values()) == {0}


def test_parametrize_rejects_bad_params():
    with pytest.raises(ContractError):
        stratum_parametrize(CUSP, 2, 0)
    with pytest.raises(ContractError):
        stratum_parametrize(NormalFormSpec(3, 0, 0), 1, 0, {})


def test_solve_fiber_examples():
    assert solve_fiber(CUSP, zero_point(CUSP)) == [zero_point(CUSP)]
    x0 = SourcePoint(1, {(0, 1): Q(-3, 4)})
    fiber = solve_fiber(CUSP, x0)
    # t^3 - (3/4)t - 1/4 = (t - 1)(t + 1/2)^2
    assert [p.t for p in fiber] == [Q(-1, 2), Q(1)]
    assert all(p.y == x0.y for p in fiber)


@given(stratum_params())
def test_parametrize_round_trip(params):
    spec, j, t, high, s = params
    x = stratum_parametrize(spec, j, t, high, s)
    assert stratum_membership(spec, x, j)
    for p in component_polys(spec, x.y):
        assert all(derivative(p, m)(x.t) == 0 for m in range(1, j + 1))


@given(stratum_params())
def test_strata_are_monotone(params):
    spec, j, t, high, s = params
    x = stratum_parametrize(spec, j, t, high, s)
    assert all(stratum_membership(spec, x, jj) for jj in range(j + 1))


@given(spec_and_level())
def test_dimension_count(case):
    spec, j = case
    free = 1 + spec.z + len(spec.high_slots(j))
    assert free == stratum_dimension(spec, j) == (spec.r - j) * (spec.k + 1) + spec.z
    assert stratum_dimension(spec, spec.r) == spec.z


@given(spec_and_level(max_r=4, max_k=2), st.data())
def test_top_stratum_points_are_not_double_points(case, data):
    spec, _ = case
    s = [data.draw(rationals) for _ in range(spec.z)]
    x0 = top_stratum_point(spec, s)
    assert solve_fiber(spec, x0) == [x0]


@given(source_points())
def test_lift_extends_normal_form(case):
    spec, x = case
    F, G = eval_normal_form(spec, x), eval_lift(spec, x)
    assert G[:-1] == F and G[-1] == x.t


@given(source_points())
def test_fiber_contains_base_point_and_shares_image(case):
    spec, x = case
    fiber = solve_fiber(spec, x)
    assert any(p.t == x.t for p in fiber)
    for p in fiber:
        if isinstance(p.t, Q):
            assert eval_normal_form(spec, p) == eval_normal_form(spec, x)
