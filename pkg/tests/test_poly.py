from fractions import Fraction as Q

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from primbordism.poly import (
    RationalPoly,
    count_roots_descartes,
    count_roots_sturm,
    derivative,
    isolate_real_roots,
    squarefree_factorization,
    taylor_shift,
)

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=6)
polys = st.lists(rationals, min_size=0, max_size=7).map(RationalPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())

T = sp.Symbol("t")


def to_sympy(p: RationalPoly):
    return sum((sp.Rational(c.numerator, c.denominator) * T**i for i, c in enumerate(p.coeffs)), sp.Integer(0))


def test_canonical_form_strips_trailing_zeros():
    assert RationalPoly([1, 2, 0, 0]).coeffs == (Q(1), Q(2))
    assert RationalPoly([0, 0]).coeffs == ()
    assert RationalPoly([]).is_zero()


def test_derivative_examples():
    p = RationalPoly([0, Q(-3, 4), 0, 1])
    assert derivative(p, 1) == RationalPoly([Q(-3, 4), 0, 3])
    assert derivative(p, 0) == p
    assert derivative(RationalPoly([0, 0, -2, 0, 1]), 2) == RationalPoly([-4, 0, 12])


def test_taylor_shift_examples():
    assert taylor_shift(RationalPoly([0, 0, 1]), 1) == RationalPoly([1, 2, 1])
    p = RationalPoly([0, Q(-3, 4), 0, 1])
    assert taylor_shift(p, 0) == p
    # expand((t - 1/2)^3 - (3/4)(t - 1/2)) with sympy: t^3 - 3t^2/2 + 1/4
    shifted = taylor_shift(p, Q(-1, 2))
    assert shifted == RationalPoly([Q(1, 4), 0, Q(-3, 2), 1])
    for x in [Q(0), Q(1), Q(-2), Q(3, 7), Q(-5, 3)]:
        assert shifted(x) == p(x - Q(1, 2))


def test_isolate_no_real_roots():
    assert isolate_real_roots(RationalPoly([1, 0, 1]), (-10, 10)) == []


def test_isolate_cubic():
    p = RationalPoly([0, Q(-3, 4), 0, 1])
    roots = isolate_real_roots(p, (-2, 2))
    # sympy: solve(t^3 - 3t/4) = {0, +-sqrt(3)/2}
    expected = [-0.8660254037844386, 0.0, 0.8660254037844386]
    assert [r.root for r in roots] == pytest.approx(expected, abs=1e-14)
    for r in roots:
        assert abs(float(p(Q(r.root)))) <= 1e-12 * (1 + 1)
        assert r.multiplicity == 1


def test_isolate_double_root():
    roots = isolate_real_roots(RationalPoly([1, -2, 1]), (0, 2))
    assert len(roots) == 1
    assert roots[0].root == 1.0 and roots[0].multiplicity == 2


def test_isolate_zero_polynomial_errors():
    with pytest.raises(ValueError, match="indeterminate roots"):
        isolate_real_roots(RationalPoly([]), (-1, 1))


@given(polys, rationals)
def test_taylor_shift_round_trip(p, c):
    assert taylor_shift(taylor_shift(p, c), -c) == p


@given(polys, polys)
def test_product_rule(p, q):
    assert derivative(p * q) == derivative(p) * q + p * derivative(q)


@given(polys, rationals, rationals)
def test_shift_and_evaluation_agree_with_sympy(p, q_shift, x):
    ref = sp.expand(to_sympy(p).subs(T, T + sp.Rational(q_shift.numerator, q_shift.denominator)))
    assert sp.expand(to_sympy(taylor_shift(p, q_shift)) - ref) == 0
    assert p(x) == to_sympy(p).subs(T, sp.Rational(x.numerator, x.denominator))


@given(nonzero_polys, rationals, rationals)
def test_sturm_and_descartes_counts_agree(p, a, b):
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        hi = lo + 1
    assert count_roots_sturm(p, lo, hi) == count_roots_descartes(p, lo, hi)


@given(nonzero_polys)
def test_isolation_matches_sympy_and_certificates(p):
    window = (Q(-20), Q(20))
    roots = isolate_real_roots(p, window)
    ref = sorted(set(float(r) for r in sp.Poly(to_sympy(p), T).real_roots() if -20 <= r <= 20)) if p.degree > 0 else []
    assert [r.root for r in roots] == pytest.approx(ref, abs=1e-9)
    # disjoint intervals in increasing order
    for a, b in zip(roots, roots[1:]):
        assert a.hi < b.lo or (a.hi == a.lo and a.hi < b.lo)
    for r in roots:
        if r.exact is not None:
            assert p(r.exact) == 0
            continue
        # a sign change certifies odd multiplicity; even multiplicity needs none
        if r.multiplicity % 2 == 1:
            assert p(r.lo) * p(r.hi) < 0
        assert abs(float(p(Q(r.root)))) <= 1e-12 * (1 + float(p.max_abs_coeff()))
    assert sum(r.multiplicity for r in roots) == sum(
        m for f, m in squarefree_factorization(p) for _ in isolate_real_roots(f, window)
    )
