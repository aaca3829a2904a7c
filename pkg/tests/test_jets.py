import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from primbordism.jets import Jet, det2, monomials

U, V = sp.symbols("u v")
ORDER = 3


def _sym_expr():
    return sp.sin(U * V + U) * (1 + U**2 + V**2) ** sp.Rational(-1, 2) + sp.cos(V) / (2 + U)


def _jet_expr(u, v):
    return (u * v + u).sin() * (1.0 + u * u + v * v).compose_power(-0.5) + v.cos() * (u + 2.0).reciprocal()


def test_monomials_graded():
    assert monomials(2, 2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert len(monomials(3, 3)) == 20


@settings(max_examples=25)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_partials_match_sympy(a, b):
    u = Jet.variable(0, a, 2, ORDER)
    v = Jet.variable(1, b, 2, ORDER)
    jet = _jet_expr(u, v)
    expr = _sym_expr()
    for alpha in monomials(2, ORDER):
        exact = float(sp.diff(expr, U, alpha[0], V, alpha[1]).subs({U: a, V: b}))
        assert float(jet.partial(alpha)) == pytest.approx(exact, rel=1e-10, abs=1e-10)


def test_batched_jets_match_pointwise():
    pts = np.array([[0.1, -0.4], [0.7, 0.2], [-1.0, 1.1]])
    batch = _jet_expr(Jet.variable(0, pts[:, 0], 2, 2), Jet.variable(1, pts[:, 1], 2, 2))
    for n, (a, b) in enumerate(pts):
        single = _jet_expr(Jet.variable(0, a, 2, 2), Jet.variable(1, b, 2, 2))
        np.testing.assert_allclose(batch.c[:, n], single.c, rtol=1e-14, atol=1e-15)


def test_gradient_matches_finite_differences():
    a, b, h = 0.3, -0.8, 1e-6
    jet = _jet_expr(Jet.variable(0, a, 2, 1), Jet.variable(1, b, 2, 1))
    f = sp.lambdify((U, V), _sym_expr())
    fd = [(f(a + h, b) - f(a - h, b)) / (2 * h), (f(a, b + h) - f(a, b - h)) / (2 * h)]
    np.testing.assert_allclose(jet.gradient(), fd, rtol=1e-8)


def test_det2_and_diff():
    u = Jet.variable(0, 0.5, 2, 2)
    v = Jet.variable(1, 2.0, 2, 2)
    d = det2(u, v, v * v, u * u)  # u^3 - v^3
    assert float(d.value) == pytest.approx(0.125 - 8.0)
    assert float(d.diff(1).value) == pytest.approx(-12.0)
    assert d.diff(0).order == 1


def test_derivative_tensor_is_symmetric():
    u = Jet.variable(0, 0.2, 2, 3)
    v = Jet.variable(1, -0.1, 2, 3)
    H = (u * u * v + v.sin()).derivative_tensor(2)
    np.testing.assert_allclose(H, H.T)
    assert float(H[0, 1]) == pytest.approx(2 * 0.2)
