from fractions import Fraction

import numpy as np
import pytest

from primbordism.prim_map import (
    MODEL_NAMES,
    TrigPoly,
    UnknownModelError,
    builtin_model,
    eval_jet,
    genericity_report,
)

FD_STEP = 1e-5
FD_REL = 1e-6


def _random_points(model, rng, n=100):
    if model.domain.dim == 1:
        return rng.uniform(0, 2 * np.pi, (n, 1))
    if model.domain.point_dim == 2:
        return rng.uniform(0, 2 * np.pi, (n, 2))
    p = rng.normal(size=(n, 3))
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def _fd_jacobian(model, x):
    cols = []
    for i in range(model.domain.dim):
        e = np.zeros(model.domain.dim)
        e[i] = FD_STEP
        # push moves along the same chart in which eval_jet differentiates
        plus, minus = model.domain.push(x, e), model.domain.push(x, -e)
        cols.append((model.g(plus) - model.g(minus)) / (2 * FD_STEP))
    return np.stack(cols, axis=-1)


@pytest.mark.parametrize("name", ["figure_eight", "round_circle", "round_torus", "tilted_torus", "boy_surface"])
def test_jets_match_finite_differences(name):
    model = builtin_model(name)
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for x in _random_points(model, rng):
        J = eval_jet(model, x, 1).derivatives[0]
        fd = _fd_jacobian(model, x)
        worst = max(worst, np.linalg.norm(J - fd) / np.linalg.norm(J))
    assert worst <= FD_REL


def test_second_derivatives_match_differenced_first():
    model = builtin_model("boy_surface")
    rng = np.random.default_rng(5)
    h = 1e-5
    for x in _random_points(model, rng, 10):
        H = eval_jet(model, x, 2).derivatives[1]
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            # second derivative along a chart line: g(push(x, s e)) sampled at s = -1, 0, 1
            g0, gp, gm = model.g(x), model.g(model.domain.push(x, e)), model.g(model.domain.push(x, -e))
            fd = (gp - 2 * g0 + gm) / h**2
            assert np.linalg.norm(H[:, i, i] - fd) <= 1e-3 * np.linalg.norm(H[:, i, i]) + 1e-4


def test_builtin_examples():
    m = builtin_model("figure_eight")
    assert (m.n, m.k, m.ambient_dim, m.domain.dim) == (1, 0, 2, 1)
    np.testing.assert_allclose(m.g(np.array([np.pi / 2])), [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(m.g(np.array([np.pi / 4])), [1.0, np.sqrt(0.5)])
    t = builtin_model("round_torus", [3, 1])
    np.testing.assert_allclose(t.g(np.array([0.0, 0.0])), [4.0, 0.0, 0.0])
    np.testing.assert_allclose(t.g(np.array([np.pi / 2, np.pi / 2])), [0.0, 3.0, 1.0], atol=1e-15)
    assert builtin_model("boy_surface").euler_characteristic == 1
    assert set(MODEL_NAMES) >= {"trig_curve", "boy_surface"}


def test_eval_jet_examples():
    m = builtin_model("round_circle")
    j = eval_jet(m, 0.0, 2)
    np.testing.assert_allclose(j.value, [1.0, 0.0])
    np.testing.assert_allclose(j.derivatives[0][:, 0], [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(j.derivatives[1][:, 0, 0], [-1.0, 0.0], atol=1e-15)
    with pytest.raises(ValueError):
        eval_jet(m, 0.0, 4)


def test_f_and_height_split_g():
    m = builtin_model("tilted_torus")
    x = np.array([[0.3, 1.2], [2.0, 5.0]])
    g = m.g(x)
    np.testing.assert_array_equal(m.f(x), g[:, :-1])
    np.testing.assert_array_equal(m.height(x), g[:, -1])


def test_periodicity():
    m = builtin_model("tilted_torus")
    x = np.array([0.7, 2.1])
    np.testing.assert_allclose(m.g(x + [2 * np.pi, -2 * np.pi]), m.g(x), atol=1e-13)
    c = builtin_model("figure_eight")
    np.testing.assert_allclose(c.g(np.array([1.0 + 2 * np.pi])), c.g(np.array([1.0])), atol=1e-13)


def test_boy_is_antipodally_invariant():
    m = builtin_model("boy_surface")
    rng = np.random.default_rng(3)
    p = rng.normal(size=(50, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    np.testing.assert_allclose(m.g(p), m.g(-p), atol=1e-12)


def test_trig_poly_exact_critical_points():
    # d/dt sin(2t) = 2 cos(2t) vanishes at odd multiples of pi/4
    F = TrigPoly((0,), (0, 1))
    np.testing.assert_allclose(F.critical_points(), [np.pi / 4, 3 * np.pi / 4, 5 * np.pi / 4, 7 * np.pi / 4])
    assert F.derivative_at_pi() == 2
    assert TrigPoly((0, Fraction(1, 2))).cos == (0, Fraction(1, 2))


def test_genericity_examples():
    assert genericity_report(builtin_model("figure_eight")).generic
    assert genericity_report(builtin_model("round_torus")).generic
    # g = (cos t, 1) is not an immersion
    bad = builtin_model("trig_curve", [[0, 1], [], [1], []])
    rep = genericity_report(bad)
    assert rep.verdict == "rejected"
    assert any("immersion" in f for f in rep.failures)


def test_unknown_model():
    with pytest.raises(UnknownModelError, match="unknown model"):
        builtin_model("klein_bottle")
    with pytest.raises(ValueError):
        builtin_model("trig_curve", [[1]])
