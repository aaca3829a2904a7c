import numpy as np
import pytest

from primbordism.continuation import (
    ProductSpace,
    newton_project,
    null_tangent,
    smallest_singular_value,
    trace,
)
from primbordism.domains import PeriodicBox, ProjectiveSphere

BOX = ProductSpace(PeriodicBox(2), 1)


def circle(x, c=(3.0, 3.0), rad=1.0):
    d = x[0] - np.asarray(c)
    return np.array([d @ d - rad**2]), 2 * d[None, :]


def test_null_tangent():
    J = np.array([[1.0, 2.0, 3.0], [0.0, 1.0, -1.0]])
    t = null_tangent(J)
    np.testing.assert_allclose(J @ t, 0, atol=1e-14)
    assert np.linalg.norm(t) == pytest.approx(1.0)
    np.testing.assert_allclose(null_tangent(np.array([[3.0, 4.0]])), [-0.8, 0.6])
    assert smallest_singular_value(np.array([[3.0, 4.0]])) == pytest.approx(5.0)


def test_newton_projects_onto_circle():
    x, res, ok = newton_project(BOX, circle, np.array([[4.3, 3.1]]))
    assert ok and res < 1e-12
    assert np.linalg.norm(x[0] - 3.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("step", [1e-2, 5e-2])
def test_traces_closed_circle(step):
    x0 = np.array([[4.0, 3.0]])
    res = trace(BOX, circle, x0, np.array([0.0, 1.0]), step=step)
    assert res.status == "closed"
    assert res.arclength == pytest.approx(2 * np.pi, rel=1e-3)
    pts = np.array(res.points)[:, 0]
    assert np.abs(np.linalg.norm(pts - 3.0, axis=1) - 1.0).max() < 1e-10
    # counterclockwise start
    assert pts[1, 1] > 3.0


def test_event_stops_trace():
    x0 = np.array([[4.0, 3.0]])
    res = trace(BOX, circle, x0, np.array([0.0, 1.0]), event=lambda a, b: b[0, 0] < 3.0)
    assert res.status == "event"
    assert res.event_state[0, 0] < 3.0
    assert res.arclength == pytest.approx(np.pi / 2, abs=2e-2)


def test_passes_through_transversal_crossing():
    # xy = 0 near the origin: straight through along the x axis
    def cross(x):
        u = x[0] - 3.0
        return np.array([u[0] * u[1]]), np.array([[u[1], u[0]]])

    res = trace(BOX, cross, np.array([[2.5, 3.0]]), np.array([1.0, 0.0]), closure=False, max_arclength=1.0)
    pts = np.array(res.points)[:, 0]
    assert pts[-1, 0] > 3.4
    assert np.abs(pts[:, 1] - 3.0).max() < 1e-8


def test_great_circle_on_projective_sphere():
    space = ProductSpace(ProjectiveSphere(), 1)

    def eq(x):
        # z = 0 on the unit sphere, differentiated in the chart
        p = x[0]
        J = space.domain.frame(p)[:, 2][None, :]
        return np.array([p[2]]), J

    res = trace(space, eq, np.array([[1.0, 0.0, 0.0]]), np.array([0.0, 1.0, 0.0]), step=2e-2)
    assert res.status == "closed"
    # a closed loop in the double cover is the full great circle
    assert res.arclength == pytest.approx(2 * np.pi, rel=1e-3)
