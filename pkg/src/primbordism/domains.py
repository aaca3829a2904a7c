"""Charted compact domains for the desk-scale models.

Two domains are provided:

* :class:`PeriodicBox` -- the torus ``[0, 2pi)^dim``; points are angle
  vectors, the chart at ``p`` is ``p + u``.
* :class:`ProjectiveSphere` -- the real projective plane, represented by unit
  vectors in ``R^3`` modulo ``p ~ -p``.  The chart at ``p`` is
  ``normalize(p + u1 e1 + u2 e2)`` with an oriented orthonormal frame
  ``(e1, e2, p)``.

Both expose the same interface: local jets of the model coordinates, pushing
a point along a chart offset, transport of tangent vectors through the
ambient space, a quotient-aware distance and a canonical representative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet

TWO_PI = 2.0 * np.pi


def wrap_angle(x):
    """Reduce to ``[0, 2pi)``."""
    return np.mod(x, TWO_PI)


def angle_diff(a, b):
    """Signed difference ``a - b`` reduced to ``[-pi, pi)``."""
    return np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi


@dataclass(frozen=True)
class PeriodicBox:
    dim: int

    name = "periodic_box"
    point_dim = property(lambda self: self.dim)

    def coordinate_jets(self, p: np.ndarray, order: int) -> list[Jet]:
        """Jets of the box coordinates around base points ``p`` (shape ``(..., dim)``)."""
        p = np.asarray(p, dtype=float)
        return [Jet.variable(m, p[..., m], self.dim, order) for m in range(self.dim)]

    def push(self, p: np.ndarray, u: np.ndarray) -> np.ndarray:
        return wrap_angle(np.asarray(p, dtype=float) + u)

    def frame(self, p: np.ndarray) -> np.ndarray:
        """Ambient images of the chart axes, shape ``(..., dim, point_dim)``."""
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.eye(self.dim), p.shape[:-1] + (self.dim, self.dim))

    def to_ambient(self, p, t) -> np.ndarray:
        return np.asarray(t, dtype=float)

    def from_ambient(self, p, v) -> np.ndarray:
        return np.asarray(v, dtype=float)

    def distance(self, a, b) -> np.ndarray:
        return np.linalg.norm(angle_diff(a, b), axis=-1)

    def lift_distance(self, a, b) -> np.ndarray:
        """Distance in the covering used for loop closure (same as the box)."""
        return self.distance(a, b)

    def canonical(self, p) -> np.ndarray:
        q = wrap_angle(np.asarray(p, dtype=float))
        # values within rounding of 2pi belong at 0
        return np.where(np.isclose(q, TWO_PI, rtol=0, atol=1e-12), 0.0, q)

    def embed(self, p) -> np.ndarray:
        """Quotient-invariant Euclidean embedding for neighbor queries."""
        p = np.asarray(p, dtype=float)
        return np.concatenate([np.cos(p), np.sin(p)], axis=-1)

    def grid(self, n: int) -> np.ndarray:
        """Uniform sample of ``n`` points per axis, shape ``(n**dim, dim)``."""
        axes = [np.arange(n) * (TWO_PI / n)] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def triangulation(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Periodic triangulation of the 2-torus: vertices and faces."""
        if self.dim != 2:
            raise ValueError("triangulation needs a 2-dimensional box")
        verts = self.grid(n)
        idx = np.arange(n * n).reshape(n, n)
        i0, j0 = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        a = idx[i0, j0]
        b = idx[(i0 + 1) % n, j0]
        c = idx[(i0 + 1) % n, (j0 + 1) % n]
        d = idx[i0, (j0 + 1) % n]
        faces = np.concatenate(
            [np.stack([a, b, c], -1).reshape(-1, 3), np.stack([a, c, d], -1).reshape(-1, 3)]
        )
        return verts, faces

    def unwrap_face(self, corners: np.ndarray) -> np.ndarray:
        """Shift face corners (shape ``(..., 3, dim)``) into one chart near the first."""
        base = corners[..., :1, :]
        return base + angle_diff(corners, base)

    def chart_offset(self, p, q) -> np.ndarray:
        """Chart coordinates of ``q`` in the chart at ``p`` (for nearby points)."""
        return angle_diff(q, p)


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product along the last axis (faster than ``np.cross`` for small arrays)."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def _frame(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Oriented orthonormal tangent frame with ``e1 x e2 = p``."""
    p = np.asarray(p, dtype=float)
    # helper axis least aligned with p
    axis = np.argmin(np.abs(p), axis=-1)
    a = np.zeros_like(p)
    np.put_along_axis(a, axis[..., None], 1.0, axis=-1)
    e1 = cross(a, p)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = cross(p, e1)
    return e1, e2


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def rotation_matrix(angles) -> np.ndarray:
    """Rotation ``Rz(c) Ry(b) Rx(a)`` for ``angles = (a, b, c)``."""
    a, b, c = (list(angles) + [0.0, 0.0, 0.0])[:3]
    rx = np.array([[1, 0, 0], [0, np.cos(a), -np.sin(a)], [0, np.sin(a), np.cos(a)]])
    ry = np.array([[np.cos(b), 0, np.sin(b)], [0, 1, 0], [-np.sin(b), 0, np.cos(b)]])
    rz = np.array([[np.cos(c), -np.sin(c), 0], [np.sin(c), np.cos(c), 0], [0, 0, 1]])
    return rz @ ry @ rx


@dataclass(frozen=True)
class ProjectiveSphere:
    """``RP^2`` as the unit sphere modulo the antipodal map."""

    dim = 2
    point_dim = 3
    name = "projective_sphere"

    def coordinate_jets(self, p: np.ndarray, order: int) -> list[Jet]:
        p = normalize(p)
        e1, e2 = _frame(p)
        u1 = Jet.variable(0, np.zeros(p.shape[:-1]), 2, order)
        u2 = Jet.variable(1, np.zeros(p.shape[:-1]), 2, order)
        inv = (1.0 + u1 * u1 + u2 * u2).compose_power(-0.5)
        return [(u1 * e1[..., m] + u2 * e2[..., m] + p[..., m]) * inv for m in range(3)]

    def push(self, p, u) -> np.ndarray:
        p = normalize(p)
        e1, e2 = _frame(p)
        u = np.asarray(u, dtype=float)
        return normalize(p + u[..., :1] * e1 + u[..., 1:2] * e2)

    def frame(self, p) -> np.ndarray:
        e1, e2 = _frame(normalize(p))
        return np.stack([e1, e2], axis=-2)

    def to_ambient(self, p, t) -> np.ndarray:
        e1, e2 = _frame(normalize(p))
        t = np.asarray(t, dtype=float)
        return t[..., :1] * e1 + t[..., 1:2] * e2

    def from_ambient(self, p, v) -> np.ndarray:
        e1, e2 = _frame(normalize(p))
        v = np.asarray(v, dtype=float)
        return np.stack([(v * e1).sum(-1), (v * e2).sum(-1)], axis=-1)

    def distance(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return np.minimum(np.linalg.norm(a - b, axis=-1), np.linalg.norm(a + b, axis=-1))

    def lift_distance(self, a, b) -> np.ndarray:
        return np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), axis=-1)

    def canonical(self, p) -> np.ndarray:
        """Representative whose first coordinate beyond ``1e-9`` is positive."""
        p = normalize(p)
        flat = p.reshape(-1, 3).copy()
        for row in flat:
            for c in (2, 1, 0):
                if abs(row[c]) > 1e-9:
                    if row[c] < 0:
                        row *= -1
                    break
        return flat.reshape(p.shape)

    def embed(self, p) -> np.ndarray:
        """Veronese embedding ``p p^T`` (upper triangle), antipodally invariant."""
        p = np.asarray(p, dtype=float)
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        r2 = np.sqrt(2.0)
        return np.stack([x * x, y * y, z * z, r2 * x * y, r2 * y * z, r2 * x * z], axis=-1)

    def chart_offset(self, p, q) -> np.ndarray:
        """Chart coordinates of the representative of ``q`` nearest to ``p``."""
        p, q = normalize(p), normalize(q)
        sign = np.where((p * q).sum(-1, keepdims=True) < 0, -1.0, 1.0)
        q = q * sign
        # invert normalize(p + u e): u = (q.e) / (q.p)
        e1, e2 = _frame(p)
        qp = (q * p).sum(-1)
        return np.stack([(q * e1).sum(-1) / qp, (q * e2).sum(-1) / qp], axis=-1)

    def triangulation(self, level: int, rotation=(0.31, 0.17, 0.23)) -> tuple[np.ndarray, np.ndarray]:
        """One face from each antipodal pair of a rotated icosphere.

        The rotation keeps mesh symmetry axes away from those of the models.
        """
        verts, faces = icosphere(level)
        verts = verts @ rotation_matrix(rotation).T
        cent = verts[faces].mean(axis=1)
        keep = (self.canonical(cent) * cent).sum(-1) > 0
        return verts, faces[keep]

    def unwrap_face(self, corners: np.ndarray) -> np.ndarray:
        return corners


def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Subdivided icosahedron on the unit sphere (antipodally symmetric)."""
    t = (1.0 + 5**0.5) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    v = [np.array(x, dtype=float) / np.linalg.norm(x) for x in verts]
    for _ in range(level):
        cache: dict = {}
        new_faces = []

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = v[i] + v[j]
                v.append(m / np.linalg.norm(m))
                cache[key] = len(v) - 1
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return np.array(v), np.array(faces, dtype=int)


def face_edges(faces: np.ndarray) -> np.ndarray:
    """Unique undirected edges of a face list."""
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    e.sort(axis=1)
    return np.unique(e, axis=0)
