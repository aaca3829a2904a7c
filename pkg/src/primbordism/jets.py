"""Truncated multivariate Taylor arithmetic (forward-mode differentiation).

A :class:`Jet` holds the Taylor coefficients ``c[alpha]`` of a function of
``nvars`` local variables around a base point, truncated at total degree
``order``.  Coefficient arrays carry arbitrary trailing batch axes, so one
jet can describe many base points at once.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import factorial, prod

import numpy as np


@lru_cache(maxsize=None)
def monomials(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of total degree ``<= order``, graded."""
    out = []
    for deg in range(order + 1):
        for alpha in product(range(deg + 1), repeat=nvars):
            if sum(alpha) == deg:
                out.append(alpha)
    # graded, then reverse-lexicographic inside each degree (u before v)
    out.sort(key=lambda a: (sum(a), tuple(-x for x in a)))
    return tuple(out)


@lru_cache(maxsize=None)
def _index(nvars: int, order: int) -> dict:
    return {a: i for i, a in enumerate(monomials(nvars, order))}


@lru_cache(maxsize=None)
def _mul_table(nvars: int, order: int):
    mons = monomials(nvars, order)
    idx = _index(nvars, order)
    ia, ib, ic = [], [], []
    for a, ma in enumerate(mons):
        for b, mb in enumerate(mons):
            mc = tuple(x + y for x, y in zip(ma, mb))
            if sum(mc) <= order:
                ia.append(a)
                ib.append(b)
                ic.append(idx[mc])
    # dense summation matrix: out = S @ (a[ia] * b[ib])
    S = np.zeros((len(mons), len(ia)))
    S[ic, np.arange(len(ia))] = 1.0
    return np.array(ia), np.array(ib), S


@lru_cache(maxsize=None)
def _diff_table(nvars: int, order: int, var: int):
    """Source index, target index (in the order-1 table) and factor for d/du_var."""
    src_mons = monomials(nvars, order)
    dst_idx = _index(nvars, order - 1)
    src, dst, fac = [], [], []
    for i, a in enumerate(src_mons):
        if a[var] > 0:
            b = list(a)
            b[var] -= 1
            src.append(i)
            dst.append(dst_idx[tuple(b)])
            fac.append(a[var])
    return np.array(src, dtype=int), np.array(dst, dtype=int), np.array(fac, dtype=float)


class Jet:
    __slots__ = ("nvars", "order", "c")
    __array_priority__ = 1000

    def __init__(self, nvars: int, order: int, c):
        self.nvars = nvars
        self.order = order
        self.c = np.asarray(c)

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value)
        c = np.zeros((len(monomials(nvars, order)),) + value.shape, dtype=np.result_type(value, float))
        c[0] = value
        return cls(nvars, order, c)

    @classmethod
    def variable(cls, var: int, value, nvars: int, order: int) -> "Jet":
        j = cls.constant(value, nvars, order)
        if order >= 1:
            e = [0] * nvars
            e[var] = 1
            j.c[_index(nvars, order)[tuple(e)]] = 1.0
        return j

    @classmethod
    def from_derivatives(cls, derivs: dict, nvars: int, order: int) -> "Jet":
        """Build from partial derivatives keyed by exponent tuple."""
        mons = monomials(nvars, order)
        first = np.asarray(derivs[mons[0]])
        c = np.zeros((len(mons),) + first.shape, dtype=np.result_type(first, float))
        for i, a in enumerate(mons):
            c[i] = np.asarray(derivs[a]) / prod(factorial(x) for x in a)
        return cls(nvars, order, c)

    # access ---------------------------------------------------------------

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def coeff(self, alpha) -> np.ndarray:
        return self.c[_index(self.nvars, self.order)[tuple(alpha)]]

    def partial(self, alpha) -> np.ndarray:
        """The mixed partial derivative ``d^alpha`` at the base point."""
        return self.coeff(alpha) * prod(factorial(x) for x in alpha)

    def gradient(self) -> np.ndarray:
        """Shape ``(nvars, *batch)``."""
        out = []
        for v in range(self.nvars):
            e = [0] * self.nvars
            e[v] = 1
            out.append(self.coeff(e))
        return np.stack(out)

    def derivative_tensor(self, m: int) -> np.ndarray:
        """Symmetric tensor of ``m``-th partials, shape ``(nvars,)*m + batch``."""
        shape = (self.nvars,) * m + self.value.shape
        out = np.zeros(shape, dtype=self.c.dtype)
        for idx in product(range(self.nvars), repeat=m):
            alpha = [0] * self.nvars
            for i in idx:
                alpha[i] += 1
            out[idx] = self.partial(alpha)
        return out

    def diff(self, var: int) -> "Jet":
        """``d/du_var`` as a jet of one lower order."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        src, dst, fac = _diff_table(self.nvars, self.order, var)
        c = np.zeros((len(monomials(self.nvars, self.order - 1)),) + self.value.shape, dtype=self.c.dtype)
        fac = fac.reshape((-1,) + (1,) * (self.c.ndim - 1))
        np.add.at(c, dst, self.c[src] * fac)
        return Jet(self.nvars, self.order - 1, c)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise jet order")
        n = len(monomials(self.nvars, order))
        return Jet(self.nvars, order, self.c[:n])

    @property
    def real(self) -> "Jet":
        return Jet(self.nvars, self.order, self.c.real)

    @property
    def imag(self) -> "Jet":
        return Jet(self.nvars, self.order, self.c.imag)

    # arithmetic -----------------------------------------------------------

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                o = min(self.order, other.order)
                return other.truncate(o)
            return other
        return Jet.constant(np.broadcast_to(other, np.shape(other)), self.nvars, self.order)

    def _match(self, other):
        if isinstance(other, Jet) and other.order != self.order:
            o = min(self.order, other.order)
            return self.truncate(o), other.truncate(o)
        return self, self._lift(other)

    def __add__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = self.c.astype(np.result_type(self.c, np.asarray(other)), copy=True)
            c[0] = c[0] + other
            return Jet(self.nvars, self.order, c)
        a, b = self._match(other)
        return Jet(a.nvars, a.order, a.c + b.c)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(self.nvars, self.order, -self.c)

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.nvars, self.order, self.c * other)
        a, b = self._match(other)
        ia, ib, S = _mul_table(a.nvars, a.order)
        prodc = a.c[ia] * b.c[ib]
        c = (S @ prodc.reshape(len(ia), -1)).reshape((S.shape[0],) + prodc.shape[1:])
        return Jet(a.nvars, a.order, c)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.nvars, self.order, self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, e: int) -> "Jet":
        if not isinstance(e, int) or e < 0:
            return self.compose_power(e)
        out = Jet.constant(np.ones_like(self.value), self.nvars, self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # elementary functions ---------------------------------------------------

    def compose(self, derivs) -> "Jet":
        """``f(self)`` given ``derivs[m] = f^(m)(value)`` for ``m <= order``."""
        a0 = self.value
        delta = Jet(self.nvars, self.order, self.c.copy())
        delta.c[0] = 0
        out = Jet.constant(derivs[0] * np.ones_like(a0), self.nvars, self.order)
        power = None
        for m in range(1, self.order + 1):
            power = delta if power is None else power * delta
            out = out + power * (derivs[m] / factorial(m))
        return out

    def reciprocal(self) -> "Jet":
        a0 = self.value
        derivs = [(-1) ** m * factorial(m) / a0 ** (m + 1) for m in range(self.order + 1)]
        return self.compose(derivs)

    def compose_power(self, e: float) -> "Jet":
        a0 = self.value
        derivs = []
        coef = 1.0
        for m in range(self.order + 1):
            derivs.append(coef * a0 ** (e - m))
            coef *= e - m
        return self.compose(derivs)

    def sqrt(self) -> "Jet":
        return self.compose_power(0.5)

    def sin(self) -> "Jet":
        a0 = self.value
        return self.compose([np.sin(a0 + m * np.pi / 2) for m in range(self.order + 1)])

    def cos(self) -> "Jet":
        a0 = self.value
        return self.compose([np.cos(a0 + m * np.pi / 2) for m in range(self.order + 1)])


def det2(a: Jet, b: Jet, c: Jet, d: Jet) -> Jet:
    """Determinant of ``[[a, b], [c, d]]``."""
    return a * d - b * c
