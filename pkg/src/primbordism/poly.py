"""Exact univariate polynomials over the rationals and real-root isolation.

Coefficients are stored constant term first.  Nothing in this module rounds:
floats only appear in the ``root`` field of :class:`RootInterval`, as the
refined approximation of an exactly isolated root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        # exact binary value of the float
        return Fraction(c)
    return Fraction(c)


class RationalPoly:
    """Immutable polynomial with :class:`~fractions.Fraction` coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "RationalPoly":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "RationalPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-_frac(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if c == 0:
                continue
            mono = "" if d == 0 else ("t" if d == 1 else f"t^{d}")
            if mono and c == 1:
                terms.append(f"+ {mono}")
            elif mono and c == -1:
                terms.append(f"- {mono}")
            else:
                sign = "-" if c < 0 else "+"
                body = str(abs(c))
                terms.append(f"{sign} {body}{('*' + mono) if mono else ''}")
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    # arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        return RationalPoly([other])

    def __add__(self, other) -> "RationalPoly":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "RationalPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            c = _frac(other)
            return RationalPoly([c * a for a in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "RationalPoly":
        if e < 0:
            raise ValueError("negative power")
        out = RationalPoly([1])
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __divmod__(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return RationalPoly(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.coeffs[-1]
        db = len(other.coeffs) - 1
        for k in range(dq, -1, -1):
            c = rem[k + db] / lead
            quot[k] = c
            if c:
                for i, b in enumerate(other.coeffs):
                    rem[k + i] -= c * b
        return RationalPoly(quot), RationalPoly(rem[:db])

    def __floordiv__(self, other) -> "RationalPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "RationalPoly":
        return divmod(self, other)[1]

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction arguments."""
        if isinstance(x, int):
            x = Fraction(x)
        acc = x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if not isinstance(x, float) else float(c))
        return acc

    def monic(self) -> "RationalPoly":
        if not self.coeffs:
            return self
        return self * (1 / self.leading)

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for c in self.coeffs), default=Fraction(0))


def derivative(p: RationalPoly, m: int = 1) -> RationalPoly:
    """The ``m``-th formal derivative of ``p``."""
    if m < 0:
        raise ValueError("derivative order must be >= 0")
    if m == 0:
        return p
    cs = p.coeffs
    return RationalPoly(
        [cs[d] * (factorial(d) // factorial(d - m)) for d in range(m, len(cs))]
    )


def taylor_shift(p: RationalPoly, c) -> RationalPoly:
    """Return ``q`` with ``q(t) = p(t + c)``."""
    c = _frac(c)
    if c == 0 or p.degree < 1:
        return p
    n = len(p.coeffs)
    out = [Fraction(0)] * n
    powers = [Fraction(1)]
    for _ in range(n):
        powers.append(powers[-1] * c)
    for d, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for k in range(d + 1):
            out[k] += a * comb(d, k) * powers[d - k]
    return RationalPoly(out)


def poly_gcd(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Monic gcd (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: RationalPoly) -> RationalPoly:
    if p.degree < 1:
        return p.monic()
    g = poly_gcd(p, derivative(p))
    return (p // g).monic()


def squarefree_factorization(p: RationalPoly) -> list[tuple[RationalPoly, int]]:
    """Yun's algorithm: ``p = lc * prod(a_i ** i)`` with coprime square-free ``a_i``.

    Returns the non-constant factors as ``(a_i, i)`` pairs.
    """
    if p.degree < 1:
        return []
    out = []
    dp = derivative(p)
    a = poly_gcd(p, dp)
    b = p // a
    d = dp // a - derivative(b)
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            out.append((a, i))
        b = b // a
        d = d // a - derivative(b)
        i += 1
    return out


def sturm_sequence(p: RationalPoly) -> list[RationalPoly]:
    """Sturm sequence of the square-free part of ``p``."""
    sf = squarefree_part(p)
    seq = [sf, derivative(sf)]
    while seq[-1]:
        r = seq[-2] % seq[-1]
        seq.append(-r)
    return seq[:-1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_variations(values: Iterable) -> int:
    signs = [s for s in (_sign(v) for v in values) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _variations_at(seq: Sequence[RationalPoly], x: Fraction) -> int:
    return sign_variations(q(x) for q in seq)


def cauchy_bound(p: RationalPoly) -> Fraction:
    """All complex roots satisfy ``|z| <= cauchy_bound(p)``."""
    if p.degree < 1:
        return Fraction(0)
    lead = abs(p.leading)
    return 1 + max(abs(c) / lead for c in p.coeffs[:-1])


def count_roots_sturm(p: RationalPoly, a, b) -> int:
    """Distinct real roots of ``p`` in the closed window ``[a, b]``."""
    if p.is_zero():
        raise ValueError("indeterminate roots")
    a, b = _frac(a), _frac(b)
    if a > b:
        raise ValueError("empty window")
    seq = sturm_sequence(p)
    # V(a) - V(b) counts roots in (a, b] for square-free polynomials,
    # with vanishing entries dropped.
    n = _variations_at(seq, a) - _variations_at(seq, b)
    return n + (1 if seq[0](a) == 0 else 0)


def _roots_in_unit_descartes(p: RationalPoly, depth: int = 0) -> int:
    """Exact count of roots in the open interval (0, 1) of a square-free poly.

    Bisection driven by Descartes' rule on the Moebius-transformed
    polynomial (the Vincent-Collins-Akritas scheme).
    """
    if p.degree < 1:
        return 0
    # roots of p in (0,1) <-> positive roots of (1+x)^n p(1/(1+x))
    rev = RationalPoly(reversed(p.coeffs))  # x^n p(1/x)
    v = sign_variations(taylor_shift(rev, 1).coeffs)
    if v <= 1:
        return v
    if depth > 200:
        raise RuntimeError("Descartes bisection did not terminate")
    half = Fraction(1, 2)
    count = 0
    # p(x/2) on (0,1) and p((x+1)/2) on (0,1)
    left = RationalPoly([c * half**i for i, c in enumerate(p.coeffs)])
    right = taylor_shift(left, 1)
    if p(half) == 0:
        count += 1
    count += _roots_in_unit_descartes(left, depth + 1)
    count += _roots_in_unit_descartes(right, depth + 1)
    return count


def count_roots_descartes(p: RationalPoly, a, b) -> int:
    """Distinct real roots in ``[a, b]`` via Descartes bisection (no Sturm)."""
    if p.is_zero():
        raise ValueError("indeterminate roots")
    a, b = _frac(a), _frac(b)
    if a > b:
        raise ValueError("empty window")
    sf = squarefree_part(p)
    if a == b:
        return int(sf(a) == 0)
    # map [a, b] onto [0, 1]
    q = RationalPoly([c * (b - a) ** i for i, c in enumerate(taylor_shift(sf, a).coeffs)])
    count = _roots_in_unit_descartes(q)
    count += int(sf(a) == 0) + int(sf(b) == 0)
    return count


@dataclass(frozen=True)
class RootInterval:
    """One isolated real root.

    ``exact`` is set when the root was identified as a rational number;
    otherwise ``lo < root < hi`` with a sign change of the square-free part
    between the (non-root) endpoints.
    """

    lo: Fraction
    hi: Fraction
    root: float
    multiplicity: int
    exact: Fraction | None = None

    def __float__(self) -> float:
        return self.root


def _rational_guess(sf: RationalPoly, lo: Fraction, hi: Fraction) -> Fraction | None:
    mid = (lo + hi) / 2
    for bound in (1, 10, 1000, 10**6, 10**9):
        cand = mid.limit_denominator(bound)
        if lo <= cand <= hi and sf(cand) == 0:
            return cand
    return None


def _refine(sf: RationalPoly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction, Fraction | None]:
    """Shrink an isolating interval until float resolution; detect exact hits."""
    slo, shi = _sign(sf(lo)), _sign(sf(hi))
    if slo == 0:
        return lo, lo, lo
    if shi == 0:
        return hi, hi, hi
    guess = _rational_guess(sf, lo, hi)
    if guess is not None:
        return guess, guess, guess
    for _ in range(2000):
        scale = max(abs(lo), abs(hi), Fraction(1, 2**60))
        if hi - lo <= scale * Fraction(1, 2**55):
            break
        mid = (lo + hi) / 2
        smid = _sign(sf(mid))
        if smid == 0:
            return mid, mid, mid
        if smid == slo:
            lo = mid
        else:
            hi = mid
    guess = _rational_guess(sf, lo, hi)
    if guess is not None:
        return guess, guess, guess
    return lo, hi, None


def isolate_real_roots(p: RationalPoly, window) -> list[RootInterval]:
    """Isolate every distinct real root of ``p`` inside the closed ``window``.

    Roots are returned in increasing order with their multiplicity in ``p``.
    """
    if p.is_zero():
        raise ValueError("indeterminate roots")
    a, b = (_frac(w) for w in window)
    if a > b:
        raise ValueError("empty window")
    if p.degree < 1:
        return []
    factors = squarefree_factorization(p)
    sf = RationalPoly([1])
    for f, _ in factors:
        sf = sf * f
    seq = sturm_sequence(sf)

    def count_open(lo: Fraction, hi: Fraction) -> int:
        # roots in the open interval (lo, hi)
        n = _variations_at(seq, lo) - _variations_at(seq, hi)
        return n - (1 if sf(hi) == 0 else 0)

    found: list[tuple[Fraction, Fraction, Fraction | None]] = []
    if sf(a) == 0:
        found.append((a, a, a))
    if b != a and sf(b) == 0:
        found.append((b, b, b))
    stack = [(a, b, count_open(a, b))] if a < b else []
    while stack:
        lo, hi, c = stack.pop()
        if c == 0:
            continue
        if c == 1 and sf(lo) != 0 and sf(hi) != 0:
            found.append(_refine(sf, lo, hi))
            continue
        # several roots, or an endpoint is itself a (different) root
        mid = (lo + hi) / 2
        if sf(mid) == 0:
            found.append((mid, mid, mid))
        stack.append((lo, mid, count_open(lo, mid)))
        stack.append((mid, hi, count_open(mid, hi)))

    out = []
    for lo, hi, exact in sorted(found, key=lambda x: x[0]):
        mult = 0
        for f, m in factors:
            if exact is not None:
                hit = f(exact) == 0
            else:
                hit = _sign(f(lo)) * _sign(f(hi)) < 0
            if hit:
                mult = m
                break
        root = float(exact) if exact is not None else float((lo + hi) / 2)
        out.append(RootInterval(lo, hi, root, mult, exact))
    return out
