"""Dense univariate polynomials over Q or F_p.

Coefficient lists run from the constant term upward and carry no trailing
zeros.  These are small helpers for gcds, Smith forms and number fields; the
rank-1 group ring is converted in and out with :func:`from_laurent` and
:func:`to_laurent`.
"""

from __future__ import annotations

from fractions import Fraction

from .lattice import CoefficientRing, GroupRingElem, QQ


class UPoly:
    __slots__ = ("c", "ring")

    def __init__(self, coeffs, ring: CoefficientRing = QQ):
        if not ring.is_field:
            raise ValueError("UPoly needs a field of coefficients")
        cs = [ring.coerce(x) for x in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.c = cs
        self.ring = ring

    @classmethod
    def _raw(cls, cs: list, ring: CoefficientRing) -> "UPoly":
        while cs and not cs[-1]:
            cs.pop()
        obj = cls.__new__(cls)
        obj.c = cs
        obj.ring = ring
        return obj

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def __bool__(self) -> bool:
        return bool(self.c)

    def lead(self):
        return self.c[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, UPoly) and self.ring == other.ring and self.c == other.c

    def __hash__(self) -> int:
        return hash((self.ring, tuple(self.c)))

    def __repr__(self) -> str:
        return f"UPoly({self.c}, {self.ring})"

    def _n(self, x):
        return self.ring.normalize(x)

    def __add__(self, other: "UPoly") -> "UPoly":
        n = max(len(self.c), len(other.c))
        a = self.c + [0] * (n - len(self.c))
        b = other.c + [0] * (n - len(other.c))
        return UPoly._raw([self._n(x + y) for x, y in zip(a, b)], self.ring)

    def __neg__(self) -> "UPoly":
        return UPoly._raw([self._n(-x) for x in self.c], self.ring)

    def __sub__(self, other: "UPoly") -> "UPoly":
        return self + (-other)

    def __mul__(self, other) -> "UPoly":
        if not isinstance(other, UPoly):
            s = self.ring.coerce(other)
            return UPoly._raw([self._n(x * s) for x in self.c], self.ring)
        if not self.c or not other.c:
            return UPoly._raw([], self.ring)
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return UPoly._raw([self._n(v) for v in out], self.ring)

    def divmod(self, other: "UPoly") -> tuple["UPoly", "UPoly"]:
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.c)
        q = [0] * max(len(r) - len(other.c) + 1, 0)
        inv = self.ring.inverse(other.lead())
        dg = other.deg
        for i in range(len(r) - 1, dg - 1, -1):
            coef = self._n(r[i] * inv)
            if coef:
                q[i - dg] = coef
                for j, y in enumerate(other.c):
                    r[i - dg + j] = self._n(r[i - dg + j] - coef * y)
        return UPoly._raw(q, self.ring), UPoly._raw(r, self.ring)

    def __mod__(self, other: "UPoly") -> "UPoly":
        return self.divmod(other)[1]

    def monic(self) -> "UPoly":
        if not self:
            return self
        return self * self.ring.inverse(self.lead())

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.c):
            acc = self._n(acc * x + c)
        return acc


def upoly_gcd(a: UPoly, b: UPoly) -> UPoly:
    while b:
        a, b = b, a % b
    return a.monic()


def upoly_gcdex(a: UPoly, b: UPoly) -> tuple[UPoly, UPoly, UPoly]:
    """Return ``(g, s, u)`` with ``s*a + u*b = g`` and ``g`` monic."""
    ring = a.ring
    one, zero = UPoly([1], ring), UPoly([], ring)
    r0, r1, s0, s1, u0, u1 = a, b, one, zero, zero, one
    while r1:
        q, rem = r0.divmod(r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - q * s1
        u0, u1 = u1, u0 - q * u1
    if not r0:
        return r0, s0, u0
    inv = ring.inverse(r0.lead())
    return r0 * inv, s0 * inv, u0 * inv


def from_laurent(x: GroupRingElem, ring: CoefficientRing | None = None) -> tuple[int, UPoly]:
    """Split a rank-1 element as ``t^shift * P(t)`` with ``P(0) != 0``."""
    if x.rank != 1:
        raise ValueError("only rank-1 elements convert to univariate polynomials")
    ring = ring or x.ring
    if not x:
        return 0, UPoly([], ring)
    lo = min(e[0] for e in x.support())
    hi = max(e[0] for e in x.support())
    cs = [0] * (hi - lo + 1)
    for (e,), c in x.items():
        cs[e - lo] = c
    return lo, UPoly(cs, ring)


def to_laurent(p: UPoly, shift: int = 0, ring: CoefficientRing | None = None) -> GroupRingElem:
    ring = ring or p.ring
    return GroupRingElem({(i + shift,): c for i, c in enumerate(p.c) if c}, ring, 1)


def rational_to_integer_poly(p: UPoly) -> list[int]:
    """Scale a rational polynomial to a primitive integer coefficient list."""
    from math import gcd, lcm

    cs = [Fraction(c) for c in p.c]
    den = 1
    for c in cs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in cs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    if ints[-1] < 0:
        g = -g
    return [x // g for x in ints]
