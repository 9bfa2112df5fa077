"""Windowed Novikov series and exact fractions with Novikov-unit denominators.

All series live in the completion whose supports are bounded below in
xi-value.  :class:`LocalFraction` represents elements ``p/q`` of the
localisation of the group ring at elements whose xi-lowest part is a unit
monomial.  That localisation embeds in the completion, so every fraction has
an exact series expansion, and it is the ring the elimination engine works in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .lattice import (
    Character,
    CoefficientRing,
    GroupRingElem,
    INFINITY,
    NotAUnit,
    lowest_part,
    pneg,
    xi_eval,
    xi_top,
    xi_valuation,
)
from .upoly import UPoly, from_laurent, to_laurent, upoly_gcd


def truncate(x: GroupRingElem, xi: Character, bound) -> GroupRingElem:
    """Terms of ``x`` whose xi-value is at most ``bound``."""
    c = xi.coefficients
    keep = {e: v for e, v in x.items() if sum(a * b for a, b in zip(c, e)) <= bound}
    return GroupRingElem._raw(keep, x.ring, x.rank)


def truncate_below(x: GroupRingElem, xi: Character, bound) -> GroupRingElem:
    """Terms of ``x`` whose xi-value is strictly below ``bound``."""
    c = xi.coefficients
    keep = {e: v for e, v in x.items() if sum(a * b for a, b in zip(c, e)) < bound}
    return GroupRingElem._raw(keep, x.ring, x.rank)


def mul_truncated(a: GroupRingElem, b: GroupRingElem, xi: Character, bound) -> GroupRingElem:
    """The terms of ``a*b`` with xi-value at most ``bound``, without forming the rest."""
    ring = a.ring
    c = xi.coefficients
    va = {e: sum(x * y for x, y in zip(c, e)) for e in a._terms}
    vb = {e: sum(x * y for x, y in zip(c, e)) for e in b._terms}
    out: dict = {}
    for e1, c1 in a._terms.items():
        room = bound - va[e1]
        for e2, c2 in b._terms.items():
            if vb[e2] > room:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            v = ring.normalize(out.get(e, 0) + c1 * c2)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return GroupRingElem._raw(out, ring, a.rank)


def unit_lowest(x: GroupRingElem, xi: Character):
    """Return ``(g, c)`` when the xi-lowest part of ``x`` is ``c*g`` with ``c`` a unit, else ``None``."""
    if not x:
        return None
    lp = lowest_part(x, xi)
    if not lp.is_monomial():
        return None
    ((g, c),) = lp.items()
    if not x.ring.is_unit(c):
        return None
    return g, c


@dataclass(frozen=True)
class NovikovSeries:
    """A series known exactly on the xi-values ``[valuation, valuation + window]``."""

    direction: Character
    window: Fraction | int
    valuation: object
    terms: GroupRingElem
    truncated: bool

    def __post_init__(self) -> None:
        if self.window < 0:
            raise ValueError("window must be nonnegative")
        for e, _ in self.terms.items():
            v = xi_eval(self.direction, e)
            if not (self.valuation <= v <= self.valuation + self.window):
                raise ValueError(f"term at xi-value {v} lies outside the window")

    @classmethod
    def exact(cls, x: GroupRingElem, xi: Character) -> "NovikovSeries":
        v = xi_valuation(x, xi)
        w = 0 if not x else xi_top(x, xi) - v
        return cls(xi, w, v, x, False)

    def __mul__(self, other: "NovikovSeries") -> "NovikovSeries":
        if self.direction != other.direction:
            raise ValueError("series in different completions")
        xi = self.direction
        if not self.terms or not other.terms:
            return NovikovSeries(xi, 0, INFINITY, GroupRingElem.zero(self.terms.rank, self.terms.ring), False)
        if not self.truncated and not other.truncated:
            return NovikovSeries.exact(self.terms * other.terms, xi)
        windows = [s.window for s in (self, other) if s.truncated]
        w = min(windows)
        v0 = self.valuation + other.valuation
        prod = mul_truncated(self.terms, other.terms, xi, v0 + w)
        return NovikovSeries(xi, w, v0, prod, True)

    def __add__(self, other: "NovikovSeries") -> "NovikovSeries":
        xi = self.direction
        ends = [s.valuation + s.window for s in (self, other) if s.truncated and s.terms]
        total = self.terms + other.terms
        if not ends:
            return NovikovSeries.exact(total, xi)
        v0 = xi_valuation(total, xi)
        end = min(ends)
        if v0 > end:
            return NovikovSeries(xi, 0, end, GroupRingElem.zero(total.rank, total.ring), True)
        return NovikovSeries(xi, end - v0, v0, truncate(total, xi, end), True)

    def agrees_with(self, x: GroupRingElem) -> bool:
        """True if ``x`` matches this series on its known window."""
        if not self.truncated:
            return self.terms == x
        return truncate(x, self.direction, self.valuation + self.window) == self.terms


def novikov_invert(x: GroupRingElem, xi: Character, window) -> NovikovSeries:
    """Invert ``x`` in the completion, keeping ``window`` worth of xi-values.

    The xi-lowest part must be ``c*g`` with ``c`` a coefficient unit; then
    ``x = c*g*(1 - y)`` with every term of ``y`` strictly positive and the
    inverse is ``(c*g)^-1 * sum(y^k)``.
    """
    if window < 0:
        raise ValueError("window must be nonnegative")
    lead = unit_lowest(x, xi)
    if lead is None:
        raise NotAUnit(f"xi-lowest part of {x} is not a unit monomial")
    g, c = lead
    ring = x.ring
    cinv = ring.inverse(c)
    inv_lead = GroupRingElem.monomial(pneg(g), cinv, ring)
    one = GroupRingElem.one(x.rank, ring)
    y = one - inv_lead * x
    v_y = xi_valuation(y, xi)
    if not y:
        return NovikovSeries(xi, window, -xi_eval(xi, g), inv_lead, False)
    total = one
    power = one
    for _ in range(int(math.floor(window / v_y)) + 1):
        power = mul_truncated(power, y, xi, window)
        if not power:
            break
        total = total + power
    s = inv_lead * total
    v0 = -xi_eval(xi, g)
    return NovikovSeries(xi, window, v0, truncate(s, xi, v0 + window), True)


# ---------------------------------------------------------------------------
# localisation


def _exact_div_r1(a: GroupRingElem, b: GroupRingElem) -> GroupRingElem:
    ring = a.ring
    field = ring if ring.is_field else CoefficientRing("Q")
    sa, pa = from_laurent(a, field)
    sb, pb = from_laurent(b, field)
    q, r = pa.divmod(pb)
    if r:
        raise ArithmeticError("inexact division")
    return to_laurent(q, sa - sb, field).change_ring(ring)


def gcd_r1(a: GroupRingElem, b: GroupRingElem) -> GroupRingElem:
    """A gcd in the rank-1 Laurent ring, normalized to lowest exponent 0."""
    ring = a.ring
    if ring.is_field:
        _, pa = from_laurent(a)
        _, pb = from_laurent(b)
        return to_laurent(upoly_gcd(pa, pb))
    from .upoly import rational_to_integer_poly

    qa, qb = a.change_ring(CoefficientRing("Q")), b.change_ring(CoefficientRing("Q"))
    _, pa = from_laurent(qa)
    _, pb = from_laurent(qb)
    g = upoly_gcd(pa, pb)
    ints = rational_to_integer_poly(g)
    content = math.gcd(math.gcd(*[c for _, c in a.items()]), math.gcd(*[c for _, c in b.items()]))
    return GroupRingElem({(i,): content * c for i, c in enumerate(ints) if c}, ring, 1)


class LocalFraction:
    """An exact element ``num/den`` of the localised ring for direction ``xi``.

    The denominator is kept with xi-lowest part exactly ``1`` so the lowest
    part of the fraction is the lowest part of the numerator.
    """

    __slots__ = ("num", "den", "xi")

    def __init__(self, num: GroupRingElem, den: GroupRingElem | None = None, xi: Character | None = None, *, reduce: bool = True):
        if xi is None:
            raise ValueError("a direction is required")
        if den is None:
            den = GroupRingElem.one(num.rank, num.ring)
        if not num:
            den = GroupRingElem.one(num.rank, num.ring)
        else:
            lead = unit_lowest(den, xi)
            if lead is None:
                raise NotAUnit(f"denominator {den} is not a Novikov unit for xi={xi}")
            g, c = lead
            if g != (0,) * num.rank or c != 1:
                fix = GroupRingElem.monomial(pneg(g), num.ring.inverse(c), num.ring)
                num, den = num * fix, den * fix
            if reduce and not den.is_monomial():
                num, den = _cancel(num, den, xi)
        self.num = num
        self.den = den
        self.xi = xi

    @classmethod
    def of(cls, x: GroupRingElem, xi: Character) -> "LocalFraction":
        obj = cls.__new__(cls)
        obj.num = x
        obj.den = GroupRingElem.one(x.rank, x.ring)
        obj.xi = xi
        return obj

    @property
    def ring(self) -> CoefficientRing:
        return self.num.ring

    def is_polynomial(self) -> bool:
        return self.den.is_monomial()

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def _other(self, other) -> "LocalFraction":
        if isinstance(other, LocalFraction):
            return other
        if isinstance(other, GroupRingElem):
            return LocalFraction.of(other, self.xi)
        if isinstance(other, (int, Fraction)):
            return LocalFraction.of(GroupRingElem.constant(other, self.num.rank, self.num.ring), self.xi)
        return NotImplemented

    def __add__(self, other) -> "LocalFraction":
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return LocalFraction(self.num + o.num, self.den, self.xi)
        return LocalFraction(self.num * o.den + o.num * self.den, self.den * o.den, self.xi)

    __radd__ = __add__

    def __neg__(self) -> "LocalFraction":
        obj = LocalFraction.__new__(LocalFraction)
        obj.num, obj.den, obj.xi = -self.num, self.den, self.xi
        return obj

    def __sub__(self, other) -> "LocalFraction":
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other) -> "LocalFraction":
        return (-self) + other

    def __mul__(self, other) -> "LocalFraction":
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return LocalFraction.of(GroupRingElem.zero(self.num.rank, self.num.ring), self.xi)
        if self.den.is_monomial() and o.den.is_monomial():
            return LocalFraction.of(self.num * o.num, self.xi)
        return LocalFraction(self.num * o.num, self.den * o.den, self.xi)

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        return unit_lowest(self.num, self.xi) is not None

    def inverse(self) -> "LocalFraction":
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit of the localised ring")
        return LocalFraction(self.den, self.num, self.xi)

    def valuation(self):
        return xi_valuation(self.num, self.xi)

    def lowest(self):
        """``(g, c)`` for a monomial lowest part ``c*g``, else ``None``."""
        if not self.num:
            return None
        lp = lowest_part(self.num, self.xi)
        if not lp.is_monomial():
            return None
        ((g, c),) = lp.items()
        return g, c

    def expand(self, upto) -> GroupRingElem:
        """Series terms with xi-value at most ``upto`` (exact)."""
        if not self.num:
            return self.num
        if self.den.is_monomial():
            return truncate(self.num, self.xi, upto)
        v = self.valuation()
        if upto < v:
            return GroupRingElem.zero(self.num.rank, self.num.ring)
        inv = novikov_invert(self.den, self.xi, upto - v)
        return mul_truncated(self.num, inv.terms, self.xi, upto)

    def __eq__(self, other) -> bool:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self) -> int:
        raise TypeError("LocalFraction is not hashable")

    def __repr__(self) -> str:
        if self.den.is_monomial() and self.den == GroupRingElem.one(self.num.rank, self.num.ring):
            return f"{self.num}"
        return f"({self.num})/({self.den})"


def _cancel(num: GroupRingElem, den: GroupRingElem, xi: Character):
    if num.rank != 1:
        return num, den
    g = gcd_r1(num, den)
    if g.is_monomial():
        return num, den
    num = _exact_div_r1(num, g)
    den = _exact_div_r1(den, g)
    lead = unit_lowest(den, xi)
    gexp, c = lead
    fix = GroupRingElem.monomial(pneg(gexp), num.ring.inverse(c), num.ring)
    return num * fix, den * fix
