"""Exact arithmetic on the deck lattice Z^r and its group ring.

Group-ring elements are sparse Laurent polynomials in ``r`` variables with
coefficients in Z, Q or F_p.  A lattice point is a plain tuple of ints.
Characters are rational directions on the lattice, stored as primitive
integer vectors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

LatticePoint = tuple  # tuple[int, ...]


class NotAUnit(ArithmeticError):
    """Raised when an element has no inverse in the relevant completion."""


# ---------------------------------------------------------------------------
# coefficient rings


@dataclass(frozen=True)
class CoefficientRing:
    """Z, Q or F_p.

    Integers are Python ints, rationals are ``Fraction``, and F_p elements
    are ints reduced into ``range(p)``.
    """

    kind: str
    p: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown coefficient ring {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or self.p < 2 or not _is_prime(self.p):
                raise ValueError(f"F_p needs a prime p, got {self.p!r}")
        elif self.p is not None:
            raise ValueError("p is only meaningful for F_p")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    def coerce(self, c) -> int | Fraction:
        if self.kind == "Z":
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"{c} is not an integer")
                return int(c.numerator)
            if isinstance(c, bool) or not isinstance(c, int):
                raise TypeError(f"cannot coerce {c!r} into Z")
            return c
        if self.kind == "Q":
            return Fraction(c)
        c = Fraction(c)
        num = c.numerator % self.p
        den = c.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"denominator divisible by {self.p}")
        return num * pow(den, -1, self.p) % self.p

    def normalize(self, c):
        """Fast path for values already of the right Python type."""
        if self.kind == "Fp":
            return c % self.p
        return c

    def is_unit(self, c) -> bool:
        if self.kind == "Z":
            return c in (1, -1)
        return c != 0

    def inverse(self, c):
        if not self.is_unit(c):
            raise NotAUnit(f"{c} is not a unit of {self}")
        if self.kind == "Z":
            return c
        if self.kind == "Q":
            return 1 / Fraction(c)
        return pow(c, -1, self.p)

    def __str__(self) -> str:
        return f"F{self.p}" if self.kind == "Fp" else self.kind

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        """Accept ``Z``, ``Q``, ``Fp:7``, ``F7`` or ``GF7``."""
        t = text.strip()
        if t in ("Z", "Q"):
            return cls(t)
        m = re.fullmatch(r"(?:Fp:?|F|GF)(\d+)", t)
        if m:
            return cls("Fp", int(m.group(1)))
        raise ValueError(f"unknown coefficient ring {text!r}")


ZZ = CoefficientRing("Z")
QQ = CoefficientRing("Q")


def GF(p: int) -> CoefficientRing:
    return CoefficientRing("Fp", p)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# ---------------------------------------------------------------------------
# lattice helpers


def padd(a: LatticePoint, b: LatticePoint) -> LatticePoint:
    return tuple(x + y for x, y in zip(a, b))


def psub(a: LatticePoint, b: LatticePoint) -> LatticePoint:
    return tuple(x - y for x, y in zip(a, b))


def pneg(a: LatticePoint) -> LatticePoint:
    return tuple(-x for x in a)


def sq_norm(g: LatticePoint, gram=None) -> Fraction | int:
    """Squared length of a lattice point under ``gram`` (identity by default)."""
    if gram is None:
        return sum(x * x for x in g)
    return sum(gram[i][j] * g[i] * g[j] for i in range(len(g)) for j in range(len(g)))


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class Character:
    """A nonzero rational direction on Z^r, up to positive scaling.

    ``coefficients`` is always the primitive integer representative; the
    optional ``gram`` matrix defines the lattice norm used by the finite-type
    machinery.
    """

    coefficients: tuple
    gram: tuple | None = field(default=None, compare=False)

    def __init__(self, coefficients: Iterable, gram=None) -> None:
        coeffs = normalize_direction(coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if gram is not None:
            gram = tuple(tuple(Fraction(x) for x in row) for row in gram)
            if len(gram) != len(coeffs) or any(len(row) != len(coeffs) for row in gram):
                raise ValueError("inner-product matrix has the wrong shape")
        object.__setattr__(self, "gram", gram)

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def __neg__(self) -> "Character":
        return Character(tuple(-c for c in self.coefficients), self.gram)

    def __call__(self, g: LatticePoint) -> int:
        return xi_eval(self, g)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coefficients)

    @classmethod
    def parse(cls, text: str) -> "Character":
        return cls([Fraction(part) for part in text.split(",")])


def normalize_direction(coefficients: Iterable) -> tuple:
    """Scale a rational vector by a positive factor to a primitive integer vector."""
    coefficients = list(coefficients)
    if any(isinstance(c, float) for c in coefficients):
        raise ValueError("directions must be exact rationals (int, Fraction or a string such as '1/3'), not floats")
    vals = [Fraction(c) for c in coefficients]
    if not vals:
        raise ValueError("a character needs at least one coordinate")
    if all(v == 0 for v in vals):
        raise ValueError("the zero homomorphism is not a direction")
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vals]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(x // g for x in ints)


def xi_eval(xi: Character, g: LatticePoint) -> int:
    if len(g) != xi.rank:
        raise ValueError(f"lattice point of rank {len(g)} against a rank-{xi.rank} character")
    return sum(c * e for c, e in zip(xi.coefficients, g))


# ---------------------------------------------------------------------------
# group ring


class GroupRingElem:
    """Immutable sparse Laurent polynomial over Z^r.

    >>> t = GroupRingElem.monomial((1,))
    >>> (t - 1) * (t + 1)
    t^2 - 1
    """

    __slots__ = ("ring", "rank", "_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), ring: CoefficientRing = ZZ, rank: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for exp, c in items:
            if isinstance(exp, int):
                exp = (exp,)
            else:
                exp = tuple(exp)
            c = ring.coerce(c)
            if c:
                clean[exp] = ring.normalize(clean.get(exp, 0) + c)
                if not clean[exp]:
                    del clean[exp]
        if rank is None:
            if not clean:
                raise ValueError("rank is required for the zero element")
            rank = len(next(iter(clean)))
        for exp in clean:
            if len(exp) != rank:
                raise ValueError(f"exponent {exp} does not have length {rank}")
        self.ring = ring
        self.rank = rank
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, ring: CoefficientRing, rank: int) -> "GroupRingElem":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.rank = rank
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, rank: int, ring: CoefficientRing = ZZ) -> "GroupRingElem":
        return cls._raw({}, ring, rank)

    @classmethod
    def one(cls, rank: int, ring: CoefficientRing = ZZ) -> "GroupRingElem":
        return cls._raw({(0,) * rank: ring.coerce(1)}, ring, rank)

    @classmethod
    def monomial(cls, exp: LatticePoint, coeff=1, ring: CoefficientRing = ZZ) -> "GroupRingElem":
        if isinstance(exp, int):
            exp = (exp,)
        return cls({tuple(exp): coeff}, ring, len(exp))

    @classmethod
    def constant(cls, c, rank: int, ring: CoefficientRing = ZZ) -> "GroupRingElem":
        return cls({(0,) * rank: c}, ring, rank)

    # -- views ---------------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator:
        return iter(self._terms.items())

    def support(self) -> list:
        return sorted(self._terms)

    def coeff(self, exp: LatticePoint):
        return self._terms.get(tuple(exp), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    # -- arithmetic ------------------------------------------------------------
    def _check(self, other: "GroupRingElem") -> None:
        if self.ring != other.ring or self.rank != other.rank:
            raise ValueError(f"incompatible group ring elements ({self.ring}, r={self.rank}) vs ({other.ring}, r={other.rank})")

    def _lift(self, other) -> "GroupRingElem":
        if isinstance(other, GroupRingElem):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return GroupRingElem.constant(other, self.rank, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = ring.normalize(out.get(e, 0) + c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return GroupRingElem._raw(out, ring, self.rank)

    __radd__ = __add__

    def __neg__(self) -> "GroupRingElem":
        ring = self.ring
        return GroupRingElem._raw({e: ring.normalize(-c) for e, c in self._terms.items()}, ring, self.rank)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = ring.normalize(out.get(e, 0) + c1 * c2)
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return GroupRingElem._raw(out, ring, self.rank)

    __rmul__ = __mul__

    def scale(self, c) -> "GroupRingElem":
        c = self.ring.coerce(c)
        ring = self.ring
        out = {}
        for e, v in self._terms.items():
            w = ring.normalize(v * c)
            if w:
                out[e] = w
        return GroupRingElem._raw(out, ring, self.rank)

    def shift(self, g: LatticePoint) -> "GroupRingElem":
        """Multiply by the group element ``g``."""
        return GroupRingElem._raw({padd(e, g): c for e, c in self._terms.items()}, self.ring, self.rank)

    def __pow__(self, n: int) -> "GroupRingElem":
        if n < 0:
            if not self.is_monomial():
                raise NotAUnit("only unit monomials have negative powers in the group ring")
            ((e, c),) = self._terms.items()
            coeff = self.ring.coerce(self.ring.inverse(c) ** (-n))
            return GroupRingElem.monomial(tuple(n * x for x in e), coeff, self.ring)
        out = GroupRingElem.one(self.rank, self.ring)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def change_ring(self, ring: CoefficientRing) -> "GroupRingElem":
        """Image under Z -> Q, Z -> F_p or Q -> F_p."""
        return GroupRingElem({e: c for e, c in self._terms.items()}, ring, self.rank)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GroupRingElem.constant(other, self.rank, self.ring)
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        return self.ring == other.ring and self.rank == other.rank and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self.rank, frozenset(self._terms.items())))
        return self._hash

    # -- display ---------------------------------------------------------------
    def __repr__(self) -> str:
        return format_element(self)

    __str__ = __repr__


def _var_names(rank: int) -> list[str]:
    return ["t"] if rank == 1 else [f"t{i + 1}" for i in range(rank)]


def _monomial_str(exp: LatticePoint) -> str:
    parts = []
    for name, e in zip(_var_names(len(exp)), exp):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_element(x: GroupRingElem) -> str:
    if not x:
        return "0"
    chunks = []
    # descending order reads like a polynomial
    for exp in sorted(x._terms, reverse=True):
        c = x._terms[exp]
        mono = _monomial_str(exp)
        neg = x.ring.kind != "Fp" and c < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not chunks:
            chunks.append(f"-{body}" if neg else body)
        else:
            chunks.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(chunks)


_TERM = re.compile(r"\s*([+-])?\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*((?:t[0-9]*(?:\^-?[0-9]+)?\s*\*?\s*)*)")


def parse_element(text: str, rank: int = 1, ring: CoefficientRing = ZZ) -> GroupRingElem:
    """Parse strings such as ``"t^2 - 2*t^-1"`` or ``"t1*t2^-1 + 3"``."""
    s = text.replace(" ", "")
    if s in ("", "0"):
        return GroupRingElem.zero(rank, ring)
    pos = 0
    out: dict = {}
    names = _var_names(rank)
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} near position {pos}")
        sign, num, mono = m.groups()
        if not num and not mono:
            raise ValueError(f"empty term in {text!r}")
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        exp = [0] * rank
        for var, power in re.findall(r"(t[0-9]*)(?:\^(-?[0-9]+))?", mono or ""):
            if var not in names:
                raise ValueError(f"unknown variable {var!r} for rank {rank}")
            exp[names.index(var)] += int(power) if power else 1
        key = tuple(exp)
        out[key] = out.get(key, 0) + c
        pos = m.end()
    return GroupRingElem(out, ring, rank)


def laurent(terms: Mapping, ring: CoefficientRing = ZZ, rank: int | None = None) -> GroupRingElem:
    """Build an element from ``{exponent: coefficient}``; int keys mean rank 1."""
    if rank is None:
        rank = 1 if not terms or isinstance(next(iter(terms)), int) else len(next(iter(terms)))
    return GroupRingElem(terms, ring, rank)


# ---------------------------------------------------------------------------
# valuations, norms and lowest parts


INFINITY = math.inf


def xi_valuation(x: GroupRingElem, xi: Character):
    """Minimum of the character over the support; ``inf`` for zero."""
    if not x:
        return INFINITY
    if x.rank != xi.rank:
        raise ValueError("rank mismatch between element and character")
    c = xi.coefficients
    return min(sum(a * b for a, b in zip(c, e)) for e in x._terms)


def xi_top(x: GroupRingElem, xi: Character):
    """Maximum of the character over the support; ``-inf`` for zero."""
    if not x:
        return -INFINITY
    c = xi.coefficients
    return max(sum(a * b for a, b in zip(c, e)) for e in x._terms)


def xi_spread(x: GroupRingElem, xi: Character) -> int:
    if not x:
        return 0
    return xi_top(x, xi) - xi_valuation(x, xi)


def lowest_part(x: GroupRingElem, xi: Character) -> GroupRingElem:
    if not x:
        raise ValueError("the zero element has no lowest part")
    v = xi_valuation(x, xi)
    return GroupRingElem._raw({e: c for e, c in x._terms.items() if xi_eval(xi, e) == v}, x.ring, x.rank)


def lattice_norm(x: GroupRingElem, gram=None):
    """Squared norm: max of ``|g|^2`` over the support, 0 for the zero element."""
    if not x:
        return 0
    return max(sq_norm(e, gram) for e in x._terms)


def diam(a: GroupRingElem, b: GroupRingElem, gram=None):
    """Squared diameter: max of ``|g - h|^2`` over g in supp a, h in supp b."""
    if not a or not b:
        return 0
    return max(sq_norm(psub(g, h), gram) for g in a._terms for h in b._terms)
