"""Based free chain complexes over the deck group ring.

Matrices act on column vectors; a boundary in degree ``i`` is a
``ranks[i-1] x ranks[i]`` matrix.  Entries are :class:`GroupRingElem` for
complexes and certificates, and :class:`LocalFraction` inside the
elimination engine.  The :class:`Matrix` class is agnostic about which.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .lattice import (
    INFINITY,
    Character,
    CoefficientRing,
    GroupRingElem,
    ZZ,
    xi_valuation,
)


class Matrix:
    """Sparse matrix with entries stored only where nonzero."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict | None = None):
        self.rows = rows
        self.cols = cols
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside a {rows}x{cols} matrix")
            if v:
                clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def _raw(cls, rows: int, cols: int, entries: dict) -> "Matrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m.entries = rows, cols, entries
        return m

    @classmethod
    def identity(cls, n: int, one) -> "Matrix":
        return cls._raw(n, n, {(i, i): one for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls._raw(rows, cols, {})

    @classmethod
    def from_rows(cls, rows: list[list], zero_check=bool) -> "Matrix":
        n = len(rows)
        m = len(rows[0]) if rows else 0
        return cls(n, m, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if zero_check(v)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def get(self, i: int, j: int, default=None):
        return self.entries.get((i, j), default)

    def column(self, j: int) -> dict:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def row(self, i: int) -> dict:
        return {j: v for (ii, j), v in self.entries.items() if ii == i}

    def is_zero(self) -> bool:
        return not self.entries

    def __bool__(self) -> bool:
        return bool(self.entries)

    def map(self, fn: Callable) -> "Matrix":
        return Matrix(self.rows, self.cols, {k: fn(v) for k, v in self.entries.items()})

    def transpose(self) -> "Matrix":
        return Matrix._raw(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict = {}
        for (k, j), b in other.entries.items():
            by_row.setdefault(k, []).append((j, b))
        out: dict = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                prod = a * b
                if key in out:
                    out[key] = out[key] + prod
                else:
                    out[key] = prod
        return Matrix._raw(self.rows, other.cols, {k: v for k, v in out.items() if v})

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"cannot add {self.shape} and {other.shape}")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return Matrix._raw(self.rows, self.cols, {k: v for k, v in out.items() if v})

    def __neg__(self) -> "Matrix":
        return Matrix._raw(self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        return Matrix(self.rows, self.cols, {k: v * c for k, v in self.entries.items()})

    def apply(self, vec: dict) -> dict:
        """Multiply a sparse column vector ``{index: entry}``."""
        out: dict = {}
        for (i, j), a in self.entries.items():
            if j in vec:
                prod = a * vec[j]
                out[i] = out[i] + prod if i in out else prod
        return {i: v for i, v in out.items() if v}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        keys = set(self.entries) | set(other.entries)
        for k in keys:
            a, b = self.entries.get(k), other.entries.get(k)
            if a is None or b is None:
                return False
            if not (a == b):
                return False
        return True

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.entries})"

    def dense(self, zero=0) -> list[list]:
        return [[self.entries.get((i, j), zero) for j in range(self.cols)] for i in range(self.rows)]


# ---------------------------------------------------------------------------
# complexes


@dataclass(eq=False)
class BasedFreeComplex:
    """A finite free based complex ``C_top -> ... -> C_0`` over the deck group ring."""

    deck_rank: int
    ring: CoefficientRing
    ranks: tuple
    boundaries: dict
    labels: tuple | None = None
    name: str | None = field(default=None)

    def __post_init__(self) -> None:
        self.ranks = tuple(self.ranks)
        if any(n < 0 for n in self.ranks):
            raise ValueError("ranks must be nonnegative")
        for i, m in self.boundaries.items():
            if not 1 <= i < len(self.ranks):
                raise ValueError(f"boundary in degree {i} outside 1..{len(self.ranks) - 1}")
            if m.shape != (self.ranks[i - 1], self.ranks[i]):
                raise ValueError(f"boundary in degree {i} has shape {m.shape}, expected {(self.ranks[i - 1], self.ranks[i])}")
            for v in m.entries.values():
                if not isinstance(v, GroupRingElem) or v.ring != self.ring or v.rank != self.deck_rank:
                    raise ValueError(f"boundary entry {v!r} in degree {i} is not in the complex's group ring")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def d(self, i: int) -> Matrix:
        """Boundary ``C_i -> C_{i-1}`` (a zero matrix outside the stored range)."""
        if i in self.boundaries:
            return self.boundaries[i]
        return Matrix.zero(self.rank(i - 1), self.rank(i))

    def one(self) -> GroupRingElem:
        return GroupRingElem.one(self.deck_rank, self.ring)

    def zero(self) -> GroupRingElem:
        return GroupRingElem.zero(self.deck_rank, self.ring)

    def identity(self, i: int) -> Matrix:
        return Matrix.identity(self.rank(i), self.one())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BasedFreeComplex):
            return NotImplemented
        return (
            self.deck_rank == other.deck_rank
            and self.ring == other.ring
            and self.ranks == other.ranks
            and all(self.d(i) == other.d(i) for i in range(1, len(self.ranks)))
        )

    def __repr__(self) -> str:
        return f"BasedFreeComplex(r={self.deck_rank}, {self.ring}, ranks={list(self.ranks)})"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    message: str = "ok"
    degree: int | None = None
    row: int | None = None
    col: int | None = None


def validate(C: BasedFreeComplex) -> ValidationReport:
    """Check shapes and that consecutive boundaries compose to zero."""
    for i in range(1, C.top + 1):
        if C.d(i).shape != (C.rank(i - 1), C.rank(i)):
            return ValidationReport(False, f"boundary {i} has the wrong shape", i)
    for i in range(2, C.top + 1):
        comp = C.d(i - 1) @ C.d(i)
        if comp.entries:
            (r, c) = min(comp.entries)
            return ValidationReport(False, f"d{i - 1} d{i} is nonzero at ({r},{c}): {comp.entries[(r, c)]}", i, r, c)
    return ValidationReport(True)


def tensor_coefficients(C: BasedFreeComplex, ring: CoefficientRing) -> BasedFreeComplex:
    """Change coefficients along Z -> Q, Z -> F_p (or Q -> F_p when denominators allow)."""
    if C.ring == ring:
        return C
    if C.ring.kind == "Fp" or (C.ring.kind == "Q" and ring.kind == "Z"):
        raise ValueError(f"no coefficient map {C.ring} -> {ring}")
    bds = {i: m.map(lambda x: x.change_ring(ring)) for i, m in C.boundaries.items()}
    return BasedFreeComplex(C.deck_rank, ring, C.ranks, bds, C.labels, C.name)


# ---------------------------------------------------------------------------
# graded maps


@dataclass(eq=False)
class GradedMap:
    """Per-degree matrices ``C_i -> D_{i+shift}``; shift 0 is a chain map, 1 a homotopy."""

    source: BasedFreeComplex
    target: BasedFreeComplex
    shift: int
    mats: dict

    def at(self, i: int) -> Matrix:
        if i in self.mats:
            return self.mats[i]
        return Matrix.zero(self.target.rank(i + self.shift), self.source.rank(i))

    def degrees(self) -> range:
        return range(0, self.source.top + 1)

    def commutes(self) -> bool:
        """``d f = f d`` in every degree (meaningful for shift 0)."""
        for i in range(1, self.source.top + 1):
            if not (self.target.d(i) @ self.at(i) == self.at(i - 1) @ self.source.d(i)):
                return False
        return True


ChainMap = GradedMap
ChainHomotopy = GradedMap


def chain_map(source, target, mats) -> GradedMap:
    return GradedMap(source, target, 0, dict(mats))


def chain_homotopy(source, target, mats) -> GradedMap:
    return GradedMap(source, target, 1, dict(mats))


def identity_map(C: BasedFreeComplex) -> GradedMap:
    return chain_map(C, C, {i: C.identity(i) for i in range(C.top + 1)})


def compose(f: GradedMap, g: GradedMap) -> GradedMap:
    """``f o g``: apply ``g`` first."""
    if g.target.ranks != f.source.ranks:
        raise ValueError("maps are not composable")
    mats = {}
    for i in range(g.source.top + 1):
        mats[i] = f.at(i + g.shift) @ g.at(i)
    return GradedMap(g.source, f.target, f.shift + g.shift, mats)


def add_maps(f: GradedMap, g: GradedMap, sign: int = 1) -> GradedMap:
    mats = {}
    for i in range(f.source.top + 1):
        mats[i] = f.at(i) + g.at(i) if sign > 0 else f.at(i) - g.at(i)
    return GradedMap(f.source, f.target, f.shift, mats)


def iterate(f: GradedMap, m: int) -> GradedMap:
    if m < 1:
        raise ValueError("iterate needs m >= 1")
    out = f
    for _ in range(m - 1):
        out = compose(f, out)
    return out


def check_homotopy(H: GradedMap, f: GradedMap, g: GradedMap, degrees: Iterable[int] | None = None) -> bool:
    """Exact check of ``d H + H d = f - g`` in the given degrees."""
    C, D = f.source, f.target
    for i in degrees if degrees is not None else range(C.top + 1):
        lhs = D.d(i + 1) @ H.at(i)
        if i >= 1:
            lhs = lhs + H.at(i - 1) @ C.d(i)
        if not (lhs == f.at(i) - g.at(i)):
            return False
    return True


# ---------------------------------------------------------------------------
# valuations


@dataclass(frozen=True)
class Valuation:
    """Basis values for a valuation extending ``xi``; chains use the min rule."""

    xi: Character
    values: tuple

    def basis(self, degree: int, index: int):
        return self.values[degree][index]

    def of(self, degree: int, vec: dict):
        best = INFINITY
        for j, a in vec.items():
            v = _entry_valuation(a, self.xi)
            if v != INFINITY:
                best = min(best, v + self.values[degree][j])
        return best

    def respects_boundary(self, C: BasedFreeComplex) -> bool:
        """Axiom ``v(d x) >= v(x)`` on every basis element."""
        for i in range(1, C.top + 1):
            d = C.d(i)
            for j in range(C.rank(i)):
                if self.of(i - 1, d.column(j)) < self.values[i][j]:
                    return False
        return True


def _entry_valuation(a, xi: Character):
    if isinstance(a, GroupRingElem):
        return xi_valuation(a, xi)
    return a.valuation()


def standard_valuation(C: BasedFreeComplex, xi: Character) -> Valuation:
    """Zero on degree 0; above that ``v(x) = v(dx)``, or 0 when ``dx = 0``."""
    if xi.rank != C.deck_rank:
        raise ValueError("character rank differs from the deck rank")
    values = [tuple(0 for _ in range(C.rank(0)))]
    for i in range(1, C.top + 1):
        d = C.d(i)
        cols: dict = {}
        for (r, c), a in d.entries.items():
            cols.setdefault(c, []).append(xi_valuation(a, xi) + values[i - 1][r])
        values.append(tuple(min(cols[j]) if j in cols else 0 for j in range(C.rank(i))))
    return Valuation(xi, tuple(values))


# ---------------------------------------------------------------------------
# certificates


@dataclass(eq=False)
class SigmaCertificate:
    """A map ``A`` homotopic to the identity through degree ``k`` that raises the valuation."""

    complex: BasedFreeComplex
    xi: Character
    k: int
    epsilon: Fraction
    A: GradedMap
    homotopy: GradedMap

    def __post_init__(self) -> None:
        self.epsilon = Fraction(self.epsilon)
        if self.epsilon <= 0:
            raise ValueError("a certificate needs a positive shift")


@dataclass(frozen=True)
class CertificateCheck:
    accepted: bool
    reason: str = "ok"
    degree: int | None = None
    index: int | None = None
    shift: object = None

    def __bool__(self) -> bool:
        return self.accepted


def certificate_shift(cert: SigmaCertificate, xi: Character | None = None, valuation: Valuation | None = None):
    """Smallest ``v(A e) - v(e)`` over basis elements in degrees ``<= k``."""
    C = cert.complex
    xi = xi or cert.xi
    if valuation is not None and not valuation.respects_boundary(C):
        raise ValueError("valuation violates v(dx) >= v(x) on some basis element")
    val = valuation or standard_valuation(C, xi)
    worst, where = INFINITY, (None, None)
    for i in range(min(cert.k, C.top) + 1):
        A = cert.A.at(i)
        for j in range(C.rank(i)):
            s = val.of(i, A.column(j)) - val.basis(i, j)
            if s < worst:
                worst, where = s, (i, j)
    return worst, where


def verify_certificate(cert: SigmaCertificate, xi: Character | None = None, epsilon=None) -> CertificateCheck:
    """Exact verification, independent of how the certificate was built.

    With ``xi`` given, the same maps are checked against the standard
    valuation of that direction (used for openness checks); ``epsilon``
    defaults to the certificate's own claim.
    """
    C = cert.complex
    eps = Fraction(cert.epsilon if epsilon is None else epsilon)
    if eps <= 0:
        return CertificateCheck(False, "shift must be positive")
    if not 0 <= cert.k <= C.top and C.top >= 0:
        return CertificateCheck(False, f"degree bound {cert.k} outside 0..{C.top}")
    for f, label, shift in ((cert.A, "A", 0), (cert.homotopy, "homotopy", 1)):
        for i, m in f.mats.items():
            if m.shape != (C.rank(i + shift), C.rank(i)):
                return CertificateCheck(False, f"{label} has the wrong shape in degree {i}", i)
            for v in m.entries.values():
                if not isinstance(v, GroupRingElem) or v.ring != C.ring or v.rank != C.deck_rank:
                    return CertificateCheck(False, f"{label} has a non-polynomial entry in degree {i}", i)
    for i in range(1, C.top + 1):
        if not (C.d(i) @ cert.A.at(i) == cert.A.at(i - 1) @ C.d(i)):
            return CertificateCheck(False, "A is not a chain map", i)
    one = C.one()
    for i in range(min(cert.k, C.top) + 1):
        lhs = C.d(i + 1) @ cert.homotopy.at(i)
        if i >= 1:
            lhs = lhs + cert.homotopy.at(i - 1) @ C.d(i)
        rhs = Matrix.identity(C.rank(i), one) - cert.A.at(i)
        if not (lhs == rhs):
            return CertificateCheck(False, "homotopy identity fails", i)
    shift, (deg, idx) = certificate_shift(cert, xi)
    if shift < eps:
        return CertificateCheck(False, f"valuation shift {shift} is below {eps}", deg, idx, shift)
    return CertificateCheck(True, "ok", shift=shift)


def iterate_certificate(cert: SigmaCertificate, m: int) -> SigmaCertificate:
    """``A^m`` with the telescoped homotopy ``h (1 + A + ... + A^(m-1))``."""
    C = cert.complex
    power = identity_map(C)
    total = None
    for _ in range(m):
        total = power if total is None else add_maps(total, power)
        power = compose(cert.A, power)
    h = compose(cert.homotopy, total)
    return SigmaCertificate(C, cert.xi, cert.k, cert.epsilon * m, power, h)
