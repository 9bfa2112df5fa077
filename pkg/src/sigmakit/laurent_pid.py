"""Exact linear algebra over principal ideal domains used by the decision layers.

* Smith normal form over the one-variable Laurent ring ``k[t, t^-1]``
  (Euclidean for the width ``max exp - min exp``).
* Ranks over ``k(t)`` and over number fields ``Q[t]/(m)``.
* Smith invariants and homology of finite complexes of abelian groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .chain import BasedFreeComplex, Matrix
from .lattice import QQ, CoefficientRing, GroupRingElem
from .upoly import UPoly, from_laurent, to_laurent, upoly_gcdex


# ---------------------------------------------------------------------------
# Laurent ring over a field


def width(a: GroupRingElem) -> int:
    exps = [e[0] for e in a.support()]
    return max(exps) - min(exps)


def laurent_divmod(a: GroupRingElem, b: GroupRingElem):
    """``a = q*b + r`` with ``r = 0`` or ``width(r) < width(b)``."""
    if not b:
        raise ZeroDivisionError("division by zero")
    if not a:
        return a, a
    sa, pa = from_laurent(a)
    sb, pb = from_laurent(b)
    q, r = pa.divmod(pb)
    return to_laurent(q, sa - sb), to_laurent(r, sa)


def canonical(a: GroupRingElem) -> GroupRingElem:
    """Associate with lowest exponent 0 and leading coefficient 1."""
    if not a:
        return a
    _, p = from_laurent(a)
    return to_laurent(p.monic())


def unit_to_canonical(a: GroupRingElem) -> GroupRingElem:
    """The unit ``u`` with ``u*a == canonical(a)``."""
    s, p = from_laurent(a)
    return GroupRingElem.monomial((-s,), a.ring.inverse(p.lead()), a.ring)


def is_laurent_unit(a: GroupRingElem) -> bool:
    return a.is_monomial()


@dataclass
class SmithForm:
    """``U * M * V = diag(d_0, d_1, ...)`` with ``d_s | d_{s+1}``; ``U_inv`` is ``U^-1``."""

    diagonal: list
    U: list
    U_inv: list
    V: list
    rank: int


def smith_form(M: Matrix, ring: CoefficientRing) -> SmithForm:
    n, m = M.rows, M.cols
    zero = GroupRingElem.zero(1, ring)
    one = GroupRingElem.one(1, ring)
    A = [[M.entries.get((i, j), zero) for j in range(m)] for i in range(n)]
    U = [[one if i == j else zero for j in range(n)] for i in range(n)]
    Ui = [[one if i == j else zero for j in range(n)] for i in range(n)]
    V = [[one if i == j else zero for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def row_axpy(dst, src, q):  # row dst -= q * row src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]
        for row in Ui:
            row[src] = row[src] + q * row[dst]

    def col_axpy(dst, src, q):  # col dst -= q * col src
        for row in A:
            row[dst] = row[dst] - q * row[src]
        for row in V:
            row[dst] = row[dst] - q * row[src]

    t = 0
    while t < min(n, m):
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if A[i][j] and (best is None or width(A[i][j]) < best[0]):
                    best = (width(A[i][j]), i, j)
        if best is None:
            break
        _, bi, bj = best
        swap_rows(t, bi)
        swap_cols(t, bj)
        while True:
            clean = True
            for i in range(t + 1, n):
                if A[i][t]:
                    q, r = laurent_divmod(A[i][t], A[t][t])
                    row_axpy(i, t, q)
                    if r:
                        swap_rows(t, i)
                        clean = False
            for j in range(t + 1, m):
                if A[t][j]:
                    q, r = laurent_divmod(A[t][j], A[t][t])
                    col_axpy(j, t, q)
                    if r:
                        swap_cols(t, j)
                        clean = False
            if not clean:
                continue
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, m):
                    if A[i][j] and laurent_divmod(A[i][j], A[t][t])[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row into the pivot row and repeat
            row_axpy(t, bad, -one)
        u = unit_to_canonical(A[t][t])
        A[t] = [u * a for a in A[t]]
        U[t] = [u * a for a in U[t]]
        uinv = u ** -1
        for row in Ui:
            row[t] = row[t] * uinv
        t += 1
    diag = [A[s][s] for s in range(t)]
    return SmithForm(diag, U, Ui, V, t)


@dataclass
class HomologyModule:
    """``H_i = Lambda^free_rank + sum Lambda/(d)`` over the Laurent PID."""

    degree: int
    free_rank: int
    torsion: tuple
    torsion_generators: tuple

    @property
    def is_torsion(self) -> bool:
        return self.free_rank == 0

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion


def homology_lambda(C: BasedFreeComplex) -> list[HomologyModule]:
    """Per-degree structure of ``H_*(C)`` over ``k[t, t^-1]`` (deck rank 1, field coefficients)."""
    if C.deck_rank != 1:
        raise ValueError("homology_lambda needs deck rank 1")
    if not C.ring.is_field:
        raise ValueError("homology_lambda needs field coefficients; tensor with Q or F_p first")
    forms = {i: smith_form(C.d(i), C.ring) for i in range(1, C.top + 1)}
    out = []
    for i in range(C.top + 1):
        rank_out = forms[i].rank if i in forms else 0
        nxt = forms.get(i + 1)
        rank_in = nxt.rank if nxt else 0
        torsion, gens = [], []
        if nxt:
            for s, d in enumerate(nxt.diagonal):
                if not is_laurent_unit(d):
                    torsion.append(d)
                    gens.append({r: nxt.U_inv[r][s] for r in range(C.rank(i)) if nxt.U_inv[r][s]})
        out.append(HomologyModule(i, C.rank(i) - rank_out - rank_in, tuple(torsion), tuple(gens)))
    return out


# ---------------------------------------------------------------------------
# ranks over fields built from the Laurent ring


def rank_over_fraction_field(rows: list[dict], ncols: int, ring: CoefficientRing) -> int:
    """Rank over ``k(t)`` of a rank-1 Laurent matrix given as sparse rows."""
    from .lattice import Character
    from .series import LocalFraction

    xi = Character([1])
    mat = [{j: LocalFraction.of(v, xi) for j, v in row.items() if v} for row in rows]
    return _rank_generic(mat, ncols, lambda a: a.inverse())


def _rank_generic(mat: list[dict], ncols: int, inverse) -> int:
    rank = 0
    rows = [dict(r) for r in mat if r]
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if col in rows[i]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = inverse(rows[rank][col])
        for i in range(len(rows)):
            if i != rank and col in rows[i]:
                f = rows[i][col] * inv
                new = dict(rows[i])
                for j, v in rows[rank].items():
                    w = new[j] - f * v if j in new else -(f * v)
                    if w:
                        new[j] = w
                    else:
                        new.pop(j, None)
                rows[i] = new
        rank += 1
    return rank


class NumberField:
    """``Q[t]/(m)`` for an irreducible ``m`` with ``m(0) != 0``."""

    def __init__(self, modulus: UPoly):
        if modulus.deg < 1:
            raise ValueError("modulus must have positive degree")
        if not modulus.evaluate(0):
            raise ValueError("t must be invertible modulo m")
        self.m = modulus.monic()
        g, s, _ = upoly_gcdex(UPoly([0, 1]), self.m)
        self.t_inv = s % self.m

    def image(self, a: GroupRingElem) -> "NFElem":
        qa = a.change_ring(QQ) if a.ring.kind == "Z" else a
        acc = UPoly([])
        for (e,), c in qa.items():
            base = UPoly([0, 1]) if e >= 0 else self.t_inv
            term = UPoly([1])
            for _ in range(abs(e)):
                term = (term * base) % self.m
            acc = acc + term * c
        return NFElem(acc % self.m, self)


class NFElem:
    __slots__ = ("p", "K")

    def __init__(self, p: UPoly, K: NumberField):
        self.p, self.K = p, K

    def __bool__(self) -> bool:
        return bool(self.p)

    def __mul__(self, o: "NFElem") -> "NFElem":
        return NFElem((self.p * o.p) % self.K.m, self.K)

    def __sub__(self, o: "NFElem") -> "NFElem":
        return NFElem(self.p - o.p, self.K)

    def __neg__(self) -> "NFElem":
        return NFElem(-self.p, self.K)

    def inverse(self) -> "NFElem":
        g, s, _ = upoly_gcdex(self.p, self.K.m)
        if g.deg != 0:
            raise ZeroDivisionError("not invertible; modulus is reducible")
        return NFElem(s % self.K.m, self.K)


def rank_over_number_field(rows: list[dict], ncols: int, K: NumberField) -> int:
    mat = [{j: K.image(v) for j, v in row.items() if v} for row in rows]
    mat = [{j: v for j, v in r.items() if v} for r in mat]
    return _rank_generic(mat, ncols, lambda a: a.inverse())


def matrix_rows(M: Matrix) -> list[dict]:
    rows = [dict() for _ in range(M.rows)]
    for (i, j), v in M.entries.items():
        rows[i][j] = v
    return rows


def in_image_over(M: Matrix, z: dict, rank_fn) -> bool:
    """Is column vector ``z`` in the column span of ``M`` over the field behind ``rank_fn``?"""
    base = rank_fn(matrix_rows(M.transpose()), M.rows)
    aug = matrix_rows(M.transpose()) + [dict(z)]
    return rank_fn(aug, M.rows) == base


# ---------------------------------------------------------------------------
# integer matrices


def integer_invariants(rows: list[dict], ncols: int) -> tuple[int, list[int]]:
    """Rank and the non-unit invariant factors of an integer matrix given as sparse rows."""
    rows = [{j: v for j, v in r.items() if v} for r in rows]
    rows = [r for r in rows if r]
    # unit pivots first: cheap and keeps the matrix sparse
    cols: dict = {}
    for i, r in enumerate(rows):
        for j in r:
            cols.setdefault(j, set()).add(i)
    alive = set(range(len(rows)))
    rank = 0
    progress = True
    while progress:
        progress = False
        best = None
        for i in alive:
            r = rows[i]
            for j, v in r.items():
                if v in (1, -1):
                    cost = (len(r) - 1) * (len(cols[j]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pi, pj = best
        prow = rows[pi]
        pv = prow[pj]
        for i in list(cols[pj]):
            if i == pi or i not in alive:
                continue
            f = rows[i][pj] * pv  # pv = +-1 so this is value / pv
            r = rows[i]
            for j, v in prow.items():
                w = r.get(j, 0) - f * v
                if w:
                    if j not in r:
                        cols.setdefault(j, set()).add(i)
                    r[j] = w
                else:
                    if j in r:
                        del r[j]
                        cols[j].discard(i)
        alive.discard(pi)
        for j in prow:
            cols[j].discard(pi)
        rank += 1
        progress = True
    rest = [rows[i] for i in sorted(alive) if rows[i]]
    if not rest:
        return rank, []
    used = sorted({j for r in rest for j in r})
    dense = [[r.get(j, 0) for j in used] for r in rest]
    diag = _dense_integer_smith(dense)
    factors = [abs(d) for d in diag if abs(d) != 1]
    return rank + len(diag), sorted(factors)


def _dense_integer_smith(A: list[list[int]]) -> list[int]:
    A = [row[:] for row in A]
    n = len(A)
    m = len(A[0]) if A else 0
    diag = []
    t = 0
    while t < min(n, m):
        piv = None
        for i in range(t, n):
            for j in range(t, m):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            for i in range(t + 1, n):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        A[t], A[i] = A[i], A[t]
                        done = False
            for j in range(t + 1, m):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        for row in A:
                            row[t], row[j] = row[j], row[t]
                        done = False
            if not done:
                continue
            bad = next((i for i in range(t + 1, n) for j in range(t + 1, m) if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^free_rank + sum Z/d``."""

    free_rank: int
    torsion: tuple

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def integer_homology(C: BasedFreeComplex) -> list[AbelianGroup]:
    """Homology of a complex of free abelian groups (deck rank 0, integer coefficients)."""
    if C.deck_rank != 0:
        raise ValueError("integer_homology expects deck rank 0")
    info = {}
    for i in range(1, C.top + 1):
        rows = [dict() for _ in range(C.rank(i - 1))]
        for (r, c), v in C.d(i).entries.items():
            rows[r][c] = int(v.coeff(()))
        info[i] = integer_invariants(rows, C.rank(i))
    out = []
    for i in range(C.top + 1):
        r_out = info[i][0] if i in info else 0
        r_in, tors = info.get(i + 1, (0, []))
        out.append(AbelianGroup(C.rank(i) - r_out - r_in, tuple(tors)))
    return out
