"""Constructors for based free complexes.

Presentation complexes use abelianized Fox derivatives; mapping tori are
built as the algebraic cone of ``t - f`` on a complex with trivial deck
action.  :func:`builtin` names the small library of examples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .chain import BasedFreeComplex, Matrix, validate
from .lattice import CoefficientRing, GroupRingElem, ZZ, padd, pneg


class PresentationError(ValueError):
    pass


Word = tuple  # tuple[(generator index, +1 | -1), ...]


def parse_word(text: str, generators: list[str]) -> Word:
    """Parse ``"t a t^-1 a^-2"`` (spaces optional) into a reduced letter sequence."""
    names = sorted(generators, key=len, reverse=True)
    pattern = re.compile("(" + "|".join(re.escape(n) for n in names) + r")(?:\^(-?\d+))?")
    s = text.replace(" ", "").replace("*", "")
    pos, letters = 0, []
    while pos < len(s):
        m = pattern.match(s, pos)
        if not m:
            raise PresentationError(f"cannot read relator {text!r} at position {pos}")
        power = int(m.group(2)) if m.group(2) else 1
        g = generators.index(m.group(1))
        letters.extend([(g, 1 if power > 0 else -1)] * abs(power))
        pos = m.end()
    return free_reduce(letters)


def free_reduce(letters) -> Word:
    out: list = []
    for g, e in letters:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


@dataclass
class PresentationInput:
    """Generators, relator words and an abelianization ``generator -> Z^r``."""

    generators: list
    relators: list
    assignment: dict
    ring: CoefficientRing = ZZ
    words: list = field(init=False)

    def __post_init__(self) -> None:
        self.generators = list(self.generators)
        if len(set(self.generators)) != len(self.generators):
            raise PresentationError("duplicate generator names")
        missing = [g for g in self.generators if g not in self.assignment]
        if missing:
            raise PresentationError(f"no lattice image for generators {missing}")
        images = [tuple(self.assignment[g]) for g in self.generators]
        ranks = {len(v) for v in images}
        if len(ranks) != 1:
            raise PresentationError("lattice images have different lengths")
        self.rank = ranks.pop()
        if self.rank < 1:
            raise PresentationError("deck rank must be at least 1")
        self.images = images
        self.words = [parse_word(r, self.generators) if isinstance(r, str) else free_reduce(r) for r in self.relators]
        for text, w in zip(self.relators, self.words):
            if self._image(w) != (0,) * self.rank:
                raise PresentationError(f"relator {text!r} does not map to zero in the lattice")
        if _lattice_rank(images, self.rank) != self.rank:
            raise PresentationError("generator images do not span a finite-index sublattice")

    def _image(self, word: Word):
        pt = (0,) * self.rank
        for g, e in word:
            pt = padd(pt, self.images[g] if e > 0 else pneg(self.images[g]))
        return pt


def _lattice_rank(vectors, r: int) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    for col in range(r):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def fox_derivative(p: PresentationInput, word: Word, gen: int) -> GroupRingElem:
    """Abelianized Fox derivative of ``word`` with respect to generator ``gen``."""
    out: dict = {}
    pt = (0,) * p.rank
    for g, e in word:
        if e > 0:
            if g == gen:
                out[pt] = out.get(pt, 0) + 1
            pt = padd(pt, p.images[g])
        else:
            pt = padd(pt, pneg(p.images[g]))
            if g == gen:
                out[pt] = out.get(pt, 0) - 1
    return GroupRingElem(out, p.ring, p.rank)


def presentation_complex(p: PresentationInput, name: str | None = None) -> BasedFreeComplex:
    n, m = len(p.generators), len(p.words)
    one = GroupRingElem.one(p.rank, p.ring)
    d1 = Matrix(1, n, {(0, j): GroupRingElem.monomial(p.images[j], 1, p.ring) - one for j in range(n)})
    d2 = Matrix(n, m, {(i, j): fox_derivative(p, w, i) for j, w in enumerate(p.words) for i in range(n)})
    labels = (("v",), tuple(p.generators), tuple(f"r{j + 1}" for j in range(m)))
    if m == 0:
        # no 2-cells: the presentation complex is a graph
        C = BasedFreeComplex(p.rank, p.ring, (1, n), {1: d1}, labels[:2], name)
    else:
        C = BasedFreeComplex(p.rank, p.ring, (1, n, m), {1: d1, 2: d2}, labels, name)
    report = validate(C)
    if not report.ok:
        raise PresentationError(f"Fox calculus produced an invalid complex: {report.message}")
    return C


# ---------------------------------------------------------------------------
# ground complexes and mapping tori


def ground_complex(ranks, boundaries: dict, ring: CoefficientRing = ZZ) -> BasedFreeComplex:
    """A complex over the coefficient ring itself (deck rank 0) from integer matrices."""
    bds = {}
    for i, rows in boundaries.items():
        mat = Matrix(ranks[i - 1], ranks[i], {(r, c): GroupRingElem.constant(v, 0, ring) for r, row in enumerate(rows) for c, v in enumerate(row) if v})
        bds[int(i)] = mat
    C = BasedFreeComplex(0, ring, tuple(ranks), bds)
    report = validate(C)
    if not report.ok:
        raise ValueError(report.message)
    return C


def mapping_torus(X: BasedFreeComplex, f: dict) -> BasedFreeComplex:
    """Cone of ``t - f`` on the induced complex: ``D_k = C_k + C_{k-1}``.

    ``f`` maps degree to an integer matrix (list of rows) or a :class:`Matrix`
    over the ground ring.  The boundary is
    ``d(x, y) = (dx + (-1)^(k-1) (t - f) y, dy)`` so that ``f = id`` gives the
    product with the circle.
    """
    if X.deck_rank != 0:
        raise ValueError("mapping_torus expects a complex with trivial deck action (deck rank 0)")
    ring = X.ring
    fm = {}
    for i in range(X.top + 1):
        m = f.get(i)
        if m is None:
            raise ValueError(f"map missing in degree {i}")
        if not isinstance(m, Matrix):
            m = Matrix(X.rank(i), X.rank(i), {(r, c): GroupRingElem.constant(v, 0, ring) for r, row in enumerate(m) for c, v in enumerate(row) if v})
        if m.shape != (X.rank(i), X.rank(i)):
            raise ValueError(f"map in degree {i} has shape {m.shape}")
        fm[i] = m
    for i in range(1, X.top + 1):
        if not (X.d(i) @ fm[i] == fm[i - 1] @ X.d(i)):
            raise ValueError(f"f is not a chain map (fails in degree {i})")

    def lift(a: GroupRingElem) -> GroupRingElem:
        return GroupRingElem.constant(a.coeff(()), 1, ring)

    t = GroupRingElem.monomial((1,), 1, ring)
    ranks = [X.rank(k) + X.rank(k - 1) for k in range(X.top + 2)]
    bds = {}
    for k in range(1, X.top + 2):
        ent = {}
        nk1 = X.rank(k - 1)  # rows: C_{k-1} then C_{k-2}
        nk = X.rank(k)  # cols: C_k then C_{k-1}
        for (r, c), a in X.d(k).entries.items():
            ent[(r, c)] = lift(a)
        sign = 1 if (k - 1) % 2 == 0 else -1
        for j in range(nk1):
            col = nk + j
            for r in range(nk1):
                v = (t if r == j else GroupRingElem.zero(1, ring)) - lift(fm[k - 1].get(r, j, GroupRingElem.zero(0, ring)))
                if v:
                    ent[(r, col)] = v.scale(sign)
        for (r, c), a in X.d(k - 1).entries.items():
            ent[(nk1 + r, nk + c)] = lift(a)
        bds[k] = Matrix(ranks[k - 1], ranks[k], ent)
    D = BasedFreeComplex(1, ring, tuple(ranks), bds)
    report = validate(D)
    if not report.ok:
        raise ValueError(f"mapping torus failed validation: {report.message}")
    return D


# ---------------------------------------------------------------------------
# named examples


BUILTIN_NAMES = ("circle", "torus", "wedge-s1-s2", "trefoil", "bs12")


def builtin(name: str, ring: CoefficientRing = ZZ) -> BasedFreeComplex:
    if name == "circle":
        p = PresentationInput(["x"], [], {"x": (1,)}, ring)
    elif name == "torus":
        p = PresentationInput(["x", "y"], ["x y x^-1 y^-1"], {"x": (1, 0), "y": (0, 1)}, ring)
    elif name == "trefoil":
        p = PresentationInput(["x", "y"], ["x y x y^-1 x^-1 y^-1"], {"x": (1,), "y": (1,)}, ring)
    elif name == "bs12":
        p = PresentationInput(["a", "t"], ["t a t^-1 a^-2"], {"a": (0,), "t": (1,)}, ring)
    elif name == "wedge-s1-s2":
        one = GroupRingElem.one(1, ring)
        t = GroupRingElem.monomial((1,), 1, ring)
        C = BasedFreeComplex(1, ring, (1, 1, 1), {1: Matrix(1, 1, {(0, 0): t - one}), 2: Matrix.zero(1, 1)}, (("v",), ("x",), ("s",)), name)
        return C
    else:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return presentation_complex(p, name)


# ---------------------------------------------------------------------------
# random complexes


def _random_laurent(rng, rank: int, ring: CoefficientRing, terms: int = 2, spread: int = 2, coeff: int = 3) -> GroupRingElem:
    out: dict = {}
    for _ in range(rng.randint(1, terms)):
        e = tuple(rng.randint(-spread, spread) for _ in range(rank))
        out[e] = out.get(e, 0) + rng.choice([c for c in range(-coeff, coeff + 1) if c])
    return GroupRingElem(out, ring, rank)


def _random_unit(rng, rank: int, ring: CoefficientRing) -> GroupRingElem:
    e = tuple(rng.randint(-2, 2) for _ in range(rank))
    return GroupRingElem.monomial(e, rng.choice([1, -1]), ring)


def elementary_change(rng, n: int, rank: int, ring: CoefficientRing, steps: int = 3):
    """A random invertible ``n x n`` matrix ``W`` and its inverse, as products of elementary moves."""
    one = GroupRingElem.one(rank, ring)
    W = Matrix.identity(n, one)
    Winv = Matrix.identity(n, one)
    for _ in range(steps if n else 0):
        if n >= 2 and rng.random() < 0.7:
            a, b = rng.sample(range(n), 2)
            c = _random_laurent(rng, rank, ring, terms=1, spread=1, coeff=2)
            E = Matrix.identity(n, one) + Matrix(n, n, {(a, b): c})
            Einv = Matrix.identity(n, one) - Matrix(n, n, {(a, b): c})
        else:
            a = rng.randrange(n)
            u = _random_unit(rng, rank, ring)
            E = Matrix(n, n, {**{(i, i): one for i in range(n) if i != a}, (a, a): u})
            Einv = Matrix(n, n, {**{(i, i): one for i in range(n) if i != a}, (a, a): u ** -1})
        W, Winv = E @ W, Winv @ Einv
    return W, Winv


def change_basis(C: BasedFreeComplex, W: dict, Winv: dict) -> BasedFreeComplex:
    """The complex with boundaries ``W_{i-1} d_i W_i^{-1}``."""
    bds = {i: W[i - 1] @ C.d(i) @ Winv[i] for i in range(1, C.top + 1)}
    return BasedFreeComplex(C.deck_rank, C.ring, C.ranks, bds, None, C.name)


def random_pieces(rng, deck_rank: int, max_rank: int, top: int, ring: CoefficientRing = ZZ, contractible: bool = False):
    """Direct sum of random two-term pieces ``[R -a-> R]`` and free singletons.

    Returns ``(ranks, boundaries, pieces)`` where each piece is
    ``(kind, degree, positions, element)``.  With ``contractible`` every piece
    is a two-term piece whose element is a unit monomial.
    """
    ranks = [0] * (top + 1)
    bds = {i: {} for i in range(1, top + 1)}
    pieces = []
    for _ in range(rng.randint(0, 2 * max_rank)):
        if top >= 1 and (contractible or rng.random() < 0.6):
            i = rng.randint(1, top)
            if ranks[i] >= max_rank or ranks[i - 1] >= max_rank:
                continue
            a = _random_unit(rng, deck_rank, ring) if contractible else _random_laurent(rng, deck_rank, ring)
            bds[i][(ranks[i - 1], ranks[i])] = a
            pieces.append(("pair", i, (ranks[i], ranks[i - 1]), a))
            ranks[i] += 1
            ranks[i - 1] += 1
        elif not contractible:
            i = rng.randint(0, top)
            if ranks[i] >= max_rank:
                continue
            pieces.append(("free", i, (ranks[i],), None))
            ranks[i] += 1
    return ranks, bds, pieces


def random_complex(rng, deck_rank: int = 1, max_rank: int = 4, top: int = 3, ring: CoefficientRing = ZZ) -> BasedFreeComplex:
    """A valid random complex: random pieces under random unimodular basis changes."""
    ranks, bds, _ = random_pieces(rng, deck_rank, max_rank, top, ring)
    C = BasedFreeComplex(deck_rank, ring, tuple(ranks), {i: Matrix(ranks[i - 1], ranks[i], e) for i, e in bds.items()})
    W, Winv = {}, {}
    for i in range(top + 1):
        W[i], Winv[i] = elementary_change(rng, ranks[i], deck_rank, ring)
    return change_basis(C, W, Winv)
