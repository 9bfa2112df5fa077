"""Finite models of infinite cyclic covers.

Two directions are implemented.

* :func:`finite_type_reduce` turns Sigma certificates for both directions of a
  deck-rank-1 complex into a finite complex ``D`` over the integers together
  with maps ``a: D -> C`` (inclusion), ``b: C -> D`` and a homotopy
  ``ab ~ id``.  The construction pushes basis elements towards the origin
  with a chain map ``psi ~ id`` and truncates at a radius.
* :func:`total_complex_assemble` builds the total complex ``TP`` and the map
  ``F: TP -> TE`` out of a finite model ``P``, a resolution ``E`` and homotopy
  data, with exact checks of the identities that make ``TP`` a complex and
  ``F`` a chain map.

Chains of the cover are sparse dicts ``{(q, index): int}`` meaning
``sum c * t^q x_index``.  Norms are measured on the closed support of a
basis element: ``t^q x`` covers ``q + S(x)`` where ``S(x)`` contains ``0``
and the translated supports of every cell in the boundary of ``x``, so the
boundary never leaves a ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .builders import elementary_change, random_pieces
from .chain import BasedFreeComplex, GradedMap, Matrix, chain_homotopy, chain_map, iterate_certificate, validate, verify_certificate
from .decide import Status, sigma_membership
from .lattice import ZZ, Character, GroupRingElem
from .laurent_pid import AbelianGroup, integer_homology


class MissingDirection(ValueError):
    """A direction of the sphere has no Sigma certificate."""

    def __init__(self, xi: Character, detail: str = ""):
        self.xi = xi
        super().__init__(f"no certificate for xi=({xi}){': ' + detail if detail else ''}")


class ConstantsInfeasible(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# sparse chains of the cover


def _columns(m: Matrix, ncols: int) -> list:
    cols = [[] for _ in range(ncols)]
    for (r, c), a in m.entries.items():
        for (g,), v in a.items():
            cols[c].append((r, g, v))
    return cols


def _apply(cols: list, chain: dict) -> dict:
    out: dict = {}
    for (q, j), c in chain.items():
        for r, g, a in cols[j]:
            key = (q + g, r)
            out[key] = out.get(key, 0) + c * a
    return {k: v for k, v in out.items() if v}


def _add(*chains, signs=None) -> dict:
    out: dict = {}
    for n, ch in enumerate(chains):
        s = 1 if signs is None else signs[n]
        for k, v in ch.items():
            out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v}


def _scaled(chain: dict, c: int) -> dict:
    return {k: c * v for k, v in chain.items()} if c != 1 else chain


class CoverGeometry:
    """Closed supports, norms and valuations for basis elements ``t^q x``."""

    def __init__(self, C: BasedFreeComplex):
        if C.deck_rank != 1:
            raise ValueError("cover geometry is implemented for deck rank 1")
        self.C = C
        self.dcols = {i: _columns(C.d(i), C.rank(i)) for i in range(1, C.top + 1)}
        clos = [[frozenset({0}) for _ in range(C.rank(0))]]
        for i in range(1, C.top + 1):
            row = []
            for j in range(C.rank(i)):
                s = {0}
                for r, g, _ in self.dcols[i][j]:
                    s.update(g + o for o in clos[i - 1][r])
                row.append(frozenset(s))
            clos.append(row)
        self.closure = clos
        self.lo = [[min(s) for s in row] for row in clos]
        self.hi = [[max(s) for s in row] for row in clos]

    def boundary(self, s: int, chain: dict) -> dict:
        if s == 0 or not chain:
            return {}
        return _apply(self.dcols[s], chain)

    def basis_norm(self, s: int, q: int, j: int) -> int:
        return max(abs(q + self.lo[s][j]), abs(q + self.hi[s][j]))

    def extreme_point(self, s: int, q: int, j: int) -> int:
        a, b = q + self.lo[s][j], q + self.hi[s][j]
        return b if abs(b) >= abs(a) else a

    def norm(self, s: int, chain: dict) -> int:
        return max((self.basis_norm(s, q, j) for q, j in chain), default=0)

    def valuation(self, s: int, chain: dict, sign: int):
        """``min sign * g`` over the closed support (``inf`` for the zero chain)."""
        if not chain:
            return math.inf
        if sign > 0:
            return min(q + self.lo[s][j] for q, j in chain)
        return min(-(q + self.hi[s][j]) for q, j in chain)

    def support(self, s: int, chain: dict) -> tuple[int, int] | None:
        if not chain:
            return None
        return min(q + self.lo[s][j] for q, j in chain), max(q + self.hi[s][j] for q, j in chain)

    def diam(self, s1: int, a: dict, s2: int, b: dict) -> int:
        sa, sb = self.support(s1, a), self.support(s2, b)
        if sa is None or sb is None:
            return 0
        return max(abs(sa[1] - sb[0]), abs(sb[1] - sa[0]))

    def ball(self, s: int, radius) -> list[tuple[int, int]]:
        """Basis elements of degree ``s`` with norm at most ``radius``, sorted."""
        R = math.floor(radius)
        out = []
        for j in range(self.C.rank(s)):
            for q in range(-R - self.hi[s][j], R - self.lo[s][j] + 1):
                if self.basis_norm(s, q, j) <= radius:
                    out.append((q, j))
        return sorted(out, key=lambda k: (k[1], k[0]))


# ---------------------------------------------------------------------------
# atlas


@dataclass
class AtlasEntry:
    """A cap of the sphere with a push map ``phi ~ id`` through ``homotopy``."""

    center: Character
    cos_bound: Fraction
    phi: GradedMap
    homotopy: GradedMap
    shift: int
    height: int
    iterations: int


@dataclass
class Atlas:
    entries: list
    r: int
    M: int
    L: int
    n: int

    def entry_for(self, sign: int) -> AtlasEntry:
        return next(e for e in self.entries if e.center.coefficients[0] == sign)


def _entry_constants(G: CoverGeometry, phi: GradedMap, H: GradedMap, sign: int, n: int):
    C = G.C
    shift, height, L = math.inf, -math.inf, 0
    for s in range(n + 1):
        pc = _columns(phi.at(s), C.rank(s))
        hc = _columns(H.at(s), C.rank(s))
        for j in range(C.rank(s)):
            x = {(0, j): 1}
            vx = G.valuation(s, x, sign)
            px, hx = _apply(pc, x), _apply(hc, x)
            if px:
                shift = min(shift, G.valuation(s, px, sign) - vx)
            if hx:
                height = max(height, vx - G.valuation(s + 1, hx, sign))
            L = max(L, G.diam(s, x, s, x), G.diam(s, x, s, px), G.diam(s, x, s + 1, hx))
    return shift, height, L


def assemble_atlas(C: BasedFreeComplex, n: int, certificates: dict, max_iterations: int = 256) -> Atlas:
    """Iterate the certificates for both directions until ``r > 3 M n``.

    ``certificates`` maps ``+1``/``-1`` (or the characters) to verified
    :class:`SigmaCertificate` objects for degree bound ``n``.
    """
    G = CoverGeometry(C)
    certs = {}
    for key, cert in certificates.items():
        sign = key.coefficients[0] if isinstance(key, Character) else int(key)
        certs[sign] = cert
    for sign in (1, -1):
        cert = certs.get(sign)
        if cert is None:
            raise MissingDirection(Character([sign]))
        if cert.k < n or not verify_certificate(cert).accepted:
            raise MissingDirection(Character([sign]), "certificate does not verify through degree n")
    base = {sign: certs[sign] for sign in (1, -1)}
    cur = dict(base)
    for m in range(1, max_iterations + 1):
        consts = {sign: _entry_constants(G, cur[sign].A, cur[sign].homotopy, sign, n) for sign in (1, -1)}
        r = min(c[0] for c in consts.values())
        M = max(1, max(c[1] for c in consts.values()))
        if r != math.inf and r > 3 * M * n:
            L = max(c[2] for c in consts.values())
            entries = [
                AtlasEntry(Character([sign]), Fraction(1), cur[sign].A, cur[sign].homotopy, consts[sign][0], consts[sign][1], m)
                for sign in (1, -1)
            ]
            return Atlas(entries, int(r), int(M), int(L), n)
        cur = {sign: iterate_certificate(base[sign], m + 1) for sign in (1, -1)}
    raise ConstantsInfeasible(f"r > 3Mn not reached after {max_iterations} iterations")


# ---------------------------------------------------------------------------
# pushing towards the origin


@dataclass
class PushConstants:
    r: Fraction
    M: Fraction
    A: Fraction
    A_prime: Fraction
    L_prime: Fraction


class PushMaps:
    """``psi ~ id`` through ``K`` with ``psi`` the identity on the ball of radius ``A``.

    Outside the ball a basis element is moved by the atlas entry whose push
    decreases its extreme coordinate: elements far on the positive side use
    the certificate of the negative direction and vice versa.
    """

    def __init__(self, C: BasedFreeComplex, atlas: Atlas, n: int, A: Fraction | None = None):
        self.C, self.atlas, self.n = C, atlas, n
        self.G = CoverGeometry(C)
        r, M, L = Fraction(atlas.r), Fraction(atlas.M), Fraction(atlas.L)
        L_prime = max(Fraction(3, 4) * r + L * L / r, L * L / M) + (2 * n + 1) * L
        A_prime = L_prime
        A_proof = A_prime + L_prime
        self.constants = PushConstants(r / 2 - Fraction(3, 2) * n * M, Fraction(3, 2) * M * (n + 1), A_proof if A is None else Fraction(A), A_prime, L_prime)
        self.A = self.constants.A
        self._cols = {}
        for e in atlas.entries:
            sign = e.center.coefficients[0]
            self._cols[sign] = (
                {s: _columns(e.phi.at(s), C.rank(s)) for s in range(n + 1)},
                {s: _columns(e.homotopy.at(s), C.rank(s)) for s in range(n + 1)},
            )
        self._psi: dict = {}
        self._K: dict = {}

    def cap(self, s: int, q: int, j: int) -> int:
        """Sign of the atlas entry used for ``t^q x_j``."""
        return -1 if self.G.extreme_point(s, q, j) >= 0 else 1

    def inside(self, s: int, q: int, j: int) -> bool:
        return self.G.basis_norm(s, q, j) <= self.A

    def psi_basis(self, s: int, q: int, j: int) -> dict:
        key = (s, q, j)
        if key not in self._psi:
            tx = {(q, j): 1}
            if self.inside(s, q, j):
                val = tx
            else:
                phi, H = self._cols[self.cap(s, q, j)]
                dtx = self.G.boundary(s, tx)
                val = _apply(phi[s], tx)
                if dtx:
                    val = _add(val, _apply(phi[s], self.K(s - 1, dtx)), _apply(H[s - 1], self.psi(s - 1, dtx)), signs=(1, -1, 1))
            self._psi[key] = val
        return self._psi[key]

    def K_basis(self, s: int, q: int, j: int) -> dict:
        key = (s, q, j)
        if key not in self._K:
            tx = {(q, j): 1}
            if self.inside(s, q, j):
                val = {}
            else:
                _, H = self._cols[self.cap(s, q, j)]
                dtx = self.G.boundary(s, tx)
                val = _apply(H[s], tx)
                if dtx:
                    val = _add(val, _apply(H[s], self.K(s - 1, dtx)), signs=(1, -1))
            self._K[key] = val
        return self._K[key]

    def psi(self, s: int, chain: dict) -> dict:
        return _add(*(_scaled(self.psi_basis(s, q, j), c) for (q, j), c in chain.items())) if chain else {}

    def K(self, s: int, chain: dict) -> dict:
        return _add(*(_scaled(self.K_basis(s, q, j), c) for (q, j), c in chain.items())) if chain else {}

    def psi_power(self, s: int, chain: dict, m: int) -> dict:
        for _ in range(m):
            chain = self.psi(s, chain)
        return chain


def push_maps(C: BasedFreeComplex, atlas: Atlas, n: int) -> PushMaps:
    return PushMaps(C, atlas, n)


# ---------------------------------------------------------------------------
# the domination


class Truncation:
    """``Phi`` and ``zeta = 1 - d Phi - Phi d`` built from the push maps."""

    def __init__(self, push: PushMaps):
        self.push = push
        self.G = push.G
        self.r = push.constants.r
        self.A = push.A
        self._Phi: dict = {}
        self._zeta: dict = {}

    def band(self, s: int, q: int, j: int) -> int:
        """``l`` with ``||tx||`` in ``(A + l r, A + (l+1) r]``; ``-1`` inside the ball."""
        nu = self.G.basis_norm(s, q, j)
        if nu <= self.A:
            return -1
        return math.ceil((nu - self.A) / self.r) - 1

    def Phi_basis(self, s: int, q: int, j: int) -> dict:
        key = (s, q, j)
        if key not in self._Phi:
            P, G = self.push, self.G
            l = self.band(s, q, j)
            tx = {(q, j): 1}
            pdt = self.Phi(s - 1, G.boundary(s, tx)) if s > 0 else {}
            terms = []
            cur, cur2 = tx, pdt
            for _ in range(l + 1):
                terms.append(P.K(s, cur))
                if cur2:
                    terms.append(_scaled(P.K(s, cur2), -1))
                cur = P.psi(s, cur)
                cur2 = P.psi(s, cur2) if cur2 else {}
            self._Phi[key] = _add(*terms) if terms else {}
        return self._Phi[key]

    def Phi(self, s: int, chain: dict) -> dict:
        if s < 0 or s > self.push.n or not chain:
            return {}
        return _add(*(_scaled(self.Phi_basis(s, q, j), c) for (q, j), c in chain.items()))

    def zeta_basis(self, s: int, q: int, j: int) -> dict:
        key = (s, q, j)
        if key not in self._zeta:
            tx = {(q, j): 1}
            G = self.G
            self._zeta[key] = _add(tx, G.boundary(s + 1, self.Phi(s, tx)), self.Phi(s - 1, G.boundary(s, tx)), signs=(1, -1, -1))
        return self._zeta[key]

    def zeta(self, s: int, chain: dict) -> dict:
        return _add(*(_scaled(self.zeta_basis(s, q, j), c) for (q, j), c in chain.items())) if chain else {}

    def zeta_recursive(self, s: int, q: int, j: int) -> dict:
        """``zeta`` from the closed recursion in terms of ``psi`` and ``K`` (a second route)."""
        P, G = self.push, self.G
        l = self.band(s, q, j)
        tx = {(q, j): 1}
        out = P.psi_power(s, tx, l + 1)
        if s > 0:
            dtx = G.boundary(s, tx)
            out = _add(out, _scaled(P.psi_power(s, self.Phi(s - 1, dtx), l + 1), -1))
            zd = _add(*(_scaled(self.zeta_recursive(s - 1, qq, jj), c) for (qq, jj), c in dtx.items())) if dtx else {}
            cur = zd
            for _ in range(l + 1):
                out = _add(out, P.K(s - 1, cur))
                cur = P.psi(s - 1, cur)
        return out


@dataclass
class DominationResult:
    """A finite complex ``D`` dominating the cover through degree ``n``.

    ``D`` has deck rank 0; its degree-``s`` basis is ``basis[s]``, a list of
    cover cells ``(q, index)``.  ``a`` is the inclusion, ``b = zeta`` and
    ``homotopy = Phi`` satisfies ``d Phi + Phi d = 1 - ab``.
    """

    complex: BasedFreeComplex
    D: BasedFreeComplex
    basis: list
    n: int
    constants: dict
    atlas: Atlas
    truncation: Truncation = field(repr=False)
    checks: dict = field(default_factory=dict)

    def a(self, s: int, vec: dict) -> dict:
        return {self.basis[s][i]: c for i, c in vec.items() if c}

    def b(self, s: int, chain: dict) -> dict:
        index = {cell: i for i, cell in enumerate(self.basis[s])}
        out = {}
        for cell, c in self.truncation.zeta(s, chain).items():
            if cell not in index:
                raise ArithmeticError(f"zeta left the finite model at {cell} in degree {s}")
            out[index[cell]] = c
        return out

    def homotopy(self, s: int, chain: dict) -> dict:
        return self.truncation.Phi(s, chain)

    def homology(self) -> list[AbelianGroup]:
        return integer_homology(self.D)

    def ranks(self) -> list[int]:
        return [len(b) for b in self.basis]


def _check(results: dict, name: str, ok: bool, detail: str = "") -> None:
    results[name] = {"ok": bool(ok), "detail": detail}


def verify_domination(res: DominationResult, radius=None, grid=(1, 2, 3)) -> dict:
    """Exact checks of the push-map and truncation properties on a finite ball of cells."""
    T = res.truncation
    P, G = T.push, T.G
    C, n = res.complex, res.n
    c = P.constants
    radius = Fraction(radius) if radius is not None else c.A + 4 * c.r
    out: dict = {}
    cells = {s: G.ball(s, radius) for s in range(n + 1)}

    # homotopy psi ~ id through K and chain-map property
    bad = None
    for s in range(n + 1):
        for q, j in cells[s]:
            tx = {(q, j): 1}
            lhs = _add(G.boundary(s + 1, P.K(s, tx)) if s < C.top else {}, P.K(s - 1, G.boundary(s, tx)) if s > 0 else {})
            if lhs != _add(tx, P.psi(s, tx), signs=(1, -1)):
                bad = bad or (s, q, j)
            if s > 0 and G.boundary(s, P.psi(s, tx)) != P.psi(s - 1, G.boundary(s, tx)):
                bad = bad or (s, q, j)
    _check(out, "push_homotopy", bad is None, "" if bad is None else f"fails at degree {bad[0]}, cell t^{bad[1]} x{bad[2]}")

    # pushing: identity inside, norm drop by r outside, K grows the norm by at most M
    bad = None
    for s in range(n + 1):
        for q, j in cells[s]:
            nu = G.basis_norm(s, q, j)
            tx = {(q, j): 1}
            p = P.psi(s, tx)
            if nu <= c.A:
                ok = p == tx
            else:
                ok = G.norm(s, p) <= nu - c.r
            ok = ok and G.norm(s + 1, P.K(s, tx)) <= nu + c.M
            if not ok:
                bad = bad or (s, q, j)
    _check(out, "pushin", bad is None, "" if bad is None else f"fails at degree {bad[0]}, cell t^{bad[1]} x{bad[2]}")

    # atlas pushes far out: norm drops by r/2, homotopy grows by at most 3M/2
    atlas = res.atlas
    r0, M0 = Fraction(atlas.r), Fraction(atlas.M)
    bad = None
    for s in range(n + 1):
        for q, j in cells[s]:
            nu = G.basis_norm(s, q, j)
            if nu <= c.A_prime:
                continue
            phi, H = P._cols[P.cap(s, q, j)]
            tx = {(q, j): 1}
            if G.norm(s, _apply(phi[s], tx)) > nu - r0 / 2 or G.norm(s + 1, _apply(H[s], tx)) > nu + Fraction(3, 2) * M0:
                bad = bad or (s, q, j)
    _check(out, "pusher", bad is None, "" if bad is None else f"fails at degree {bad[0]}, cell t^{bad[1]} x{bad[2]}")

    # reducer: ||psi^l z|| <= A + B when ||z|| <= A + l r + B
    bad = None
    for l in grid:
        for B in (Fraction(0), c.r / 2, c.r):
            bound = c.A + l * c.r + B
            for s in range(n + 1):
                for q, j in cells[s]:
                    if G.basis_norm(s, q, j) <= bound and G.norm(s, P.psi_power(s, {(q, j): 1}, l)) > c.A + B:
                        bad = bad or (l, B, s, q, j)
    _check(out, "reducer", bad is None, "" if bad is None else f"fails for l={bad[0]}, B={bad[1]} at degree {bad[2]}, cell t^{bad[3]} x{bad[4]}")

    # starstar: ||zeta z|| <= A + s M, and the two formulas for zeta agree
    bad, mismatch = None, None
    for s in range(n + 1):
        for q, j in cells[s]:
            z = T.zeta_basis(s, q, j)
            if G.norm(s, z) > c.A + s * c.M:
                bad = bad or (s, q, j)
            if z != T.zeta_recursive(s, q, j):
                mismatch = mismatch or (s, q, j)
    _check(out, "starstar", bad is None, "" if bad is None else f"fails at degree {bad[0]}, cell t^{bad[1]} x{bad[2]}")
    _check(out, "zeta_two_routes", mismatch is None, "" if mismatch is None else f"differ at degree {mismatch[0]}, cell t^{mismatch[1]} x{mismatch[2]}")

    # ab ~ id: d Phi + Phi d = 1 - ab on the ball, zeta a chain map landing in D
    bad = None
    for s in range(n + 1):
        for q, j in cells[s]:
            tx = {(q, j): 1}
            ab = res.a(s, res.b(s, tx))
            lhs = _add(G.boundary(s + 1, T.Phi(s, tx)) if s < C.top else {}, T.Phi(s - 1, G.boundary(s, tx)))
            if lhs != _add(tx, ab, signs=(1, -1)):
                bad = bad or (s, q, j)
            if s > 0 and G.boundary(s, ab) != T.zeta(s - 1, G.boundary(s, tx)):
                bad = bad or (s, q, j)
    _check(out, "ab_homotopic_to_id", bad is None, "" if bad is None else f"fails at degree {bad[0]}, cell t^{bad[1]} x{bad[2]}")
    out["radius"] = str(radius)
    return out


def finite_type_reduce(C: BasedFreeComplex, n: int | None = None, sublattice=None, certificates: dict | None = None, check: bool = True, radius=None) -> DominationResult:
    """Finite model of the infinite cyclic cover through degree ``n``.

    Only the flagship configuration is supported: deck rank 1 with
    ``sublattice`` trivial (``None``, ``0`` or ``[]``), integer coefficients.
    """
    if sublattice not in (None, 0, (), []):
        raise ValueError("only the trivial sublattice is supported (deck rank 1 covers)")
    if C.deck_rank != 1:
        raise ValueError("finite_type_reduce needs deck rank 1")
    if not validate(C).ok:
        raise ValueError("invalid complex")
    n = C.top if n is None else n
    if not 0 <= n <= C.top:
        raise ValueError(f"n must lie in 0..{C.top}")
    if certificates is None:
        certificates = {}
        for sign in (1, -1):
            v = sigma_membership(C, Character([sign]), n, retries=4)
            if v.status is not Status.YES:
                raise MissingDirection(Character([sign]), f"verdict {v.status.value}")
            certificates[sign] = v.certificate
    atlas = assemble_atlas(C, n, certificates)
    push = PushMaps(C, atlas, n)
    T = Truncation(push)
    k = push.constants
    R = k.A + n * k.M
    G = push.G
    basis = [G.ball(s, R) for s in range(n + 1)]
    index = [{cell: i for i, cell in enumerate(b)} for b in basis]
    bds = {}
    for s in range(1, n + 1):
        ent = {}
        for col, (q, j) in enumerate(basis[s]):
            for cell, c in G.boundary(s, {(q, j): 1}).items():
                ent[(index[s - 1][cell], col)] = GroupRingElem.constant(c, 0, ZZ)
        bds[s] = Matrix(len(basis[s - 1]), len(basis[s]), ent)
    labels = tuple(tuple(f"t^{q}*{_label(C, s, j)}" for q, j in b) for s, b in enumerate(basis))
    D = BasedFreeComplex(0, ZZ, tuple(len(b) for b in basis), bds, labels, f"{C.name or 'complex'}-finite-model")
    consts = {
        "r": str(k.r),
        "M": str(k.M),
        "A": str(k.A),
        "A_prime": str(k.A_prime),
        "L_prime": str(k.L_prime),
        "D_radius": str(R),
        "atlas_r": atlas.r,
        "atlas_M": atlas.M,
        "atlas_L": atlas.L,
        "iterations": [e.iterations for e in atlas.entries],
    }
    res = DominationResult(C, D, basis, n, consts, atlas, T)
    if check:
        res.checks = verify_domination(res, radius)
    return res


def _label(C: BasedFreeComplex, s: int, j: int) -> str:
    if C.labels and s < len(C.labels) and j < len(C.labels[s]):
        return str(C.labels[s][j])
    return f"e{s}_{j}"


# ---------------------------------------------------------------------------
# total complexes


def _kron_id(e: int, m: Matrix) -> Matrix:
    """``I_e (x) m`` as a block-diagonal matrix."""
    ent = {}
    for a in range(e):
        for (r, c), v in m.entries.items():
            ent[(a * m.rows + r, a * m.cols + c)] = v
    return Matrix(e * m.rows, e * m.cols, ent)


def _kron_right(dE: Matrix, n: int) -> Matrix:
    """``dE (x) I_n``."""
    ent = {}
    for (a, b), v in dE.entries.items():
        for i in range(n):
            ent[(a * n + i, b * n + i)] = v
    return Matrix(dE.rows * n, dE.cols * n, ent)


@dataclass
class AssemblyResult:
    TP: BasedFreeComplex
    TE: BasedFreeComplex
    F: GradedMap
    blocks_P: dict
    blocks_E: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


class ResolutionError(ValueError):
    pass


def check_resolution(E: BasedFreeComplex) -> None:
    """``E`` must be ``[R -u(t-1)-> R]`` with ``u`` a unit monomial (exact, resolving the integers)."""
    if E.deck_rank != 1 or tuple(E.ranks) != (1, 1):
        raise ResolutionError("resolution must have ranks (1, 1) over the deck-rank-1 ring")
    a = E.d(1).get(0, 0)
    one = GroupRingElem.one(1, E.ring)
    t = GroupRingElem.monomial((1,), 1, E.ring)
    if a is None or not a:
        raise ResolutionError("resolution boundary is zero")
    low = min(a.support())
    c = -a.coeff(low)
    if E.ring.is_unit(c) and GroupRingElem.monomial(low, c, E.ring) * (t - one) == a:
        return
    raise ResolutionError(f"resolution boundary {a} is not a unit multiple of t - 1")


def total_complex_assemble(P: BasedFreeComplex, E: BasedFreeComplex, C: BasedFreeComplex, f: dict, g: dict, L: dict, resolution: bool = True) -> AssemblyResult:
    """Assemble ``TP`` and ``F: TP -> TE`` from a finite model ``f: P -> C``.

    ``f``, ``g`` are per-degree matrices of mutually inverse homotopy
    equivalences and ``L`` satisfies ``dL + Ld = fg - 1`` on ``C``.  The
    block ``P_{p,q}`` is ``rank(E_p)`` copies of ``P_q``.  Every identity used
    by the construction is checked exactly; failures are listed in
    ``violations`` as ``(name, p, q, m)``.
    """
    if resolution:
        check_resolution(E)
    for X in (P, E, C):
        rep = validate(X)
        if not rep.ok:
            raise ValueError(f"invalid input complex: {rep.message}")
    pmax, qmax = E.top, max(P.top, C.top)
    one = C.one()
    e = [E.rank(p) for p in range(pmax + 1)]

    def rankP(p, q):
        return e[p] * P.rank(q) if 0 <= p <= pmax and 0 <= q <= qmax else 0

    def rankE(p, q):
        return e[p] * C.rank(q) if 0 <= p <= pmax and 0 <= q <= qmax else 0

    def mat(m: dict, q: int, rows: int, cols: int) -> Matrix:
        return m.get(q) or Matrix.zero(rows, cols)

    def fP(p, q):
        return _kron_id(e[p], mat(f, q, C.rank(q), P.rank(q)))

    def gP(p, q):
        return _kron_id(e[p], mat(g, q, P.rank(q), C.rank(q)))

    def LP(p, q):  # E_p (x) C_q -> E_p (x) C_{q+1}
        return _kron_id(e[p], mat(L, q, C.rank(q + 1), C.rank(q)))

    def dE(p, q):  # E_p (x) C_q -> E_{p-1} (x) C_q
        if p <= 0:
            return Matrix.zero(0, rankE(p, q))
        return _kron_right(E.d(p), C.rank(q))

    def bdP(p, q):
        return _kron_id(e[p], P.d(q)) if q >= 1 else Matrix.zero(0, rankP(p, q))

    def bdC(p, q):
        return _kron_id(e[p], C.d(q)) if q >= 1 else Matrix.zero(0, rankE(p, q))

    # F^k: P_{p,q} -> E_{p-k} (x) C_{q+k};  K^i: P_{p,q} -> P_{p-i, q-1+i}
    Fk: dict = {}
    Kk: dict = {}
    for p in range(pmax + 1):
        for q in range(qmax + 1):
            Fk[(0, p, q)] = fP(p, q)
            for k in range(1, p + 1):
                Fk[(k, p, q)] = LP(p - k, q + k - 1) @ dE(p - k + 1, q + k - 1) @ Fk[(k - 1, p, q)]
            Kk[(0, p, q)] = bdP(p, q)
            for i in range(1, p + 1):
                Kk[(i, p, q)] = gP(p - i, q - 1 + i) @ dE(p - i + 1, q - 1 + i) @ Fk[(i - 1, p, q)]

    def F_(k, p, q):
        if (k, p, q) in Fk:
            return Fk[(k, p, q)]
        return Matrix.zero(rankE(p - k, q + k), rankP(p, q))

    def K_(i, p, q):
        if (i, p, q) in Kk:
            return Kk[(i, p, q)]
        return Matrix.zero(rankP(p - i, q - 1 + i), rankP(p, q))

    violations = []
    for p in range(pmax + 1):
        for q in range(qmax + 1):
            if not (bdC(p, q) @ F_(0, p, q) == F_(0, p, q - 1) @ bdP(p, q)) and q >= 1:
                violations.append(("chainf", p, q, 0))
            for m in range(1, p + 1):
                sgn = -1 if m % 2 == 0 else 1  # (-1)^(m+1)
                lhs = bdC(p - m, q + m) @ F_(m, p, q)
                if q >= 1:
                    lhs = lhs + (F_(m, p, q - 1) @ bdP(p, q)).scale(sgn)
                rhs = Matrix.zero(rankE(p - m, q + m - 1), rankP(p, q))
                for k in range(m):
                    term = F_(k, p - m + k, q - 1 + m - k) @ K_(m - k, p, q)
                    rhs = rhs + (term if k % 2 == 0 else -term)
                rhs = rhs - dE(p - m + 1, q + m - 1) @ F_(m - 1, p, q)
                if not (lhs == rhs):
                    violations.append(("chainf", p, q, m))
            for m in range(0, p + 2):
                tot = Matrix.zero(rankP(p - m, q - 2 + m), rankP(p, q))
                for s in range(m + 1):
                    term = K_(m - s, p - s, q - 1 + s) @ K_(s, p, q)
                    tot = tot + (term if s % 2 == 0 else -term)
                if tot:
                    violations.append(("sumzero", p, q, m))

    # total complexes: offsets of the blocks inside each total degree
    top = pmax + qmax

    def layout(rank_fn):
        blocks, ranks = {}, []
        for k in range(top + 1):
            off = 0
            for p in range(pmax + 1):
                q = k - p
                if 0 <= q <= qmax:
                    blocks[(p, q)] = off
                    off += rank_fn(p, q)
            ranks.append(off)
        return blocks, ranks

    bP, rP = layout(rankP)
    bE, rE = layout(rankE)

    def place(target: dict, src_off, dst_off, m: Matrix, sign: int) -> None:
        for (r, c), v in m.entries.items():
            key = (dst_off + r, src_off + c)
            w = target.get(key)
            val = v if sign > 0 else -v
            w = val if w is None else w + val
            if w:
                target[key] = w
            else:
                target.pop(key, None)

    dTP, dTE, Fmap = {}, {}, {}
    for k in range(top + 1):
        tp, te, fm = {}, {}, {}
        for (p, q), off in bP.items():
            if p + q != k:
                continue
            sgn = 1 if p % 2 == 0 else -1
            for s in range(p + 1):
                tgt = (p - s, q - 1 + s)
                if tgt in bP and k >= 1:
                    place(tp, off, bP[tgt], K_(s, p, q), sgn)
            for kk in range(p + 1):
                tgt = (p - kk, q + kk)
                if tgt in bE:
                    place(fm, off, bE[tgt], F_(kk, p, q), 1 if kk % 2 == 0 else -1)
        for (p, q), off in bE.items():
            if p + q != k:
                continue
            sgn = 1 if p % 2 == 0 else -1
            if q >= 1:
                place(te, off, bE[(p, q - 1)], bdC(p, q), sgn)
            if p >= 1:
                place(te, off, bE[(p - 1, q)], dE(p, q), sgn)
        if k >= 1:
            dTP[k] = Matrix(rP[k - 1], rP[k], tp)
            dTE[k] = Matrix(rE[k - 1], rE[k], te)
        Fmap[k] = Matrix(rE[k], rP[k], fm)
    TP = BasedFreeComplex(P.deck_rank, P.ring, tuple(rP), dTP)
    TE = BasedFreeComplex(C.deck_rank, C.ring, tuple(rE), dTE)
    if not validate(TP).ok:
        violations.append(("delta_squared", None, None, None))
    F = chain_map(TP, TE, Fmap)
    if not F.commutes():
        violations.append(("F_chain_map", None, None, None))
    return AssemblyResult(TP, TE, F, bP, bE, violations)


def standard_resolution(ring=ZZ) -> BasedFreeComplex:
    one = GroupRingElem.one(1, ring)
    t = GroupRingElem.monomial((1,), 1, ring)
    return BasedFreeComplex(1, ring, (1, 1), {1: Matrix(1, 1, {(0, 0): t - one})}, (("e0",), ("e1",)), "resolution")


def random_assembly_instance(rng, max_rank: int = 3, top: int = 3, ring=ZZ):
    """``(P, C, f, g, L)`` with ``C`` = ``P`` plus contractible pieces, both under basis changes."""
    ranks_p, bds_p, _ = random_pieces(rng, 1, max_rank, top, ring)
    room = [max_rank - x for x in ranks_p]
    ranks_z = [0] * (top + 1)
    pieces_z = []  # (degree, position in C_i, position in C_{i-1}, unit)
    for _ in range(rng.randint(0, 3)):
        i = rng.randint(1, top)
        if ranks_z[i] < room[i] and ranks_z[i - 1] < room[i - 1]:
            u = GroupRingElem.monomial((rng.randint(-2, 2),), rng.choice([1, -1]), ring)
            pieces_z.append((i, ranks_z[i], ranks_z[i - 1], u))
            ranks_z[i] += 1
            ranks_z[i - 1] += 1
    one = GroupRingElem.one(1, ring)
    rc = [a + b for a, b in zip(ranks_p, ranks_z)]
    Pd = {i: Matrix(ranks_p[i - 1], ranks_p[i], e) for i, e in bds_p.items()}
    Cd, f, g, L = {}, {}, {}, {}
    for i in range(1, top + 1):
        ent = dict(Pd[i].entries)
        for deg, b, a, u in pieces_z:
            if deg == i:
                ent[(ranks_p[i - 1] + a, ranks_p[i] + b)] = u
        Cd[i] = Matrix(rc[i - 1], rc[i], ent)
    for i in range(top + 1):
        f[i] = Matrix(rc[i], ranks_p[i], {(j, j): one for j in range(ranks_p[i])})
        g[i] = Matrix(ranks_p[i], rc[i], {(j, j): one for j in range(ranks_p[i])})
        ent = {}
        if i < top:
            for deg, b, a, u in pieces_z:
                if deg == i + 1:
                    ent[(ranks_p[i + 1] + b, ranks_p[i] + a)] = -(u ** -1)
        L[i] = Matrix(rc[i + 1] if i < top else 0, rc[i], ent)
    P = BasedFreeComplex(1, ring, tuple(ranks_p), Pd)
    C = BasedFreeComplex(1, ring, tuple(rc), Cd)
    # perturb g and f by null-homotopic maps so that gf is only homotopic to 1
    eta = {i: _random_matrix(rng, ranks_p[i + 1], rc[i], ring) for i in range(top)}
    theta = {i: _random_matrix(rng, rc[i + 1], ranks_p[i], ring) for i in range(top)}
    g = {i: g[i] + _nullhomotopic(P, C, eta, i) for i in range(top + 1)}
    L = {i: L[i] + f[i + 1] @ eta[i] for i in range(top)}
    f = {i: f[i] + _nullhomotopic(C, P, theta, i) for i in range(top + 1)}
    L = {i: L[i] + theta[i] @ g[i] for i in range(top)}
    L[top] = Matrix.zero(0, rc[top])
    # random basis changes on both sides
    WP, WPi, WC, WCi = {}, {}, {}, {}
    for i in range(top + 1):
        WP[i], WPi[i] = elementary_change(rng, ranks_p[i], 1, ring)
        WC[i], WCi[i] = elementary_change(rng, rc[i], 1, ring)
    Pn = BasedFreeComplex(1, ring, P.ranks, {i: WP[i - 1] @ P.d(i) @ WPi[i] for i in range(1, top + 1)})
    Cn = BasedFreeComplex(1, ring, C.ranks, {i: WC[i - 1] @ C.d(i) @ WCi[i] for i in range(1, top + 1)})
    fn = {i: WC[i] @ f[i] @ WPi[i] for i in range(top + 1)}
    gn = {i: WP[i] @ g[i] @ WCi[i] for i in range(top + 1)}
    Ln = {i: WC[i + 1] @ L[i] @ WCi[i] for i in range(top)}
    Ln[top] = Matrix.zero(0, rc[top])
    return Pn, Cn, fn, gn, Ln


def _random_matrix(rng, rows: int, cols: int, ring) -> Matrix:
    from .builders import _random_laurent

    ent = {}
    for r in range(rows):
        for c in range(cols):
            if rng.random() < 0.4:
                ent[(r, c)] = _random_laurent(rng, 1, ring, terms=2, spread=1, coeff=2)
    return Matrix(rows, cols, ent)


def _nullhomotopic(target: BasedFreeComplex, source: BasedFreeComplex, h: dict, i: int) -> Matrix:
    """``d h + h d`` in degree ``i`` for ``h: source_i -> target_{i+1}``."""
    out = Matrix.zero(target.rank(i), source.rank(i))
    if i in h:
        out = out + target.d(i + 1) @ h[i]
    if i >= 1 and i - 1 in h:
        out = out + h[i - 1] @ source.d(i)
    return out
