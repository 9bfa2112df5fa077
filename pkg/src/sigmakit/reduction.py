"""Gaussian elimination of a based complex over the Novikov-localised ring.

Each cancellation removes a pair ``(x, y)`` with ``<dx, y>`` a unit and
updates the comparison maps ``f: C -> C'``, ``g: C' -> C`` and the homotopy
``h`` with ``dh + hd = 1 - gf``.  When no unit pivot exists, a bounded
Euclid-style search combines two entries of one row (or column) until their
lowest coefficient becomes a unit; those combinations are changes of basis and
leave ``h`` untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chain import BasedFreeComplex, Matrix
from .lattice import Character, GroupRingElem, psub, xi_spread
from .series import LocalFraction


@dataclass
class Elimination:
    """State and result of an elimination run.

    ``D[i]`` is the reduced boundary ``C'_i -> C'_{i-1}``; ``f``, ``g`` and
    ``h`` are keyed by degree and have entries in the localised ring.
    """

    complex: BasedFreeComplex
    xi: Character
    upto: int
    window: int
    ranks: list
    D: dict
    f: dict
    g: dict
    h: dict
    cancellations: int = 0
    basis_changes: int = 0
    exhausted: bool = False
    log: list = field(default_factory=list)

    def reduced_rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def contracted_through(self, k: int) -> bool:
        return all(self.reduced_rank(i) == 0 for i in range(k + 1))

    def d(self, i: int) -> Matrix:
        if i in self.D:
            return self.D[i]
        return Matrix.zero(self.reduced_rank(i - 1), self.reduced_rank(i))

    def h_at(self, i: int) -> Matrix:
        if i in self.h:
            return self.h[i]
        C = self.complex
        return Matrix.zero(C.rank(i + 1), C.rank(i))

    def diagnostics(self) -> dict:
        rest = {}
        for i, m in sorted(self.D.items()):
            if m.entries and i <= self.upto:
                rest[str(i)] = [f"({r},{c}): {v}" for (r, c), v in sorted(m.entries.items(), key=lambda kv: kv[0])]
        return {
            "window": self.window,
            "reduced_ranks": list(self.ranks),
            "remaining_entries": rest,
            "cancellations": self.cancellations,
            "basis_changes": self.basis_changes,
            "window_exhausted": self.exhausted,
        }


def default_window(C: BasedFreeComplex, xi: Character) -> int:
    spread = 0
    for m in C.boundaries.values():
        for v in m.entries.values():
            spread = max(spread, xi_spread(v, xi))
    return 64 * max(spread, 1)


def _drop_row(m: Matrix, r: int) -> Matrix:
    return Matrix._raw(m.rows - 1, m.cols, {((i if i < r else i - 1), j): v for (i, j), v in m.entries.items() if i != r})


def _drop_col(m: Matrix, c: int) -> Matrix:
    return Matrix._raw(m.rows, m.cols - 1, {(i, (j if j < c else j - 1)): v for (i, j), v in m.entries.items() if j != c})


def _add_row_multiple(m: Matrix, dst: int, src: int, mult) -> Matrix:
    """Row ``dst`` += ``mult`` * row ``src``."""
    out = dict(m.entries)
    for (i, j), v in m.entries.items():
        if i == src:
            key = (dst, j)
            prod = mult * v
            out[key] = out[key] + prod if key in out else prod
    return Matrix._raw(m.rows, m.cols, {k: v for k, v in out.items() if v})


def _add_col_multiple(m: Matrix, dst: int, src: int, mult) -> Matrix:
    """Column ``dst`` += column ``src`` * ``mult``."""
    out = dict(m.entries)
    for (i, j), v in m.entries.items():
        if j == src:
            key = (i, dst)
            prod = v * mult
            out[key] = out[key] + prod if key in out else prod
    return Matrix._raw(m.rows, m.cols, {k: v for k, v in out.items() if v})


class Eliminator:
    """Runs the elimination through degree ``upto`` (pairs ``(C_i, C_{i-1})`` with ``i <= upto + 1``)."""

    def __init__(self, C: BasedFreeComplex, xi: Character, upto: int, window: int | None = None, euclid: bool = True):
        if xi.rank != C.deck_rank:
            raise ValueError("character rank differs from the deck rank")
        self.C = C
        self.xi = xi
        self.upto = upto
        self.window = window if window is not None else default_window(C, xi)
        self.euclid = euclid
        one = LocalFraction.of(C.one(), xi)
        self.one = one
        self.state = Elimination(
            complex=C,
            xi=xi,
            upto=upto,
            window=self.window,
            ranks=list(C.ranks),
            D={i: C.d(i).map(lambda a: LocalFraction.of(a, xi)) for i in range(1, C.top + 1)},
            f={i: Matrix.identity(C.rank(i), one) for i in range(C.top + 1)},
            g={i: Matrix.identity(C.rank(i), one) for i in range(C.top + 1)},
            h={},
        )

    # -- pivots -----------------------------------------------------------------
    def _pivot_degrees(self) -> range:
        return range(1, min(self.upto + 1, self.C.top) + 1)

    def _find_unit_pivot(self):
        best = None
        for i in self._pivot_degrees():
            for (r, c), v in self.state.D[i].entries.items():
                if not v.is_unit():
                    continue
                key = (v.valuation(), len(v.num) + len(v.den), r, c, i)
                if best is None or key < best[0]:
                    best = (key, i, r, c)
        return None if best is None else best[1:]

    def _cancel(self, i: int, y: int, x: int) -> None:
        s = self.state
        D = s.D
        u = D[i].entries[(y, x)]
        uinv = u.inverse()
        beta = {c: v for (r, c), v in D[i].entries.items() if r == y and c != x}
        gamma = {r: v for (r, c), v in D[i].entries.items() if c == x and r != y}

        # boundary in degree i: delta - gamma u^-1 beta, then drop row y and column x
        out = dict(D[i].entries)
        for r, gv in gamma.items():
            left = gv * uinv
            for c, bv in beta.items():
                key = (r, c)
                prod = left * bv
                out[key] = out[key] - prod if key in out else -prod
        m = Matrix._raw(D[i].rows, D[i].cols, {k: v for k, v in out.items() if v})
        D[i] = _drop_col(_drop_row(m, y), x)
        if i + 1 in D:
            D[i + 1] = _drop_row(D[i + 1], x)
        if i - 1 in D:
            D[i - 1] = _drop_col(D[i - 1], y)

        f_lo, g_hi = s.f[i - 1], s.g[i]
        # homotopy: h_{i-1} += g_i[:, x] u^-1 f_{i-1}[y, :]
        gx = {r: v for (r, c), v in g_hi.entries.items() if c == x}
        fy = {c: v for (r, c), v in f_lo.entries.items() if r == y}
        h_old = s.h_at(i - 1)
        hout = dict(h_old.entries)
        for r, gv in gx.items():
            left = gv * uinv
            for c, fv in fy.items():
                key = (r, c)
                prod = left * fv
                hout[key] = hout[key] + prod if key in hout else prod
        s.h[i - 1] = Matrix._raw(h_old.rows, h_old.cols, {k: v for k, v in hout.items() if v})

        # f_{i-1}: rows r -= gamma_r u^-1 (row y); drop row y.  f_i: drop row x.
        fo = dict(f_lo.entries)
        for r, gv in gamma.items():
            left = gv * uinv
            for c, fv in fy.items():
                key = (r, c)
                prod = left * fv
                fo[key] = fo[key] - prod if key in fo else -prod
        s.f[i - 1] = _drop_row(Matrix._raw(f_lo.rows, f_lo.cols, {k: v for k, v in fo.items() if v}), y)
        s.f[i] = _drop_row(s.f[i], x)

        # g_i: columns c -= (column x) u^-1 beta_c; drop column x.  g_{i-1}: drop column y.
        go = dict(g_hi.entries)
        for c, bv in beta.items():
            right = uinv * bv
            for r, gv in gx.items():
                key = (r, c)
                prod = gv * right
                go[key] = go[key] - prod if key in go else -prod
        s.g[i] = _drop_col(Matrix._raw(g_hi.rows, g_hi.cols, {k: v for k, v in go.items() if v}), x)
        s.g[i - 1] = _drop_col(s.g[i - 1], y)

        s.ranks[i] -= 1
        s.ranks[i - 1] -= 1
        s.cancellations += 1
        s.log.append(("cancel", i, y, x))

    # -- basis changes --------------------------------------------------------------
    def _column_op(self, i: int, dst: int, src: int, mult) -> None:
        """New basis vector ``e_dst + mult * e_src`` in C'_i."""
        s = self.state
        s.D[i] = _add_col_multiple(s.D[i], dst, src, mult)
        if i + 1 in s.D:
            s.D[i + 1] = _add_row_multiple(s.D[i + 1], src, dst, -mult)
        s.f[i] = _add_row_multiple(s.f[i], src, dst, -mult)
        s.g[i] = _add_col_multiple(s.g[i], dst, src, mult)

    def _row_op(self, i: int, dst: int, src: int, mult) -> None:
        """Coordinates of C'_{i-1}: row ``dst`` += ``mult`` * row ``src``."""
        s = self.state
        s.D[i] = _add_row_multiple(s.D[i], dst, src, mult)
        if i - 1 in s.D:
            s.D[i - 1] = _add_col_multiple(s.D[i - 1], src, dst, -mult)
        s.f[i - 1] = _add_row_multiple(s.f[i - 1], dst, src, mult)
        s.g[i - 1] = _add_col_multiple(s.g[i - 1], src, dst, -mult)

    def _euclid_pair(self, a: LocalFraction, b: LocalFraction):
        """Plan combinations of ``a`` and ``b`` until one has a unit lowest coefficient.

        Returns a list of ``(target, multiplier)`` steps where target 0 means
        ``a += m*b`` and 1 means ``b += m*a``, or ``None`` if the window runs out.
        """
        xi = self.xi
        ring = self.C.ring
        start = min(a.valuation(), b.valuation())
        steps = []
        for _ in range(4 * self.window + 8):
            if not a or not b:
                return None
            if a.is_unit() or b.is_unit():
                return steps
            la, lb = a.lowest(), b.lowest()
            if la is None or lb is None:
                return None
            if max(a.valuation(), b.valuation()) > start + self.window:
                self.state.exhausted = True
                return None
            (ga, ca), (gb, cb) = la, lb
            big_first = abs(ca) >= abs(cb) if ring.kind == "Z" else a.valuation() <= b.valuation()
            if big_first:
                q = _quotient(ca, cb, ring)
                mult = GroupRingElem.monomial(psub(ga, gb), -q, ring)
                a = a + LocalFraction.of(mult, xi) * b
                steps.append((0, mult))
            else:
                q = _quotient(cb, ca, ring)
                mult = GroupRingElem.monomial(psub(gb, ga), -q, ring)
                b = b + LocalFraction.of(mult, xi) * a
                steps.append((1, mult))
        self.state.exhausted = True
        return None

    def _try_euclid(self) -> bool:
        xi = self.xi
        for i in self._pivot_degrees():
            m = self.state.D[i]
            rows: dict = {}
            cols: dict = {}
            for (r, c), v in sorted(m.entries.items()):
                rows.setdefault(r, []).append(c)
                cols.setdefault(c, []).append(r)
            for r, cs in sorted(rows.items()):
                for p in range(len(cs)):
                    for q in range(p + 1, len(cs)):
                        ca, cb = cs[p], cs[q]
                        plan = self._euclid_pair(m.entries[(r, ca)], m.entries[(r, cb)])
                        if plan:
                            for target, mult in plan:
                                lf = LocalFraction.of(mult, xi)
                                if target == 0:
                                    self._column_op(i, ca, cb, lf)
                                else:
                                    self._column_op(i, cb, ca, lf)
                                self.state.basis_changes += 1
                            self.state.log.append(("columns", i, ca, cb, len(plan)))
                            return True
            for c, rs in sorted(cols.items()):
                for p in range(len(rs)):
                    for q in range(p + 1, len(rs)):
                        ra, rb = rs[p], rs[q]
                        plan = self._euclid_pair(m.entries[(ra, c)], m.entries[(rb, c)])
                        if plan:
                            for target, mult in plan:
                                lf = LocalFraction.of(mult, xi)
                                if target == 0:
                                    self._row_op(i, ra, rb, lf)
                                else:
                                    self._row_op(i, rb, ra, lf)
                                self.state.basis_changes += 1
                            self.state.log.append(("rows", i, ra, rb, len(plan)))
                            return True
        return False

    def run(self) -> Elimination:
        while True:
            piv = self._find_unit_pivot()
            if piv is not None:
                self._cancel(*piv)
                continue
            if self.state.contracted_through(self.upto):
                break
            if not self.euclid or not self._try_euclid():
                break
        return self.state


def _quotient(a, b, ring):
    """Nearest-integer quotient over Z (so ``|a - q b| <= |b|/2``), exact over a field."""
    if ring.kind == "Z":
        q = a // b
        return min((q, q + 1), key=lambda x: (abs(a - x * b), abs(x)))
    return a * ring.inverse(b)


def eliminate(C: BasedFreeComplex, xi: Character, upto: int, window: int | None = None, euclid: bool = True) -> Elimination:
    return Eliminator(C, xi, upto, window, euclid).run()
