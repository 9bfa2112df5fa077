"""Independent reference computations used to freeze expected values.

Nothing here imports the package's algebra: polynomials are sympy
expressions and words are plain strings, so agreement with the library is
a genuine cross-check.
"""

from __future__ import annotations

import itertools

import sympy as sp

t = sp.Symbol("t")


def parse_letters(word: str):
    out = []
    for tok in word.split():
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        else:
            out.append((tok, 1))
    return out


def fox_abelianized(word: str, gen: str, image: dict):
    """Fox derivative of ``word`` by ``gen`` with letters sent to powers of t.

    d(uv) = du + u dv, dx/dx = 1, dx^-1/dx = -x^-1.
    """
    prefix = sp.Integer(1)
    total = sp.Integer(0)
    for name, e in parse_letters(word):
        g = t ** image[name]
        if name == gen:
            total += prefix if e == 1 else -prefix / g
        prefix = prefix * (g if e == 1 else 1 / g)
    return sp.expand(total)


def presentation_matrices(gens, relators, image):
    d1 = [sp.expand(t ** image[g] - 1) for g in gens]
    d2 = [[fox_abelianized(r, g, image) for r in relators] for g in gens]
    return d1, d2


def alexander_from_relator_column(column):
    """gcd of the entries, normalized to a polynomial with positive lowest coefficient and t-order 0."""
    g = sp.Integer(0)
    for e in column:
        g = sp.gcd(g, sp.together(e * t**10).as_numer_denom()[0])
    p = sp.Poly(g, t)
    lowest = min(m[0] for m in p.monoms())
    p = sp.Poly(sp.expand(g / t**lowest), t)
    if p.all_coeffs()[-1] < 0:
        p = -p
    return p.as_expr()


def no_small_inverse(poly_coeffs, lo=-3, hi=2, bound=2) -> bool:
    """No Laurent polynomial q with exponents in [lo, hi] and |coeffs| <= bound has x*q == 1.

    ``poly_coeffs`` maps exponent -> integer coefficient.
    """
    exps = list(range(lo, hi + 1))
    for cs in itertools.product(range(-bound, bound + 1), repeat=len(exps)):
        if not any(cs):
            continue
        prod: dict = {}
        for e1, c1 in poly_coeffs.items():
            for e2, c2 in zip(exps, cs):
                if c2:
                    prod[e1 + e2] = prod.get(e1 + e2, 0) + c1 * c2
        if {e: c for e, c in prod.items() if c} == {0: 1}:
            return False
    return True


def series_inverse_at_infinity(expr, terms: int):
    """Expansion of 1/expr in powers of 1/t (the completion where t^-1 is small)."""
    u = sp.Symbol("u")
    f = sp.expand((1 / expr).subs(t, 1 / u))
    s = sp.series(f, u, 0, terms + 2).removeO()
    return sp.expand(s.subs(u, 1 / t))


def unit_lowest_annihilators(divisor_at: int, degree: int, bound: int):
    """Integer polynomials a (deg <= degree, |coeffs| <= bound, constant term +-1) with a(divisor_at) == 0.

    Annihilators of Z[t,t^-1]/(t - divisor_at) are exactly the multiples of
    t - divisor_at, i.e. those vanishing at that point.
    """
    found = []
    for cs in itertools.product(range(-bound, bound + 1), repeat=degree + 1):
        if cs[0] not in (1, -1):
            continue
        if sum(c * divisor_at**i for i, c in enumerate(cs)) == 0:
            found.append(cs)
    return found


def companion_group_rank(poly) -> int:
    """Z-rank of Z[t,t^-1]/(p) for p with unit end coefficients: its degree."""
    p = sp.Poly(poly, t)
    lead, const = p.all_coeffs()[0], p.all_coeffs()[-1]
    assert abs(lead) == 1 and abs(const) == 1
    return p.degree()


def circle_certificate_identity():
    """On Z[t] -(t-1)-> Z[t]: with A = t*id and h = -1 in degree 0,
    d h + h d = 1 - A in both degrees."""
    d1 = t - 1
    h0 = sp.Integer(-1)
    deg0 = sp.expand(d1 * h0 - (1 - t))
    deg1 = sp.expand(h0 * d1 - (1 - t))
    return deg0 == 0 and deg1 == 0
