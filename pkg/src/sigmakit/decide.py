"""Sigma-invariant membership, movability, scans and report promotion.

Decision layers:

``L1``  deck rank 1, field coefficients.  Novikov homology vanishes through
        degree ``k`` exactly when every ``H_i`` (``i <= k``) over the Laurent
        PID is torsion.
``L2``  deck rank 1, integer coefficients.  Elimination over the localised
        ring gives Yes with a certificate; a class surviving over ``Q(t)``, or
        over ``Q[t]/(m)`` for an ``m`` whose end coefficient is divisible by a
        prime, gives a checked No; anything else is Undecided.
``L3``  any deck rank.  Elimination only: Yes with a certificate or Undecided.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import sympy

from .chain import (
    BasedFreeComplex,
    Matrix,
    SigmaCertificate,
    chain_homotopy,
    chain_map,
    standard_valuation,
    tensor_coefficients,
    validate,
    verify_certificate,
)
from .lattice import GF, QQ, Character, CoefficientRing, GroupRingElem, pneg, xi_eval
from .laurent_pid import (
    NumberField,
    canonical,
    homology_lambda,
    in_image_over,
    rank_over_fraction_field,
    rank_over_number_field,
)
from .reduction import Elimination, default_window, eliminate
from .series import LocalFraction, truncate_below, unit_lowest
from .upoly import UPoly, from_laurent, rational_to_integer_poly


class Status(str, Enum):
    YES = "Yes"
    NO = "No"
    UNDECIDED = "Undecided"


class NotInSigma(Exception):
    """Raised when a contraction is requested for a direction outside the invariant."""


# ---------------------------------------------------------------------------
# witnesses


@dataclass
class NoWitness:
    """A cycle whose class survives in a field that receives the Novikov ring.

    ``field == "fraction"``: the class is nonzero over ``k(t)`` (``k`` = Q or
    F_p), which the completion contains.  With ``coefficients == "Fp:p"`` on
    an integer complex the cycle is read mod ``p``: a contraction over the
    integer completion would reduce to one over ``F_p((t))``.

    ``field == "number_field"``: the class is nonzero over ``Q[t]/(modulus)``
    where ``modulus`` is irreducible and ``prime`` divides its xi-lowest
    coefficient; sending ``t`` to a root of small p-adic size (large, for the
    opposite direction) defines a ring map out of the completion.
    """

    degree: int
    cycle: dict
    field: str
    coefficients: str
    modulus: GroupRingElem | None = None
    prime: int | None = None
    note: str = ""


def _common_denominator(vec: dict):
    """``(den, {j: num_j})`` with ``vec[j] = num_j / den`` for LocalFraction entries."""
    dens: list = []
    for v in vec.values():
        if not any(v.den == d for d in dens):
            dens.append(v.den)
    den = dens[0]
    for d in dens[1:]:
        den = den * d
    out = {}
    for j, v in vec.items():
        mult = None
        skipped = False
        for d in dens:
            if not skipped and d == v.den:
                skipped = True
                continue
            mult = d if mult is None else mult * d
        out[j] = v.num if mult is None else v.num * mult
    return den, out


def _clear_denominators(vec: dict) -> dict:
    """Scale a vector of LocalFractions to polynomial entries (integral ones over Q)."""
    _, out = _common_denominator(vec)
    ring = next(iter(out.values())).ring
    if ring.kind == "Q":
        scale = 1
        for v in out.values():
            for _, c in v.items():
                scale = math.lcm(scale, Fraction(c).denominator)
        out = {j: v.scale(scale) for j, v in out.items()}
    return out


def _apply(M: Matrix, vec: dict) -> dict:
    return M.apply(vec)


def verify_no_witness(C: BasedFreeComplex, xi: Character, k: int, w: NoWitness) -> tuple[bool, str]:
    """Independent check of a No witness; returns ``(ok, reason)``."""
    if C.deck_rank != 1:
        return False, "negative answers are only certified for deck rank 1"
    if not 0 <= w.degree <= k:
        return False, f"witness degree {w.degree} outside 0..{k}"
    if not w.cycle:
        return False, "the zero chain is not a witness"
    for j, v in w.cycle.items():
        if not isinstance(v, GroupRingElem) or v.ring != C.ring or v.rank != 1 or not 0 <= j < C.rank(w.degree):
            return False, "cycle entries must be group ring elements of the complex"
    d_next = C.d(w.degree + 1)
    if w.field == "fraction":
        if w.coefficients.startswith("Fp"):
            # class over F_p(t): Z((t)) and F_p((t)) both map into it only for integer or matching mod-p complexes
            if w.prime is None or not sympy.isprime(w.prime) or C.ring.kind == "Q" or (C.ring.kind == "Fp" and C.ring.p != w.prime):
                return False, "mod-p witness needs integer (or matching F_p) coefficients and a prime"
            field_ring = GF(w.prime)
        else:
            field_ring = C.ring if C.ring.is_field else QQ
        z = {j: v.change_ring(field_ring) for j, v in w.cycle.items()}
        z = {j: v for j, v in z.items() if v}
        if not z:
            return False, "the chain vanishes after changing coefficients"
        if C.d(w.degree).map(lambda a: a.change_ring(field_ring)).apply(z):
            return False, "the chain is not a cycle"
        M = d_next.map(lambda a: a.change_ring(field_ring))
        if in_image_over(M, z, lambda rows, n: rank_over_fraction_field(rows, n, field_ring)):
            return False, "the class vanishes over the fraction field"
        return True, f"nonzero over {field_ring}(t)"
    if _apply(C.d(w.degree), w.cycle):
        return False, "the chain is not a cycle"
    if w.field == "number_field":
        if C.ring.kind != "Z":
            return False, "number-field witnesses are for integer complexes"
        m, p = w.modulus, w.prime
        if m is None or p is None or not sympy.isprime(p):
            return False, "missing modulus or prime"
        shift, poly = from_laurent(m, QQ)
        coeffs = rational_to_integer_poly(poly)
        if [int(c) for c in poly.c] != coeffs and [-int(c) for c in poly.c] != coeffs:
            return False, "modulus must be a primitive integer polynomial"
        if not sympy.Poly(list(reversed(coeffs)), sympy.Symbol("t")).is_irreducible:
            return False, "modulus is reducible"
        end = coeffs[0] if xi.coefficients[0] > 0 else coeffs[-1]
        if end % p:
            return False, f"{p} does not divide the xi-lowest coefficient of the modulus"
        K = NumberField(poly)
        if in_image_over(d_next, w.cycle, lambda rows, n: rank_over_number_field(rows, n, K)):
            return False, "the class vanishes over the number field"
        return True, "nonzero over Q[t]/(m) with a p-adic root of the right size"
    return False, f"unknown witness field {w.field!r}"


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class SigmaVerdict:
    xi: Character
    k: int
    ring: CoefficientRing
    status: Status
    layer: str
    certificate: SigmaCertificate | None = None
    witness: NoWitness | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def key(self) -> str:
        return f"xi=({self.xi})|k={self.k}|{self.ring}"


def build_contraction(C: BasedFreeComplex, xi: Character, k: int, elimination: Elimination | None = None, cut: int = 1, window=None) -> SigmaCertificate:
    """Cut off the elimination's contraction to a polynomial certificate.

    The homotopy keeps the series terms of ``h`` that lie below
    ``v(x) + cut`` for the standard valuation; ``A = 1 - dh' - h'd`` through
    degree ``k`` then raises valuations by at least ``cut``.
    """
    E = elimination or eliminate(C, xi, k, window)
    if not E.contracted_through(k):
        raise NotInSigma(f"no contraction through degree {k} for xi=({xi})")
    val = standard_valuation(C, xi)
    hbar = {}
    for i in range(min(k, C.top) + 1):
        h = E.h_at(i)
        ent = {}
        for (r, c), v in h.entries.items():
            bound = val.basis(i, c) + cut - val.basis(i + 1, r)
            ent[(r, c)] = truncate_below(v.expand(bound), xi, bound)
        hbar[i] = Matrix(C.rank(i + 1), C.rank(i), ent)
    H = chain_homotopy(C, C, hbar)
    A = {}
    for i in range(C.top + 1):
        m = C.identity(i)
        if i <= k:
            m = m - C.d(i + 1) @ H.at(i)
        if 1 <= i <= k + 1:
            m = m - H.at(i - 1) @ C.d(i)
        A[i] = m
    amap = chain_map(C, C, A)
    probe = SigmaCertificate(C, xi, k, Fraction(cut), amap, H)
    from .chain import certificate_shift

    shift, _ = certificate_shift(probe)
    if shift == math.inf:
        eps = Fraction(cut)
    else:
        eps = Fraction(shift)
    if eps <= 0:
        raise ArithmeticError("cut-off produced a non-positive shift")
    cert = SigmaCertificate(C, xi, k, eps, amap, H)
    check = verify_certificate(cert)
    if not check.accepted:
        raise ArithmeticError(f"internal error: certificate rejected ({check.reason})")
    return cert


def _field_witness(C: BasedFreeComplex, E: Elimination, k: int) -> NoWitness | None:
    for j in range(k + 1):
        if E.reduced_rank(j) == 0:
            continue
        gj = E.g[j]
        for col in range(E.reduced_rank(j)):
            vec = gj.column(col)
            if not vec:
                continue
            cyc = _clear_denominators(vec)
            w = NoWitness(j, cyc, "fraction", str(C.ring))
            if verify_no_witness(C, E.xi, k, w)[0]:
                return w
    return None


def _padic_witness(CZ: BasedFreeComplex, xi: Character, k: int) -> NoWitness | None:
    CQ = tensor_coefficients(CZ, QQ)
    hl = homology_lambda(CQ)
    tsym = sympy.Symbol("t")
    for j in range(k + 1):
        H = hl[j]
        for d, gen in zip(H.torsion, H.torsion_generators):
            _, poly = from_laurent(d)
            ints = rational_to_integer_poly(poly)
            _, factors = sympy.factor_list(sympy.Poly(list(reversed(ints)), tsym))
            for fac, _mult in factors:
                coeffs = [int(c) for c in reversed(fac.all_coeffs())]
                if len(coeffs) < 2:
                    continue
                end = coeffs[0] if xi.coefficients[0] > 0 else coeffs[-1]
                if abs(end) == 1:
                    continue
                p = min(sympy.primefactors(end))
                modulus = GroupRingElem({(i,): c for i, c in enumerate(coeffs) if c}, CZ.ring, 1)
                scale = 1
                for v in gen.values():
                    for _, c in v.items():
                        scale = math.lcm(scale, Fraction(c).denominator)
                cyc = {r: GroupRingElem({e: Fraction(c) * scale for e, c in v.items()}, CZ.ring, 1) for r, v in gen.items()}
                w = NoWitness(j, cyc, "number_field", "Q", modulus, p, f"t -> root of {modulus} with |t|_{p} {'<' if xi.coefficients[0] > 0 else '>'} 1")
                if verify_no_witness(CZ, xi, k, w)[0]:
                    return w
    return None


def sigma_membership(
    C: BasedFreeComplex,
    xi: Character,
    k: int,
    ring: CoefficientRing | None = None,
    window: int | None = None,
    retries: int = 0,
) -> SigmaVerdict:
    """Decide whether ``xi`` lies in the homological invariant through degree ``k``."""
    report = validate(C)
    if not report.ok:
        raise ValueError(f"invalid complex: {report.message}")
    if xi.rank != C.deck_rank:
        raise ValueError("character rank differs from the deck rank")
    if k < 0:
        raise ValueError("k must be nonnegative")
    ring = ring or C.ring
    C = tensor_coefficients(C, ring)
    requested = k
    k = min(k, C.top)
    window = window or default_window(C, xi)
    note = {} if requested == k else {"clamped_from": requested}

    if C.deck_rank == 1 and ring.is_field:
        hl = homology_lambda(C)
        yes = all(hl[i].is_torsion for i in range(k + 1))
        E = eliminate(C, xi, k, window)
        if yes != E.contracted_through(k):
            raise ArithmeticError("internal error: Smith form and elimination disagree")
        diag = {"homology": [_module_summary(h) for h in hl[: k + 1]], **note}
        if yes:
            return SigmaVerdict(xi, k, ring, Status.YES, "L1", build_contraction(C, xi, k, E), diagnostics=diag)
        w = _field_witness(C, E, k)
        if w is None:
            raise ArithmeticError("internal error: no witness for a non-torsion class")
        return SigmaVerdict(xi, k, ring, Status.NO, "L1", witness=w, diagnostics=diag)

    layer = "L2" if C.deck_rank == 1 else "L3"
    searched = False
    attempts = 0
    while True:
        E = eliminate(C, xi, k, window)
        if E.contracted_through(k):
            return SigmaVerdict(xi, k, ring, Status.YES, layer, build_contraction(C, xi, k, E), diagnostics={"window": window, **note})
        if C.deck_rank == 1 and not searched:
            searched = True
            w = _integer_no_witness(C, xi, k, E)
            if w is not None:
                return SigmaVerdict(xi, k, ring, Status.NO, layer, witness=w, diagnostics={**E.diagnostics(), **note})
        if attempts >= retries:
            return SigmaVerdict(xi, k, ring, Status.UNDECIDED, layer, diagnostics={**E.diagnostics(), "attempts": attempts + 1, **note})
        attempts += 1
        window *= 2


def _integer_no_witness(C: BasedFreeComplex, xi: Character, k: int, E: Elimination | None = None) -> NoWitness | None:
    q = sigma_membership(C, xi, k, QQ)
    if q.status is Status.NO:
        w = q.witness
        cyc = {j: v.change_ring(C.ring) for j, v in w.cycle.items()}
        zw = NoWitness(w.degree, cyc, "fraction", "Q", note="class is not torsion over Q(t)")
        ok, why = verify_no_witness(C, xi, k, zw)
        if not ok:
            raise ArithmeticError(f"internal error: rational witness rejected ({why})")
        return zw
    return _padic_witness(C, xi, k) or _modp_witness(C, xi, k, E)


def _candidate_primes(C: BasedFreeComplex, E: Elimination | None, k: int) -> list[int]:
    """Primes dividing coefficients of the stuck entries (or, failing that, of the boundaries)."""
    coeffs: set = set()
    if E is not None:
        for i, m in E.D.items():
            if i <= k + 1:
                for v in m.entries.values():
                    for part in (v.num, v.den):
                        coeffs.update(abs(int(c)) for _, c in part.items())
    if not coeffs:
        for m in C.boundaries.values():
            for v in m.entries.values():
                coeffs.update(abs(int(c)) for _, c in v.items())
    primes: set = set()
    for c in coeffs:
        if c > 1:
            primes.update(sympy.primefactors(c))
    return sorted(primes)


def _modp_witness(C: BasedFreeComplex, xi: Character, k: int, E: Elimination | None) -> NoWitness | None:
    """A class surviving over F_p(t); the completion maps to F_p((t)), so vanishing over Z would survive reduction."""
    for p in _candidate_primes(C, E, k):
        v = sigma_membership(C, xi, k, GF(p))
        if v.status is not Status.NO:
            continue
        cyc = {j: GroupRingElem({e: int(c) for e, c in val.items()}, C.ring, 1) for j, val in v.witness.cycle.items()}
        w = NoWitness(v.witness.degree, cyc, "fraction", f"Fp:{p}", prime=p, note=f"class is not torsion over F_{p}(t)")
        if verify_no_witness(C, xi, k, w)[0]:
            return w
    return None


def _module_summary(h) -> dict:
    return {"degree": h.degree, "free_rank": h.free_rank, "torsion": [str(d) for d in h.torsion]}


# ---------------------------------------------------------------------------
# movability


class Movability(str, Enum):
    MOVABLE = "Movable"
    NOT_MOVABLE = "NotMovable"
    UNDECIDED = "Undecided"


@dataclass
class MovabilityResult:
    status: Movability
    delta: GroupRingElem | None = None
    filling: dict | None = None
    reason: str = ""

    def check(self, C: BasedFreeComplex, q: int, z: dict) -> bool:
        """Exact re-check of ``d(filling) = delta * z`` for a Movable answer."""
        if self.status is not Movability.MOVABLE:
            return False
        lhs = C.d(q + 1).apply(self.filling or {})
        rhs = {j: self.delta * v for j, v in z.items() if v}
        return _vec_eq(lhs, {j: v for j, v in rhs.items() if v})


def _vec_eq(a: dict, b: dict) -> bool:
    keys = set(a) | set(b)
    return all(a.get(k) is not None and b.get(k) is not None and a[k] == b[k] for k in keys)


def _solve_with(C: BasedFreeComplex, xi: Character, q: int, z: dict, window=None) -> MovabilityResult | None:
    E = eliminate(C, xi, q, window)
    lz = {j: LocalFraction.of(v, xi) for j, v in z.items()}
    if E.f[q].apply(lz):
        return None
    w = E.h_at(q).apply(lz)
    one = C.one()
    if not w:
        return MovabilityResult(Movability.MOVABLE, one, {}, "z is already zero")
    den, filling = _common_denominator(w)
    g, c = unit_lowest(den, xi)
    fix = GroupRingElem.monomial(pneg(g), C.ring.inverse(c), C.ring)
    delta = den * fix
    filling = {j: v * fix for j, v in filling.items()}
    return MovabilityResult(Movability.MOVABLE, delta, filling, "z is a boundary over the localised ring")


def movable_to_infinity(C: BasedFreeComplex, q: int, z: dict, xi: Character, ring: CoefficientRing | None = None, window=None) -> MovabilityResult:
    """Is the class of the cycle ``z`` in degree ``q`` movable to infinity for ``xi``?

    Movable answers carry ``delta`` with xi-lowest coefficient 1 and a chain
    ``filling`` with ``d(filling) = delta * z``.
    """
    ring = ring or C.ring
    C = tensor_coefficients(C, ring)
    z = {j: v.change_ring(ring) for j, v in z.items() if v}
    if C.d(q).apply(z):
        raise ValueError("z is not a cycle")
    if not z:
        return MovabilityResult(Movability.MOVABLE, C.one(), {}, "z = 0")
    res = _solve_with(C, xi, q, z, window)
    if res is not None:
        if not res.check(C, q, z):
            raise ArithmeticError("internal error: filling does not bound delta*z")
        return res
    if C.deck_rank != 1:
        return MovabilityResult(Movability.UNDECIDED, reason="no filling found over the localised ring; deck rank > 1 has no negative test")
    field_ring = ring if ring.is_field else QQ
    CF = tensor_coefficients(C, field_ring)
    zf = {j: v.change_ring(field_ring) for j, v in z.items()}
    if not in_image_over(CF.d(q + 1), zf, lambda rows, n: rank_over_fraction_field(rows, n, field_ring)):
        return MovabilityResult(Movability.NOT_MOVABLE, reason=f"class is not torsion over {field_ring}(t)")
    if ring.is_field:
        raise ArithmeticError("internal error: torsion class without a filling over a field")
    # integer coefficients, torsion over Q: look for a p-adic obstruction
    rat = _solve_with(CF, xi, q, zf)
    tsym = sympy.Symbol("t")
    _, poly = from_laurent(rat.delta)
    ints = rational_to_integer_poly(poly)
    _, factors = sympy.factor_list(sympy.Poly(list(reversed(ints)), tsym))
    for fac, _ in factors:
        coeffs = [int(c) for c in reversed(fac.all_coeffs())]
        if len(coeffs) < 2:
            continue
        end = coeffs[0] if xi.coefficients[0] > 0 else coeffs[-1]
        if abs(end) == 1:
            continue
        K = NumberField(UPoly(coeffs, QQ))
        if not in_image_over(C.d(q + 1), z, lambda rows, n: rank_over_number_field(rows, n, K)):
            return MovabilityResult(Movability.NOT_MOVABLE, reason=f"class survives over Q[t]/({fac.as_expr()}); every annihilator is divisible by it")
    # a delta with lowest coefficient 1 stays nonzero mod p, so a class that is not torsion over F_p(t) cannot move
    for p in _candidate_primes(C, None, q + 1):
        Fp = GF(p)
        zp = {j: v.change_ring(Fp) for j, v in z.items()}
        zp = {j: v for j, v in zp.items() if v}
        if zp and not in_image_over(tensor_coefficients(C, Fp).d(q + 1), zp, lambda rows, n: rank_over_fraction_field(rows, n, Fp)):
            return MovabilityResult(Movability.NOT_MOVABLE, reason=f"class is not torsion over F_{p}(t)")
    return MovabilityResult(Movability.UNDECIDED, reason="torsion over Q but no integral annihilator or obstruction found within the window")


# ---------------------------------------------------------------------------
# reports


@dataclass
class Conclusion:
    statement: str
    kind: str
    provenance: list
    verdicts: list
    hypotheses: list = field(default_factory=list)
    conditional: bool = False


@dataclass
class SigmaReport:
    complex_id: str
    dim: int
    deck_rank: int
    ring: CoefficientRing
    k: int
    verdicts: list
    conclusions: list = field(default_factory=list)
    sample_only: bool = False
    complex: BasedFreeComplex | None = None

    def verdicts_for(self, xi: Character) -> list:
        return [v for v in self.verdicts if v.xi == xi]

    def highest_yes(self, xi: Character) -> int:
        """Largest ``k'`` with Yes at every level up to it; -1 if none."""
        best = -1
        for v in sorted(self.verdicts_for(xi), key=lambda v: v.k):
            if v.status is Status.YES and v.k == best + 1:
                best = v.k
        return best


def _scan_one(args):
    C, xi, k, ring, window, retries = args
    return [sigma_membership(C, xi, kk, ring, window, retries) for kk in range(k + 1)]


def auto_directions(C: BasedFreeComplex) -> list[Character]:
    if C.deck_rank == 1:
        return [Character([1]), Character([-1])]
    # deterministic sample: primitive vectors with entries in [-2, 2]
    import itertools

    seen, out = set(), []
    for v in itertools.product(range(-2, 3), repeat=C.deck_rank):
        if any(v):
            c = Character(v)
            if c.coefficients not in seen:
                seen.add(c.coefficients)
                out.append(c)
    return out


def sphere_scan(
    C: BasedFreeComplex,
    k: int,
    ring: CoefficientRing | None = None,
    directions: list[Character] | None = None,
    window: int | None = None,
    retries: int = 0,
    jobs: int = 1,
    complex_id: str | None = None,
) -> SigmaReport:
    """Run membership for each direction at every level ``0..k``."""
    ring = ring or C.ring
    k = min(k, C.top)
    auto = directions is None
    dirs = auto_directions(C) if auto else list(directions)
    if not dirs:
        raise ValueError("empty direction list")
    tasks = [(C, xi, k, ring, window, retries) for xi in dirs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_one, tasks))
    else:
        results = [_scan_one(t) for t in tasks]
    verdicts = [v for group in results for v in group]
    report = SigmaReport(complex_id or C.name or "complex", C.top, C.deck_rank, ring, k, verdicts, sample_only=C.deck_rank > 1, complex=C)
    _homological_conclusions(report, dirs)
    _domination_conclusion(report, dirs, auto)
    return report


def _fmt_dir(xi: Character) -> str:
    return "(" + ",".join(str(c) for c in xi.coefficients) + ")"


def _sigma_name(j: int, dim: int, suffix: str) -> str:
    return f"Sigma^{j}({suffix})" + (f" (hence Sigma^n for all n >= {dim})" if j == dim else "")


def _homological_conclusions(report: SigmaReport, dirs) -> None:
    ring = str(report.ring)
    for xi in dirs:
        j = report.highest_yes(xi)
        if j >= 0:
            v = next(v for v in report.verdicts_for(xi) if v.k == j)
            report.conclusions.append(
                Conclusion(f"xi={_fmt_dir(xi)} in {_sigma_name(j, report.dim, 'X;' + ring)}", "homological", ["sigmanov"], [v.key])
            )
        for v in report.verdicts_for(xi):
            if v.status is Status.NO:
                report.conclusions.append(
                    Conclusion(f"xi={_fmt_dir(xi)} not in Sigma^{v.k}(X;{ring})", "homological", ["sigmanov"], [v.key])
                )
                break


def _domination_conclusion(report: SigmaReport, dirs, auto: bool) -> None:
    if report.deck_rank != 1:
        full = all(report.highest_yes(xi) >= report.k for xi in dirs)
        if full:
            report.conclusions.append(
                Conclusion(
                    f"all {len(dirs)} sampled directions lie in Sigma^{report.k}(X;{report.ring}); sample only, no finiteness conclusion",
                    "finiteness",
                    ["sigmanov", "dominator"],
                    [v.key for v in report.verdicts if v.k == report.k],
                    ["directions are a finite sample of S(G)"],
                    conditional=True,
                )
            )
        return
    both = [Character([1]), Character([-1])]
    if not all(any(d == b for d in dirs) for b in both):
        return
    k = report.k
    ring = str(report.ring)
    tops = {str(b): report.highest_yes(b) for b in both}
    keys = [v.key for v in report.verdicts if v.k == k]
    if all(t >= k for t in tops.values()):
        text = f"the infinite cyclic cover has chain complex of finite {k}-type over {ring}"
        prov = ["sigmanov", "dominator"]
        if ring == "Z":
            if k == 1:
                text = "the infinite cyclic cover is homotopy equivalent to a CW complex with finite 1-skeleton"
                prov = ["sigmanov", "homvshom", "dominationX"]
            report.conclusions.append(Conclusion(text, "finiteness", prov, keys))
        else:
            report.conclusions.append(Conclusion(text, "finiteness", prov, keys))
        return
    negatives = [v for v in report.verdicts if v.status is Status.NO]
    if negatives:
        lo = min(v.k for v in negatives)
        vk = [v.key for v in negatives if v.k == lo]
        if ring == "Z":
            report.conclusions.append(
                Conclusion(
                    f"the infinite cyclic cover is NOT of finite type: no CW model with finite {lo}-skeleton and its chain complex is not of finite {lo}-type",
                    "finiteness",
                    ["sigmanov", "dominator", "dominationX"],
                    vk,
                )
            )
        else:
            report.conclusions.append(
                Conclusion(f"the infinite cyclic cover's chain complex over {ring} is not of finite {lo}-type", "finiteness", ["sigmanov", "dominator"], vk)
            )


def promote(report: SigmaReport, sigma2_pi1_asserted: bool = False, connectivity: int | None = None) -> SigmaReport:
    """Add homotopical conclusions licensed by the homological verdicts.

    Integer Yes at level 1 gives ``xi in Sigma^1(X)``; higher levels are
    added only with the user's assertion ``xi in Sigma^2(pi_1 X)``.  A stated
    connectivity ``c`` of the universal cover turns ``Sigma^j(X)`` conclusions
    with ``j <= c + 1`` into statements about the fundamental group.
    """
    if report.ring.kind != "Z":
        return report
    for xi in _directions(report):
        j = report.highest_yes(xi)
        if j < 1:
            continue
        v1 = next(v for v in report.verdicts_for(xi) if v.k == 1)
        reached = [(1, v1.key, ["homvshom"], [])]
        report.conclusions.append(
            Conclusion(f"xi={_fmt_dir(xi)} in {_sigma_name(1, report.dim, 'X')}", "homotopical", ["homvshom"], [v1.key])
        )
        if j >= 2 and sigma2_pi1_asserted:
            vj = next(v for v in report.verdicts_for(xi) if v.k == j)
            hyp = [f"xi={_fmt_dir(xi)} in Sigma^2(pi_1 X) (user assertion)"]
            report.conclusions.append(
                Conclusion(f"xi={_fmt_dir(xi)} in {_sigma_name(j, report.dim, 'X')}", "homotopical", ["hurewicz+assertion"], [vj.key], hyp)
            )
            reached.append((j, vj.key, ["hurewicz+assertion"], hyp))
        if connectivity is not None and connectivity >= 1:
            for lvl, key, prov, hyp in reached:
                if lvl <= connectivity + 1:
                    report.conclusions.append(
                        Conclusion(
                            f"xi={_fmt_dir(xi)} in Sigma^{lvl}(pi_1 X)",
                            "group",
                            prov + ["connectivity"],
                            [key],
                            hyp + [f"universal cover is {connectivity}-connected (user assertion)"],
                        )
                    )
    return report


def _directions(report: SigmaReport) -> list:
    out = []
    for v in report.verdicts:
        if all(v.xi != d for d in out):
            out.append(v.xi)
    return out


@dataclass
class CatBound:
    bound: int
    provenance: list
    note: str = ""
    conditional_bound: int | None = None
    hypotheses: list = field(default_factory=list)


def cat_upper_bound(report: SigmaReport, xi: Character) -> CatBound:
    """``Cat(X, xi) <= dim X - k`` for the largest ``k`` with ``-xi in Sigma^k(X)``.

    Level 1 follows from an integer Yes without hypotheses; higher levels count
    when promoted, and otherwise give a conditional bound.
    """
    neg = -xi
    if not report.verdicts_for(neg):
        raise ValueError(f"report has no verdicts for -xi = {_fmt_dir(neg)}")
    n = report.dim
    target = f"xi={_fmt_dir(neg)} in Sigma^"
    best = 0
    for c in report.conclusions:
        if c.kind == "homotopical" and c.statement.startswith(target) and not c.conditional:
            best = max(best, int(c.statement[len(target):].split("(")[0]))
    j = report.highest_yes(neg) if report.ring.kind == "Z" else -1
    if j >= 1:
        best = max(best, 1)
    if best == 0:
        return CatBound(n, ["trivial"], f"no membership of -xi={_fmt_dir(neg)} in Sigma^1(X); only the trivial bound dim X = {n}")
    out = CatBound(n - best, ["cattheo", "homvshom" if best == 1 else "hurewicz+assertion"], f"-xi={_fmt_dir(neg)} in Sigma^{best}(X)")
    if j > best:
        out.conditional_bound = n - j
        out.hypotheses = [f"xi={_fmt_dir(neg)} in Sigma^2(pi_1 X) (not asserted)"]
    return out
