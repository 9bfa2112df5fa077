"""JSON serialization.

Complexes use the schema::

    {"ring": {"coefficients": "Z" | "Q" | "Fp", "p": <prime, Fp only>, "deck_rank": r},
     "ranks": [n0, n1, ...],
     "boundaries": [{"degree": i, "entries": [{"row": a, "col": b,
                    "terms": [[[e1, ..., er], num, den?], ...]}]}],
     "labels": [[...], ...]?, "name": "..."?}

Integers outside the signed 64-bit range are written as decimal strings.
Output is canonical (sorted keys, sorted terms and entries, two-space
indent), so ``dumps(loads(text)) == text`` for any text this module wrote.
Deck rank 0 is accepted for complexes of free abelian groups.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .chain import BasedFreeComplex, GradedMap, Matrix, SigmaCertificate, validate
from .lattice import Character, CoefficientRing, GroupRingElem

SCHEMA_REPORT = "sigmakit-report/1"
INT64 = 2**63


class ComplexFormatError(ValueError):
    """The input does not follow the complex schema, or fails validation."""


# ---------------------------------------------------------------------------
# scalars


def _int_out(n: int):
    return n if -INT64 <= n < INT64 else str(n)


def _int_in(v, where: str) -> int:
    if isinstance(v, bool):
        raise ComplexFormatError(f"{where}: expected an integer, got a boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str) and v.strip().lstrip("+-").isdigit():
        return int(v)
    raise ComplexFormatError(f"{where}: expected an integer, got {v!r}")


def _frac_out(c) -> str:
    return str(Fraction(c))


# ---------------------------------------------------------------------------
# elements and matrices


def element_to_terms(x: GroupRingElem) -> list:
    out = []
    for e, c in sorted(x.items()):
        f = Fraction(c)
        t = [list(e), _int_out(f.numerator)]
        if f.denominator != 1:
            t.append(_int_out(f.denominator))
        out.append(t)
    return out


def terms_to_element(terms, ring: CoefficientRing, rank: int, where: str) -> GroupRingElem:
    if not isinstance(terms, list):
        raise ComplexFormatError(f"{where}: terms must be a list")
    acc: dict = {}
    for n, t in enumerate(terms):
        w = f"{where}, term {n}"
        if not isinstance(t, list) or len(t) not in (2, 3):
            raise ComplexFormatError(f"{w}: expected [exponents, num] or [exponents, num, den]")
        exps = t[0]
        if not isinstance(exps, list) or len(exps) != rank:
            raise ComplexFormatError(f"{w}: exponent vector must have length {rank}")
        e = tuple(_int_in(v, w) for v in exps)
        num = _int_in(t[1], w)
        den = _int_in(t[2], w) if len(t) == 3 else 1
        if den == 0:
            raise ComplexFormatError(f"{w}: zero denominator")
        c = Fraction(num, den)
        if ring.kind == "Z" and c.denominator != 1:
            raise ComplexFormatError(f"{w}: non-integral coefficient {c} over Z")
        acc[e] = acc.get(e, 0) + c
    try:
        return GroupRingElem({e: ring.coerce(c) for e, c in acc.items()}, ring, rank)
    except (ValueError, ZeroDivisionError) as exc:
        raise ComplexFormatError(f"{where}: {exc}") from exc


def matrix_to_json(m: Matrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [{"row": r, "col": c, "terms": element_to_terms(v)} for (r, c), v in sorted(m.entries.items()) if v],
    }


def matrix_from_json(obj, ring: CoefficientRing, rank: int, where: str) -> Matrix:
    rows, cols = _int_in(obj.get("rows"), where), _int_in(obj.get("cols"), where)
    return Matrix(rows, cols, _entries_from_json(obj.get("entries", []), ring, rank, rows, cols, where))


def _entries_from_json(entries, ring, rank, rows, cols, where) -> dict:
    if not isinstance(entries, list):
        raise ComplexFormatError(f"{where}: entries must be a list")
    out = {}
    for ent in entries:
        if not isinstance(ent, dict):
            raise ComplexFormatError(f"{where}: each entry must be an object")
        r, c = _int_in(ent.get("row"), where), _int_in(ent.get("col"), where)
        w = f"{where}, entry ({r},{c})"
        if not (0 <= r < rows and 0 <= c < cols):
            raise ComplexFormatError(f"{w}: outside the {rows}x{cols} matrix")
        if (r, c) in out:
            raise ComplexFormatError(f"{w}: duplicate entry")
        v = terms_to_element(ent.get("terms"), ring, rank, w)
        if v:
            out[(r, c)] = v
    return out


# ---------------------------------------------------------------------------
# complexes


def ring_to_json(ring: CoefficientRing, deck_rank: int) -> dict:
    out = {"coefficients": ring.kind, "deck_rank": deck_rank}
    if ring.kind == "Fp":
        out["p"] = ring.p
    return out


def ring_from_json(obj) -> tuple[CoefficientRing, int]:
    if not isinstance(obj, dict):
        raise ComplexFormatError("ring: expected an object")
    kind = obj.get("coefficients")
    if kind not in ("Z", "Q", "Fp"):
        raise ComplexFormatError(f"ring: unknown coefficients {kind!r}")
    if kind == "Fp" and "p" not in obj:
        raise ComplexFormatError("ring: Fp requires p")
    if kind != "Fp" and "p" in obj:
        raise ComplexFormatError("ring: p is only allowed with Fp")
    try:
        ring = CoefficientRing(kind, _int_in(obj["p"], "ring.p") if kind == "Fp" else None)
    except ValueError as exc:
        raise ComplexFormatError(f"ring: {exc}") from exc
    r = _int_in(obj.get("deck_rank"), "ring.deck_rank")
    if r < 0:
        raise ComplexFormatError("ring: deck_rank must be nonnegative")
    return ring, r


def complex_to_json(C: BasedFreeComplex) -> dict:
    out = {
        "ring": ring_to_json(C.ring, C.deck_rank),
        "ranks": list(C.ranks),
        "boundaries": [
            {"degree": i, "entries": matrix_to_json(C.d(i))["entries"]} for i in range(1, C.top + 1)
        ],
    }
    if C.labels is not None:
        out["labels"] = [list(x) for x in C.labels]
    if C.name:
        out["name"] = C.name
    return out


def complex_from_json(obj, check: bool = True) -> BasedFreeComplex:
    if not isinstance(obj, dict):
        raise ComplexFormatError("complex: expected a JSON object")
    for key in ("ring", "ranks", "boundaries"):
        if key not in obj:
            raise ComplexFormatError(f"complex: missing field {key!r}")
    ring, r = ring_from_json(obj["ring"])
    ranks = obj["ranks"]
    if not isinstance(ranks, list) or not ranks:
        raise ComplexFormatError("ranks: expected a nonempty list")
    ranks = [_int_in(v, "ranks") for v in ranks]
    if any(v < 0 for v in ranks):
        raise ComplexFormatError("ranks: negative rank")
    bds = {}
    if not isinstance(obj["boundaries"], list):
        raise ComplexFormatError("boundaries: expected a list")
    for b in obj["boundaries"]:
        i = _int_in(b.get("degree") if isinstance(b, dict) else None, "boundaries.degree")
        if not 1 <= i < len(ranks):
            raise ComplexFormatError(f"boundary degree {i} outside 1..{len(ranks) - 1}")
        if i in bds:
            raise ComplexFormatError(f"boundary degree {i} given twice")
        where = f"boundary degree {i}"
        bds[i] = Matrix(ranks[i - 1], ranks[i], _entries_from_json(b.get("entries", []), ring, r, ranks[i - 1], ranks[i], where))
    labels = obj.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != len(ranks) or any(len(l) != n for l, n in zip(labels, ranks)):
            raise ComplexFormatError("labels: must list one label per basis element in every degree")
        labels = tuple(tuple(l) for l in labels)
    C = BasedFreeComplex(r, ring, tuple(ranks), bds, labels, obj.get("name"))
    if check:
        rep = validate(C)
        if not rep.ok:
            raise ComplexFormatError(f"complex fails validation: {rep.message}")
    return C


def data_path(name: str) -> Path:
    """Path of a file shipped in the package data directory (builtin complexes, golden reports)."""
    return Path(str(resources.files("sigmakit") / "data" / name))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def to_file(C: BasedFreeComplex, path) -> None:
    Path(path).write_text(dumps(complex_to_json(C)), encoding="utf-8")


def from_file(path) -> BasedFreeComplex:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ComplexFormatError(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(obj, dict) and "complex" in obj and "ring" not in obj:
        obj = obj["complex"]
    return complex_from_json(obj)


# ---------------------------------------------------------------------------
# certificates, witnesses, verdicts


def graded_to_json(f: GradedMap) -> list:
    return [{"degree": i, **matrix_to_json(m)} for i, m in sorted(f.mats.items())]


def graded_from_json(obj, source, target, shift, ring, rank) -> GradedMap:
    mats = {}
    for m in obj:
        i = _int_in(m.get("degree"), "map.degree")
        mats[i] = matrix_from_json(m, ring, rank, f"map degree {i}")
    return GradedMap(source, target, shift, mats)


def certificate_to_json(cert: SigmaCertificate, embed_complex: bool = False) -> dict:
    out = {
        "xi": list(cert.xi.coefficients),
        "k": cert.k,
        "epsilon": _frac_out(cert.epsilon),
        "A": graded_to_json(cert.A),
        "homotopy": graded_to_json(cert.homotopy),
    }
    if embed_complex:
        out["complex"] = complex_to_json(cert.complex)
    return out


def certificate_from_json(obj, C: BasedFreeComplex | None = None) -> SigmaCertificate:
    if C is None:
        C = complex_from_json(obj["complex"])
    xi = Character(obj["xi"])
    A = graded_from_json(obj["A"], C, C, 0, C.ring, C.deck_rank)
    H = graded_from_json(obj["homotopy"], C, C, 1, C.ring, C.deck_rank)
    return SigmaCertificate(C, xi, int(obj["k"]), Fraction(obj["epsilon"]), A, H)


def witness_to_json(w) -> dict:
    return {
        "degree": w.degree,
        "cycle": [{"index": j, "terms": element_to_terms(v)} for j, v in sorted(w.cycle.items())],
        "field": w.field,
        "coefficients": w.coefficients,
        "modulus": element_to_terms(w.modulus) if w.modulus is not None else None,
        "prime": w.prime,
        "note": w.note,
    }


def witness_from_json(obj, C: BasedFreeComplex):
    from .decide import NoWitness

    cycle = {int(e["index"]): terms_to_element(e["terms"], C.ring, C.deck_rank, "witness") for e in obj["cycle"]}
    modulus = terms_to_element(obj["modulus"], C.ring, 1, "witness modulus") if obj.get("modulus") is not None else None
    return NoWitness(int(obj["degree"]), cycle, obj["field"], obj["coefficients"], modulus, obj.get("prime"), obj.get("note", ""))


def verdict_to_json(v) -> dict:
    return {
        "xi": list(v.xi.coefficients),
        "k": v.k,
        "ring": str(v.ring),
        "status": v.status.value,
        "layer": v.layer,
        "certificate": certificate_to_json(v.certificate) if v.certificate is not None else None,
        "witness": witness_to_json(v.witness) if v.witness is not None else None,
        "diagnostics": _plain(v.diagnostics),
        "key": v.key,
    }


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return _int_out(x)
    if x is None or isinstance(x, (str, bool, float)):
        return x
    return str(x)


def conclusion_to_json(c) -> dict:
    return {
        "statement": c.statement,
        "kind": c.kind,
        "provenance": list(c.provenance),
        "verdicts": list(c.verdicts),
        "hypotheses": list(c.hypotheses),
        "conditional": c.conditional,
    }


def report_to_json(report, extra: dict | None = None) -> dict:
    out = {
        "schema": SCHEMA_REPORT,
        "complex_id": report.complex_id,
        "dim": report.dim,
        "deck_rank": report.deck_rank,
        "ring": str(report.ring),
        "k": report.k,
        "sample_only": report.sample_only,
        "verdicts": [verdict_to_json(v) for v in report.verdicts],
        "conclusions": [conclusion_to_json(c) for c in report.conclusions],
    }
    if report.complex is not None:
        out["complex"] = complex_to_json(report.complex)
    if extra:
        out.update(_plain(extra))
    return out


def report_csv(report) -> str:
    """One row per verdict: direction components, k, ring, status."""
    r = report.deck_rank
    header = [f"xi{i + 1}" for i in range(r)] + ["k", "ring", "status", "layer"]
    lines = [",".join(header)]
    for v in report.verdicts:
        lines.append(",".join([*(str(c) for c in v.xi.coefficients), str(v.k), str(v.ring), v.status.value, v.layer]))
    return "\n".join(lines) + "\n"


def domination_to_json(res) -> dict:
    """The finite model ``D`` plus ``b`` and the homotopy on the cells of ``D``."""
    b_map, phi_map = [], []
    for s, cells in enumerate(res.basis):
        bs, ps = [], []
        for q, j in cells:
            img = res.b(s, {(q, j): 1})
            bs.append([[i, _int_out(c)] for i, c in sorted(img.items())])
            hom = res.homotopy(s, {(q, j): 1})
            ps.append([[qq, jj, _int_out(c)] for (qq, jj), c in sorted(hom.items())])
        b_map.append(bs)
        phi_map.append(ps)
    return {
        "complex": complex_to_json(res.complex),
        "D": complex_to_json(res.D),
        "n": res.n,
        "basis": [[[q, j] for q, j in cells] for cells in res.basis],
        "constants": _plain(res.constants),
        "checks": _plain(res.checks),
        "homology": [str(h) for h in res.homology()],
        "maps": {
            "a": "inclusion of the listed cells",
            "b_on_D": b_map,
            "homotopy_on_D": phi_map,
        },
    }
