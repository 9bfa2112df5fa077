"""The ``sigma`` command line tool.

Exit codes: 0 for a definitive answer, 2 when some verdict is Undecided,
1 for errors (bad input, failed verification).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from .builders import BUILTIN_NAMES, builtin
from .chain import tensor_coefficients, validate, verify_certificate
from .decide import (
    Movability,
    Status,
    cat_upper_bound,
    movable_to_infinity,
    promote,
    sigma_membership,
    sphere_scan,
    verify_no_witness,
)
from .lattice import Character, CoefficientRing, parse_element

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


@dataclass
class RunConfig:
    source: str
    command: str
    k: int = 1
    ring: CoefficientRing | None = None
    directions: list | None = None
    window: int | None = None
    retries: int = 4
    out: str | None = None
    csv: str | None = None
    sigma2_pi1: bool = False
    connectivity: int | None = None
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.window is not None and self.window <= 0:
            raise ValueError("window must be positive")
        if self.retries < 0:
            raise ValueError("retries must be nonnegative")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


def load_complex(source: str, ring: CoefficientRing | None = None):
    """A builtin name or a path to a complex JSON file."""
    if source in BUILTIN_NAMES:
        C = builtin(source)
    else:
        p = Path(source)
        if not p.exists():
            raise FileNotFoundError(f"{source}: neither a builtin ({', '.join(BUILTIN_NAMES)}) nor a file")
        C = io.from_file(p)
        if C.name is None:
            C.name = p.stem
    if ring is not None and ring != C.ring:
        C = tensor_coefficients(C, ring)
    return C


def _window(cfg: RunConfig):
    if cfg.window is not None:
        return cfg.window
    env = os.environ.get("SIGMA_DEFAULT_WINDOW")
    if env:
        w = int(env)
        if w <= 0:
            raise ValueError("SIGMA_DEFAULT_WINDOW must be positive")
        return w
    return None


def _parse_directions(text: str | None, deck_rank: int):
    if text is None or text == "auto":
        return None
    dirs = []
    for part in text.split(";"):
        part = part.strip()
        if part:
            xi = Character.parse(part)
            if xi.rank != deck_rank:
                raise ValueError(f"direction {part!r} has length {xi.rank}, deck rank is {deck_rank}")
            dirs.append(xi)
    if not dirs:
        raise ValueError("empty direction list")
    return dirs


def _emit(cfg: RunConfig, payload: dict, summary: list[str]) -> None:
    text = io.dumps(payload)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
        for line in summary:
            print(line)
    else:
        sys.stdout.write(text)


def _summary_line(v) -> str:
    return f"xi=({v.xi}) k={v.k} {v.ring}: {v.status.value} [{v.layer}]"


# ---------------------------------------------------------------------------
# commands


def cmd_validate(cfg: RunConfig) -> int:
    C = load_complex(cfg.source)
    rep = validate(C)
    if rep.ok:
        print(f"ok: {C.name or cfg.source} ranks={list(C.ranks)} deck_rank={C.deck_rank} ring={C.ring}")
        return EXIT_OK
    print(f"invalid: {rep.message}")
    return EXIT_ERROR


def cmd_decide(cfg: RunConfig) -> int:
    C = load_complex(cfg.source)
    dirs = _parse_directions(cfg.extra.get("xi"), C.deck_rank)
    if not dirs or len(dirs) != 1:
        raise ValueError("decide needs exactly one direction via --xi")
    ring = cfg.ring or C.ring
    v = sigma_membership(C, dirs[0], cfg.k, ring, _window(cfg), cfg.retries)
    payload = {
        "schema": io.SCHEMA_REPORT,
        "complex_id": C.name or cfg.source,
        "complex": io.complex_to_json(tensor_coefficients(C, ring)),
        "verdicts": [io.verdict_to_json(v)],
    }
    _emit(cfg, payload, [_summary_line(v)])
    return EXIT_UNDECIDED if v.status is Status.UNDECIDED else EXIT_OK


def _scan(cfg: RunConfig):
    C = load_complex(cfg.source)
    ring = cfg.ring or C.ring
    dirs = _parse_directions(cfg.extra.get("directions"), C.deck_rank)
    report = sphere_scan(C, cfg.k, ring, dirs, _window(cfg), cfg.retries, cfg.jobs, C.name or cfg.source)
    report.complex = tensor_coefficients(C, ring)
    promote(report, cfg.sigma2_pi1, cfg.connectivity)
    return C, report


def cmd_scan(cfg: RunConfig) -> int:
    _, report = _scan(cfg)
    flags = {"sigma2_pi1_asserted": cfg.sigma2_pi1, "connectivity": cfg.connectivity}
    payload = io.report_to_json(report, {"flags": flags})
    summary = [_summary_line(v) for v in report.verdicts] + [f"- {c.statement} [{', '.join(c.provenance)}]" for c in report.conclusions]
    _emit(cfg, payload, summary)
    if cfg.csv:
        Path(cfg.csv).write_text(io.report_csv(report), encoding="utf-8")
    return EXIT_UNDECIDED if any(v.status is Status.UNDECIDED for v in report.verdicts) else EXIT_OK


def _parse_cycle(text: str, C) -> dict:
    """``"0:1; 2:t-1"`` -> ``{0: 1, 2: t - 1}``."""
    out = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        idx, _, elem = part.partition(":")
        out[int(idx)] = parse_element(elem, C.deck_rank, C.ring)
    return out


def cmd_movable(cfg: RunConfig) -> int:
    C = load_complex(cfg.source)
    dirs = _parse_directions(cfg.extra.get("xi"), C.deck_rank)
    if not dirs or len(dirs) != 1:
        raise ValueError("movable needs exactly one direction via --xi")
    ring = cfg.ring or C.ring
    q = cfg.extra["q"]
    z = _parse_cycle(cfg.extra["z"], tensor_coefficients(C, ring))
    res = movable_to_infinity(C, q, z, dirs[0], ring, _window(cfg))
    payload = {
        "schema": io.SCHEMA_REPORT,
        "complex_id": C.name or cfg.source,
        "complex": io.complex_to_json(tensor_coefficients(C, ring)),
        "movability": {
            "xi": list(dirs[0].coefficients),
            "degree": q,
            "cycle": [{"index": j, "terms": io.element_to_terms(v)} for j, v in sorted(z.items())],
            "status": res.status.value,
            "delta": io.element_to_terms(res.delta) if res.delta is not None else None,
            "filling": [{"index": j, "terms": io.element_to_terms(v)} for j, v in sorted((res.filling or {}).items())],
            "reason": res.reason,
            "provenance": ["movcrit"],
        },
    }
    line = f"{res.status.value}" + (f" (delta = {res.delta})" if res.delta is not None else "") + f": {res.reason}"
    _emit(cfg, payload, [line])
    return EXIT_UNDECIDED if res.status is Movability.UNDECIDED else EXIT_OK


def cmd_dominate(cfg: RunConfig) -> int:
    from .finite_type import finite_type_reduce

    C = load_complex(cfg.source)
    res = finite_type_reduce(C, min(cfg.k, C.top))
    homology = res.homology()
    payload = io.domination_to_json(res)
    text = io.dumps(payload)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    print(f"finite model: ranks {res.ranks()} (radius {res.constants['D_radius']})")
    for i, h in enumerate(homology):
        print(f"H{i}(D) = {h}")
    failed = [name for name, c in res.checks.items() if isinstance(c, dict) and not c["ok"]]
    for name in failed:
        print(f"check {name} FAILED: {res.checks[name]['detail']}")
    if not cfg.out:
        sys.stdout.write(text)
    return EXIT_ERROR if failed else EXIT_OK


def cmd_cat_bound(cfg: RunConfig) -> int:
    C = load_complex(cfg.source)
    dirs = _parse_directions(cfg.extra.get("xi"), C.deck_rank)
    if not dirs or len(dirs) != 1:
        raise ValueError("cat-bound needs exactly one direction via --xi")
    xi = dirs[0]
    ring = cfg.ring or C.ring
    report = sphere_scan(C, C.top, ring, [xi, -xi], _window(cfg), cfg.retries, 1, C.name or cfg.source)
    report.complex = tensor_coefficients(C, ring)
    promote(report, cfg.sigma2_pi1, cfg.connectivity)
    b = cat_upper_bound(report, xi)
    payload = io.report_to_json(
        report,
        {
            "cat_bound": {
                "xi": list(xi.coefficients),
                "bound": b.bound,
                "provenance": b.provenance,
                "note": b.note,
                "conditional_bound": b.conditional_bound,
                "hypotheses": b.hypotheses,
            }
        },
    )
    line = f"Cat(X, xi=({xi})) <= {b.bound}  [{', '.join(b.provenance)}] {b.note}"
    if b.conditional_bound is not None:
        line += f"; <= {b.conditional_bound} if {'; '.join(b.hypotheses)}"
    _emit(cfg, payload, [line])
    return EXIT_OK


def cmd_examples(cfg: RunConfig) -> int:
    target = cfg.extra.get("write")
    for name in BUILTIN_NAMES:
        C = builtin(name)
        print(f"{name}: deck_rank={C.deck_rank} ranks={list(C.ranks)}")
        if target:
            Path(target).mkdir(parents=True, exist_ok=True)
            io.to_file(C, Path(target) / f"{name}.json")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Re-check every certificate and witness embedded in a report file."""
    obj = json.loads(Path(cfg.source).read_text(encoding="utf-8"))
    C = io.complex_from_json(obj["complex"])
    bad = 0
    for vj in obj.get("verdicts", []):
        label = f"xi=({','.join(str(c) for c in vj['xi'])}) k={vj['k']} {vj['ring']}"
        if vj["status"] == "Yes":
            if vj.get("certificate") is None:
                print(f"{label}: Yes without certificate")
                bad += 1
                continue
            cert = io.certificate_from_json(vj["certificate"], C)
            chk = verify_certificate(cert)
            print(f"{label}: certificate {'accepted' if chk.accepted else 'REJECTED: ' + chk.reason}")
            bad += not chk.accepted
        elif vj["status"] == "No":
            w = io.witness_from_json(vj["witness"], C)
            ok, why = verify_no_witness(C, Character(vj["xi"]), vj["k"], w)
            print(f"{label}: witness {'accepted' if ok else 'REJECTED'} ({why})")
            bad += not ok
        else:
            print(f"{label}: Undecided (nothing to verify)")
    return EXIT_ERROR if bad else EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "decide": cmd_decide,
    "scan": cmd_scan,
    "movable": cmd_movable,
    "dominate": cmd_dominate,
    "cat-bound": cmd_cat_bound,
    "examples": cmd_examples,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sigma", description="Sigma-invariant membership, movability and finite models for free complexes.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, k_default=1):
        sp.add_argument("complex", help=f"builtin name ({', '.join(BUILTIN_NAMES)}) or complex JSON file")
        sp.add_argument("--k", type=int, default=k_default, help="degree bound")
        sp.add_argument("--coeff", default=None, help="coefficient ring: Z, Q or Fp:<p> (default: the complex's)")
        sp.add_argument("--window", type=int, default=None, help="search window in xi-value (default: $SIGMA_DEFAULT_WINDOW or 64x spread)")
        sp.add_argument("--retries", type=int, default=4, help="window doublings on Undecided")
        sp.add_argument("--out", default=None, help="write the JSON report here")
        sp.add_argument("--sigma2-pi1", action="store_true", help="assert xi in Sigma^2(pi_1 X) for the promoted directions")
        sp.add_argument("--connectivity", type=int, default=None, help="assert the universal cover is c-connected")

    sp = sub.add_parser("validate", help="check shapes and dd = 0")
    sp.add_argument("complex")
    sp = sub.add_parser("decide", help="decide xi in Sigma^k for one direction")
    common(sp)
    sp.add_argument("--xi", required=True, help="direction, e.g. 1 or 3,5")
    sp = sub.add_parser("scan", help="decide a set of directions and derive conclusions")
    common(sp)
    sp.add_argument("--directions", default="auto", help="'auto' or a ';'-separated list such as '1;-1'")
    sp.add_argument("--jobs", type=int, default=1, help="parallel workers")
    sp.add_argument("--csv", default=None, help="also write CSV rows for plotting")
    sp = sub.add_parser("movable", help="movability to infinity of a homology class")
    common(sp)
    sp.add_argument("--xi", required=True, help="direction to push towards")
    sp.add_argument("--q", type=int, required=True, help="degree of the cycle")
    sp.add_argument("--z", required=True, help="cycle coordinates, e.g. '0:1' or '0:t-1;1:2'")
    sp = sub.add_parser("dominate", help="finite model of the infinite cyclic cover")
    common(sp, k_default=2)
    sp = sub.add_parser("cat-bound", help="upper bound for Cat(X, xi)")
    common(sp)
    sp.add_argument("--xi", required=True, help="bound Cat(X, xi) using -xi")
    sp = sub.add_parser("examples", help="list builtin complexes")
    sp.add_argument("--write", default=None, help="write them as JSON files into this directory")
    sp = sub.add_parser("verify", help="re-check the certificates and witnesses of a report")
    sp.add_argument("report")
    return p


def config_from_args(ns) -> RunConfig:
    g = lambda name, default=None: getattr(ns, name, default)  # noqa: E731
    extra = {k: g(k) for k in ("xi", "directions", "q", "z", "write") if g(k) is not None}
    source = g("complex") or g("report") or ""
    return RunConfig(
        source=source,
        command=ns.command,
        k=g("k", 1),
        ring=CoefficientRing.parse(ns.coeff) if g("coeff") else None,
        window=g("window"),
        retries=g("retries", 4),
        out=g("out"),
        csv=g("csv"),
        sigma2_pi1=bool(g("sigma2_pi1", False)),
        connectivity=g("connectivity"),
        jobs=g("jobs", 1),
        extra=extra,
    )


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[ns.command](cfg)
    except (ValueError, KeyError, FileNotFoundError, ArithmeticError, OSError) as exc:
        print(f"sigma: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
