"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line with its runtime."""

import contextlib
import json
import random
import subprocess
import sys
import time

import pytest

import oracles
from sigmakit import (
    GF,
    QQ,
    ZZ,
    BUILTIN_NAMES,
    Character,
    Movability,
    Status,
    builtin,
    cat_upper_bound,
    certificate_shift,
    finite_type_reduce,
    homology_lambda,
    io,
    movable_to_infinity,
    random_complex,
    sigma_membership,
    sphere_scan,
    tensor_coefficients,
    total_complex_assemble,
    validate,
    verify_certificate,
    verify_no_witness,
    xi_valuation,
)
from sigmakit.finite_type import random_assembly_instance, standard_resolution

PLUS, MINUS = Character([1]), Character([-1])
GOLDEN_K = {"circle": 1, "torus": 2, "wedge-s1-s2": 2, "trefoil": 2, "bs12": 2}


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, title, limit=None):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert limit is None or elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            bound = f" (limit {limit}s)" if limit else ""
            with capsys.disabled():
                print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {elapsed:.2f}s{bound}")

    return run


def test_1_structural(criterion):
    with criterion(1, "d d = 0 on builtins and 200 fuzzed complexes", 5):
        for name in BUILTIN_NAMES:
            assert validate(builtin(name)).ok
        rng = random.Random(2024)
        for _ in range(200):
            C = random_complex(rng, deck_rank=rng.choice([1, 2]), max_rank=4, top=3)
            assert max(C.ranks) <= 4 and C.top <= 3
            rep = validate(C)
            assert rep.ok, rep


def test_2_circle(criterion):
    with criterion(2, "circle: both directions Yes with verified certificates, cat bound 0", 1):
        C = builtin("circle")
        for xi in (PLUS, MINUS):
            v = sigma_membership(C, xi, 1, ZZ)
            assert v.status is Status.YES and verify_certificate(v.certificate).accepted
        report = sphere_scan(C, 1, ZZ)
        assert cat_upper_bound(report, PLUS).bound == 0
        assert cat_upper_bound(report, MINUS).bound == 0


def test_3_bs12(criterion):
    with criterion(3, "BS(1,2): Z/Q discrepancy and the finite-type conclusion", 2):
        C = builtin("bs12")
        for k in range(3):
            v = sigma_membership(C, MINUS, k, ZZ)
            assert v.status is Status.YES and verify_certificate(v.certificate).accepted
        no = sigma_membership(C, PLUS, 1, ZZ)
        assert no.status is Status.NO and verify_no_witness(C, PLUS, 1, no.witness)[0]
        for xi in (PLUS, MINUS):
            assert sigma_membership(C, xi, 1, QQ).status is Status.YES
        report = sphere_scan(C, 1, ZZ)
        (concl,) = [c for c in report.conclusions if c.kind == "finiteness"]
        assert "NOT of finite type" in concl.statement and "dominationX" in concl.provenance


def test_4_trefoil(criterion):
    with criterion(4, "trefoil: Alexander factor, both directions, finite model D", 10):
        C = builtin("trefoil")
        (h1,) = [h for h in homology_lambda(tensor_coefficients(C, QQ)) if h.degree == 1]
        alex = oracles.t**2 - oracles.t + 1
        assert len(h1.torsion) == 1
        assert sum(c * oracles.t ** e[0] for e, c in h1.torsion[0].items()) == alex
        for xi in (PLUS, MINUS):
            for k in range(3):
                assert sigma_membership(C, xi, k, ZZ).status is Status.YES
        res = finite_type_reduce(C, 2)
        H = res.homology()
        assert str(H[0]) == "Z" and str(H[1]) == "Z^2"
        assert H[1].free_rank == oracles.companion_group_rank(alex)
        assert res.checks["ab_homotopic_to_id"]["ok"]


def test_5_constructive_identities(criterion):
    with criterion(5, "assembly identities on 100 instances, reducer and starstar on every reduction", 30):
        rng = random.Random(5)
        E = standard_resolution()
        for i in range(100):
            P, C, f, g, L = random_assembly_instance(rng)
            res = total_complex_assemble(P, E, C, f, g, L)
            assert res.ok, (i, res.violations[:3])
        for name, n in (("circle", 1), ("trefoil", 2)):
            checks = finite_type_reduce(builtin(name), n).checks
            for key in ("reducer", "starstar"):
                assert checks[key]["ok"], (name, key, checks[key]["detail"])


def test_6_movability(criterion):
    with criterion(6, "wedge: point class movable, 2-sphere class not movable over Q", 1):
        C = builtin("wedge-s1-s2")
        z0 = {0: C.one()}
        m = movable_to_infinity(C, 0, z0, PLUS)
        assert m.status is Movability.MOVABLE
        lowest = min(m.delta.items(), key=lambda term: PLUS(term[0]))
        assert lowest[1] == 1 and PLUS(lowest[0]) == xi_valuation(m.delta, PLUS)
        assert m.check(C, 0, z0)
        z2 = {0: C.one().change_ring(QQ)}
        for xi in (PLUS, MINUS):
            assert movable_to_infinity(C, 2, z2, xi, QQ).status is Movability.NOT_MOVABLE


def _perturbations(xi: Character):
    if len(xi.coefficients) == 1:
        # the only nearby points on S^0 are positive rescalings of xi itself
        return [Character([m * xi.coefficients[0]]) for m in (1, 2, 3)]
    out = []
    a, b = xi.coefficients
    for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)):
        out.append(Character([20 * a + da, 20 * b + db]))
    return out


def test_7_openness(criterion):
    certs = []
    for name, k in GOLDEN_K.items():
        obj = json.loads(io.data_path(f"golden/{name}.report.json").read_text())
        C = io.complex_from_json(obj["complex"])
        certs += [io.certificate_from_json(v["certificate"], C) for v in obj["verdicts"] if v["status"] == "Yes"]
    assert certs
    with criterion(7, f"openness of {len(certs)} shipped certificates", 2):
        for cert in certs:
            good = 0
            for eta in _perturbations(cert.xi):
                shift, _ = certificate_shift(cert, eta)
                if shift > 0:
                    chk = verify_certificate(cert, eta, shift)
                    assert chk.accepted, (cert.xi, eta, chk.reason)
                    good += 1
            assert good >= 3, (cert.xi, cert.k, good)


def test_8_field_symmetry(criterion):
    with criterion(8, "field verdicts agree at +xi and -xi on rank-one builtins"):
        for name in BUILTIN_NAMES:
            C = builtin(name)
            if C.deck_rank != 1:
                continue
            for field in (QQ, GF(2), GF(3)):
                for k in range(C.top + 1):
                    a = sigma_membership(C, PLUS, k, field).status
                    b = sigma_membership(C, MINUS, k, field).status
                    assert a is b and a is not Status.UNDECIDED, (name, str(field), k)


def test_9_determinism(criterion, tmp_path):
    with criterion(9, "two scans of the same config are byte-identical"):
        for name in ("bs12", "torus"):
            outs = []
            for i in range(2):
                path = tmp_path / f"{name}{i}.json"
                subprocess.run(
                    [sys.executable, "-m", "sigmakit.cli", "scan", name, "--k", "2", "--coeff", "Z", "--out", str(path)],
                    check=True,
                    capture_output=True,
                )
                outs.append(path.read_bytes())
            assert outs[0] == outs[1]
