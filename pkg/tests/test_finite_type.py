import json
import random
from fractions import Fraction

import pytest

import oracles
from sigmakit import Character, builtin, finite_type_reduce, parse_element, sigma_membership, total_complex_assemble
from sigmakit import io
from sigmakit.chain import BasedFreeComplex, Matrix
from sigmakit.finite_type import (
    CoverGeometry,
    MissingDirection,
    PushMaps,
    ResolutionError,
    assemble_atlas,
    check_resolution,
    random_assembly_instance,
    standard_resolution,
)
from sigmakit.lattice import ZZ


@pytest.fixture(scope="module")
def circle_model():
    return finite_type_reduce(builtin("circle"), 1)


@pytest.fixture(scope="module")
def trefoil_model():
    return finite_type_reduce(builtin("trefoil"), 2)


def certs(C, n):
    return {s: sigma_membership(C, Character([s]), n).certificate for s in (1, -1)}


class TestAtlas:
    def test_circle_two_entries(self):
        C = builtin("circle")
        atlas = assemble_atlas(C, 1, certs(C, 1))
        assert sorted(e.center.coefficients for e in atlas.entries) == [(-1,), (1,)]
        assert atlas.r > 3 * atlas.M * 1

    def test_trefoil(self):
        C = builtin("trefoil")
        atlas = assemble_atlas(C, 2, certs(C, 2))
        assert len(atlas.entries) == 2 and atlas.r > 3 * atlas.M * 2
        for e in atlas.entries:
            assert e.shift >= atlas.r and e.height <= atlas.M

    def test_missing_direction(self):
        C = builtin("bs12")
        with pytest.raises(MissingDirection):
            assemble_atlas(C, 1, {-1: sigma_membership(C, Character([-1]), 1).certificate})
        with pytest.raises(MissingDirection):
            finite_type_reduce(C, 1)


class TestPushMaps:
    def test_identity_inside_ball(self):
        C = builtin("circle")
        push = PushMaps(C, assemble_atlas(C, 1, certs(C, 1)), 1)
        G = CoverGeometry(C)
        for s in range(2):
            for q, j in G.ball(s, push.A):
                assert push.psi(s, {(q, j): 1}) == {(q, j): 1}

    def test_norm_drops_outside(self):
        C = builtin("circle")
        push = PushMaps(C, assemble_atlas(C, 1, certs(C, 1)), 1)
        k = push.constants
        G = push.G
        for s in range(2):
            for q, j in G.ball(s, k.A + 4 * k.r):
                if G.basis_norm(s, q, j) > k.A:
                    assert G.norm(s, push.psi(s, {(q, j): 1})) <= G.basis_norm(s, q, j) - k.r

    def test_constants_follow_the_construction(self):
        C = builtin("circle")
        atlas = assemble_atlas(C, 1, certs(C, 1))
        k = PushMaps(C, atlas, 1).constants
        r, M, L = Fraction(atlas.r), Fraction(atlas.M), Fraction(atlas.L)
        Lp = max(Fraction(3, 4) * r + L * L / r, L * L / M) + 3 * L
        assert k.L_prime == Lp and k.A == 2 * Lp


class TestDomination:
    def test_circle(self, circle_model):
        assert [str(h) for h in circle_model.homology()] == ["Z", "0"]
        assert all(c["ok"] for c in circle_model.checks.values() if isinstance(c, dict))

    def test_trefoil_homology_matches_alexander_module(self, trefoil_model):
        H = trefoil_model.homology()
        alex = oracles.t**2 - oracles.t + 1
        assert H[0].free_rank == oracles.companion_group_rank(oracles.t - 1) == 1
        assert H[1].free_rank == oracles.companion_group_rank(alex) == 2
        assert not H[0].torsion and not H[1].torsion

    def test_trefoil_checks(self, trefoil_model):
        names = {"push_homotopy", "pushin", "pusher", "reducer", "starstar", "zeta_two_routes", "ab_homotopic_to_id"}
        assert names <= set(trefoil_model.checks)
        for name in names:
            assert trefoil_model.checks[name]["ok"], (name, trefoil_model.checks[name]["detail"])

    def test_D_is_a_complex_over_the_integers(self, trefoil_model):
        D = trefoil_model.D
        assert D.deck_rank == 0 and all((D.d(i - 1) @ D.d(i)).is_zero() for i in range(2, D.top + 1))
        assert D.ranks == tuple(trefoil_model.ranks())

    def test_b_is_a_chain_map(self, circle_model):
        res = circle_model
        G, T = res.truncation.G, res.truncation
        for s in range(1, res.n + 1):
            for cell in res.basis[s]:
                assert T.zeta(s - 1, G.boundary(s, {cell: 1})) == G.boundary(s, T.zeta(s, {cell: 1}))
                res.b(s, {cell: 1})  # lands in D

    def test_nontrivial_sublattice_refused(self):
        with pytest.raises(ValueError):
            finite_type_reduce(builtin("circle"), 1, sublattice=[2])

    def test_rank_two_refused(self):
        with pytest.raises(ValueError):
            finite_type_reduce(builtin("torus"), 1)

    def test_serializes(self, circle_model):
        obj = json.loads(io.dumps(io.domination_to_json(circle_model)))
        D = io.complex_from_json(obj["D"])
        assert D == circle_model.D and obj["homology"] == ["Z", "0"]


class TestAssembly:
    def test_random_instances(self):
        rng = random.Random(11)
        for _ in range(25):
            P, C, f, g, L = random_assembly_instance(rng)
            res = total_complex_assemble(P, standard_resolution(), C, f, g, L)
            assert res.ok, res.violations[:3]

    def test_wrong_homotopy_sign_is_caught(self):
        rng = random.Random(3)
        caught = 0
        for _ in range(30):
            P, C, f, g, L = random_assembly_instance(rng)
            flipped = {i: -m for i, m in L.items()}
            if any(not m.is_zero() for m in L.values()):
                caught += not total_complex_assemble(P, standard_resolution(), C, f, g, flipped).ok
        assert caught > 0

    def test_longer_resolution_when_unchecked(self):
        rng = random.Random(5)
        P, C, f, g, L = random_assembly_instance(rng)
        t = parse_element("t")
        E = BasedFreeComplex(1, ZZ, (1, 1), {1: Matrix(1, 1, {(0, 0): t * t - t})})
        check_resolution(E)
        E2 = BasedFreeComplex(1, ZZ, (1, 2, 1), {1: Matrix(1, 2, {(0, 0): t - parse_element("1")}), 2: Matrix(2, 1, {(1, 0): t})})
        with pytest.raises(ResolutionError):
            check_resolution(E2)
        assert total_complex_assemble(P, E2, C, f, g, L, resolution=False).ok

    def test_tampered_resolution(self):
        E = BasedFreeComplex(1, ZZ, (1, 1), {1: Matrix(1, 1, {(0, 0): parse_element("t - 2")})})
        with pytest.raises(ResolutionError):
            check_resolution(E)
