from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from sigmakit import (
    GF,
    QQ,
    ZZ,
    BasedFreeComplex,
    Character,
    Matrix,
    SigmaCertificate,
    builtin,
    chain_homotopy,
    chain_map,
    compose,
    iterate,
    iterate_certificate,
    parse_element,
    sigma_membership,
    standard_valuation,
    tensor_coefficients,
    validate,
    verify_certificate,
)
from sigmakit.builders import random_complex
from sigmakit.chain import check_homotopy, identity_map
from sigmakit.lattice import xi_valuation

PLUS, MINUS = Character([1]), Character([-1])


def T(text, rank=1, ring=ZZ):
    return parse_element(text, rank, ring)


def bs12_by_hand():
    d2 = Matrix(2, 1, {(0, 0): T("t - 2")})
    d1 = Matrix(1, 2, {(0, 1): T("t - 1")})
    return BasedFreeComplex(1, ZZ, (1, 2, 1), {1: d1, 2: d2})


def circle_certificate(epsilon=1):
    C = builtin("circle")
    t = T("t")
    A = chain_map(C, C, {0: Matrix(1, 1, {(0, 0): t}), 1: Matrix(1, 1, {(0, 0): t})})
    h = chain_homotopy(C, C, {0: Matrix(1, 1, {(0, 0): T("-1")})})
    return SigmaCertificate(C, PLUS, 1, epsilon, A, h)


class TestValidate:
    def test_builtins(self):
        for name in ("circle", "torus", "wedge-s1-s2", "trefoil", "bs12"):
            assert validate(builtin(name)).ok

    def test_bs12_by_hand(self):
        C = bs12_by_hand()
        assert validate(C).ok
        assert C == builtin("bs12")

    def test_tampered_boundary(self):
        C = bs12_by_hand()
        bad = BasedFreeComplex(1, ZZ, C.ranks, {1: Matrix(1, 2, {(0, 0): T("1"), (0, 1): T("t - 1")}), 2: C.d(2)})
        rep = validate(bad)
        assert not rep.ok and (rep.degree, rep.row, rep.col) == (2, 0, 0)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            BasedFreeComplex(1, ZZ, (1, 2), {1: Matrix(1, 1, {(0, 0): T("t - 1")})})

    def test_random_complexes_validate(self):
        import random

        rng = random.Random(7)
        for _ in range(50):
            assert validate(random_complex(rng, deck_rank=rng.choice([1, 2]))).ok


class TestStandardValuation:
    def test_circle(self):
        v = standard_valuation(builtin("circle"), PLUS)
        assert v.values == ((0,), (0,))

    def test_cycle_gets_zero(self):
        v = standard_valuation(builtin("wedge-s1-s2"), PLUS)
        assert v.basis(2, 0) == 0

    def test_bs12_two_cell(self):
        v = standard_valuation(bs12_by_hand(), PLUS)
        assert v.basis(2, 0) == xi_valuation(T("t - 2"), PLUS) == 0

    @pytest.mark.parametrize("name", ["circle", "torus", "wedge-s1-s2", "trefoil", "bs12"])
    def test_boundary_does_not_lower_value(self, name):
        C = builtin(name)
        for xi in ([Character([1]), Character([-1])] if C.deck_rank == 1 else [Character([1, 2]), Character([-3, 1])]):
            assert standard_valuation(C, xi).respects_boundary(C)


class TestCertificates:
    def test_circle_certificate_accepted(self):
        assert oracles.circle_certificate_identity()
        chk = verify_certificate(circle_certificate())
        assert chk.accepted and chk.shift == 1

    def test_overclaimed_shift_rejected(self):
        chk = verify_certificate(circle_certificate(epsilon=2))
        assert not chk.accepted and chk.shift == 1

    def test_nonpositive_shift_refused(self):
        with pytest.raises(ValueError):
            circle_certificate(epsilon=0)

    def test_broken_homotopy_rejected(self):
        cert = circle_certificate()
        cert.homotopy = chain_homotopy(cert.complex, cert.complex, {0: Matrix(1, 1, {(0, 0): T("1")})})
        chk = verify_certificate(cert)
        assert not chk.accepted and "homotopy" in chk.reason

    def test_zero_complex_vacuous(self):
        Z0 = BasedFreeComplex(1, ZZ, (0,), {})
        cert = SigmaCertificate(Z0, PLUS, 0, 1, chain_map(Z0, Z0, {}), chain_homotopy(Z0, Z0, {}))
        assert verify_certificate(cert).accepted

    def test_iterate_circle(self):
        cert = circle_certificate()
        A3 = iterate(cert.A, 3)
        assert A3.at(0).get(0, 0) == T("t^3")
        c3 = iterate_certificate(cert, 3)
        chk = verify_certificate(c3)
        assert chk.accepted and chk.shift == 3

    def test_compose_identity(self):
        cert = circle_certificate()
        f = compose(cert.A, identity_map(cert.complex))
        assert all(f.at(i) == cert.A.at(i) for i in range(2))

    def test_bs12_minus_certificate_doubles(self):
        v = sigma_membership(builtin("bs12"), MINUS, 2)
        cert = v.certificate
        chk1 = verify_certificate(cert)
        chk2 = verify_certificate(iterate_certificate(cert, 2))
        assert chk1.accepted and chk2.accepted
        assert chk2.shift >= 2 * cert.epsilon

    @pytest.mark.parametrize("name,xi", [("circle", PLUS), ("trefoil", MINUS), ("bs12", MINUS), ("torus", Character([2, 3]))])
    @given(m=st.integers(1, 4))
    def test_telescoped_homotopy(self, name, xi, m):
        C = builtin(name)
        cert = sigma_membership(C, xi, C.top).certificate
        it = iterate_certificate(cert, m)
        assert check_homotopy(it.homotopy, identity_map(C), it.A, range(C.top + 1))
        chk = verify_certificate(it)
        assert chk.accepted and chk.shift >= m * cert.epsilon


class TestTensor:
    def test_q_keeps_entries(self):
        C = tensor_coefficients(bs12_by_hand(), QQ)
        assert C.d(2).get(0, 0) == T("t - 2", ring=QQ)

    def test_mod_two(self):
        C = tensor_coefficients(bs12_by_hand(), GF(2))
        assert C.d(2).get(0, 0) == T("t", ring=GF(2))
        assert validate(C).ok

    def test_zero_matrix_stays_zero(self):
        C = tensor_coefficients(builtin("wedge-s1-s2"), QQ)
        assert C.d(2).is_zero()

    def test_no_map_from_q_to_z(self):
        with pytest.raises(ValueError):
            tensor_coefficients(builtin("circle", QQ), ZZ)


class TestValuationInput:
    def test_user_valuation_violating_boundary_rejected(self):
        from sigmakit import Valuation, certificate_shift

        cert = circle_certificate()
        bad = Valuation(PLUS, ((0,), (3,)))
        with pytest.raises(ValueError, match="v\\(dx\\)"):
            certificate_shift(cert, valuation=bad)

    def test_user_valuation_accepted(self):
        from sigmakit import Valuation, certificate_shift

        cert = circle_certificate()
        shift, _ = certificate_shift(cert, valuation=Valuation(PLUS, ((0,), (-3,))))
        assert shift == 1
