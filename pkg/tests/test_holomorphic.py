import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from susybargmann.holomorphic import (
    HoloLadderOp,
    HoloVector,
    apply_holo_ladder,
    basis_constant,
    basis_vector,
    eval_holo,
    holo_inner_product,
    holo_norm,
    kernel_vector,
    radial_moment,
    reproducing_kernel,
    weight,
    weight_asymptotic,
    weight_at_origin,
    weight_normalization,
)
from susybargmann.params import LatticeError, Sector, SectorMismatchError, SusyParams
from susybargmann.quadrature import build_polar_rule, integrate_polar
from susybargmann.realline import LadderOp

FA, FB, FAS, FBS = HoloLadderOp.FRAK_A, HoloLadderOp.FRAK_B, HoloLadderOp.FRAK_A_STAR, HoloLadderOp.FRAK_B_STAR

complexes = st.builds(
    complex, st.floats(min_value=-2, max_value=2, allow_nan=False), st.floats(min_value=-2, max_value=2, allow_nan=False)
)


@st.composite
def holo_vectors(draw, sector=None, n=None, max_level=8):
    n = n or draw(st.integers(min_value=1, max_value=4))
    sector = sector or draw(st.sampled_from(list(Sector)))
    levels = draw(st.sets(st.integers(min_value=0, max_value=max_level), min_size=1, max_size=5))
    coeffs = {sector.exponent(n, l): draw(complexes) for l in levels}
    return HoloVector(SusyParams(n), sector, coeffs)


def scale(F):
    return max([1.0] + [abs(c) for c in F.coeffs.values()])


def coeff_diff(F, G):
    d = F - G
    return max([0.0] + [abs(c) for c in d.coeffs.values()])


class TestBasis:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_e0_is_one(self, n):
        e0 = basis_vector(SusyParams(n), Sector.ONE, 0)
        assert e0.coeffs == {0: pytest.approx(1.0, rel=1e-15)}
        assert eval_holo(e0, 0.3 - 2j) == pytest.approx(1.0, rel=1e-15)

    def test_n1_reduces_to_monomials_over_sqrt_factorial(self):
        p = SusyParams(1)
        for sector in Sector:
            for l in range(12):
                assert basis_constant(p, sector, l) == pytest.approx(1 / math.sqrt(math.factorial(l)), rel=1e-13)
                assert list(basis_vector(p, sector, l).coeffs) == [l]

    def test_n2_sector_two_ground(self):
        e = basis_vector(SusyParams(2), Sector.TWO, 0)
        expected = math.sqrt(math.gamma(0.25) / (4**0.5 * math.gamma(0.75)))
        assert e.coeffs == {1: pytest.approx(expected, rel=1e-14)}

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("sector", list(Sector))
    def test_constants_match_radial_moments(self, n, sector):
        # |e_l|^2 integrates to one against rho: c_l^2 * int |z|^(2k) rho dA = 1
        p = SusyParams(n)
        for l in range(10):
            k = sector.exponent(n, l)
            assert basis_constant(p, sector, l) ** 2 * radial_moment(p, sector, 2 * k) == pytest.approx(1, rel=1e-13)

    def test_second_level_norm_example(self):
        for n in (1, 2, 3):
            p = SusyParams(n)
            F = HoloVector(p, Sector.ONE, {2 * n: 1.0})
            expected = (2 * n) ** 2 * math.gamma(1 + 1 / (2 * n)) / math.gamma(1 / (2 * n))
            assert holo_inner_product(F, F).real == pytest.approx(expected, rel=1e-13)


class TestHoloVector:
    def test_lattice(self):
        with pytest.raises(LatticeError):
            HoloVector(SusyParams(2), Sector.TWO, {0: 1})

    @settings(max_examples=40, deadline=None)
    @given(holo_vectors())
    def test_json_round_trip(self, F):
        doc = json.loads(F.to_json())
        assert doc["version"] == 1
        assert all(isinstance(v, list) and len(v) == 2 for v in doc["coeffs"].values())
        assert HoloVector.from_json(F.to_json()) == F

    @pytest.mark.parametrize(
        "doc",
        [
            {"n": 1, "sector": "one", "coeffs": {"0": 1.0}},
            {"n": 1, "sector": "one", "coeffs": {"0": [1.0]}},
            {"n": 1, "sector": "one"},
            {"n": 1, "sector": "one", "coeffs": {"-1": [1.0, 0.0]}},
        ],
    )
    def test_from_dict_rejects(self, doc):
        with pytest.raises(ValueError):
            HoloVector.from_dict(doc)

    def test_eval_examples(self):
        p = SusyParams(2)
        assert eval_holo(HoloVector.zero(p, Sector.ONE), 1 + 1j) == 0
        assert eval_holo(HoloVector(p, Sector.ONE, {3: 0.7 - 0.1j}), 1.0) == pytest.approx(0.7 - 0.1j)

    @settings(max_examples=40, deadline=None)
    @given(holo_vectors(), complexes)
    def test_horner_matches_naive(self, F, z):
        naive = sum(c * z**k for k, c in F.coeffs.items())
        assert eval_holo(F, z) == pytest.approx(naive, rel=1e-12, abs=1e-12)


class TestHoloLadder:
    def test_examples(self):
        for n in (1, 2, 3):
            p = SusyParams(n)
            assert apply_holo_ladder(FA, basis_vector(p, Sector.ONE, 0)).is_zero()
            assert apply_holo_ladder(FB, HoloVector(p, Sector.TWO, {n - 1: 1.0})).is_zero()
            got = apply_holo_ladder(FA, HoloVector(p, Sector.ONE, {2 * n: 1.0}))
            assert got.sector is Sector.TWO and got.coeffs == {n: 2 * n}

    def test_mismatch(self):
        with pytest.raises(SectorMismatchError):
            apply_holo_ladder(FA, HoloVector(SusyParams(2), Sector.TWO, {1: 1.0}))

    def test_from_real(self):
        assert HoloLadderOp.from_real(LadderOp.B_STAR) is FBS
        for op in LadderOp:
            h = HoloLadderOp.from_real(op)
            assert (h.domain, h.codomain) == (op.domain, op.codomain)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_coupled_relations(self, data):
        n = data.draw(st.integers(min_value=1, max_value=4))
        F = data.draw(holo_vectors(Sector.ONE, n))
        G = data.draw(holo_vectors(Sector.TWO, n))
        lhs = apply_holo_ladder(FAS, apply_holo_ladder(FA, F))
        rhs = apply_holo_ladder(FB, apply_holo_ladder(FBS, F)) - F
        assert coeff_diff(lhs, rhs) <= 1e-12 * scale(rhs)
        lhs = apply_holo_ladder(FA, apply_holo_ladder(FAS, G))
        rhs = apply_holo_ladder(FBS, apply_holo_ladder(FB, G)) + (2 * n - 1) * G
        assert coeff_diff(lhs, rhs) <= 1e-12 * scale(rhs)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_adjoint_pairs_in_coefficients(self, data):
        n = data.draw(st.integers(min_value=1, max_value=3))
        F = data.draw(holo_vectors(Sector.ONE, n))
        G = data.draw(holo_vectors(Sector.TWO, n))
        lhs = holo_inner_product(apply_holo_ladder(FA, F), G)
        rhs = holo_inner_product(F, apply_holo_ladder(FAS, G))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
        lhs = holo_inner_product(apply_holo_ladder(FB, G), F)
        rhs = holo_inner_product(G, apply_holo_ladder(FBS, F))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_adjointness_under_the_measure(self, n):
        # quadrature of <frak_a F, G>_2 against <F, z^n G>_1
        p = SusyParams(n)
        rng = np.random.default_rng(7 + n)
        F = HoloVector(p, Sector.ONE, {Sector.ONE.exponent(n, l): complex(*rng.standard_normal(2)) for l in range(5)})
        G = HoloVector(p, Sector.TWO, {Sector.TWO.exponent(n, l): complex(*rng.standard_normal(2)) for l in range(4)})
        aF, zG = apply_holo_ladder(FA, F), apply_holo_ladder(FAS, G)
        r2 = build_polar_rule(p, Sector.TWO, max(aF.max_exponent, G.max_exponent), 1e-11)
        r1 = build_polar_rule(p, Sector.ONE, max(F.max_exponent, zG.max_exponent), 1e-11)
        lhs = integrate_polar(lambda z, zb: eval_holo(aF, z) * np.conj(eval_holo(G, z)), r2)
        rhs = integrate_polar(lambda z, zb: eval_holo(F, z) * np.conj(eval_holo(zG, z)), r1)
        assert abs(lhs - rhs) <= 1e-7 * max(1.0, abs(lhs))
        assert abs(lhs - holo_inner_product(aF, G)) <= 1e-7 * max(1.0, abs(lhs))


class TestInnerProduct:
    def test_orthonormal_basis(self):
        p = SusyParams(3)
        for sector in Sector:
            for l in range(6):
                for m in range(6):
                    val = holo_inner_product(basis_vector(p, sector, l), basis_vector(p, sector, m))
                    assert val == pytest.approx(1.0 if l == m else 0.0, abs=1e-14)

    def test_sesquilinear(self):
        p = SusyParams(2)
        F = HoloVector(p, Sector.ONE, {0: 1.0, 3: 2j})
        G = HoloVector(p, Sector.ONE, {3: 1 - 1j})
        assert holo_inner_product(F, 1j * G) == pytest.approx(-1j * holo_inner_product(F, G))
        assert holo_inner_product(G, F) == pytest.approx(np.conj(holo_inner_product(F, G)))
        assert holo_norm(F) ** 2 == pytest.approx(holo_inner_product(F, F).real)

    def test_mismatch(self):
        with pytest.raises(SectorMismatchError):
            holo_inner_product(basis_vector(SusyParams(2), Sector.ONE, 0), basis_vector(SusyParams(2), Sector.TWO, 0))


class TestWeight:
    def test_n1_is_classical_gaussian(self):
        p = SusyParams(1)
        r = np.linspace(0, 3, 61)
        for sector in Sector:
            assert np.max(np.abs(weight(p, sector, r) - np.exp(-r * r) / np.pi)) <= 1e-12
            assert np.max(np.abs(weight(p, sector, r * np.exp(0.7j)) - np.exp(-r * r) / np.pi)) <= 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_against_scipy_kv(self, n):
        p = SusyParams(n)
        r = np.linspace(0.05, 2.2, 40)
        for sector, nu in ((Sector.ONE, 1 - 1 / (2 * n)), (Sector.TWO, 1 / (2 * n))):
            ref = weight_normalization(p) * r ** (2 * n - 1) * special.kv(nu, r ** (2 * n) / n)
            assert np.allclose(weight(p, sector, r), ref, rtol=1e-9, atol=1e-300)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_origin_limits(self, n):
        p = SusyParams(n)
        for sector in Sector:
            near = weight(p, sector, 1e-4)
            assert weight(p, sector, 0.0) == pytest.approx(near, rel=1e-3, abs=1e-6)
        assert weight(SusyParams(2), Sector.TWO, 0.0) == 0.0
        assert weight_at_origin(SusyParams(1), Sector.TWO) == pytest.approx(1 / math.pi)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_positive_and_radial(self, n):
        p = SusyParams(n)
        z = np.array([0.1, 0.5j, -1 - 1j, 1.7])
        for sector in Sector:
            w = weight(p, sector, z)
            assert np.all(w > 0)
            assert np.allclose(w, weight(p, sector, np.abs(z)), rtol=0, atol=0)

    def test_asymptotic_form(self):
        p = SusyParams(2)
        ratio = weight(p, Sector.ONE, 3.0) / weight_asymptotic(p, Sector.ONE, 3.0)
        assert abs(ratio - 1) <= 0.02
        corrected = weight(p, Sector.ONE, 3.0) / weight_asymptotic(p, Sector.ONE, 3.0, corrected=True)
        assert abs(corrected - 1) <= abs(ratio - 1)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("sector", list(Sector))
    @pytest.mark.parametrize("m", [0, 1, 4])
    def test_radial_moment_against_quadrature(self, n, sector, m):
        p = SusyParams(n)
        ref, _ = integrate.quad(lambda r: 2 * math.pi * r ** (m + 1) * weight(p, sector, r), 0, np.inf, epsrel=1e-12)
        assert radial_moment(p, sector, m) == pytest.approx(ref, rel=1e-9)

    def test_masses(self):
        # rho_1 integrates to one for every n; rho_2 only for n = 1
        for n in (1, 2, 3):
            assert radial_moment(SusyParams(n), Sector.ONE, 0) == pytest.approx(1, rel=1e-13)
        assert radial_moment(SusyParams(1), Sector.TWO, 0) == pytest.approx(1, rel=1e-13)
        assert radial_moment(SusyParams(2), Sector.TWO, 0) == pytest.approx(0.5990701173677961, rel=1e-12)


def mp_reproducing(n, sector, zeta):
    with mpmath.workdps(50):
        nn = mpmath.mpf(n)
        s = 1 / (2 * nn)
        Z = mpmath.mpc(zeta)
        arg = Z ** (2 * n) / (2 * nn) ** 2
        if sector is Sector.ONE:
            c = mpmath.gamma(s) / mpmath.gamma(2 - s) / (2 * nn) ** (2 - 1 / nn)
            return complex(mpmath.hyp0f1(s, arg) + c * Z ** (2 * n - 1) * mpmath.hyp0f1(2 - s, arg))
        c = mpmath.gamma(s) / mpmath.gamma(1 - s) / (2 * nn) ** (1 - 1 / nn)
        return complex(c * Z ** (n - 1) * mpmath.hyp0f1(1 - s, arg) + Z**n * mpmath.hyp0f1(1 + s, arg))


class TestReproducingKernel:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("sector", list(Sector))
    def test_relative_accuracy_where_kernel_decays(self, n, sector):
        # along directions with Re (z conj w)^n < 0 the two 0F1 pieces cancel by many orders
        p = SusyParams(n)
        rng = np.random.default_rng(11 * n)
        radii = 4 * np.sqrt(rng.uniform(size=60))
        phases = np.concatenate([2 * np.pi * rng.uniform(size=40), np.pi * (2 * np.arange(20) % (2 * n) + 1) / n])
        for r, phi in zip(radii, phases):
            zeta = r * complex(math.cos(phi), math.sin(phi))
            ref = mp_reproducing(n, sector, zeta)
            assert abs(reproducing_kernel(p, sector, 1.0, zeta) - ref) <= 1e-12 * abs(ref)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("sector", list(Sector))
    def test_partial_sums(self, n, sector):
        p = SusyParams(n)
        rng = np.random.default_rng(n)
        for _ in range(8):
            w, z = (complex(*rng.uniform(-1.4, 1.4, 2)) for _ in range(2))
            partial = eval_holo(kernel_vector(p, sector, w, 60), z)
            assert abs(reproducing_kernel(p, sector, w, z) - partial) <= 1e-10 * max(1.0, abs(partial))

    def test_origin_and_n1(self):
        for n in (1, 2, 3):
            assert reproducing_kernel(SusyParams(n), Sector.ONE, 1.3 - 0.2j, 0.0) == pytest.approx(1.0)
        p = SusyParams(1)
        for sector in Sector:
            for w, z in ((1 + 1j, 0.5 - 2j), (-2, 2), (1.4j, 0.3)):
                assert reproducing_kernel(p, sector, w, z) == pytest.approx(np.exp(z * np.conj(w)), rel=1e-12)

    def test_n2_brute_force_sum(self):
        p = SusyParams(2)
        total = sum(basis_constant(p, Sector.ONE, l) ** 2 for l in range(60))
        assert reproducing_kernel(p, Sector.ONE, 1.0, 1.0) == pytest.approx(total, rel=1e-13)

    def test_against_mpmath_hyp0f1(self):
        n, w, z = 3, 0.8 + 0.3j, -1.1 + 0.4j
        zeta = mpmath.mpc(z) * mpmath.conj(mpmath.mpc(w))
        s = mpmath.mpf(1) / (2 * n)
        arg = zeta ** (2 * n) / (2 * n) ** 2
        ref = mpmath.hyp0f1(s, arg) + mpmath.gamma(s) / mpmath.gamma(2 - s) * zeta ** (2 * n - 1) / (
            2 * n
        ) ** (2 - mpmath.mpf(1) / n) * mpmath.hyp0f1(2 - s, arg)
        assert reproducing_kernel(SusyParams(n), Sector.ONE, w, z) == pytest.approx(complex(ref), rel=1e-13)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=1, max_value=3), st.sampled_from(list(Sector)), complexes, complexes)
    def test_hermitian_symmetry(self, n, sector, w, z):
        p = SusyParams(n)
        a = reproducing_kernel(p, sector, w, z)
        b = reproducing_kernel(p, sector, z, w)
        assert abs(a - np.conj(b)) <= 1e-12 * max(1.0, abs(a))

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_reproducing_property(self, data):
        n = data.draw(st.integers(min_value=1, max_value=3))
        sector = data.draw(st.sampled_from(list(Sector)))
        F = data.draw(holo_vectors(sector, n))
        r = data.draw(st.floats(min_value=0, max_value=1.5))
        t = data.draw(st.floats(min_value=0, max_value=2 * math.pi))
        w = r * complex(math.cos(t), math.sin(t))
        Fw = kernel_vector(F.params, sector, w, 60)
        assert abs(holo_inner_product(F, Fw) - eval_holo(F, w)) <= 1e-8 * max(1.0, abs(eval_holo(F, w)))
