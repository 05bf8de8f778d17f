import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from susybargmann.params import SusyParams
from susybargmann.specfun import (
    DEFAULT_CONFIG,
    ConvergenceError,
    DomainError,
    SeriesConfig,
    _k_asymptotic,
    _k_integral,
    bessel_i,
    bessel_k,
    gaussian_moment,
    hyp0f1,
    log_gamma,
    paired_bessel_i,
)

NUS = (1 / 2, 1 / 4, 3 / 4, 1 / 6, 5 / 6)


def test_series_config_validation():
    with pytest.raises(ValueError):
        SeriesConfig(rel_tol=0)
    with pytest.raises(ValueError):
        SeriesConfig(max_terms=0)
    with pytest.raises(ValueError):
        SeriesConfig(asymptotic_switch=-1)


class TestLogGamma:
    def test_examples(self):
        assert log_gamma(1) == 0
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-15)
        ref = float(mpmath.loggamma(mpmath.mpf("0.25")))
        assert log_gamma(0.25) == pytest.approx(ref, rel=1e-14)
        assert math.exp(log_gamma(0.25)) == pytest.approx(3.6256099082219083, rel=1e-14)

    @pytest.mark.parametrize("x", [0, -1, -0.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=200))
    def test_against_mpmath(self, x):
        ref = float(mpmath.loggamma(x))
        assert abs(log_gamma(x) - ref) <= 1e-13 * max(1.0, abs(ref))


class TestHyp0F1:
    def test_zero_argument(self):
        assert hyp0f1(0.7, 0) == 1

    def test_brute_force_partial_sum(self):
        total, term = 0.0, 1.0
        for l in range(200):
            total += term
            term *= 0.25 / ((0.5 + l) * (l + 1))
        assert hyp0f1(0.5, 0.25) == pytest.approx(total, rel=1e-15)

    def test_sinh_identity(self):
        assert hyp0f1(1.5, 0.25).real == pytest.approx(math.sinh(1.0), rel=1e-15)
        assert math.sinh(1.0) == pytest.approx(1.1752011936, abs=1e-10)

    def test_non_positive_integer_b(self):
        with pytest.raises(DomainError):
            hyp0f1(-2, 1.0)

    def test_non_convergence(self):
        with pytest.raises(ConvergenceError):
            hyp0f1(0.5, 1e6, SeriesConfig(max_terms=5))

    def test_vectorized_and_complex(self):
        z = np.array([0.3 + 0.4j, -2.0, 5j])
        got = hyp0f1(1 / 3, z)
        ref = [complex(mpmath.hyp0f1(mpmath.mpf(1) / 3, complex(v))) for v in z]
        assert np.allclose(got, ref, rtol=1e-14, atol=0)

    @settings(max_examples=60, deadline=None)
    @given(
        st.sampled_from([1 / 6, 1 / 4, 1 / 2, 3 / 4, 5 / 4, 11 / 6, 7 / 6]),
        st.floats(min_value=-20, max_value=20),
        st.floats(min_value=-20, max_value=20),
    )
    def test_against_mpmath(self, b, re, im):
        z = complex(re, im)
        ref = complex(mpmath.hyp0f1(b, z))
        # cancellation is bounded by the sum of absolute terms, i.e. 0F1(b; |z|)
        scale = float(mpmath.hyp0f1(b, abs(z)))
        assert abs(hyp0f1(b, z) - ref) <= 1e-14 * scale

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=0, max_value=50), st.integers(min_value=0, max_value=400))
    def test_more_terms_do_not_move_converged_value(self, x, extra):
        base = hyp0f1(0.25, x)
        more = hyp0f1(0.25, x, SeriesConfig(max_terms=500 + extra))
        assert abs(more - base) <= DEFAULT_CONFIG.rel_tol * abs(base)


class TestBesselI:
    def test_origin(self):
        assert bessel_i(0.3, 0.0) == 0
        assert bessel_i(0, 0.0) == 1

    def test_reference_value(self):
        ref = float(mpmath.besseli(0.25, 2))
        assert bessel_i(0.25, 2.0) == pytest.approx(ref, rel=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(st.sampled_from([-5 / 6, -0.5, -0.25, 0.0, 0.25, 0.5, 5 / 6]), st.floats(min_value=1e-3, max_value=60))
    def test_against_scipy(self, nu, x):
        assert bessel_i(nu, x) == pytest.approx(special.iv(nu, x), rel=1e-12)

    def test_domain_and_overflow(self):
        with pytest.raises(DomainError):
            bessel_i(-1.5, 1.0)
        with pytest.raises(DomainError):
            bessel_i(0.5, -1.0)
        with pytest.raises(OverflowError):
            bessel_i(0.5, 800.0)


class TestBesselK:
    def test_half_closed_form(self):
        assert bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-13)
        assert bessel_k(0.5, 1.0) == pytest.approx(0.46106850445, abs=1e-11)
        assert bessel_k(0.5, 4.0) == pytest.approx(math.sqrt(math.pi / 8) * math.exp(-4), rel=1e-13)

    def test_quarter_reference(self):
        ref = float(mpmath.besselk(0.25, 0.5))
        assert bessel_k(0.25, 0.5) == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("nu", NUS)
    def test_against_mpmath_on_all_branches(self, nu):
        xs = np.geomspace(0.01, 50, 41)
        got = bessel_k(nu, xs)
        ref = np.array([float(mpmath.besselk(nu, x)) for x in xs])
        assert np.all(np.abs(got - ref) <= 1e-9 * ref)
        assert np.all(got > 0)

    @pytest.mark.parametrize("nu", NUS)
    def test_branch_consistency_around_switch(self, nu):
        switch = DEFAULT_CONFIG.asymptotic_switch
        xs = np.linspace(0.95 * switch, 1.05 * switch, 20)
        near, far = _k_integral(nu, xs), _k_asymptotic(nu, xs, DEFAULT_CONFIG)
        assert np.max(np.abs(near - far) / far) <= 1e-9

    @pytest.mark.parametrize("nu, x", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0), (0.5, -1.0)])
    def test_domain(self, nu, x):
        with pytest.raises(DomainError):
            bessel_k(nu, x)

    def test_scalar_in_scalar_out(self):
        assert isinstance(bessel_k(0.5, 3.0), float)


class TestGaussianMoment:
    def test_examples(self):
        assert gaussian_moment(SusyParams(1), 0) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
        assert gaussian_moment(SusyParams(3), 5) == 0
        assert gaussian_moment(SusyParams(2), 2) == pytest.approx(2**-0.25 * math.gamma(0.75), rel=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("j", [0, 2, 4, 8, 14])
    def test_against_adaptive_quadrature(self, n, j):
        ref, _ = integrate.quad(lambda x: x**j * math.exp(-(x ** (2 * n)) / n), -np.inf, np.inf, epsabs=0, epsrel=1e-13)
        assert gaussian_moment(SusyParams(n), j) == pytest.approx(ref, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=30))
    def test_step_ratio(self, n, k):
        j = 2 * k
        p = SusyParams(n)
        ratio = gaussian_moment(p, j + 2 * n) / gaussian_moment(p, j)
        # n^((2n)/(2n)) * Gamma(s + 1) / Gamma(s) with s = (j + 1) / (2n)
        assert ratio == pytest.approx((j + 1) / 2, rel=1e-12)

    def test_negative_order(self):
        with pytest.raises(DomainError):
            gaussian_moment(SusyParams(1), -2)


class TestPairedBesselI:
    @pytest.mark.parametrize("nu", [1 / 4, 1 / 2, 5 / 6])
    def test_against_mpmath(self, nu):
        rng = np.random.default_rng(3)
        u = 20 * rng.uniform(size=10) * np.exp(1j * rng.uniform(-np.pi / 2, np.pi / 2, size=10))
        p = rng.normal(size=10) + 1j * rng.normal(size=10)
        q = rng.normal(size=10) + 1j * rng.normal(size=10)
        got = paired_bessel_i(nu, p, q, u)
        for g, pi_, qi, ui in zip(got, p, q, u):
            with mpmath.workdps(40):
                ref = complex(pi_ * mpmath.besseli(-nu, ui) + qi * mpmath.besseli(nu, ui))
            assert abs(g - ref) <= 1e-13 * abs(ref)

    @pytest.mark.parametrize("nu", [1 / 4, 3 / 4, 5 / 6])
    def test_cancelling_pair_is_a_k_function(self, nu):
        # p = -q: I_{-nu} - I_nu = (2/pi) sin(nu pi) K_nu, which is e^{-2u} smaller than either term
        u = np.array([5.0, 20.0, 40.0 + 3j])
        got = paired_bessel_i(nu, np.ones(3), -np.ones(3), u, root_order=2)
        for g, ui in zip(got, u):
            with mpmath.workdps(60):
                ref = complex(2 / mpmath.pi * mpmath.sin(nu * mpmath.pi) * mpmath.besselk(nu, ui))
            assert abs(g - ref) <= 1e-13 * abs(ref)

    def test_shift_avoids_overflow(self):
        got = paired_bessel_i(0.25, 1.0, 1.0, 800.0, shift=800.0)
        ref = complex(2 * mpmath.besseli(0.25, 800) * mpmath.exp(-800) + 2 / mpmath.pi * mpmath.sin(mpmath.pi / 4) * mpmath.besselk(0.25, 800) * mpmath.exp(-800))
        assert np.isfinite(got) and abs(got - ref) <= 1e-12 * abs(ref)

    def test_left_half_plane_rejected(self):
        with pytest.raises(DomainError):
            paired_bessel_i(0.5, 1.0, 1.0, -1.0)
