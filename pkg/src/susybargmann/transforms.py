"""Coupled-SUSY Segal-Bargmann transforms B_1 : H_1 -> F_1 and B_2 : H_2 -> F_2.

Two independent routes are provided: spectral transport of expansion
coefficients (psi_l -> e_l) and quadrature against the integral kernel
A(z, x) = exp(-z^(2n)/(2n)) B(z, x) exp(-x^(2n)/(2n)).
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import holomorphic as holo
from .holomorphic import HoloLadderOp, HoloVector, apply_holo_ladder, basis_constant, holo_norm
from .params import Sector, SectorMismatchError, SusyParams
from .quadrature import PolarRule, RealRule, build_polar_rule, build_real_rule
from .realline import LadderOp, WeightedPoly, apply_ladder, eigenfunction, eval_real, inner_product, norm
from .specfun import DEFAULT_CONFIG, SeriesConfig, hyp0f1, log_gamma, paired_bessel_i

__all__ = [
    "CalibrationWarning",
    "ExpansionError",
    "KernelConstants",
    "SingularPointError",
    "TransformResult",
    "angular_count_for",
    "coherent_residual",
    "diagram_residual",
    "forward_quadrature",
    "forward_spectral",
    "inverse_quadrature",
    "inverse_spectral",
    "kernel_A",
    "kernel_B",
    "kernel_bandwidth",
    "kernel_constants",
    "kernel_series_coefficients",
    "transform",
]

SERIES_TERMS = 60


class CalibrationWarning(UserWarning):
    """A quadrature rule is resolved below what the integrand requires."""


class ExpansionError(ValueError):
    pass


class SingularPointError(ValueError):
    pass


@dataclass(frozen=True)
class KernelConstants:
    alpha: float
    beta: float


@dataclass(frozen=True)
class TransformResult:
    holo: HoloVector
    residual_vs_quadrature: float | None = None

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "holo": self.holo.to_dict(),
            "residual_vs_quadrature": self.residual_vs_quadrature,
        }


@functools.lru_cache(maxsize=None)
def kernel_constants(params: SusyParams) -> KernelConstants:
    n = params.n
    half_log_gamma = 0.5 * log_gamma(1 / (2 * n))
    alpha = math.exp((0.5 - 1 / (4 * n)) * math.log(n) + half_log_gamma)
    beta = math.exp(
        (-0.5 + 1 / (2 * n)) * math.log(2) + (-0.5 + 3 / (4 * n)) * math.log(n) + half_log_gamma
    )
    return KernelConstants(alpha, beta)


def kernel_series_coefficients(params: SusyParams, sector: Sector, terms: int = SERIES_TERMS) -> dict[int, float]:
    """Coefficients c_k of B(z, x) = sum_k c_k (z x)^k, ``terms`` per constituent series."""
    return {k: math.exp(v) for k, v in _log_kernel_coefficients(params, Sector.parse(sector), terms).items()}


@functools.lru_cache(maxsize=None)
def _log_kernel_coefficients(params: SusyParams, sector: Sector, terms: int) -> dict[int, float]:
    n = params.n
    s = 1 / (2 * n)
    kc = kernel_constants(params)
    if sector is Sector.ONE:
        first = (kc.alpha, 0, s, 0.0)
        second = (kc.beta, 2 * n - 1, 2 - s, 0.5)
    else:
        first = (kc.beta, n - 1, 1 - s, 0.0)
        second = (kc.alpha, n, 1 + s, 0.5)
    log2, log2n = math.log(2), math.log(2 * n)
    out = {}
    for const, offset, shift, half in (first, second):
        extra = 1 if half else 0
        for l in range(terms):
            log_c = (
                (l + half) * log2
                - (2 * l + extra) * log2n
                - log_gamma(l + shift)
                - math.lgamma(l + 1)
            )
            out[2 * n * l + offset] = math.log(const) + log_c
    return dict(sorted(out.items()))


# below this |u| the 0F1 series has no harmful cancellation
_BESSEL_SWITCH = 1.0


def _series_form(params: SusyParams, sector: Sector, zx: np.ndarray, config: SeriesConfig) -> np.ndarray:
    n = params.n
    s = 1 / (2 * n)
    kc = kernel_constants(params)
    arg = zx ** (2 * n) / (2 * n * n)
    if sector is Sector.ONE:
        c1 = kc.alpha / math.exp(log_gamma(s))
        c2 = kc.beta / (math.sqrt(2) * n * math.exp(log_gamma(2 - s)))
        return c1 * hyp0f1(s, arg, config) + c2 * zx ** (2 * n - 1) * hyp0f1(2 - s, arg, config)
    c1 = kc.beta / math.exp(log_gamma(1 - s))
    c2 = math.sqrt(2) * kc.alpha / math.exp(log_gamma(s))
    return c1 * zx ** (n - 1) * hyp0f1(1 - s, arg, config) + c2 * zx**n * hyp0f1(1 + s, arg, config)


def _bessel_form(params: SusyParams, sector: Sector, zx: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """exp(-shift) B through modified Bessel functions of u = sqrt(2) (zx)^n / n.

    B = P I_{-nu}(u) + Q I_nu(u) where Q / P is a 2n-th root of unity; the
    sign of u is chosen so Re u >= 0 (both Bessel products are even in u).
    """
    n = params.n
    s = 1 / (2 * n)
    kc = kernel_constants(params)
    u = math.sqrt(2) * zx**n / n
    u = np.where(u.real < 0, -u, u)
    half = u / 2
    if sector is Sector.ONE:
        nu = 1 - s
        P = kc.alpha * half**nu
        Q = kc.beta / (math.sqrt(2) * n) * zx ** (2 * n - 1) * half ** (-nu)
    else:
        nu = s
        P = kc.beta * zx ** (n - 1) * half**nu
        Q = math.sqrt(2) * kc.alpha * s * zx**n * half ** (-nu)
    return paired_bessel_i(nu, P, Q, u, shift, root_order=2 * n)


def _kernel_B_scaled(params, sector, z, x, shift, config):
    zx = np.asarray(z, dtype=complex) * np.asarray(x, dtype=complex)
    shift = np.broadcast_to(np.asarray(shift, dtype=complex), zx.shape)
    zx, shift = np.broadcast_arrays(zx, shift)
    small = np.abs(zx) ** params.n * math.sqrt(2) / params.n <= _BESSEL_SWITCH
    out = np.empty(zx.shape, dtype=complex)
    if small.any():
        out[small] = _series_form(params, sector, zx[small], config) * np.exp(-shift[small])
    if (~small).any():
        out[~small] = _bessel_form(params, sector, zx[~small], shift[~small])
    return out


def kernel_B(params: SusyParams, sector: Sector, z, x, config: SeriesConfig = DEFAULT_CONFIG):
    """B_1 (sector one) or B_2 (sector two); depends on z x only.

    Small arguments use the 0F1 closed forms. Larger ones use a
    cancellation-free Bessel I / K form, since the two 0F1 pieces grow
    exponentially and cancel where B itself decays.
    """
    sector = Sector.parse(sector)
    scalar = np.ndim(z) == 0 and np.ndim(x) == 0
    out = _kernel_B_scaled(params, sector, z, x, 0.0, config)
    return out.item() if scalar else out


def kernel_A(params: SusyParams, sector: Sector, z, x, config: SeriesConfig = DEFAULT_CONFIG):
    """A(z, x) = exp(-(z^(2n) + x^(2n)) / (2n)) B(z, x), with the Gaussian exponents
    folded into the Bessel scaling before any exponentiation."""
    sector = Sector.parse(sector)
    scalar = np.ndim(z) == 0 and np.ndim(x) == 0
    z = np.asarray(z, dtype=complex)
    x = np.asarray(x, dtype=float)
    n = params.n
    shift = (z ** (2 * n) + x ** (2 * n)) / (2 * n)
    out = _kernel_B_scaled(params, sector, z, x, shift, config)
    return out.item() if scalar else out


def _ladder_sector_basis(f: WeightedPoly) -> int:
    return f.sector.levels_up_to(f.params.n, f.max_exponent)


def forward_spectral(f: WeightedPoly, tol: float = 1e-9) -> HoloVector:
    """Expand f over {psi_l} and emit the same coefficients over {e_l}."""
    params, sector = f.params, f.sector
    levels = _ladder_sector_basis(f)
    coeffs = [inner_product(f, eigenfunction(params, sector, l)) for l in range(levels)]
    approx = WeightedPoly.zero(params, sector)
    for l, c in enumerate(coeffs):
        approx = approx + c * eigenfunction(params, sector, l)
    residual = norm(f - approx)
    if residual > tol * max(1.0, norm(f)):
        raise ExpansionError(f"expansion residual {residual:.3g} exceeds {tol:g}")
    n = params.n
    return HoloVector(
        params,
        sector,
        {sector.exponent(n, l): c * basis_constant(params, sector, l) for l, c in enumerate(coeffs)},
    )


def inverse_spectral(F: HoloVector) -> WeightedPoly:
    """Inverse transport for real-coefficient F."""
    params, sector = F.params, F.sector
    out = WeightedPoly.zero(params, sector)
    for l, c in F.basis_coefficients().items():
        if abs(c.imag) > 1e-12 * max(1.0, abs(c)):
            raise ValueError("inverse_spectral only represents real coefficient vectors")
        out = out + c.real * eigenfunction(params, sector, l)
    return out


def _log_abs_moment(n: int, m: int) -> float:
    """ln of int |x|^m exp(-x^(2n)/n) dx."""
    s = (m + 1) / (2 * n)
    return (s - 1) * math.log(n) + math.lgamma(s)


def kernel_bandwidth(params: SusyParams, sector: Sector, z_abs: float, f: WeightedPoly, tol: float) -> int:
    """Extra polynomial degree the real rule needs to resolve B(z, .) against f for |z| <= z_abs.

    Smallest K with sum_{k > K} |c_k| z_abs^k sum_j |f_j| int |x|^(k+j) e^(-x^(2n)/n) dx
    below tol * 1e-2.
    """
    log_coeffs = _log_kernel_coefficients(params, Sector.parse(sector), 4 * SERIES_TERMS)
    n = params.n
    terms = []
    for k, log_c in log_coeffs.items():
        if z_abs == 0:
            mag = math.exp(log_c) if k == 0 else 0.0
        else:
            mag = sum(
                math.exp(log_c + k * math.log(z_abs) + math.log(abs(fj)) + _log_abs_moment(n, k + j))
                for j, fj in f.coeffs.items()
            )
        terms.append((k, mag))
    tail = 0.0
    needed = 0
    for k, mag in reversed(terms):
        tail += mag
        if tail > tol * 1e-2:
            needed = k
            break
    return needed


def forward_quadrature(f: WeightedPoly, rule: RealRule, z, config: SeriesConfig = DEFAULT_CONFIG):
    """Transform value at z by quadrature of int A(z, x) f(x) dx."""
    params, sector = f.params, f.sector
    if rule.n != params.n:
        raise SectorMismatchError(f"rule built for n={rule.n}, function has n={params.n}")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if f.is_zero():
        return 0j if scalar else np.zeros(z.shape, dtype=complex)
    z_abs = float(np.max(np.abs(z)))
    needed = f.max_exponent + kernel_bandwidth(params, sector, z_abs, f, rule.tol)
    if rule.max_degree < needed:
        warnings.warn(
            f"real rule resolves degree {rule.max_degree}, integrand needs {needed} at |z|={z_abs:.3g}",
            CalibrationWarning,
            stacklevel=2,
        )
    n = params.n
    x = rule.nodes
    fx = eval_real(f, x) * np.exp(-(x ** (2 * n)) / (2 * n))
    B = kernel_B(params, sector, z[:, None], x[None, :], config)
    integral = (B * fx[None, :]) @ rule.weights
    out = np.exp(-(z ** (2 * n)) / (2 * n)) * integral
    return out.item() if scalar else out


def forward_rule(f: WeightedPoly, z_abs: float, tol: float = 1e-12, **kwargs) -> RealRule:
    """Real rule calibrated for f plus the kernel bandwidth at |z| <= z_abs."""
    needed = f.max_exponent + kernel_bandwidth(f.params, f.sector, z_abs, f, tol)
    return build_real_rule(f.params, needed, tol, **kwargs)


def angular_count_for(
    params: SusyParams,
    sector: Sector,
    F: HoloVector,
    tol: float,
    amplitude=lambda level: 1.0,
) -> int:
    """Even angular count M >= 2 deg F + 4 such that aliasing of an expansion
    sum_l amplitude(l) conj(e_l) against F stays below tol * 1e-2.

    The aliased pairs are kernel exponents k = k_F + j M (j >= 1); each is
    bounded by |F_k_F| amplitude c_k int |z|^(k + k_F) rho dA.
    """
    sector = Sector.parse(sector)
    n = params.n
    M = 2 * F.max_exponent + 4
    M += M % 2
    coeffs = {k: abs(c) for k, c in F.coeffs.items()}

    def alias(M):
        total = 0.0
        for kf, cf in coeffs.items():
            j = 1
            while True:
                k = kf + j * M
                if sector.admits(k, n):
                    l = sector.level(n, k)
                    term = cf * amplitude(l) * math.exp(
                        math.log(holo.radial_moment(params, sector, k + kf)) + holo._log_basis_constant(params, sector, l)
                    )
                    total += term
                    if term < tol * 1e-6:
                        break
                j += 1
                if j > 64:
                    break
        return total

    while alias(M) > tol * 1e-2:
        M += 2
    return M


def inverse_rule(F: HoloVector, tol: float = 1e-10, **kwargs) -> PolarRule:
    M = angular_count_for(F.params, F.sector, F, tol)
    return build_polar_rule(F.params, F.sector, F.max_exponent, tol, angular_count=M, **kwargs)


def inverse_quadrature(F: HoloVector, rule: PolarRule, x, config: SeriesConfig = DEFAULT_CONFIG):
    """B^-1 F(x) = int A(conj z, x) F(z) rho dA(z); the imaginary part is returned, not dropped."""
    params, sector = F.params, F.sector
    if rule.sector is not sector or rule.n != params.n:
        raise SectorMismatchError("polar rule does not match the vector's sector / n")
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if F.is_zero():
        return 0j if scalar else np.zeros(xs.shape, dtype=complex)
    if rule.max_exponent < F.max_exponent:
        warnings.warn(
            f"polar rule resolves exponent {rule.max_exponent}, vector has {F.max_exponent}",
            CalibrationWarning,
            stacklevel=2,
        )
    n = params.n
    z = rule.points()
    zb = np.conj(z)
    Fz = holo.eval_holo(F, z)
    gauss_z = np.exp(-(zb ** (2 * n)) / (2 * n))
    out = np.empty(xs.shape, dtype=complex)
    for i, xv in enumerate(xs):
        A = gauss_z * kernel_B(params, sector, zb, xv, config) * math.exp(-(xv ** (2 * n)) / (2 * n))
        ring = (A * Fz).mean(axis=1)
        out[i] = np.sum(rule.radial_weights * rule.density * ring)
    return out.item() if scalar else out


def transform(f: WeightedPoly, sample_points=None, tol: float = 1e-12) -> TransformResult:
    """Spectral transform plus the max deviation from the quadrature path at ``sample_points``."""
    F = forward_spectral(f)
    if sample_points is None:
        return TransformResult(F)
    pts = np.atleast_1d(np.asarray(sample_points, dtype=complex))
    rule = forward_rule(f, float(np.max(np.abs(pts))) if pts.size else 0.0, tol)
    quad = forward_quadrature(f, rule, pts)
    residual = float(np.max(np.abs(quad - holo.eval_holo(F, pts)))) if pts.size else 0.0
    return TransformResult(F, residual)


def diagram_residual(params: SusyParams, op: LadderOp, f: WeightedPoly) -> float:
    """Holomorphic-norm distance between B(op f) and op' B(f)."""
    op = LadderOp(op)
    if f.params != params:
        raise SectorMismatchError("params mismatch")
    lhs = forward_spectral(apply_ladder(op, f))
    rhs = apply_holo_ladder(HoloLadderOp.from_real(op), forward_spectral(f))
    return holo_norm(lhs - rhs)


def _series_eval(coeffs: dict[int, float], z: complex, x: float, shift: int = 0, factor=None) -> complex:
    """sum_k c_k factor(k) z^k x^(k + shift), powered as (z x)^k x^shift to stay in range."""
    zx = z * x
    total = 0j
    for k, c in coeffs.items():
        f = 1.0 if factor is None else factor(k)
        if f == 0:
            continue
        if x == 0:
            total += c * f * z**k * x ** (k + shift)
        else:
            total += c * f * zx**k * x**shift
    return total


def coherent_residual(params: SusyParams, z: complex, x: float, terms: int = SERIES_TERMS) -> float:
    """Relative residual of a_x A_1 = z^n A_2 and b_x A_2 = z^n A_1.

    The x-derivatives are taken term by term on the truncated B-series;
    residuals are scaled by the sum of magnitudes of the terms involved.
    The factor exp(-(z^(2n) + x^(2n)) / (2n)) is common to every term of
    both relations and cancels from the relative residual, so it is never
    formed (it over- or underflows for moderate |z| when n >= 2).
    """
    n = params.n
    if x == 0 and n >= 2:
        raise SingularPointError("the ladder operators carry x^(1-n); x = 0 is excluded for n >= 2")
    z = complex(z)
    x = float(x)
    c1 = kernel_series_coefficients(params, Sector.ONE, terms)
    c2 = kernel_series_coefficients(params, Sector.TWO, terms)
    B1 = _series_eval(c1, z, x)
    B2 = _series_eval(c2, z, x)
    # x^(1-n) d/dx B1 and d/dx (x^(1-n) B2), evaluated term by term
    dB1 = _series_eval(c1, z, x, shift=-n, factor=lambda k: k)
    dxB2 = _series_eval(c2, z, x, shift=-n, factor=lambda k: k + 1 - n)
    s = math.sqrt(0.5)
    xn = x**n
    # with G = x^(2n)/(2n): x^(1-n) d/dx (e^-G B) = e^-G (x^(1-n) B' - x^n B), and the
    # operators add x^n e^-G B back
    a_terms = (s * dB1, -s * xn * B1, s * xn * B1)
    b_terms = (s * dxB2, -s * xn * B2, s * xn * B2)
    rhs_a = z**n * B2
    rhs_b = z**n * B1
    res = []
    for terms_, rhs in ((a_terms, rhs_a), (b_terms, rhs_b)):
        lhs = sum(terms_)
        scale = sum(abs(t) for t in terms_) + abs(rhs)
        res.append(0.0 if scale == 0 else abs(lhs - rhs) / scale)
    return max(res)
