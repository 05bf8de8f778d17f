"""Scalar special functions: log-gamma, 0F1, modified Bessel I and K, and
moments of the generalized Gaussian exp(-x^(2n)/n).

All functions accept numpy arrays for their continuous argument and return
a Python scalar when given a scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ive, kve

from .params import SusyParams

__all__ = [
    "paired_bessel_i",
    "ConvergenceError",
    "DomainError",
    "SeriesConfig",
    "DEFAULT_CONFIG",
    "log_gamma",
    "hyp0f1",
    "bessel_i",
    "bessel_k",
    "gaussian_moment",
]


class DomainError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SeriesConfig:
    rel_tol: float = 1e-15
    max_terms: int = 500
    asymptotic_switch: float = 10.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.asymptotic_switch > 0:
            raise ValueError("asymptotic_switch must be positive")


DEFAULT_CONFIG = SeriesConfig()

# Below this argument I_{-nu} - I_nu loses at most ~e^(2x) * eps to cancellation.
_REFLECTION_MAX = 2.0
# Step of the trapezoid rule for K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.
_TRAPEZOID_STEP = 0.1
_MAX_ASYMPTOTIC_TERMS = 40


def _scalar_out(value, scalar: bool):
    if scalar:
        return value.item()
    return value


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def hyp0f1(b: float, z, config: SeriesConfig = DEFAULT_CONFIG):
    """Confluent hypergeometric limit function sum_l z^l / ((b)_l l!).

    The ascending series is summed until the geometric tail bound
    ``|t_{l+1}| / (1 - r)`` (with ``r`` the, eventually decreasing, term
    ratio) falls below ``rel_tol * |partial sum|``.
    """
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"0F1 undefined for non-positive integer b={b}")
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    total = np.ones_like(z)
    term = np.ones_like(z)
    absz = np.abs(z)
    done = absz == 0
    for l in range(config.max_terms):
        if done.all():
            break
        term = term * z / ((b + l) * (l + 1))
        total = total + np.where(done, 0, term)
        ratio = absz / (abs(b + l + 1) * (l + 2))
        tail = np.abs(term) * ratio / np.where(ratio < 1, 1 - ratio, np.nan)
        # ratio decreases monotonically once l + 1 > -b, so the bound is valid
        converged = (ratio < 1) & (b + l + 1 > 0) & (tail <= config.rel_tol * np.abs(total))
        done = done | converged
    else:
        if not done.all():
            raise ConvergenceError(
                f"0F1(;{b};z) did not converge in {config.max_terms} terms "
                f"(max |z| = {absz[~done].max():.3g})"
            )
    return _scalar_out(total, scalar)


def bessel_i(nu: float, x, config: SeriesConfig = DEFAULT_CONFIG):
    """Modified Bessel function of the first kind via (x/2)^nu/Gamma(nu+1) 0F1(;nu+1;x^2/4)."""
    if not nu > -1:
        raise DomainError(f"bessel_i requires nu > -1, got {nu}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_i requires x >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        log_half = np.log(x / 2)
        growth = np.where(x > 0, nu * log_half, 0.0) + x - math.lgamma(nu + 1)
    if np.any(growth > 700):
        raise OverflowError(f"I_{nu}(x) overflows for x up to {x.max()}")
    series = hyp0f1(nu + 1, x * x / 4, config)
    series = np.real(series)
    with np.errstate(divide="ignore", invalid="ignore"):
        prefactor = np.where(x > 0, np.exp(nu * log_half - math.lgamma(nu + 1)), 0.0)
    if nu == 0:
        prefactor = np.where(x == 0, 1.0, prefactor)
    elif nu < 0:
        prefactor = np.where(x == 0, np.inf, prefactor)
    return _scalar_out(prefactor * series, scalar)


def _k_reflection(nu, x, config):
    return math.pi / (2 * math.sin(nu * math.pi)) * (bessel_i(-nu, x, config) - bessel_i(nu, x, config))


def _k_integral(nu, x):
    x = np.asarray(x, dtype=float)
    # exp(-x cosh t) < 1e-320 once x cosh t > 737
    t_max = math.acosh(max(737.0 / float(np.min(x)), 1.0)) + _TRAPEZOID_STEP
    t = np.arange(0.0, t_max, _TRAPEZOID_STEP)
    w = np.full(t.shape, _TRAPEZOID_STEP)
    w[0] *= 0.5
    integrand = np.exp(-np.multiply.outer(x, np.cosh(t))) * np.cosh(nu * t)
    return integrand @ w


def _k_asymptotic(nu, x, config):
    """Large-x expansion, summed up to the smallest term (optimal truncation)."""
    x = np.asarray(x, dtype=float)
    mu = 4.0 * nu * nu
    total = np.ones_like(x)
    term = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    for k in range(1, _MAX_ASYMPTOTIC_TERMS + 1):
        nxt = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        growing = np.abs(nxt) >= np.abs(term)
        done = done | growing
        total = total + np.where(done, 0.0, nxt)
        term = np.where(done, term, nxt)
        done = done | (np.abs(nxt) <= config.rel_tol * np.abs(total))
        if done.all():
            break
    return np.sqrt(math.pi / (2 * x)) * np.exp(-x) * total


def bessel_k(nu: float, x, config: SeriesConfig = DEFAULT_CONFIG):
    """Modified Bessel function of the second kind for 0 < nu < 1, x > 0.

    Branches: reflection formula pi/(2 sin nu pi) (I_{-nu} - I_nu) for
    x <= 2, trapezoidal quadrature of the cosh integral representation up
    to ``config.asymptotic_switch``, and the large-x expansion beyond.
    """
    if not 0 < nu < 1:
        raise DomainError(f"bessel_k requires 0 < nu < 1, got {nu}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("bessel_k requires x > 0")
    out = np.empty_like(x)
    small = x <= _REFLECTION_MAX
    large = x >= config.asymptotic_switch
    middle = ~small & ~large
    if small.any():
        out[small] = _k_reflection(nu, x[small], config)
    if middle.any():
        out[middle] = _k_integral(nu, x[middle])
    if large.any():
        out[large] = _k_asymptotic(nu, x[large], config)
    return _scalar_out(out, scalar)


def paired_bessel_i(nu: float, p, q, u, shift=0.0, root_order: int | None = None):
    """exp(-shift) (p I_{-nu}(u) + q I_nu(u)) for complex u with Re u >= 0.

    Both terms grow like e^u and can cancel to leave a decaying remainder.
    Rewriting I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu gives
    (p + q) I_nu(u) + p (2/pi) sin(nu pi) K_nu(u), in which nothing cancels
    once p + q is known exactly. When ``root_order`` is given, q / p is
    known to be a root of unity of that order; it is snapped to the exact
    root, and p + q is set to zero when the root is -1. Exponentially
    scaled Bessel values (scipy ``ive``/``kve``) are combined with
    ``shift`` before exponentiating, so large arguments do not overflow.
    """
    u = np.asarray(u, dtype=complex)
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if np.any(u.real < 0):
        raise DomainError("paired_bessel_i needs Re u >= 0")
    if root_order is None:
        p_plus_q = p + q
    else:
        j = np.rint(np.angle(q / p) * root_order / (2 * math.pi)).astype(int) % root_order
        root = np.exp(2j * math.pi * j / root_order)
        p_plus_q = np.where(2 * j == root_order, 0, p * (1 + root))
    grow = p_plus_q * ive(nu, u) * np.exp(u.real - shift)
    decay = p * (2 / math.pi) * math.sin(nu * math.pi) * kve(nu, u) * np.exp(-u - shift)
    return grow + decay


def gaussian_moment(params: SusyParams, j: int) -> float:
    """Integral over the real line of x^j exp(-x^(2n)/n)."""
    if j < 0:
        raise DomainError("moment order must be non-negative")
    if j % 2:
        return 0.0
    n = params.n
    s = (j + 1) / (2 * n)
    return math.exp((s - 1) * math.log(n) + math.lgamma(s))
