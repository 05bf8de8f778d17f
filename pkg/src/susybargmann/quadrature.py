"""Deterministic quadrature rules.

Real line: truncated Gauss-Legendre on [-L, L], calibrated against the
closed-form moments of exp(-x^(2n)/n).

Complex plane: uniform M-point trapezoid in the angle times Gauss-Legendre
in t = |z|^2 on [0, R^2], calibrated against the monomial norms implied by
the basis constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .holomorphic import basis_constant, weight, weight_asymptotic
from .params import Sector, SectorMismatchError, SusyParams
from .specfun import gaussian_moment

__all__ = [
    "CalibrationError",
    "NonFiniteSampleError",
    "PolarRule",
    "RealRule",
    "build_polar_rule",
    "build_real_rule",
    "integrate_polar",
    "integrate_real",
]

DEFAULT_NODE_BUDGET = 2000


class CalibrationError(RuntimeError):
    pass


class NonFiniteSampleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RealRule:
    nodes: np.ndarray
    weights: np.ndarray
    halfwidth: float
    n: int
    max_degree: int
    tol: float

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class PolarRule:
    radial_nodes: np.ndarray  # r values in (0, R]
    radial_weights: np.ndarray  # int_C g(|z|) dA ~= sum radial_weights * g(radial_nodes)
    angular_count: int
    radius: float
    sector: Sector
    n: int
    max_exponent: int
    tol: float
    density: np.ndarray  # rho_sector at the radial nodes

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angular_count) / self.angular_count

    def points(self) -> np.ndarray:
        """Complex nodes, shape (radial, angular)."""
        return np.multiply.outer(self.radial_nodes, np.exp(1j * self.angles))

    def __len__(self):
        return len(self.radial_nodes) * self.angular_count


def _legendre(count: int, a: float, b: float):
    x, w = roots_legendre(count)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def _real_halfwidth(n: int, max_degree: int, tol: float) -> float:
    target = math.log(tol * 1e-2)
    degree = max(max_degree, 0)
    L = 1.0
    while degree * math.log(L) - L ** (2 * n) / (2 * n) >= target:
        L *= 1.02
    return L


def build_real_rule(
    params: SusyParams,
    max_degree: int,
    tol: float,
    node_budget: int = DEFAULT_NODE_BUDGET,
    min_nodes: int = 16,
) -> RealRule:
    """Gauss-Legendre rule on [-L, L] reproducing every even moment up to max_degree."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = params.n
    L = _real_halfwidth(n, max_degree, tol)
    degrees = np.arange(0, max_degree + 1, 2)
    exact = np.array([gaussian_moment(params, int(j)) for j in degrees])
    # even counts keep x = 0 off the node set
    count = max(int(min_nodes), 2)
    count += count % 2
    while count <= node_budget:
        x, w = _legendre(count, -L, L)
        # symmetrize so odd moments cancel pairwise
        x = 0.5 * (x - x[::-1])
        w = 0.5 * (w + w[::-1])
        logx = np.log(np.abs(x))
        envelope = -(x ** (2 * n)) / n
        approx = np.array([np.sum(w * np.exp(j * logx + envelope)) for j in degrees])
        if np.all(np.abs(approx - exact) <= tol * exact):
            return RealRule(x, w, L, n, int(max_degree), float(tol))
        count = 2 * int(math.ceil(count * 0.75))
    raise CalibrationError(
        f"real rule for n={n}, degree {max_degree}, tol {tol:g} needs more than {node_budget} nodes"
    )


def _radial_extent(params: SusyParams, sector: Sector, exps: list[int], tol: float) -> float:
    """R^2 such that the discarded tail of every |z|^(2k) rho is below tol * 1e-2 relative."""
    n = params.n
    norms = {k: basis_constant(params, sector, sector.level(n, k)) ** -2 for k in exps}
    t = 1.0
    while True:
        ok = True
        for k in exps:
            slope = t ** (n - 1) - (k + (n - 1) / 2) / t
            if slope <= 0:
                ok = False
                break
            # integrand in t is pi t^k rho(sqrt t)
            g = math.pi * t**k * weight_asymptotic(params, sector, math.sqrt(t), corrected=True)
            if g / slope > tol * 1e-2 * norms[k]:
                ok = False
                break
        if ok:
            return t
        t *= 1.02


def build_polar_rule(
    params: SusyParams,
    sector: Sector,
    max_exponent: int,
    tol: float,
    node_budget: int = DEFAULT_NODE_BUDGET,
    min_nodes: int = 32,
    angular_count: int | None = None,
) -> PolarRule:
    """Polar rule reproducing int |z^k|^2 rho dA = 1 / c_k^2 for lattice exponents k <= max_exponent."""
    sector = Sector.parse(sector)
    if max_exponent < 0:
        raise ValueError("max_exponent must be non-negative")
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = params.n
    M = max(2 * max_exponent + 4, angular_count or 0)
    M += M % 2
    exps = [k for k in range(max_exponent + 1) if sector.admits(k, n)]
    exact = np.array([basis_constant(params, sector, sector.level(n, k)) ** -2 for k in exps])
    T = _radial_extent(params, sector, exps, tol)
    count = max(int(min_nodes), 2)
    while count <= node_budget:
        t, v = _legendre(count, 0.0, T)
        r = np.sqrt(t)
        rw = np.pi * v
        rho = weight(params, sector, r)
        approx = np.array([np.sum(rw * rho * t**k) for k in exps])
        if np.all(np.abs(approx - exact) <= tol * exact):
            return PolarRule(r, rw, M, math.sqrt(T), sector, n, int(max_exponent), float(tol), rho)
        count = int(math.ceil(count * 1.5))
    raise CalibrationError(
        f"polar rule for n={n}, sector {sector.value}, exponent {max_exponent}, "
        f"tol {tol:g} needs more than {node_budget} radial nodes"
    )


def _check_finite(values: np.ndarray, where: np.ndarray):
    bad = ~np.isfinite(values)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        node = where[idx]
        raise NonFiniteSampleError(f"integrand is {values[idx]} at node {idx} (point {node})")


def integrate_real(f, rule: RealRule):
    """sum_i w_i f(x_i); ``f`` must accept a numpy array of nodes."""
    values = np.asarray(f(rule.nodes))
    if values.shape != rule.nodes.shape:
        values = np.broadcast_to(values, rule.nodes.shape)
    _check_finite(values, rule.nodes)
    # pair x with -x before summing so odd integrands cancel exactly
    half = len(rule.nodes) // 2
    paired = values[half:] + values[:half][::-1]
    return np.sum(rule.weights[half:] * paired).item()


def integrate_polar(f, rule: PolarRule, sector: Sector | None = None) -> complex:
    """Integral over C of f(z, conj z) rho_sector(z) dA(z); ``f`` is called on a 2-D node array."""
    if sector is not None and Sector.parse(sector) is not rule.sector:
        raise SectorMismatchError(f"rule built for sector {rule.sector.value}, asked for {sector}")
    z = rule.points()
    values = np.asarray(f(z, np.conj(z)), dtype=complex)
    if values.shape != z.shape:
        values = np.broadcast_to(values, z.shape)
    _check_finite(values, z)
    ring = values.mean(axis=1)
    return complex(np.sum(rule.radial_weights * rule.density * ring))
