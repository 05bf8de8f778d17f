"""Holomorphic sectors F1 / F2: finite monomial vectors, the operators
frak_a = z^(1-n) d/dz, frak_b = d/dz z^(1-n) and their adjoints (both z^n),
the Bessel-K weights rho_1 / rho_2 and the reproducing kernels."""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .params import LatticeError, Sector, SectorMismatchError, SusyParams
from .specfun import DEFAULT_CONFIG, SeriesConfig, bessel_k, hyp0f1, log_gamma, paired_bessel_i

__all__ = [
    "HoloLadderOp",
    "HoloVector",
    "apply_holo_ladder",
    "basis_constant",
    "basis_vector",
    "eval_holo",
    "holo_inner_product",
    "holo_norm",
    "kernel_vector",
    "radial_moment",
    "reproducing_kernel",
    "weight",
    "weight_asymptotic",
    "weight_normalization",
]


@dataclass(frozen=True, eq=False)
class HoloVector:
    params: SusyParams
    sector: Sector
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        sector = Sector.parse(self.sector)
        object.__setattr__(self, "sector", sector)
        n = self.params.n
        clean = {}
        for k, c in dict(self.coeffs).items():
            k = int(k)
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError(f"non-finite coefficient at exponent {k}")
            if c == 0:
                continue
            if not sector.admits(k, n):
                raise LatticeError(
                    f"exponent {k} violates the sector {sector.value} lattice for n={n}"
                )
            clean[k] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, params: SusyParams, sector: Sector) -> "HoloVector":
        return cls(params, sector, {})

    @property
    def max_exponent(self) -> int:
        return max(self.coeffs, default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "HoloVector"):
        if not isinstance(other, HoloVector):
            raise TypeError(f"expected HoloVector, got {type(other).__name__}")
        if other.params != self.params or other.sector is not self.sector:
            raise SectorMismatchError(
                f"operands differ: (n={self.params.n}, {self.sector.value}) vs "
                f"(n={other.params.n}, {other.sector.value})"
            )

    def __add__(self, other: "HoloVector") -> "HoloVector":
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return HoloVector(self.params, self.sector, out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar) -> "HoloVector":
        return HoloVector(self.params, self.sector, {k: scalar * c for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, HoloVector):
            return NotImplemented
        return (self.params, self.sector, self.coeffs) == (other.params, other.sector, other.coeffs)

    def __hash__(self):
        return hash((self.params, self.sector, tuple(self.coeffs.items())))

    def __call__(self, z):
        return eval_holo(self, z)

    def basis_coefficients(self) -> dict[int, complex]:
        """Coefficients relative to the orthonormal basis, keyed by level."""
        n = self.params.n
        return {
            self.sector.level(n, k): c / basis_constant(self.params, self.sector, self.sector.level(n, k))
            for k, c in self.coeffs.items()
        }

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "n": self.params.n,
            "sector": self.sector.value,
            "coeffs": {str(k): [c.real, c.imag] for k, c in self.coeffs.items()},
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "HoloVector":
        try:
            n = doc["n"]
            sector = doc["sector"]
            raw = doc["coeffs"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"HoloVector document missing field: {exc}") from None
        if not isinstance(raw, Mapping):
            raise ValueError("'coeffs' must be an object mapping exponent strings to [re, im]")
        coeffs = {}
        for k, c in raw.items():
            if not str(k).isdigit():
                raise ValueError(f"invalid exponent key {k!r}")
            if (
                not isinstance(c, (list, tuple))
                or len(c) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in c)
            ):
                raise ValueError(f"coefficient for exponent {k} must be [re, im]")
            coeffs[int(k)] = complex(c[0], c[1])
        return cls(SusyParams(n), Sector.parse(sector), coeffs)

    @classmethod
    def from_json(cls, text: str) -> "HoloVector":
        return cls.from_dict(json.loads(text))


@functools.lru_cache(maxsize=None)
def _log_basis_constant(params: SusyParams, sector: Sector, l: int) -> float:
    n = params.n
    s = 1 / (2 * n)
    k, odd = divmod(l, 2)
    log2n = math.log(2 * n)
    if sector is Sector.ONE:
        if odd:
            power, shift = 2 * k + 2 - 1 / n, 2 - s
        else:
            power, shift = 2 * k, s
    else:
        if odd:
            power, shift = 2 * k + 1, 1 + s
        else:
            power, shift = 2 * k + 1 - 1 / n, 1 - s
    return 0.5 * (log_gamma(s) - power * log2n - log_gamma(k + shift) - math.lgamma(k + 1))


def basis_constant(params: SusyParams, sector: Sector, l: int) -> float:
    """Normalization constant c_l with e_l(z) = c_l z^(exponent(l))."""
    if l < 0:
        raise ValueError("level must be non-negative")
    return math.exp(_log_basis_constant(params, Sector.parse(sector), l))


def basis_vector(params: SusyParams, sector: Sector, l: int) -> HoloVector:
    sector = Sector.parse(sector)
    return HoloVector(params, sector, {sector.exponent(params.n, l): basis_constant(params, sector, l)})


class HoloLadderOp(enum.Enum):
    FRAK_A = "frak_a"
    FRAK_B = "frak_b"
    FRAK_A_STAR = "frak_a_star"
    FRAK_B_STAR = "frak_b_star"

    @property
    def domain(self) -> Sector:
        return Sector.ONE if self in (HoloLadderOp.FRAK_A, HoloLadderOp.FRAK_B_STAR) else Sector.TWO

    @property
    def codomain(self) -> Sector:
        return self.domain.other

    @classmethod
    def from_real(cls, op) -> "HoloLadderOp":
        """Holomorphic counterpart of a real-line ladder operator tag."""
        return cls("frak_" + getattr(op, "value", op))


def apply_holo_ladder(op: HoloLadderOp, F: HoloVector) -> HoloVector:
    op = HoloLadderOp(op)
    if F.sector is not op.domain:
        raise SectorMismatchError(f"{op.value} acts on sector {op.domain.value}, got {F.sector.value}")
    n = F.params.n
    out: dict[int, complex] = {}
    for k, c in F.coeffs.items():
        if op is HoloLadderOp.FRAK_A:
            k_new, c_new = k - n, c * k
        elif op is HoloLadderOp.FRAK_B:
            k_new, c_new = k - n, c * (k - n + 1)
        else:
            k_new, c_new = k + n, c
        if c_new == 0:
            continue
        if k_new < 0:
            raise LatticeError(f"{op.value} produced negative exponent {k_new}")
        out[k_new] = out.get(k_new, 0) + c_new
    return HoloVector(F.params, op.codomain, out)


def holo_inner_product(F: HoloVector, G: HoloVector) -> complex:
    """<F, G> in F1 / F2, linear in F and conjugate-linear in G."""
    F._check(G)
    f = F.basis_coefficients()
    g = G.basis_coefficients()
    return complex(sum(f[l] * g[l].conjugate() for l in f.keys() & g.keys()))


def holo_norm(F: HoloVector) -> float:
    return math.sqrt(max(holo_inner_product(F, F).real, 0.0))


def eval_holo(F: HoloVector, z):
    """Sparse Horner evaluation of sum_k c_k z^k."""
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    exps = sorted(F.coeffs, reverse=True)
    for i, k in enumerate(exps):
        gap = (k - exps[i + 1]) if i + 1 < len(exps) else k
        acc = (acc + F.coeffs[k]) * z**gap
    return acc.item() if scalar else acc


def weight_normalization(params: SusyParams) -> float:
    """Shared constant 2 / ((2n)^(1/2n) pi Gamma(1/2n)) of rho_1 and rho_2."""
    n = params.n
    return 2.0 / math.exp(math.log(2 * n) / (2 * n) + math.log(math.pi) + log_gamma(1 / (2 * n)))


def _bessel_order(params: SusyParams, sector: Sector) -> float:
    s = 1 / (2 * params.n)
    return 1 - s if sector is Sector.ONE else s


def weight_at_origin(params: SusyParams, sector: Sector) -> float:
    """Limit of rho at z = 0 from the small-argument behaviour of K_nu."""
    n = params.n
    sector = Sector.parse(sector)
    if sector is Sector.ONE:
        s = 1 / (2 * n)
        return math.exp(
            log_gamma(1 - s) + (1 - 1 / n) * math.log(2 * n) - math.log(math.pi) - log_gamma(s)
        )
    return 1 / math.pi if n == 1 else 0.0


def weight(params: SusyParams, sector: Sector, z, config: SeriesConfig = DEFAULT_CONFIG):
    """rho_1 (sector one) or rho_2 (sector two) at z; depends only on |z|."""
    sector = Sector.parse(sector)
    scalar = np.ndim(z) == 0
    r2 = np.abs(np.asarray(z, dtype=complex)) ** 2
    n = params.n
    out = np.full(r2.shape, weight_at_origin(params, sector))
    pos = r2 > 0
    if pos.any():
        arg = r2[pos] ** n / n
        vals = np.zeros(arg.shape)
        # K_nu(x) < 1e-310 for x > 710; the weight is then exactly zero in binary64
        live = arg < 710
        if live.any():
            vals[live] = bessel_k(_bessel_order(params, sector), arg[live], config)
        out[pos] = weight_normalization(params) * r2[pos] ** (n - 0.5) * vals
    return out.item() if scalar else out


def weight_asymptotic(params: SusyParams, sector: Sector, z, corrected: bool = False):
    """Large-|z| form C sqrt(pi n / 2) |z|^(n-1) exp(-|z|^(2n)/n) (1 + (4 nu^2 - 1) / (8 x))."""
    sector = Sector.parse(sector)
    scalar = np.ndim(z) == 0
    r = np.abs(np.asarray(z, dtype=complex))
    n = params.n
    x = r ** (2 * n) / n
    out = weight_normalization(params) * math.sqrt(math.pi * n / 2) * r ** (n - 1) * np.exp(-x)
    if corrected:
        nu = _bessel_order(params, sector)
        out = out * (1 + (4 * nu * nu - 1) / (8 * x))
    return out.item() if scalar else out


def radial_moment(params: SusyParams, sector: Sector, m: float) -> float:
    """Closed form of the integral over C of |z|^m rho dA(z).

    Uses int_0^inf y^(mu-1) K_nu(y) dy = 2^(mu-2) Gamma((mu-nu)/2) Gamma((mu+nu)/2)
    after the substitution y = |z|^(2n)/n.
    """
    sector = Sector.parse(sector)
    n = params.n
    nu = _bessel_order(params, sector)
    mu = (m + 2 * n + 1) / (2 * n)
    log_val = (
        math.log(2 * math.pi * weight_normalization(params) / (2 * n))
        + mu * math.log(n)
        + (mu - 2) * math.log(2)
        + log_gamma((mu - nu) / 2)
        + log_gamma((mu + nu) / 2)
    )
    return math.exp(log_val)


# below this |u| the 0F1 form has no harmful cancellation
_BESSEL_SWITCH = 1.0


def _reproducing_series(params: SusyParams, sector: Sector, zeta: np.ndarray, config: SeriesConfig) -> np.ndarray:
    n = params.n
    s = 1 / (2 * n)
    arg = zeta ** (2 * n) / (2 * n) ** 2
    if sector is Sector.ONE:
        c = math.exp(log_gamma(s) - log_gamma(2 - s) - (2 - 1 / n) * math.log(2 * n))
        return hyp0f1(s, arg, config) + c * zeta ** (2 * n - 1) * hyp0f1(2 - s, arg, config)
    c = math.exp(log_gamma(s) - log_gamma(1 - s) - (1 - 1 / n) * math.log(2 * n))
    return c * zeta ** (n - 1) * hyp0f1(1 - s, arg, config) + zeta**n * hyp0f1(1 + s, arg, config)


def _reproducing_bessel(params: SusyParams, sector: Sector, zeta: np.ndarray) -> np.ndarray:
    """The same kernel as P I_{-nu}(u) + Q I_nu(u), u = zeta^n / n with Re u >= 0."""
    n = params.n
    s = 1 / (2 * n)
    u = zeta**n / n
    u = np.where(u.real < 0, -u, u)
    half = u / 2
    if sector is Sector.ONE:
        nu = 1 - s
        c = math.exp(log_gamma(s) - (2 - 1 / n) * math.log(2 * n))
        P = math.exp(log_gamma(s)) * half**nu
        Q = c * zeta ** (2 * n - 1) * half ** (-nu)
    else:
        nu = s
        c = math.exp(log_gamma(s) - (1 - 1 / n) * math.log(2 * n))
        P = c * zeta ** (n - 1) * half**nu
        Q = math.exp(log_gamma(1 + s)) * zeta**n * half ** (-nu)
    return paired_bessel_i(nu, P, Q, u, root_order=2 * n)


def reproducing_kernel(params: SusyParams, sector: Sector, w, z, config: SeriesConfig = DEFAULT_CONFIG):
    """F_w(z) (sector one) or F~_w(z) (sector two); a function of z conj(w).

    Small arguments use the two-term 0F1 form. Larger ones use a
    cancellation-free Bessel I / K form, since the two 0F1 pieces grow
    exponentially and cancel where the kernel decays.
    """
    sector = Sector.parse(sector)
    scalar = np.ndim(z) == 0 and np.ndim(w) == 0
    zeta = np.asarray(z, dtype=complex) * np.conj(np.asarray(w, dtype=complex))
    zeta = np.atleast_1d(zeta)
    small = np.abs(zeta) ** params.n / params.n <= _BESSEL_SWITCH
    out = np.empty(zeta.shape, dtype=complex)
    if small.any():
        out[small] = _reproducing_series(params, sector, zeta[small], config)
    if (~small).any():
        out[~small] = _reproducing_bessel(params, sector, zeta[~small])
    return out.item() if scalar else out


def kernel_vector(params: SusyParams, sector: Sector, w: complex, levels: int) -> HoloVector:
    """Truncation sum_{l < levels} conj(e_l(w)) e_l of the reproducing kernel F_w."""
    sector = Sector.parse(sector)
    n = params.n
    coeffs = {}
    for l in range(levels):
        k = sector.exponent(n, l)
        c = basis_constant(params, sector, l)
        coeffs[k] = c * np.conj(c * complex(w) ** k)
    return HoloVector(params, sector, coeffs)
