"""The verification suite behind ``susybargmann check``.

Every check returns a max residual which is compared with a base tolerance
scaled by ``tol / 1e-9`` from the run configuration. Random inputs are drawn
from a seeded generator so reports are reproducible byte for byte.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import holomorphic as holo
from . import transforms as tr
from .holomorphic import HoloLadderOp, HoloVector, apply_holo_ladder, basis_constant, basis_vector
from .params import Sector, SusyParams
from .quadrature import build_polar_rule, integrate_polar
from .realline import (
    LadderOp,
    WeightedPoly,
    apply_ladder,
    eigenfunction,
    eigenvalue,
    eval_real,
    inner_product,
    rodrigues_eigenfunction,
)
from .specfun import DEFAULT_CONFIG, bessel_k, hyp0f1

REFERENCE_TOL = 1e-9
SEED = 20240607

A, B, A_STAR, B_STAR = LadderOp.A, LadderOp.B, LadderOp.A_STAR, LadderOp.B_STAR


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    runtime: float = 0.0

    def to_dict(self, include_runtime: bool = False) -> dict:
        out = {
            "name": self.name,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return out


@dataclass
class VerificationReport:
    n: int
    levels: int
    tol: float
    checks: list[CheckResult] = field(default_factory=list)
    info: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, include_runtime: bool = False) -> dict:
        return {
            "version": 1,
            "n": self.n,
            "levels": self.levels,
            "tol": self.tol,
            "passed": self.passed,
            "checks": [c.to_dict(include_runtime) for c in self.checks],
            "info": dict(self.info),
        }

    def to_json(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=2, sort_keys=False) + "\n"

    def to_csv(self, include_runtime: bool = False) -> str:
        lines = [
            f"# susybargmann verification report: n={self.n} levels={self.levels} tol={self.tol!r}",
            f"# summary passed={self.passed}",
        ]
        for key, value in self.info.items():
            lines.append(f"# info {key}={value!r}")
        header = "name,max_residual,tolerance,passed"
        lines.append(header + (",runtime" if include_runtime else ""))
        for c in self.checks:
            row = f"{c.name},{c.max_residual!r},{c.tolerance!r},{c.passed}"
            if include_runtime:
                row += f",{c.runtime!r}"
            lines.append(row)
        return "\n".join(lines) + "\n"


def _coeff_residual(lhs: WeightedPoly | HoloVector, rhs: WeightedPoly | HoloVector) -> float:
    """Max coefficient difference, relative to max(1, largest coefficient of rhs)."""
    diff = lhs - rhs
    scale = max([1.0] + [abs(c) for c in rhs.coeffs.values()])
    return max([0.0] + [abs(c) for c in diff.coeffs.values()]) / scale


def _chain(ops, f):
    """Apply ``ops`` right to left, so _chain([A_STAR, A], f) = a* a f."""
    for op in reversed(ops):
        f = apply_ladder(op, f) if isinstance(op, LadderOp) else apply_holo_ladder(op, f)
    return f


def random_poly(params: SusyParams, sector: Sector, rng: np.random.Generator, levels: int) -> WeightedPoly:
    """Random lattice-valid function with up to ``levels`` terms and coefficients in [-1, 1]."""
    exps = [sector.exponent(params.n, l) for l in range(levels)]
    return WeightedPoly(params, sector, {k: float(rng.uniform(-1, 1)) for k in exps})


def random_unit_span(params: SusyParams, sector: Sector, rng: np.random.Generator, levels: int) -> WeightedPoly:
    """Random unit-norm element of span{psi_0, ..., psi_(levels-1)}."""
    c = rng.standard_normal(levels)
    c /= np.linalg.norm(c)
    f = WeightedPoly.zero(params, sector)
    for l, cl in enumerate(c):
        f = f + float(cl) * eigenfunction(params, sector, l)
    return f


def random_holo(params: SusyParams, sector: Sector, rng: np.random.Generator, levels: int) -> HoloVector:
    coeffs = rng.standard_normal(levels) + 1j * rng.standard_normal(levels)
    return HoloVector(
        params,
        sector,
        {sector.exponent(params.n, l): complex(c) * basis_constant(params, sector, l) for l, c in enumerate(coeffs)},
    )


def random_disc(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0, 1, count))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, count))


# ---------------------------------------------------------------- specfun


def check_bessel_branch_consistency(params, levels, rng):
    switch = DEFAULT_CONFIG.asymptotic_switch
    xs = np.linspace(0.95 * switch, 1.05 * switch, 20)
    worst = 0.0
    from .specfun import _k_asymptotic, _k_integral

    for nu in (1 / 2, 1 / 4, 3 / 4, 1 / 6, 5 / 6):
        near = _k_integral(nu, xs)
        far = _k_asymptotic(nu, xs, DEFAULT_CONFIG)
        worst = max(worst, float(np.max(np.abs(near - far) / np.abs(far))))
    return worst


def check_bessel_half(params, levels, rng):
    xs = np.array([0.1, 1.0, 4.0, 12.0])
    exact = np.sqrt(np.pi / (2 * xs)) * np.exp(-xs)
    return float(np.max(np.abs(bessel_k(0.5, xs) - exact) / exact))


def check_hyp0f1_identity(params, levels, rng):
    xs = np.linspace(0.1, 3.0, 12)
    return float(np.max(np.abs(np.real(hyp0f1(1.5, xs**2 / 4)) - np.sinh(xs) / xs) / (np.sinh(xs) / xs)))


# ---------------------------------------------------------------- realline


def _gram_residual(params, sector, levels):
    basis = [eigenfunction(params, sector, l) for l in range(levels + 1)]
    G = np.array([[inner_product(f, g) for g in basis] for f in basis])
    return float(np.max(np.abs(G - np.eye(len(basis)))))


def check_gram_one(params, levels, rng):
    return _gram_residual(params, Sector.ONE, levels)


def check_gram_two(params, levels, rng):
    return _gram_residual(params, Sector.TWO, levels)


def check_spectrum(params, levels, rng):
    worst = 0.0
    for l in range(levels + 1):
        psi = eigenfunction(params, Sector.ONE, l)
        worst = max(worst, _coeff_residual(_chain([A_STAR, A], psi), eigenvalue(params, Sector.ONE, l) * psi))
        phi = eigenfunction(params, Sector.TWO, l)
        worst = max(worst, _coeff_residual(_chain([B_STAR, B], phi), eigenvalue(params, Sector.TWO, l) * phi))
    return worst


def check_partner_relations(params, levels, rng):
    gamma, delta = params.gamma, params.delta
    worst = 0.0
    for _ in range(12):
        f = random_poly(params, Sector.ONE, rng, levels)
        worst = max(worst, _coeff_residual(_chain([A_STAR, A], f), _chain([B, B_STAR], f) + gamma * f))
        g = random_poly(params, Sector.TWO, rng, levels)
        worst = max(worst, _coeff_residual(_chain([A, A_STAR], g), _chain([B_STAR, B], g) + delta * g))
    return worst


def _su11_residual(params, sector_one_basis, ops):
    a, b, a_star, b_star = ops
    gap = params.gap
    gamma = params.gamma
    worst = 0.0
    for f in sector_one_basis:
        lhs = _chain([a_star, a, a_star, b_star], f) - _chain([a_star, b_star, a_star, a], f)
        worst = max(worst, _coeff_residual(lhs, gap * _chain([a_star, b_star], f)))
        lhs = _chain([a_star, b_star, b, a], f) - _chain([b, a, a_star, b_star], f)
        rhs = -2 * gap * (_chain([a_star, a], f) - (gamma / 2) * f)
        worst = max(worst, _coeff_residual(lhs, rhs))
    return worst


def check_su11(params, levels, rng):
    top = min(levels, 6)
    real = [eigenfunction(params, Sector.ONE, l) for l in range(top + 1)]
    holo_basis = [basis_vector(params, Sector.ONE, l) for l in range(top + 1)]
    frak = (HoloLadderOp.FRAK_A, HoloLadderOp.FRAK_B, HoloLadderOp.FRAK_A_STAR, HoloLadderOp.FRAK_B_STAR)
    return max(_su11_residual(params, real, (A, B, A_STAR, B_STAR)), _su11_residual(params, holo_basis, frak))


def check_holo_partner_relations(params, levels, rng):
    gamma, delta = params.gamma, params.delta
    fa, fb, fas, fbs = (HoloLadderOp.FRAK_A, HoloLadderOp.FRAK_B, HoloLadderOp.FRAK_A_STAR, HoloLadderOp.FRAK_B_STAR)
    worst = 0.0
    for _ in range(12):
        F = random_holo(params, Sector.ONE, rng, levels)
        worst = max(worst, _coeff_residual(_chain([fas, fa], F), _chain([fb, fbs], F) + gamma * F))
        G = random_holo(params, Sector.TWO, rng, levels)
        worst = max(worst, _coeff_residual(_chain([fa, fas], G), _chain([fbs, fb], G) + delta * G))
    return worst


def check_rodrigues(params, levels, rng):
    n = params.n
    worst = 0.0
    seeds = {
        "even": WeightedPoly(params, Sector.ONE, {0: 1.0}),
        "odd": WeightedPoly(params, Sector.ONE, {2 * n - 1: 2.0}),
    }
    for parity, seed in seeds.items():
        ladder = seed
        for l in range(min(levels, 4) + 1):
            if l:
                ladder = _chain([A_STAR, B_STAR], ladder)
            rod = rodrigues_eigenfunction(params, l, parity)
            scale = max(abs(c) for c in ladder.coeffs.values())
            diff = rod - ladder
            worst = max(worst, max([0.0] + [abs(c) for c in diff.coeffs.values()]) / scale)
    return worst


# ---------------------------------------------------------------- holomorphic / quadrature


def _polar_gram(params, sector, levels):
    top = min(levels, 6)
    rule = build_polar_rule(params, sector, sector.exponent(params.n, top), 1e-10)
    basis = [basis_vector(params, sector, l) for l in range(top + 1)]
    z = rule.points()
    values = [holo.eval_holo(e, z) for e in basis]
    worst = 0.0
    for i, ei in enumerate(values):
        for j, ej in enumerate(values):
            g = integrate_polar(lambda *_: ei * np.conj(ej), rule)
            worst = max(worst, abs(g - (1.0 if i == j else 0.0)))
    return worst


def check_polar_gram_one(params, levels, rng):
    return _polar_gram(params, Sector.ONE, levels)


def check_polar_gram_two(params, levels, rng):
    return _polar_gram(params, Sector.TWO, levels)


def _reproducing(params, sector, levels, rng, quadrature: bool):
    worst = 0.0
    ws = random_disc(rng, 10, 1.5)
    for w in ws:
        F = random_holo(params, sector, rng, levels)
        target = holo.eval_holo(F, w)
        if quadrature:
            # closed-form F_w sampled on a polar rule resolving its aliasing against F
            def amplitude(l):
                return basis_constant(params, sector, l) * abs(w) ** sector.exponent(params.n, l)

            M = tr.angular_count_for(params, sector, F, 1e-10, amplitude)
            rule = build_polar_rule(params, sector, F.max_exponent, 1e-10, angular_count=M)
            z = rule.points()
            Fz = holo.eval_holo(F, z)
            kw = np.conj(holo.reproducing_kernel(params, sector, w, z))
            value = integrate_polar(lambda *_: Fz * kw, rule)
        else:
            Fw = holo.kernel_vector(params, sector, w, max(60, levels + 1))
            value = holo.holo_inner_product(F, Fw)
        worst = max(worst, abs(value - target))
    return worst


def check_reproducing_one(params, levels, rng):
    return _reproducing(params, Sector.ONE, levels, rng, quadrature=False)


def check_reproducing_two(params, levels, rng):
    return _reproducing(params, Sector.TWO, levels, rng, quadrature=False)


def check_reproducing_quadrature_one(params, levels, rng):
    return _reproducing(params, Sector.ONE, min(levels, 6), rng, quadrature=True)


def check_reproducing_quadrature_two(params, levels, rng):
    return _reproducing(params, Sector.TWO, min(levels, 6), rng, quadrature=True)


def check_kernel_partial_sums(params, levels, rng):
    worst = 0.0
    for sector in Sector:
        for w, z in zip(random_disc(rng, 6, 2.0), random_disc(rng, 6, 2.0)):
            closed = holo.reproducing_kernel(params, sector, w, z)
            partial = holo.eval_holo(holo.kernel_vector(params, sector, w, 60), z)
            worst = max(worst, abs(closed - partial) / max(1.0, abs(partial)))
    return worst


# ---------------------------------------------------------------- transforms


def check_basis_transport(params, levels, rng):
    worst = 0.0
    for sector in Sector:
        for l in range(levels + 1):
            F = tr.forward_spectral(eigenfunction(params, sector, l))
            worst = max(worst, _coeff_residual(F, basis_vector(params, sector, l)))
    return worst


def _sample_grid():
    ticks = (-1.0, -0.5, 0.0, 0.5, 1.0)
    return np.array([complex(a, b) for a in ticks for b in ticks])


def check_forward_quadrature(params, levels, rng):
    pts = _sample_grid()
    worst = 0.0
    for sector in Sector:
        f = random_unit_span(params, sector, rng, min(levels, 8))
        result = tr.transform(f, pts)
        worst = max(worst, result.residual_vs_quadrature)
    return worst


def check_diagram(params, levels, rng):
    worst = 0.0
    for op in LadderOp:
        for l in range(min(levels, 6) + 1):
            worst = max(worst, tr.diagram_residual(params, op, eigenfunction(params, op.domain, l)))
    return worst


def check_round_trip(params, levels, rng):
    xs = np.linspace(-2.0, 2.0, 21)
    worst = 0.0
    for sector in Sector:
        f = random_unit_span(params, sector, rng, min(levels, 6))
        F = tr.forward_spectral(f)
        values = tr.inverse_quadrature(F, tr.inverse_rule(F), xs)
        worst = max(worst, float(np.max(np.abs(values - eval_real(f, xs)))))
    return worst


def coherent_points(rng: np.random.Generator, count: int = 9) -> list[tuple[complex, float]]:
    """(z, x) pairs with |z x| <= 3 and x != 0."""
    pts = []
    for _ in range(count):
        x = float(rng.choice([-1, 1]) * rng.uniform(0.3, 1.7))
        z = complex(random_disc(rng, 1, 3.0 / abs(x))[0])
        pts.append((z, x))
    return pts


def check_coherent(params, levels, rng):
    return max(tr.coherent_residual(params, z, x) for z, x in coherent_points(rng))


# ---------------------------------------------------------------- n = 1 golden suite


def _hermite_functions(x: np.ndarray, top: int) -> list[np.ndarray]:
    h = [np.pi**-0.25 * np.exp(-x * x / 2)]
    h.append(math.sqrt(2) * x * h[0])
    for l in range(2, top + 1):
        h.append(math.sqrt(2 / l) * x * h[l - 1] - math.sqrt((l - 1) / l) * h[l - 2])
    return h[: top + 1]


def check_golden_n1(params, levels, rng):
    if params.n != 1:
        return 0.0
    grid = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    Z, X = np.meshgrid(grid, grid, indexing="ij")
    worst = 0.0
    for sector in Sector:
        A_val = tr.kernel_A(params, sector, Z, X)
        classical = np.pi**-0.25 * np.exp(-(Z**2) / 2 + math.sqrt(2) * Z * X - X**2 / 2)
        worst = max(worst, float(np.max(np.abs(A_val - classical))))
        r = np.linspace(0, 3, 31)
        worst = max(worst, float(np.max(np.abs(holo.weight(params, sector, r) - np.exp(-r * r) / np.pi))))
        for w, z in zip(random_disc(rng, 8, 2.0), random_disc(rng, 8, 2.0)):
            exact = np.exp(z * np.conj(w))
            worst = max(worst, abs(holo.reproducing_kernel(params, sector, w, z) - exact))
        for l in range(levels + 1):
            worst = max(worst, abs(basis_constant(params, sector, l) - 1 / math.sqrt(math.factorial(l))))
        xs = np.linspace(-3, 3, 13)
        for l, h in enumerate(_hermite_functions(xs, levels)):
            worst = max(worst, float(np.max(np.abs(eval_real(eigenfunction(params, sector, l), xs) - h))))
    kc = tr.kernel_constants(params)
    worst = max(worst, abs(kc.alpha - np.pi**0.25), abs(kc.beta - np.pi**0.25))
    return worst


# (name, function, base tolerance); the order is the report order
CHECKS = [
    ("specfun.bessel_k_branch_consistency", check_bessel_branch_consistency, 1e-9),
    ("specfun.bessel_k_half_closed_form", check_bessel_half, 1e-12),
    ("specfun.hyp0f1_sinh_identity", check_hyp0f1_identity, 1e-13),
    ("realline.gram_one", check_gram_one, 1e-10),
    ("realline.gram_two", check_gram_two, 1e-10),
    ("realline.spectrum", check_spectrum, 1e-10),
    ("realline.su11_commutators", check_su11, 1e-9),
    ("realline.partner_relations", check_partner_relations, 1e-10),
    ("holomorphic.partner_relations", check_holo_partner_relations, 1e-12),
    ("realline.rodrigues", check_rodrigues, 1e-10),
    ("quadrature.polar_gram_one", check_polar_gram_one, 1e-8),
    ("quadrature.polar_gram_two", check_polar_gram_two, 1e-8),
    ("holomorphic.kernel_partial_sums", check_kernel_partial_sums, 1e-10),
    ("holomorphic.reproducing_one", check_reproducing_one, 1e-8),
    ("holomorphic.reproducing_two", check_reproducing_two, 1e-8),
    ("holomorphic.reproducing_quadrature_one", check_reproducing_quadrature_one, 1e-8),
    ("holomorphic.reproducing_quadrature_two", check_reproducing_quadrature_two, 1e-8),
    ("transforms.basis_transport", check_basis_transport, 1e-10),
    ("transforms.forward_quadrature", check_forward_quadrature, 1e-7),
    ("transforms.diagram", check_diagram, 1e-9),
    ("transforms.round_trip", check_round_trip, 1e-6),
    ("transforms.coherent", check_coherent, 1e-8),
    ("golden.n1_classical", check_golden_n1, 1e-10),
]


def run_checks(params: SusyParams, levels: int = 8, tol: float = REFERENCE_TOL, seed: int = SEED) -> VerificationReport:
    """Run the whole suite; ``tol`` rescales every base tolerance by tol / 1e-9."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    scale = tol / REFERENCE_TOL
    report = VerificationReport(params.n, levels, tol)
    for name, fn, base in CHECKS:
        if name.startswith("golden.") and params.n != 1:
            continue
        rng = np.random.default_rng([seed, params.n, levels, len(report.checks)])
        start = time.perf_counter()
        residual = float(fn(params, levels, rng))
        elapsed = time.perf_counter() - start
        limit = base * scale
        report.checks.append(CheckResult(name, residual, limit, bool(residual <= limit), elapsed))
    for sector in Sector:
        report.info[f"weight_mass_{sector.value}"] = holo.radial_moment(params, sector, 0)
    return report
