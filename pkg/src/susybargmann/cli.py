"""Command-line front end.

Subcommands::

    susybargmann check      run the verification suite and write a report
    susybargmann tables     eigenvalues, eigenfunction coefficients, basis constants
    susybargmann transform  forward / inverse transform of a coefficient file
    susybargmann kernel     weights and kernels sampled on a grid

Exit codes: 0 when everything passes, 1 when a check (or a strict-mode
calibration) fails, 2 for usage, configuration, schema or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import holomorphic as holo
from . import transforms as tr
from .checks import run_checks
from .holomorphic import HoloVector, basis_constant
from .params import LatticeError, Sector, SusyParams
from .quadrature import CalibrationError
from .realline import WeightedPoly, eigenfunction, eigenvalue

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class ConfigError(ValueError):
    """Invalid run configuration or input document."""


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be min:max:count, got {text!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"bad grid {text!r}: {exc}") from None
        if count < 1:
            raise ConfigError(f"grid count must be >= 1, got {count}")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ConfigError("grid bounds must be finite")
        return cls(lo, hi, count)

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class RunConfig:
    n: int = 1
    sector: Sector = Sector.ONE
    levels: int = 8
    tol: float = 1e-9
    quad_points: int = 400
    output_path: Path | None = None
    format: str = "json"
    strict: bool = False
    timings: bool = False

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if self.levels < 1:
            raise ConfigError("levels must be >= 1")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ConfigError("tol must be a positive finite number")
        if self.quad_points < 2:
            raise ConfigError("quad-points must be >= 2")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")

    @property
    def params(self) -> SusyParams:
        return SusyParams(self.n)


def _emit(text: str, config: RunConfig, default_name: str | None = None):
    if config.output_path is None:
        sys.stdout.write(text)
        return
    path = Path(config.output_path)
    if path.is_dir() and default_name:
        path = path / default_name
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from None


# ---------------------------------------------------------------- check


def cmd_check(config: RunConfig):
    report = run_checks(config.params, levels=config.levels, tol=config.tol)
    if config.format == "json":
        _emit(report.to_json(config.timings), config, "report.json")
    else:
        _emit(report.to_csv(config.timings), config, "report.csv")
    for failure in report.failures():
        print(
            f"FAIL {failure.name}: residual {failure.max_residual:.3e} > {failure.tolerance:.3e}",
            file=sys.stderr,
        )
    return report


# ---------------------------------------------------------------- tables


def build_tables(config: RunConfig) -> dict:
    params = config.params
    levels = range(config.levels + 1)
    return {
        "version": 1,
        "n": params.n,
        "eigenvalues": {
            s.value: [eigenvalue(params, s, l) for l in levels] for s in Sector
        },
        "basis_constants": {
            s.value: [
                {"level": l, "exponent": s.exponent(params.n, l), "constant": basis_constant(params, s, l)}
                for l in levels
            ]
            for s in Sector
        },
        "eigenfunctions": {
            s.value: [eigenfunction(params, s, l).to_dict() for l in levels] for s in Sector
        },
    }


def _tables_csv(tables: dict) -> dict[str, str]:
    n = tables["n"]
    ev = ["# eigenvalues of a*a (sector one) and b*b (sector two)", f"# n={n}", "level,sector_one,sector_two"]
    for l, (a, b) in enumerate(zip(tables["eigenvalues"]["one"], tables["eigenvalues"]["two"])):
        ev.append(f"{l},{a},{b}")
    bc = ["# normalization constants c_l of the orthonormal monomials e_l = c_l z^k", f"# n={n}",
          "sector,level,exponent,constant"]
    for s in ("one", "two"):
        for row in tables["basis_constants"][s]:
            bc.append(f"{s},{row['level']},{row['exponent']},{row['constant']!r}")
    ef = ["# eigenfunction coefficients: psi_l(x) = sum_k coefficient x^k exp(-x^(2n)/(2n))", f"# n={n}",
          "sector,level,exponent,coefficient"]
    for s in ("one", "two"):
        for l, doc in enumerate(tables["eigenfunctions"][s]):
            for k, c in doc["coeffs"].items():
                ef.append(f"{s},{l},{k},{c!r}")
    return {
        "eigenvalues.csv": "\n".join(ev) + "\n",
        "basis_constants.csv": "\n".join(bc) + "\n",
        "eigenfunctions.csv": "\n".join(ef) + "\n",
    }


def cmd_tables(config: RunConfig) -> dict:
    tables = build_tables(config)
    if config.format == "json":
        _emit(json.dumps(tables, indent=2) + "\n", config, "tables.json")
        return tables
    files = _tables_csv(tables)
    if config.output_path is None:
        sys.stdout.write("".join(f"# table: {name}\n{body}" for name, body in files.items()))
        return tables
    out = Path(config.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, body in files.items():
            (out / name).write_text(body)
    except OSError as exc:
        raise OSError(f"cannot write tables under {out}: {exc.strerror or exc}") from None
    return tables


# ---------------------------------------------------------------- transform


def _read_json(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return doc


def _check_params(doc_n: int, config: RunConfig, require_n: bool):
    if require_n and doc_n != config.n:
        raise ConfigError(f"input has n={doc_n} but --n {config.n} was given")


def _forward_sample_points() -> np.ndarray:
    ticks = (-1.0, -0.5, 0.0, 0.5, 1.0)
    return np.array([complex(a, b) for a in ticks for b in ticks])


def cmd_transform(config: RunConfig, input_path: Path, direction: str, x_grid: GridSpec | None = None,
                  require_n: bool = True):
    """Transform the document at ``input_path``; n is taken from the document unless ``require_n``."""
    doc = _read_json(input_path)
    if direction == "forward":
        try:
            f = WeightedPoly.from_dict(doc)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"{input_path}: {exc}") from None
        _check_params(f.params.n, config, require_n)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", tr.CalibrationWarning)
            result = tr.transform(f, _forward_sample_points(), tol=min(config.tol, 1e-12))
        calibration = [str(w.message) for w in caught if issubclass(w.category, tr.CalibrationWarning)]
        out = result.to_dict()
        out["calibration_warnings"] = calibration
        if config.format == "json":
            _emit(json.dumps(out, indent=2) + "\n", config, "transform.json")
        else:
            lines = [
                "# forward transform: coefficients of F(z) = sum_k c_k z^k",
                f"# n={f.params.n} sector={f.sector.value} residual_vs_quadrature={result.residual_vs_quadrature!r}",
                "exponent,re,im",
            ]
            lines += [f"{k},{c.real!r},{c.imag!r}" for k, c in result.holo.coeffs.items()]
            _emit("\n".join(lines) + "\n", config, "transform.csv")
        return EXIT_FAILURE if (calibration and config.strict) else EXIT_OK

    if direction != "inverse":
        raise ConfigError(f"unknown direction {direction!r}")
    holo_doc = doc.get("holo", doc)
    try:
        F = HoloVector.from_dict(holo_doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{input_path}: {exc}") from None
    _check_params(F.params.n, config, require_n)
    xs = (x_grid or GridSpec(-2.0, 2.0, 21)).values()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", tr.CalibrationWarning)
        rule = tr.inverse_rule(F, tol=min(config.tol, 1e-10), node_budget=max(config.quad_points, 32))
        values = tr.inverse_quadrature(F, rule, xs)
    calibration = [str(w.message) for w in caught if issubclass(w.category, tr.CalibrationWarning)]
    values = np.atleast_1d(values)
    if config.format == "json":
        out = {
            "version": 1,
            "n": F.params.n,
            "sector": F.sector.value,
            "x": [float(x) for x in xs],
            "re": [float(v.real) for v in values],
            "im": [float(v.imag) for v in values],
            "max_abs_imag": float(np.max(np.abs(values.imag))),
            "calibration_warnings": calibration,
        }
        _emit(json.dumps(out, indent=2) + "\n", config, "inverse.json")
    else:
        lines = [
            "# inverse transform samples f(x) = int A(conj z, x) F(z) rho dA(z)",
            f"# n={F.params.n} sector={F.sector.value}",
            "x,re,im",
        ]
        lines += [f"{x!r},{v.real!r},{v.imag!r}" for x, v in zip(xs.tolist(), values.tolist())]
        _emit("\n".join(lines) + "\n", config, "inverse.csv")
    return EXIT_FAILURE if (calibration and config.strict) else EXIT_OK


# ---------------------------------------------------------------- kernel


QUANTITIES = ("weight", "reproducing", "A", "B")


def kernel_rows(config: RunConfig, quantity: str, re_grid: GridSpec, im_grid: GridSpec,
                x_grid: GridSpec | None = None, w: complex = 0j) -> tuple[list[str], list[tuple]]:
    """Rows in lexicographic grid-index order (re index, im index[, x index])."""
    params, sector = config.params, config.sector
    zs = [complex(a, b) for a in re_grid.values() for b in im_grid.values()]
    if quantity == "weight":
        vals = holo.weight(params, sector, np.array(zs))
        return ["re_z", "im_z", "re_value", "im_value"], [(z.real, z.imag, float(v), 0.0) for z, v in zip(zs, vals)]
    if quantity == "reproducing":
        vals = holo.reproducing_kernel(params, sector, w, np.array(zs))
        return ["re_z", "im_z", "re_value", "im_value"], [
            (z.real, z.imag, float(v.real), float(v.imag)) for z, v in zip(zs, vals)
        ]
    if quantity not in ("A", "B"):
        raise ConfigError(f"unknown quantity {quantity!r}")
    xs = (x_grid or GridSpec(0.0, 0.0, 1)).values()
    fn = tr.kernel_A if quantity == "A" else tr.kernel_B
    Z = np.array(zs)[:, None]
    vals = np.asarray(fn(params, sector, Z, xs[None, :])).reshape(len(zs), len(xs))
    rows = []
    for i, z in enumerate(zs):
        for j, x in enumerate(xs):
            v = vals[i, j]
            rows.append((z.real, z.imag, float(x), float(v.real), float(v.imag)))
    return ["re_z", "im_z", "x", "re_value", "im_value"], rows


def cmd_kernel(config: RunConfig, quantity: str, re_grid: GridSpec, im_grid: GridSpec,
               x_grid: GridSpec | None = None, w: complex = 0j):
    header, rows = kernel_rows(config, quantity, re_grid, im_grid, x_grid, w)
    if config.format == "json":
        doc = {
            "version": 1,
            "n": config.n,
            "sector": config.sector.value,
            "quantity": quantity,
            "columns": header,
            "rows": [list(r) for r in rows],
        }
        _emit(json.dumps(doc, indent=2) + "\n", config, f"{quantity}.json")
        return rows
    meta = [
        f"# quantity={quantity} n={config.n} sector={config.sector.value}"
        + (f" w={w!r}" if quantity == "reproducing" else ""),
        f"# columns: {', '.join(header)}; rows ordered by grid index (re z, im z"
        + (", x)" if len(header) == 5 else ")"),
        ",".join(header),
    ]
    lines = meta + [",".join(repr(float(v)) for v in row) for row in rows]
    _emit("\n".join(lines) + "\n", config, f"{quantity}.csv")
    return rows


# ---------------------------------------------------------------- argparse


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=None, help="index n >= 1 (default 1; transform reads it from the input)")
    p.add_argument("--sector", choices=[s.value for s in Sector], default="one")
    p.add_argument("--levels", type=int, default=8, help="highest basis level exercised (default 8)")
    p.add_argument("--tol", type=float, default=1e-9, help="global tolerance; check tolerances scale with tol/1e-9")
    p.add_argument("--quad-points", type=int, default=400,
                   help="node budget for inverse-transform quadrature (default 400)")
    p.add_argument("--output", type=Path, default=None, help="output file or directory (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--strict", action="store_true", help="treat calibration warnings as failures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susybargmann",
        description="Coupled-SUSY Segal-Bargmann spaces and transforms: verification and tabulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the verification suite")
    _add_common(p)
    p.add_argument("--timings", action="store_true", help="include per-check runtimes (not byte-stable)")

    p = sub.add_parser("tables", help="eigenvalues, eigenfunction coefficients and basis constants")
    _add_common(p)

    p = sub.add_parser("transform", help="forward or inverse transform of a JSON coefficient file")
    _add_common(p)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--direction", choices=["forward", "inverse"], default="forward")
    p.add_argument("--x", dest="x_grid", default="-2:2:21", help="inverse sample grid min:max:count")

    p = sub.add_parser("kernel", help="sample weights or kernels on a grid")
    _add_common(p)
    p.add_argument("--quantity", choices=QUANTITIES, default="weight")
    p.add_argument("--re", dest="re_grid", default="-2:2:5", help="grid for Re z, min:max:count")
    p.add_argument("--im", dest="im_grid", default="0:0:1", help="grid for Im z, min:max:count")
    p.add_argument("--x", dest="x_grid", default="0:0:1", help="grid for x (quantities A and B)")
    p.add_argument("--w", default="0", help="base point of the reproducing kernel, e.g. 0.5+0.2j")
    return parser


def _config_from(args) -> RunConfig:
    return RunConfig(
        n=1 if args.n is None else args.n,
        sector=Sector.parse(args.sector),
        levels=args.levels,
        tol=args.tol,
        quad_points=args.quad_points,
        output_path=args.output,
        format=args.format,
        strict=args.strict,
        timings=getattr(args, "timings", False),
    )


# flags whose values may start with '-' (grids such as -2:2:21, points such as -0.5+1j)
_SIGNED_VALUE_FLAGS = ("--x", "--re", "--im", "--w")


def _attach_signed_values(argv: list[str]) -> list[str]:
    """Rewrite ``--x -2:2:21`` as ``--x=-2:2:21`` so argparse does not read the value as an option."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in _SIGNED_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _attach_signed_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = _config_from(args)
        if args.command == "check":
            report = cmd_check(config)
            return EXIT_OK if report.passed else EXIT_FAILURE
        if args.command == "tables":
            cmd_tables(config)
            return EXIT_OK
        if args.command == "transform":
            return cmd_transform(
                config, args.input, args.direction, GridSpec.parse(args.x_grid), require_n=args.n is not None
            )
        if args.command == "kernel":
            try:
                w = complex(args.w.replace(" ", ""))
            except ValueError:
                raise ConfigError(f"cannot parse --w {args.w!r} as a complex number") from None
            cmd_kernel(config, args.quantity, GridSpec.parse(args.re_grid), GridSpec.parse(args.im_grid),
                       GridSpec.parse(args.x_grid), w)
            return EXIT_OK
    except (ConfigError, LatticeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CalibrationError, tr.ExpansionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
