"""Command-line interface.

    heattrace [--config FILE] [--out FILE] [--format json|csv] [--tol X]
              [--seed N] [--workers N] COMMAND [options]

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 a numerical
guard tripped (ill-conditioned fit, pole proximity, ...).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalGuardError, ValidationError
from .expand import HeatExpansion
from .fitdetect import geometric_grid, parity_kappa
from .heatsum import general_theta, harmonic_sum, theta
from .lattice import LatticeSpec, validate
from .series import INF, TruncatedSeries
from .zetareg import expansion_for, poles, product_coeff, zeta_special, zeta_value

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_GUARD = 0, 1, 2, 3


# configuration


@dataclass
class JobConfig:
    spec: LatticeSpec
    rho: TruncatedSeries | None = None
    order: int | None = None
    grid: dict = field(default_factory=lambda: {"t_min": 1e-6, "t_max": 1e-1, "per_decade": 8})
    tol: float = 1e-10


def _number(d: dict, key: str, default=None, kind=float):
    if key not in d:
        if default is None:
            raise ConfigError(f"config is missing '{key}'")
        return default
    try:
        return kind(d[key])
    except (TypeError, ValueError):
        raise ConfigError(f"config field '{key}' must be a {kind.__name__}, got {d[key]!r}") from None


def _model(model: dict) -> tuple[str, TruncatedSeries | None, float]:
    if not isinstance(model, dict) or "type" not in model:
        raise ConfigError("config 'model' must be an object with a 'type'")
    kind = model["type"]
    radius = _number(model, "radius", INF)
    if kind == "pure":
        return kind, None, radius
    if kind == "rho_series":
        odd = model.get("odd_coeffs")
        if not isinstance(odd, list) or not odd:
            raise ConfigError("rho_series model needs a nonempty 'odd_coeffs' list")
        coeffs = [0.0] * (2 * len(odd))
        for i, c in enumerate(odd):
            coeffs[2 * i + 1] = float(c)
        return kind, TruncatedSeries.polynomial(coeffs, radius=radius), radius
    if kind == "g_series":
        cs = model.get("coeffs")
        if not isinstance(cs, list) or not cs:
            raise ConfigError("g_series model needs a nonempty 'coeffs' list")
        return kind, TruncatedSeries.polynomial([float(c) for c in cs], radius=radius), radius
    raise ConfigError(f"unknown model type {kind!r}; expected rho_series, g_series or pure")


def parse_config(data) -> JobConfig:
    """Build a validated JobConfig from the decoded JSON object."""
    if not isinstance(data, dict) or not data:
        raise ConfigError("config is empty; it needs at least a 'model'")
    if "model" not in data:
        raise ConfigError("config is missing 'model'")
    offset = _number(data, "offset", 1.5)
    power = _number(data, "power", 2, int)
    kind, series, _ = _model(data["model"])
    try:
        if kind == "pure":
            spec = LatticeSpec.pure(offset, power)
        elif kind == "rho_series":
            spec = LatticeSpec.from_rho(series, power, offset)
        else:
            spec = LatticeSpec.from_g(series, offset, power)
    except ValidationError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    spec = validate(spec)
    grid = {"t_min": 1e-6, "t_max": 1e-1, "per_decade": 8}
    if "grid" in data:
        g = data["grid"]
        if not isinstance(g, dict):
            raise ConfigError("config 'grid' must be an object")
        grid = {
            "t_min": _number(g, "t_min", 1e-6),
            "t_max": _number(g, "t_max", 1e-1),
            "per_decade": _number(g, "per_decade", 8, int),
        }
        if not 0 < grid["t_min"] < grid["t_max"] or grid["per_decade"] < 1:
            raise ConfigError("grid needs 0 < t_min < t_max and per_decade >= 1")
    order = _number(data, "order", -1, int)
    return JobConfig(spec, series if kind == "rho_series" else None, None if order < 0 else order,
                     grid, _number(data, "tol", 1e-10))


def load_config(path: str | None) -> JobConfig:
    if path is None:
        raise ConfigError("this command needs --config")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    if not text.strip():
        raise ConfigError(f"config {path} is empty; it needs at least a 'model'")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(data)


# deterministic output


def _fmt(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with fixed field order and floats printed to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, complex):
        return dumps({"re": obj.real, "im": obj.imag}, indent)
    if isinstance(obj, Fraction):
        return dumps({"num": obj.numerator, "den": obj.denominator}, indent)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in (r[c] for c in columns)])
    return buf.getvalue()


def _expansion_record(exp: HeatExpansion) -> dict:
    return {
        "variable": exp.variable,
        "terms": exp.records(),
        "remainder": exp.remainder_exponent,
        "coeff_error": exp.coeff_error,
        "provenance": exp.provenance,
    }


# commands


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _heat_point(t: float, spec: LatticeSpec, quantity: str, w: int, tol: float) -> dict:
    if quantity == "theta":
        r = theta(spec, t, tol)
    elif quantity == "Theta":
        r = general_theta(spec.offset, spec.power, w, t, tol)
    else:
        r = harmonic_sum(spec.power, t, spec.offset, tol)
    return {"t": float(t), "value": r.value, "tail_bound": r.tail_bound}


def cmd_heat_eval(args, cfg: JobConfig):
    g = cfg.grid
    ts = [float(t) for t in geometric_grid(g["t_min"], g["t_max"], g["per_decade"])]
    tol = args.tol if args.tol is not None else 1e-14
    fn = partial(_heat_point, spec=cfg.spec, quantity=args.quantity, w=args.w, tol=tol)
    rows = _map(fn, ts, args.workers)
    return rows, ["t", "value", "tail_bound"], "csv"


def cmd_expand(args, cfg: JobConfig):
    K = args.order if args.order is not None else (cfg.order if cfg.order is not None else 1)
    exp = expansion_for(cfg.spec, K)
    return _expansion_record(exp), ["num", "den", "logpow", "coeff"], "json"


def _parse_s(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse s value {text!r}") from None


def cmd_zeta(args, cfg: JobConfig):
    tol = args.tol if args.tol is not None else cfg.tol
    rows = []
    for text in args.s:
        s = _parse_s(text)
        r = zeta_value(cfg.spec, s, args.order, tol)
        rows.append({"s": s, "value": r.value, "kind": r.kind, "error_estimate": r.error_estimate})
    return rows, None, "json"


def cmd_zeta_special(args, cfg: JobConfig):
    rows = [{"m": m, "value": zeta_special(cfg.spec, m)} for m in args.m]
    return rows, ["m", "value"], "json"


def cmd_residues(args, cfg: JobConfig):
    N = args.order if args.order is not None else (cfg.order if cfg.order is not None else 3)
    rows = [{"s": p.s, "residue": p.residue, "error_estimate": p.error_estimate} for p in poles(cfg.spec, N)]
    return rows, None, "json"


def cmd_product_coeffs(args, cfg: JobConfig):
    rows = [{"m": m, "coeff": product_coeff(cfg.spec, m)} for m in args.m]
    return rows, ["m", "coeff"], "json"


def _parity_row(m: int, rho, offset: float, per_decade: int, precision: str) -> dict:
    r = parity_kappa(rho, m, offset, per_decade, precision)
    return {
        "power": m,
        "kappa": r.kappa,
        "predicted": r.predicted,
        "t_min": r.window[0],
        "t_max": r.window[1],
        "precision": r.precision,
        "condition": r.report.condition,
        "residual_rms": r.report.residual_rms,
    }


def cmd_parity_scan(args, cfg: JobConfig):
    if cfg.rho is None:
        raise ConfigError("parity-scan needs a rho_series model")
    fn = partial(_parity_row, rho=cfg.rho, offset=cfg.spec.offset,
                 per_decade=cfg.grid["per_decade"], precision=args.precision)
    rows = _map(fn, list(args.powers), args.workers)
    cols = ["power", "kappa", "predicted", "t_min", "t_max", "precision", "condition", "residual_rms"]
    return rows, cols, "json"


def cmd_verify(args, cfg):
    from .verification import run_all

    results = run_all(args.seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    rows = [
        {"number": r.number, "name": r.name, "passed": r.passed, "measured": r.measured,
         "tolerance": r.tolerance, "seconds": r.seconds, "detail": r.detail}
        for r in results
    ]
    return rows, ["number", "name", "passed", "measured", "tolerance", "seconds", "detail"], None


COMMANDS = {
    "heat-eval": cmd_heat_eval,
    "expand": cmd_expand,
    "zeta": cmd_zeta,
    "zeta-special": cmd_zeta_special,
    "residues": cmd_residues,
    "product-coeffs": cmd_product_coeffs,
    "parity-scan": cmd_parity_scan,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heattrace", description="Heat traces, expansions and spectral zeta values.")
    p.add_argument("--config", help="JSON job configuration")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="output format (default depends on command)")
    p.add_argument("--tol", type=float, help="tolerance override")
    p.add_argument("--seed", type=int, default=0, help="seed for randomised checks")
    p.add_argument("--workers", type=int, default=1, help="worker processes for grid evaluations")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("heat-eval", help="theta, Theta_w or H_m on the config grid")
    s.add_argument("--quantity", choices=("theta", "Theta", "H"), default="theta")
    s.add_argument("--w", type=int, default=0, help="weight exponent for Theta")

    s = sub.add_parser("expand", help="small-time expansion")
    s.add_argument("--order", type=int)

    s = sub.add_parser("zeta", help="continued spectral zeta values")
    s.add_argument("--s", nargs="+", required=True, help="points such as 0.75 or 0.3+1j")
    s.add_argument("--order", type=int)

    s = sub.add_parser("zeta-special", help="Z(-m) from the heat coefficients")
    s.add_argument("--m", type=int, nargs="+", default=[0, 1, 2])

    s = sub.add_parser("residues", help="poles and residues of Z")
    s.add_argument("--order", type=int)

    s = sub.add_parser("product-coeffs", help="lambda^-m coefficients of log W")
    s.add_argument("--m", type=int, nargs="+", default=[1, 2, 3])

    s = sub.add_parser("parity-scan", help="t log t coefficient for each power")
    s.add_argument("--powers", type=int, nargs="+", default=[1, 2, 3, 4])
    s.add_argument("--precision", choices=("auto", "double", "extended"), default="auto")

    sub.add_parser("verify", help="run the acceptance suite")
    return p


def _render(result, columns, default_format, fmt):
    fmt = fmt or default_format or "json"
    if fmt == "csv":
        if isinstance(result, dict) and "terms" in result:
            rows = result["terms"]
        else:
            rows = result
        if columns is None:
            raise ConfigError("this command has no CSV form; use --format json")
        return _csv(rows, columns)
    return dumps(result) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = None if args.command == "verify" else load_config(args.config)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        result, columns, default_format = COMMANDS[args.command](args, cfg)
        if args.command == "verify" and not args.out:
            return EXIT_OK if all(r["passed"] for r in result) else EXIT_FAILED
        text = _render(result, columns, default_format, args.format)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.command == "verify":
            return EXIT_OK if all(r["passed"] for r in result) else EXIT_FAILED
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
