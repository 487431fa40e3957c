"""Command-line front end and all file input/output.

Subcommands: ``experiment`` (run a configured case, write results CSV and
an optional SVG strip plot), ``solve`` (solve one problem from a sample
file), ``rule`` (dump a cubature rule), ``verify`` (run the embedded
invariant suite).  Exit codes: 0 ok, 1 verification failure, 2 missing
input, 3 invalid input, 4 numerical failure.  Every failure prints a
single diagnostic line starting with ``error:`` to stderr.

Numeric CSV fields are written with 17 significant digits, which
round-trips IEEE doubles exactly and keeps output diffable; files are
written to a temporary name and renamed into place.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .collocation import CollocationParams, two_step_solve
from .errors import NumericalError, ValidationError
from .experiments import (
    FIGURE1_CASES,
    ExperimentCase,
    LeaderSummary,
    TrialResult,
    canonical_rule,
    case_with_overrides,
    leader_following_summary,
    penalty_from_symbol,
    run_case,
)
from .figures import strip_plot_svg
from .operators import HarmonicCoefficients, symbol_preset
from .quadrature import CubatureRule, sphere_rule
from .selection import ParameterGrid, default_eval_grid, select_two_step
from .smoothing import SmoothingParams
from .verify import run_checks

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_MISSING_INPUT = 2
EXIT_INVALID_INPUT = 3
EXIT_NUMERICAL = 4

_POINT_MATCH_TOL = 1e-9


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# CSV formats


def write_rule_csv(rule: CubatureRule, path: str) -> None:
    lines = ["x,y,z,weight"]
    for p, w in zip(rule.points, rule.weights):
        lines.append(f"{_fmt(p[0])},{_fmt(p[1])},{_fmt(p[2])},{_fmt(w)}")
    _atomic_write(path, "\n".join(lines) + "\n")


def write_samples_csv(path: str, rule: CubatureRule, samples: np.ndarray) -> None:
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (rule.n_points,):
        raise ValidationError(
            f"expected {rule.n_points} samples, got shape {samples.shape}"
        )
    lines = ["x,y,z,value"]
    for p, v in zip(rule.points, samples):
        lines.append(f"{_fmt(p[0])},{_fmt(p[1])},{_fmt(p[2])},{_fmt(v)}")
    _atomic_write(path, "\n".join(lines) + "\n")


def read_samples_csv(path: str, rule: CubatureRule) -> np.ndarray:
    """Read a sample file and check it sits on the rule's points, in order."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "x,y,z,value":
        raise ValidationError(f"{path}: line 1: expected header 'x,y,z,value'")
    rows = [ln for ln in lines[1:] if ln.strip()]
    if len(rows) != rule.n_points:
        raise ValidationError(
            f"{path}: expected {rule.n_points} data rows for this rule, "
            f"got {len(rows)}"
        )
    tol = _POINT_MATCH_TOL * max(1.0, rule.rho)
    samples = np.empty(rule.n_points)
    for i, ln in enumerate(rows):
        lineno = i + 2
        parts = ln.split(",")
        if len(parts) != 4:
            raise ValidationError(
                f"{path}: line {lineno}: expected 4 fields, got {len(parts)}"
            )
        try:
            x, y, z, v = (float(p) for p in parts)
        except ValueError:
            raise ValidationError(
                f"{path}: line {lineno}: non-numeric field"
            ) from None
        if np.max(np.abs(np.array([x, y, z]) - rule.points[i])) > tol:
            raise ValidationError(
                f"{path}: line {lineno}: point does not match the canonical "
                f"rule point {i}"
            )
        samples[i] = v
    return samples


def write_coeffs_csv(coeffs: HarmonicCoefficients, path: str) -> None:
    lines = ["k,j,value"]
    for k in range(coeffs.M + 1):
        for j in range(1, 2 * k + 2):
            lines.append(f"{k},{j},{_fmt(coeffs.get(k, j))}")
    _atomic_write(path, "\n".join(lines) + "\n")


def read_coeffs_csv(path: str, radius: float) -> HarmonicCoefficients:
    """Read a coefficient file; the full triangle must be present."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "k,j,value":
        raise ValidationError(f"{path}: line 1: expected header 'k,j,value'")
    entries = {}
    for i, ln in enumerate(ln for ln in lines[1:] if ln.strip()):
        lineno = i + 2
        parts = ln.split(",")
        if len(parts) != 3:
            raise ValidationError(
                f"{path}: line {lineno}: expected 3 fields, got {len(parts)}"
            )
        try:
            k, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValidationError(f"{path}: line {lineno}: malformed row") from None
        if (k, j) in entries:
            raise ValidationError(f"{path}: line {lineno}: duplicate index ({k},{j})")
        entries[(k, j)] = v
    n = len(entries)
    M = int(round(math.sqrt(n))) - 1
    if (M + 1) * (M + 1) != n:
        raise ValidationError(f"{path}: {n} rows do not form a full triangle")
    values = np.empty(n)
    for k in range(M + 1):
        for j in range(1, 2 * k + 2):
            if (k, j) not in entries:
                raise ValidationError(f"{path}: missing index ({k},{j})")
            values[k * k + j - 1] = entries[(k, j)]
    return HarmonicCoefficients(M=M, radius=radius, values=values)


def write_results_csv(
    path: str,
    case_name: str,
    results: list[TrialResult],
    summary: LeaderSummary | None = None,
) -> None:
    lines = ["case,trial,method,relative_error,alpha,lambda"]
    for r in results:
        lines.append(
            f"{case_name},{r.trial},{r.method},{_fmt(r.relative_error)},"
            f"{_fmt(r.chosen_alpha)},{_fmt(r.chosen_lambda)}"
        )
    if summary is not None:
        lines.append(
            f"# leader_following case={summary.case} "
            f"two_step_median={_fmt(summary.median_two_step)} "
            f"smoothing_median={_fmt(summary.median_smoothing)} "
            f"collocation_median={_fmt(summary.median_collocation)} "
            f"ratio={_fmt(summary.ratio)} "
            f"follows_leader={'true' if summary.follows_leader else 'false'}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_trace_csv(path: str, trace) -> None:
    lines = ["alpha,chosen_lambda,inner_min_diff,outer_diff"]
    for rec in trace:
        lines.append(
            f"{_fmt(rec.alpha)},{_fmt(rec.chosen_lambda)},"
            f"{_fmt(rec.inner_min_diff)},{_fmt(rec.outer_diff)}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Config files


_CASE_FIELDS = {
    "symbol": str,
    "upsilon": float,
    "beta_exponent": float,
    "epsilon": float,
    "M": int,
    "R": float,
    "rho": float,
    "trials": int,
    "seed": int,
}

def _grid_keys(prefix: str) -> tuple[str, str, str, str]:
    return (f"{prefix}0", f"{prefix}_factor", f"{prefix}_count", f"{prefix}_zero")


def parse_config(text: str) -> dict[str, str]:
    """Parse the flat `key = value` config grammar."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ValidationError(f"config line {lineno}: empty key or value")
        if key in out:
            raise ValidationError(f"config line {lineno}: duplicate key '{key}'")
        out[key] = value
    return out


def _parse_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValidationError(f"config field '{key}': expected a boolean, got {value!r}")


def _config_grid(cfg: dict, prefix: str, default: ParameterGrid) -> ParameterGrid:
    base_key, factor_key, count_key, zero_key = _grid_keys(prefix)
    if not any(k in cfg for k in _grid_keys(prefix)):
        return default
    try:
        base = float(cfg.get(base_key, default.base))
        factor = float(cfg.get(factor_key, default.factor))
        count = int(cfg.get(count_key, default.count))
    except ValueError as exc:
        raise ValidationError(f"config field '{prefix}*': {exc}") from None
    zero = (
        _parse_bool(zero_key, cfg[zero_key])
        if zero_key in cfg
        else default.include_zero
    )
    try:
        return ParameterGrid(base=base, factor=factor, count=count, include_zero=zero)
    except ValidationError as exc:
        raise ValidationError(f"config field '{prefix}*': {exc}") from None


def config_to_case(cfg: dict[str, str]) -> tuple[ExperimentCase, str, str | None]:
    """Build the experiment case plus output paths from parsed config."""
    known = (
        {"case", "output", "plot"}
        | set(_CASE_FIELDS)
        | set(_grid_keys("alpha"))
        | set(_grid_keys("lambda"))
    )
    for key in cfg:
        if key not in known:
            raise ValidationError(f"config field '{key}': unknown key")

    if "case" in cfg:
        name = cfg["case"]
        if name not in FIGURE1_CASES:
            raise ValidationError(
                f"config field 'case': unknown preset {name!r} "
                f"(have {', '.join(sorted(FIGURE1_CASES))})"
            )
        case = FIGURE1_CASES[name]
    else:
        if "symbol" not in cfg or "upsilon" not in cfg:
            raise ValidationError(
                "config needs either 'case' or both 'symbol' and 'upsilon'"
            )
        case = ExperimentCase(name="custom", symbol=cfg["symbol"], upsilon=1.0)

    overrides = {}
    for key, typ in _CASE_FIELDS.items():
        if key in cfg:
            try:
                overrides[key] = typ(cfg[key])
            except ValueError:
                raise ValidationError(
                    f"config field '{key}': expected {typ.__name__}, "
                    f"got {cfg[key]!r}"
                ) from None
    overrides["alpha_grid"] = _config_grid(cfg, "alpha", case.alpha_grid)
    overrides["lambda_grid"] = _config_grid(cfg, "lambda", case.lambda_grid)
    try:
        case = case_with_overrides(case, **overrides)
    except ValidationError as exc:
        raise ValidationError(f"config: {exc}") from None
    try:
        case.build_symbol()
    except ValidationError as exc:
        raise ValidationError(f"config field 'symbol': {exc}") from None

    if "output" not in cfg:
        raise ValidationError("config field 'output': required")
    return case, cfg["output"], cfg.get("plot")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_experiment(args) -> int:
    with open(args.config) as fh:
        text = fh.read()
    case, output, plot = config_to_case(parse_config(text))
    results = run_case(case)
    summary = leader_following_summary(case.name, results)
    write_results_csv(output, case.name, results, summary)
    if plot is not None:
        _atomic_write(plot, strip_plot_svg(case.name, results))
    print(
        f"{case.name}: {case.trials} trials, "
        f"two-step median {summary.median_two_step:.4f}, "
        f"best single median "
        f"{min(summary.median_smoothing, summary.median_collocation):.4f}, "
        f"follows leader: {'yes' if summary.follows_leader else 'no'}"
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    rule = canonical_rule(args.M, args.rho)
    samples = read_samples_csv(args.samples, rule)
    symbol = symbol_preset(args.symbol, args.R, args.rho, args.M)
    beta = penalty_from_symbol(symbol, args.beta_exponent)

    if args.auto:
        grid_a = ParameterGrid(
            base=args.alpha0,
            factor=args.alpha_factor,
            count=args.alpha_count,
            include_zero=not args.no_zero,
        )
        grid_l = ParameterGrid(
            base=args.lambda0,
            factor=args.lambda_factor,
            count=args.lambda_count,
            include_zero=not args.no_zero,
        )
        chosen = select_two_step(
            samples,
            rule,
            symbol,
            beta,
            grid_a,
            grid_l,
            default_eval_grid(args.M, args.R),
        )
        solution = chosen.solution
        print(f"selected alpha = {_fmt(chosen.alpha)}, lambda = {_fmt(chosen.lam)}")
        if args.trace is not None:
            write_trace_csv(args.trace, chosen.trace)
    else:
        if args.alpha is None or args.lam is None:
            raise ValidationError(
                "either pass --auto or both --alpha and --lambda"
            )
        solution = two_step_solve(
            samples,
            rule,
            SmoothingParams(lam=args.lam, beta=beta),
            CollocationParams(alpha=args.alpha, symbol=symbol),
        )
    write_coeffs_csv(solution, args.output)
    return EXIT_OK


def cmd_rule(args) -> int:
    write_rule_csv(sphere_rule(args.M, args.rho), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_checks(quick=args.quick, corrupt_weight=args.inject_fault)
    width = max(len(c.name) for c in checks)
    failed = [c for c in checks if not c.passed]
    for c in checks:
        print(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}  {c.detail}")
    if failed:
        print(f"error: {len(failed)} check(s) failed: "
              f"{', '.join(c.name for c in failed)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the invalid-input code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sphere-reg",
        description="Two-parameter regularization of spherical inverse problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_exp = sub.add_parser("experiment", help="run a configured experiment case")
    p_exp.add_argument("config", help="flat key = value configuration file")
    p_exp.set_defaults(func=cmd_experiment)

    p_solve = sub.add_parser("solve", help="solve one problem from a sample file")
    p_solve.add_argument("samples", help="CSV of x,y,z,value rows on the rule points")
    p_solve.add_argument("--M", type=int, required=True, help="truncation degree")
    p_solve.add_argument("--rho", type=float, default=1.0, help="data sphere radius")
    p_solve.add_argument("--R", type=float, default=1.0, help="solution sphere radius")
    p_solve.add_argument(
        "--symbol",
        required=True,
        help="symbol preset: sst, sgg, geometric(q), polynomial(s)",
    )
    p_solve.add_argument(
        "--beta-exponent",
        type=float,
        default=0.0,
        help="s in the penalty rule beta_k^2 = (k+1/2)^s / a_k",
    )
    p_solve.add_argument("--alpha", type=float, help="inversion parameter")
    p_solve.add_argument(
        "--lambda", dest="lam", type=float, help="smoothing parameter"
    )
    p_solve.add_argument(
        "--auto",
        action="store_true",
        help="choose alpha and lambda by nested quasi-optimality",
    )
    p_solve.add_argument("--alpha0", type=float, default=1.78e-5)
    p_solve.add_argument("--alpha-factor", type=float, default=1.25)
    p_solve.add_argument("--alpha-count", type=int, default=50)
    p_solve.add_argument("--lambda0", type=float, default=1.78e-5)
    p_solve.add_argument("--lambda-factor", type=float, default=1.25)
    p_solve.add_argument("--lambda-count", type=int, default=50)
    p_solve.add_argument(
        "--no-zero",
        action="store_true",
        help="do not prepend 0 to the parameter grids",
    )
    p_solve.add_argument("--trace", help="write the per-alpha selection trace CSV")
    p_solve.add_argument("-o", "--output", required=True, help="coefficient CSV path")
    p_solve.set_defaults(func=cmd_solve)

    p_rule = sub.add_parser("rule", help="write a cubature rule as CSV")
    p_rule.add_argument("--M", type=int, required=True)
    p_rule.add_argument("--rho", type=float, default=1.0)
    p_rule.add_argument("-o", "--output", required=True)
    p_rule.set_defaults(func=cmd_rule)

    p_verify = sub.add_parser("verify", help="run the embedded invariant suite")
    p_verify.add_argument(
        "--quick", action="store_true", help="smaller degrees, finishes in seconds"
    )
    p_verify.add_argument(
        "--inject-fault", action="store_true", help=argparse.SUPPRESS
    )
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        name = exc.filename if exc.filename else exc
        print(f"error: missing input file: {name}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
