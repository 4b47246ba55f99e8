"""Command-line entry point: eval, optimize, sweep, qfi and verify."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from typing import Any, Sequence

from .bounds import ZeroPhotonError, limits_from_moments
from .detection import SCHEMES, Scheme
from .moments import joint_moments
from .oracle import FiniteDifferenceError, TruncationError
from .params import ConsistencyError, RangeError
from .sweep import (
    COLUMNS,
    DEFAULTS,
    PARAMETERS,
    Axis,
    SpecError,
    SweepSpec,
    _make_params,
    atomic_write,
    evaluate_point,
    format_float,
    parse_value,
    sweep,
    to_csv,
    to_json,
)
from .verify import Grid, verify_grid

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFY = 2
EXIT_NUMERICAL = 3

QFI_COLUMNS = ("alpha", "beta", "theta", "gamma", "r", "qfi", "qcrb", "snl", "hl", "n_total")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for verification failures
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_shared(p: argparse.ArgumentParser) -> None:
    for name in PARAMETERS:
        p.add_argument(f"--{name}", metavar="X", help="angle; accepts multiples of pi like 7pi/4" if name in ("theta", "gamma", "phi") else None)
    p.add_argument("--scheme", action="append", metavar="S", help="sid, idd or hd; repeat or comma-separate (default all)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--config", metavar="PATH", help="JSON document; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sksmzi", description="Phase sensitivity of an MZI fed by a coherent and a squeezed Kerr state.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("eval", "sensitivity at a single operating point"),
        ("optimize", "sensitivity minimized over the phase"),
        ("qfi", "quantum Fisher information and benchmark limits"),
    ):
        _add_shared(sub.add_parser(name, help=help_))
    sw = sub.add_parser("sweep", help="one- or two-axis parameter sweep")
    _add_shared(sw)
    sw.add_argument("--vary", action="append", metavar="NAME:FROM:TO:STEPS", help="varied axis; repeat for a grid")
    sw.add_argument("--optimize-phi", action="store_true", default=None)
    sw.add_argument("--workers", type=int, default=1)
    ver = sub.add_parser("verify", help="closed forms against the Fock oracle")
    _add_shared(ver)
    return parser


def _load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config: top level must be a JSON object")
    return data


def _flag_values(args: argparse.Namespace) -> dict[str, float]:
    return {k: parse_value(k, getattr(args, k)) for k in PARAMETERS if getattr(args, k) is not None}


def _schemes(args: argparse.Namespace, config_value: Any = None) -> tuple[Scheme, ...]:
    raw: list[str] | None = None
    if args.scheme:
        raw = [s for chunk in args.scheme for s in chunk.split(",") if s.strip()]
    elif config_value is not None:
        raw = [config_value] if isinstance(config_value, str) else list(config_value)
    if raw is None:
        return SCHEMES
    try:
        parsed = {Scheme.parse(s.strip() if isinstance(s, str) else s) for s in raw}
    except (ValueError, AttributeError) as exc:
        raise SpecError("scheme", str(exc)) from None
    return tuple(s for s in SCHEMES if s in parsed)


def _point(args: argparse.Namespace, config: dict[str, Any]) -> dict[str, float]:
    point = dict(DEFAULTS)
    source = dict(config.get("fixed", {}))
    source.update({k: v for k, v in config.items() if k in PARAMETERS})
    for k, v in source.items():
        if k not in PARAMETERS:
            raise SpecError(f"fixed.{k}", "unknown parameter")
        point[k] = parse_value(k, v)
    point.update(_flag_values(args))
    _make_params(point)
    return point


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _render(rows, columns, fmt: str) -> str:
    return to_json(rows, columns) if fmt == "json" else to_csv(rows, columns)


def _parse_vary(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) != 4:
        raise SpecError("vary", f"expected NAME:FROM:TO:STEPS, got {text!r}")
    name, lo, hi, steps = parts
    try:
        n = int(steps)
    except ValueError:
        raise SpecError("vary.steps", f"must be an integer, got {steps!r}") from None
    return Axis.from_dict({"name": name, "from": lo, "to": hi, "steps": n})


def cmd_eval(args, config, optimize: bool = False) -> int:
    point = _point(args, config)
    schemes = _schemes(args, config.get("schemes"))
    rows = evaluate_point(point, schemes, optimize_phi=optimize)
    _emit(_render(rows, COLUMNS, args.format), args.out)
    return EXIT_OK


def cmd_qfi(args, config) -> int:
    point = _point(args, config)
    params, _ = _make_params(point)
    b = limits_from_moments(joint_moments(params))
    row = {k: point[k] for k in ("alpha", "beta", "theta", "gamma", "r")}
    row.update(asdict(b))
    _emit(_render([row], QFI_COLUMNS, args.format), args.out)
    return EXIT_OK


def cmd_sweep(args, config) -> int:
    spec_dict = dict(config)
    if args.vary:
        spec_dict["vary"] = [{"name": a.name, "from": a.start, "to": a.stop, "steps": a.steps} for a in map(_parse_vary, args.vary)]
    flags = _flag_values(args)
    if flags:
        fixed = dict(spec_dict.get("fixed", {}))
        fixed.update(flags)
        spec_dict["fixed"] = fixed
    if args.scheme:
        spec_dict["schemes"] = [s.value for s in _schemes(args)]
    if args.optimize_phi is not None:
        spec_dict["optimize_phi"] = args.optimize_phi
    if args.workers < 1:
        raise SpecError("workers", f"must be at least 1, got {args.workers}")
    spec = SweepSpec.from_dict(spec_dict)
    rows = sweep(spec, workers=args.workers)
    _emit(_render(rows, spec.columns, args.format), args.out)
    return EXIT_OK


def _grid(args, config) -> Grid:
    grid = Grid()
    values: dict[str, tuple] = {}
    for key in ("alpha", "beta", "gamma", "r", "theta", "phi"):
        if key in config:
            raw = config[key] if isinstance(config[key], list) else [config[key]]
            values[key] = tuple(parse_value(key, v) for v in raw)
        if getattr(args, key) is not None:
            values[key] = (parse_value(key, getattr(args, key)),)
    unknown = sorted(set(config) - {"alpha", "beta", "gamma", "r", "theta", "phi", "schemes"})
    if unknown:
        raise SpecError(unknown[0], "unknown grid field")
    schemes = _schemes(args, config.get("schemes"))
    return Grid(**{**grid.__dict__, **values, "schemes": schemes})


def cmd_verify(args, config) -> int:
    grid = _grid(args, config)
    report = verify_grid(grid)
    cols = ("alpha", "beta", "theta", "gamma", "r", "moment_error", "worst_moment", "sensitivity_error", "qfi_error", "skipped", "passed")
    rows = []
    for p in report.points:
        q = p.params
        rows.append(
            {
                "alpha": q.alpha_mag,
                "beta": q.beta_mag,
                "theta": q.theta,
                "gamma": q.gamma,
                "r": q.r,
                "moment_error": p.moment_error,
                "worst_moment": p.worst_moment,
                "sensitivity_error": p.sensitivity_error,
                "qfi_error": p.qfi_error,
                "skipped": p.skipped,
                "passed": "true" if p.passed() else "false",
            }
        )
    _emit(_render(rows, cols, args.format), args.out)
    worst = report.worst()
    summary = ", ".join(f"{k} {format_float(v)}" for k, v in worst.items())
    status = "pass" if report.passed() else f"FAIL ({len(report.failures)} points)"
    print(f"verify: {len(report.points)} points, worst relative errors: {summary}; {status}", file=sys.stderr)
    return EXIT_OK if report.passed() else EXIT_VERIFY


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.command == "eval":
            return cmd_eval(args, config)
        if args.command == "optimize":
            return cmd_eval(args, config, optimize=True)
        if args.command == "qfi":
            return cmd_qfi(args, config)
        if args.command == "sweep":
            return cmd_sweep(args, config)
        return cmd_verify(args, config)
    except (ConsistencyError, TruncationError, FiniteDifferenceError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, SpecError, RangeError, ZeroPhotonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
