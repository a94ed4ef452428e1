"""Command-line front end.

Subcommands: eval, moments, converge, voronovskaya, bounds, errata, plot.
Exit status is 0 on success, 2 for configuration errors (bad names, bad
sequences, constraint violations) and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .analysis import THEOREMS, bound_check, convergence_study, voronovskaya_scan
from .functions import get_function
from .moments import EngineLimitError, build_moment_table, run_errata
from .operators import KINDS, OperatorSpec, SequencePair, apply_grid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

DEFAULT_N_LIST = "16,32,64,128,256"

CSV_HEADERS = {
    "converge": ["n", "sup_error", "argmax_x"],
    "voronovskaya": ["n", "scaled_error", "target"],
    "bounds": ["x", "lhs", "rhs", "margin"],
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    operator: str | None = None
    n: int | None = None
    n_list: tuple[int, ...] = ()
    seq: SequencePair | None = None
    mu: float | None = None
    function: str | None = None
    grid: int = 1000
    nodes: int | None = None
    output: str | None = None
    format: str = "csv"

    def spec(self, n: int | None = None) -> OperatorSpec:
        return OperatorSpec(self.operator, self.n if n is None else n, self.seq, self.mu)


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"cannot parse n-list {text!r}") from None
    if not values:
        raise ConfigError("n-list is empty")
    return values


def _build_config(args: argparse.Namespace) -> RunConfig:
    operator = getattr(args, "operator", None)
    if operator is not None and operator not in KINDS:
        raise ConfigError(f"unknown operator {operator!r}; known: {', '.join(KINDS)}")
    seq = None
    if operator in ("m1", "bezier") or getattr(args, "a1", None) is not None:
        seq = SequencePair.parse(args.a0, args.a1)
    function = getattr(args, "function", None)
    if function is not None:
        get_function(function)
    n_list = _parse_n_list(args.n_list) if getattr(args, "n_list", None) else ()
    mu = getattr(args, "mu", None)
    if operator == "bezier" and mu is None:
        mu = 1.0
    return RunConfig(
        command=args.command,
        operator=operator,
        n=getattr(args, "n", None),
        n_list=n_list,
        seq=seq,
        mu=mu if operator == "bezier" else None,
        function=function,
        grid=getattr(args, "grid", 1000),
        nodes=getattr(args, "nodes", None),
        output=getattr(args, "output", None),
        format=getattr(args, "format", "csv"),
    )


# ---------------------------------------------------------------------------
# output helpers

def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# subcommands

def _cmd_eval(cfg: RunConfig, args) -> int:
    f = get_function(cfg.function)
    values = apply_grid(cfg.spec(), f, args.x, cfg.nodes)
    for x, v in zip(args.x, values):
        print(f"{x!r} {float(v)!r}")
    return EXIT_OK


def _cmd_moments(cfg: RunConfig, args) -> int:
    table = build_moment_table(cfg.spec(), args.max_power)
    polys = table.central_entries if args.central else table.entries
    width = max((len(p) for p in polys.values()), default=1)
    width = max(width, 1)
    if cfg.format == "json":
        payload = {
            "spec": cfg.spec().describe(),
            "central": bool(args.central),
            "rows": [
                {"power": j, "coefficients": [str(c) for c in p.coefficients]}
                for j, p in sorted(polys.items())
            ],
        }
        _emit(_json_text(payload), cfg.output)
        return EXIT_OK
    header = ["power"] + [f"c{i}" for i in range(width)]
    rows = [[j] + [str(p[i]) for i in range(width)] for j, p in sorted(polys.items())]
    _emit(_csv_text(header, rows), cfg.output)
    return EXIT_OK


def _cmd_converge(cfg: RunConfig, args) -> int:
    f = get_function(cfg.function)
    report = convergence_study(
        cfg.operator, f, cfg.n_list, seq=cfg.seq, mu=cfg.mu, grid_size=cfg.grid, nodes=cfg.nodes
    )
    if cfg.format == "json":
        _emit(_json_text(report.to_dict()), cfg.output)
    else:
        _emit(_csv_text(CSV_HEADERS["converge"], report.rows), cfg.output)
    print(f"slope {report.slope!r} intercept {report.intercept!r}", file=sys.stderr if cfg.output is None else sys.stdout)
    return EXIT_OK


def _cmd_voronovskaya(cfg: RunConfig, args) -> int:
    f = get_function(cfg.function)
    try:
        report = voronovskaya_scan(f, args.x, cfg.n_list, cfg.nodes)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.format == "json":
        _emit(_json_text(report.to_dict()), cfg.output)
    else:
        rows = [(n, s, report.target) for n, s in report.rows]
        _emit(_csv_text(CSV_HEADERS["voronovskaya"], rows), cfg.output)
    return EXIT_OK


def _cmd_bounds(cfg: RunConfig, args) -> int:
    f = get_function(cfg.function)
    report = bound_check(args.theorem, cfg.spec(), f, cfg.grid, cfg.nodes)
    if cfg.format == "json":
        _emit(_json_text(report.to_dict()), cfg.output)
    else:
        rows = [(x, l, r, r - l) for x, l, r in report.rows]
        _emit(_csv_text(CSV_HEADERS["bounds"], rows), cfg.output)
    summary = f"{report.theorem} {report.verdict} min_margin {report.min_margin!r}"
    if "best_constant" in report.extras:
        summary += f" best_constant {report.extras['best_constant']!r}"
    print(summary, file=sys.stderr if cfg.output is None else sys.stdout)
    return EXIT_OK


def _cmd_errata(cfg: RunConfig, args) -> int:
    ledger = run_errata()
    path = cfg.output or "errata.json"
    Path(path).write_text(ledger.to_json() + "\n", encoding="utf-8")
    refuted = sorted({r.identity_name for r in ledger.reports if r.verdict == "refuted"})
    print(f"{len(ledger.reports)} checks written to {path}; refuted: {', '.join(refuted) or 'none'}")
    return EXIT_OK


def _cmd_plot(cfg: RunConfig, args) -> int:
    from .plotting import load_table, render_svg

    columns, rows = load_table(args.input)
    svg = render_svg(columns, rows, log=args.log, title=args.title or Path(args.input).name)
    _emit(svg, cfg.output)
    return EXIT_OK


COMMANDS = {
    "eval": _cmd_eval,
    "moments": _cmd_moments,
    "converge": _cmd_converge,
    "voronovskaya": _cmd_voronovskaya,
    "bounds": _cmd_bounds,
    "errata": _cmd_errata,
    "plot": _cmd_plot,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="durrmeyer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def operator_args(p, need_n=True):
        p.add_argument("--operator", required=True, help=f"one of {', '.join(KINDS)}")
        if need_n:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--a0", default="1/2", help="a0(n) as 'p/q' or 'p/q + r/s / n'")
        p.add_argument("--a1", default=None, help="a1(n); derived from 2 a0 + a1 = 1 when omitted")
        p.add_argument("--mu", type=float, default=None, help="Bezier exponent (>= 1)")
        p.add_argument("--nodes", type=int, default=None, help="Gauss-Legendre nodes (default n + 16)")

    def output_args(p):
        p.add_argument("--output", "-o", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("eval", help="evaluate an operator at points")
    operator_args(p)
    p.add_argument("--x", type=float, action="append", required=True)
    p.add_argument("--function", required=True)

    p = sub.add_parser("moments", help="exact images of monomials")
    operator_args(p)
    p.add_argument("--max-power", type=int, default=4)
    p.add_argument("--central", action="store_true", help="emit central moments instead")
    output_args(p)

    p = sub.add_parser("converge", help="sup-error study over an n-list")
    operator_args(p, need_n=False)
    p.add_argument("--function", required=True)
    p.add_argument("--n-list", default=DEFAULT_N_LIST)
    p.add_argument("--grid", type=int, default=1000)
    output_args(p)

    p = sub.add_parser("voronovskaya", help="scaled M2 errors at one point")
    p.add_argument("--function", required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--n-list", default=DEFAULT_N_LIST)
    p.add_argument("--nodes", type=int, default=None)
    output_args(p)

    p = sub.add_parser("bounds", help="pointwise check of a printed error bound")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    operator_args(p)
    p.add_argument("--function", required=True)
    p.add_argument("--grid", type=int, default=1000)
    output_args(p)

    p = sub.add_parser("errata", help="confirm or refute every printed identity")
    p.add_argument("--output", "-o", default=None, help="default errata.json")

    p = sub.add_parser("plot", help="render a CSV or JSON output as SVG")
    p.add_argument("input")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--log", action="store_true", help="log-log axes")
    p.add_argument("--title", default=None)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        cfg = _build_config(args)
        if cfg.operator is not None and args.command not in ("converge",) and cfg.n is None:
            raise ConfigError("--n is required")
        return COMMANDS[args.command](cfg, args)
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, EngineLimitError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
