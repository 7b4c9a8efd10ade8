"""Command-line interface: ``wftkde {fit,mise,simulate,scenarios}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import io as wio
from .distributions import get_scenario, mixture_char_seq, scenario_catalog
from .estimator import CORRECTIONS, fit
from .kernels import FlatTopKernel, VonMisesKernel
from .selectors import er_selector, lscv_flat_top, lscv_von_mises
from .simulation import (
    SimulationConfig,
    emit_reports,
    parse_estimators,
    run_scenario,
)
from .theory import exact_mise, iv_bound

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _threads_default() -> int:
    env = os.environ.get("WFTKDE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    common.add_argument("--threads", type=int, default=_threads_default(),
                        help="worker processes for simulations (env WFTKDE_THREADS)")
    common.add_argument("--output", help="output file; stdout summary when omitted")

    parser = _Parser(prog="wftkde", description="Wrapped flat-top kernel density estimation for circular data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", parents=[common], help="fit a density to a CSV column and export a grid")
    p.add_argument("--input", required=True)
    p.add_argument("--column", default="0", help="column name or zero-based index")
    p.add_argument("--unit", choices=wio.UNITS, default="radians")
    p.add_argument("--direction", choices=wio.DIRECTIONS, default="counterclockwise")
    p.add_argument("--kernel", choices=("wsinc", "wtrap", "vonmises"), default="wsinc")
    p.add_argument("--nu", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--select", choices=("lscv", "er"))
    p.add_argument("--c", type=int)
    p.add_argument("--correction", choices=CORRECTIONS, default="none")
    p.add_argument("--grid", type=int, default=1024)

    p = sub.add_parser("mise", parents=[common], help="exact MISE of a flat-top estimator on a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--kernel", choices=("wsinc", "wtrap"), default="wsinc")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--c", type=int)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo ISE study")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--scenario")
    grp.add_argument("--all", action="store_true", help="run every scenario M1..M20")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--estimators", default="wsinc:er;wtrap:er:2",
                   help="semicolon-separated kernel:selector-or-value[:c] entries")
    p.add_argument("--format", choices=("csv", "json"),
                   help="report format (default: from the --output extension, else csv)")

    sub.add_parser("scenarios", parents=[common], help="list the benchmark scenarios")
    return parser


def _flat_c(args) -> int:
    if args.c is not None:
        return args.c
    return 2 if args.kernel == "wtrap" else 1


def _validate_fit(args) -> None:
    given = [name for name in ("nu", "kappa", "select") if getattr(args, name) is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --nu, --kappa or --select")
    if args.kernel == "vonmises":
        if args.nu is not None or args.select == "er":
            raise UsageError("the von Mises kernel takes --kappa or --select lscv")
        if args.c is not None:
            raise UsageError("--c applies to flat-top kernels only")
    elif args.kappa is not None:
        raise UsageError("--kappa applies to the von Mises kernel only")
    if args.kernel == "wsinc" and _flat_c(args) != 1:
        raise UsageError("wsinc has c = 1; use --kernel wtrap for c >= 2")
    if args.kernel == "wtrap" and _flat_c(args) < 2:
        raise UsageError("wtrap needs --c >= 2")
    if args.grid < 8:
        raise UsageError("--grid must be at least 8")


def cmd_fit(args) -> int:
    _validate_fit(args)
    column = int(args.column) if args.column.isdigit() else args.column
    data = wio.load_csv(args.input, column, args.unit, args.direction)
    boundary = False
    if args.kernel == "vonmises":
        if args.select:
            res = lscv_von_mises(data.angles)
            kappa, boundary = res.chosen, res.at_boundary
        else:
            kappa = args.kappa
        kernel = VonMisesKernel(kappa)
        print(f"kappa={kappa:g}")
    else:
        c = _flat_c(args)
        if args.select == "er":
            res = er_selector(data.angles)
            nu, boundary = res.chosen, res.at_boundary
        elif args.select == "lscv":
            res = lscv_flat_top(data.angles, c)
            nu, boundary = res.chosen, res.at_boundary
        else:
            nu = args.nu
        kernel = FlatTopKernel(nu, c)
        print(f"nu={nu:g}")
    if boundary:
        print("warning: selected parameter lies on the search boundary", file=sys.stderr)
    estimate = fit(data.angles, kernel, args.correction)
    if args.output:
        wio.export_density_grid(estimate, args.output, args.grid, args.correction)
    return EXIT_OK


def cmd_mise(args) -> int:
    c = _flat_c(args)
    if args.kernel == "wsinc" and c != 1:
        raise UsageError("wsinc has c = 1")
    if args.kernel == "wtrap" and c < 2:
        raise UsageError("wtrap needs --c >= 2")
    if args.n < 1 or args.nu < 0:
        raise UsageError("--n must be positive and --nu nonnegative")
    spec = get_scenario(args.scenario)
    kernel = FlatTopKernel(args.nu, c)
    report = exact_mise(mixture_char_seq(spec), kernel, args.n)
    out = dict(report.to_dict(), iv_bound=iv_bound(args.nu, c, args.n),
               scenario=spec.id, kernel=kernel.name, nu=args.nu, c=c, n=args.n)
    text = json.dumps(out, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        estimators = parse_estimators(args.estimators)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.reps < 1 or args.n < 1 or args.threads < 1:
        raise UsageError("--n, --reps and --threads must be positive")
    ids = [s.id for s in scenario_catalog()] if args.all else [get_scenario(args.scenario).id]
    try:
        configs = [SimulationConfig(sid, args.n, args.reps, tuple(estimators), seed=args.seed) for sid in ids]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reports = []
    for cfg in configs:
        report = run_scenario(cfg, workers=args.threads)
        reports.append(report)
        for s in report.estimators:
            line = f"{report.scenario_id}\tn={report.n}\t{s.config.label}\t" \
                   f"mean={s.mean_x1e4:.4g}\tse={s.se_x1e4:.4g}"
            if s.failures:
                line += f"\tfailures={len(s.failures)}"
            print(line)
    if args.output:
        fmt = args.format or ("json" if args.output.lower().endswith(".json") else "csv")
        emit_reports(reports, fmt, args.output)
    return EXIT_OK


def cmd_scenarios(args) -> int:
    lines = []
    for spec in scenario_catalog():
        comps = " + ".join(f"{w:.4g}*{d}" for w, d in spec.components)
        lines.append(f"{spec.id}\t{spec.description}\t{comps}")
    text = "\n".join(lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "mise": cmd_mise, "simulate": cmd_simulate, "scenarios": cmd_scenarios}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"wftkde: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        # unknown scenario id
        print(f"wftkde: usage error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except (wio.DataError, FileNotFoundError, OSError) as exc:
        print(f"wftkde: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, ValueError) as exc:
        print(f"wftkde: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
