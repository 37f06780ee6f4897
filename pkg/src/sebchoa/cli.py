"""Command-line entry point: ``sebchoa {list-problems,run,spiral-table}``.

Every error exits nonzero with one line of the form ``error[CODE]: message``.
Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .algorithms import VARIANTS, check_variant
from .choa import ChoaConfig, FSchedule
from .harness import AlgorithmSpec, aggregate, export_report_csv, export_traces_csv, run_experiment
from .problems import DEFAULT_DIMENSION, category_of, default_registry, registry, resolve
from .rng_chaos import ChaoticMapKind
from .spiral import SpiralKind, spiral_table

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
OUTPUT_ENV = "SEBCHOA_OUTPUT_DIR"
CATEGORIES = ("unimodal", "multimodal", "fixed-dimension", "constrained")


class CliError(Exception):
    def __init__(self, code: str, message: str, exit_code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("E_USAGE", f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# list-problems


def cmd_list_problems(args, out=None) -> int:
    out = out or sys.stdout
    listed = default_registry(args.dimension).problems()
    known = {p.name for p in listed}
    # problems added through register() in this process
    listed += [p for p in registry().problems() if p.name not in known]
    rows = [p for p in listed if args.category is None or category_of(p) == args.category]
    if not rows:
        print("no problems matched", file=out)
        return EXIT_OK
    print(f"{'name':<16}{'dim':>4}  {'category':<16}{'known optimum':>16}  bounds", file=out)
    for p in rows:
        lows, highs = set(p.lower.tolist()), set(p.upper.tolist())
        if len(lows) == 1 and len(highs) == 1:
            bounds = f"[{p.lower[0]:g}, {p.upper[0]:g}]^{p.dimension}"
        else:
            bounds = " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in p.bounds)
        opt = "" if p.known_optimum is None else f"{p.known_optimum:.10g}"
        print(f"{p.name:<16}{p.dimension:>4}  {category_of(p):<16}{opt:>16}  {bounds}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# run


@dataclass
class ExperimentConfig:
    algorithms: list
    problems: list
    runs: int = 30
    seed: int = 0
    output: str = "results"
    workers: int = 1
    reference: Optional[str] = None
    dimension: int = DEFAULT_DIMENSION
    choa: ChoaConfig = None
    slope: float = 1.0


# config key -> (section, parser); every key is also a --flag of the same name.
_KEYS = {
    "algorithms": ("experiment", lambda v: _split(v)),
    "problems": ("experiment", lambda v: _split(v)),
    "runs": ("experiment", int),
    "seed": ("experiment", int),
    "output": ("experiment", str),
    "workers": ("experiment", int),
    "reference": ("experiment", str),
    "dimension": ("experiment", int),
    "population_size": ("algorithm", int),
    "max_iterations": ("algorithm", int),
    "slope": ("algorithm", float),
    "chaotic_map": ("algorithm", str),
    "lambda_threshold": ("algorithm", float),
    "f_schedule": ("algorithm", str),
    "f_exponent": ("algorithm", float),
}


def _split(value: str) -> list:
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def _line_of(path: Path, section: str, key: str) -> Optional[int]:
    current = None
    for no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and s.split("=", 1)[0].split(":", 1)[0].strip() == key:
            return no
    return None


def read_config_file(path) -> dict:
    """Parse an INI experiment file into a flat dict of typed values."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise CliError("E_CONFIG", f"cannot read config {str(path)!r}: {exc.strerror or exc}")
    except configparser.Error as exc:
        msg = " ".join(str(exc).split())
        raise CliError("E_CONFIG", f"{path}: {msg}")

    values = {}
    for section in parser.sections():
        if section not in ("experiment", "algorithm"):
            raise CliError("E_CONFIG", f"{path}: unknown section [{section}]")
        for key, raw in parser.items(section):
            norm = key.replace("-", "_")
            where = f"{path}:{_line_of(path, section, key) or '?'}"
            if norm not in _KEYS or _KEYS[norm][0] != section:
                raise CliError("E_CONFIG", f"{where}: unknown key {key!r} in [{section}]")
            try:
                values[norm] = _KEYS[norm][1](raw)
            except ValueError:
                raise CliError("E_CONFIG", f"{where}: bad value {raw!r} for {key!r}") from None
    return values


def build_experiment(args) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    if "algorithms" not in values or not values["algorithms"]:
        raise CliError("E_USAGE", "no algorithms given (use --algorithms or [experiment] algorithms)")
    if "problems" not in values or not values["problems"]:
        raise CliError("E_USAGE", "no problems given (use --problems or [experiment] problems)")
    try:
        for name in values["algorithms"]:
            check_variant(name)
    except ValueError as exc:
        raise CliError("E_UNKNOWN_ALGORITHM", str(exc))
    if values.get("runs", 30) < 1:
        raise CliError("E_USAGE", "runs must be at least 1")
    seed = values.get("seed", 0)
    if not 0 <= seed < 2**64:
        raise CliError("E_USAGE", "seed must be a 64-bit unsigned integer")
    reference = values.get("reference")
    if reference is not None and reference not in values["algorithms"]:
        raise CliError("E_USAGE", f"reference {reference!r} is not among the algorithms")

    choa_kwargs = {
        k: values[k]
        for k in ("population_size", "max_iterations", "lambda_threshold", "f_exponent")
        if k in values
    }
    try:
        if "chaotic_map" in values:
            choa_kwargs["chaotic_map"] = ChaoticMapKind.parse(values["chaotic_map"])
        if "f_schedule" in values:
            try:
                choa_kwargs["f_schedule"] = FSchedule(values["f_schedule"].lower())
            except ValueError:
                raise ValueError(f"unknown f schedule {values['f_schedule']!r}; valid: linear, nonlinear")
        choa = ChoaConfig(**choa_kwargs)
        slope = values.get("slope", 1.0)
        if not slope > 0:
            raise ValueError("slope must be positive")
    except ValueError as exc:
        raise CliError("E_USAGE", str(exc))

    return ExperimentConfig(
        algorithms=values["algorithms"],
        problems=values["problems"],
        runs=values.get("runs", 30),
        seed=seed,
        output=values.get("output") or os.environ.get(OUTPUT_ENV) or "results",
        workers=values.get("workers", 1),
        reference=reference,
        dimension=values.get("dimension", DEFAULT_DIMENSION),
        choa=choa,
        slope=slope,
    )


def _summary_table(report, out) -> None:
    algs = report.algorithms
    width = max(14, *(len(a) + 2 for a in algs))
    print(f"{'problem':<12}" + "".join(f"{a:>{width + 12}}" for a in algs), file=out)
    for prob in report.problems:
        line = f"{prob:<12}"
        for a in algs:
            c = report.cells.get((a, prob))
            if c is None:
                line += f"{'missing':>{width + 12}}"
                continue
            mark = c.marker or " "
            line += f"{c.mean:>{width}.4e} ±{c.std:.2e}{mark}"[-(width + 12):].rjust(width + 12)
        print(line, file=out)
    print(f"{'avg rank':<12}" + "".join(f"{report.average_rank[a]:>{width + 12}.2f}" for a in algs), file=out)
    if report.reference:
        print(f"markers vs {report.reference} (rank-sum, 5%): + better, - worse, ≈ no difference", file=out)
    if any(c.single_run_std for c in report.cells.values()):
        print("note: cells with a single run report std = 0", file=out)


def cmd_run(args, out=None) -> int:
    out = out or sys.stdout
    exp = build_experiment(args)
    try:
        problems = resolve(exp.problems, exp.dimension)
    except KeyError as exc:
        raise CliError("E_UNKNOWN_PROBLEM", str(exc.args[0]))
    except ValueError as exc:
        raise CliError("E_USAGE", str(exc))

    specs = [
        AlgorithmSpec(name, {"spiral": None} if not name.startswith("seb-") else {}, None)
        for name in exp.algorithms
    ]
    if exp.slope != 1.0:
        from .spiral import Spiral

        specs = [
            AlgorithmSpec(s.variant, {"spiral": Spiral(SpiralKind.parse(s.variant[4:]), exp.slope)})
            if s.variant.startswith("seb-") else s
            for s in specs
        ]
    records = run_experiment(specs, problems, exp.runs, exp.seed, exp.choa, exp.workers)
    report = aggregate(records, exp.reference)

    outdir = Path(exp.output)
    traces, summary = outdir / "traces.csv", outdir / "report.csv"
    try:
        export_traces_csv(records, traces)
        export_report_csv(report, summary)
    except OSError as exc:
        raise CliError("E_IO", str(exc), EXIT_RUNTIME)

    _summary_table(report, out)
    print(f"wrote {traces} and {summary}", file=out)
    failed = [r for r in records if not r.ok]
    if failed:
        first = failed[0]
        raise CliError(
            "E_CELL_FAILED",
            f"{len(failed)} cell(s) failed; first: {first.algorithm}/{first.problem} run {first.run_index}: {first.error}",
            EXIT_RUNTIME,
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# spiral-table


def _theta_grid(args) -> np.ndarray:
    if args.thetas:
        try:
            return np.array([float(t) for t in _split(args.thetas)])
        except ValueError:
            raise CliError("E_USAGE", f"bad theta list {args.thetas!r}")
    if args.points < 1:
        raise CliError("E_USAGE", "--points must be at least 1")
    return np.linspace(args.theta_start, args.theta_stop, args.points)


def cmd_spiral_table(args, out=None) -> int:
    out = out or sys.stdout
    try:
        kind = SpiralKind.parse(args.kind)
    except ValueError as exc:
        raise CliError("E_UNKNOWN_SPIRAL", str(exc))
    if not args.slope > 0:
        raise CliError("E_USAGE", "--slope must be positive")
    grid = _theta_grid(args)
    rng = None
    if kind is SpiralKind.RANDOM:
        from .rng_chaos import RngStream

        rng = RngStream(args.seed)
    try:
        from .spiral import Spiral

        rows = spiral_table(Spiral(kind, args.slope), grid, rng=rng)
    except ValueError as exc:
        raise CliError("E_DOMAIN", str(exc))

    fh = out
    if args.output:
        try:
            fh = open(args.output, "w", newline="", encoding="utf-8")
        except OSError as exc:
            raise CliError("E_IO", f"cannot write {args.output!r}: {exc.strerror}", EXIT_RUNTIME)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("kind", "a", "theta", "radius"))
        for theta, radius in rows:
            w.writerow((kind.value, repr(float(args.slope)), repr(theta), repr(radius)))
    finally:
        if fh is not out:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sebchoa", description="Chimp optimization with spiral exploitation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    lp = sub.add_parser("list-problems", help="list registered benchmark problems")
    lp.add_argument("--category", choices=CATEGORIES, help="show only this category")
    lp.add_argument("--dimension", type=int, default=DEFAULT_DIMENSION,
                    help="dimension of the scalable functions F1-F13 (default 30)")
    lp.set_defaults(func=cmd_list_problems)

    rp = sub.add_parser("run", help="run a multi-seed experiment and write CSV reports")
    rp.add_argument("config", nargs="?", help="INI file with [experiment] and [algorithm] sections")
    g = rp.add_argument_group("experiment (override the config file)")
    g.add_argument("--algorithms", type=_split,
                   help=f"comma-separated variants: {', '.join(VARIANTS)}")
    g.add_argument("--problems", type=_split,
                   help="comma-separated problem names, standard-suite or engineering-suite")
    g.add_argument("--runs", type=int, help="independent runs per cell (default 30)")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    g.add_argument("--output", help=f"output directory (default ${OUTPUT_ENV} or ./results)")
    g.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    g.add_argument("--reference", help="algorithm the others are tested against (default: first)")
    g.add_argument("--dimension", type=int, help="dimension of F1-F13 (default 30)")
    a = rp.add_argument_group("algorithm")
    a.add_argument("--population-size", dest="population_size", type=int, help="chimps (default 30)")
    a.add_argument("--max-iterations", dest="max_iterations", type=int, help="iterations (default 500)")
    a.add_argument("--slope", type=float, help="spiral slope a (default 1)")
    a.add_argument("--chaotic-map", dest="chaotic_map", help="logistic, tent or sine (default logistic)")
    a.add_argument("--lambda-threshold", dest="lambda_threshold", type=float,
                   help="draws at or above this take the exploitation branch (default 0.5)")
    a.add_argument("--f-schedule", dest="f_schedule", help="linear or nonlinear (default linear)")
    a.add_argument("--f-exponent", dest="f_exponent", type=float,
                   help="exponent of the nonlinear f schedule (default 2)")
    rp.set_defaults(func=cmd_run)

    sp = sub.add_parser("spiral-table", help="emit spiral radii over a theta grid as CSV")
    sp.add_argument("--kind", required=True, help=f"one of: {', '.join(k.value for k in SpiralKind)}")
    sp.add_argument("--slope", type=float, default=1.0, help="slope a (default 1)")
    sp.add_argument("--thetas", help="comma-separated angles; overrides the linspace options")
    sp.add_argument("--theta-start", type=float, default=0.1, help="first angle (default 0.1)")
    sp.add_argument("--theta-stop", type=float, default=4 * np.pi, help="last angle (default 4*pi)")
    sp.add_argument("--points", type=int, default=100, help="grid size (default 100)")
    sp.add_argument("--seed", type=int, default=0, help="seed for the random spiral (default 0)")
    sp.add_argument("--output", help="write to this file instead of stdout")
    sp.set_defaults(func=cmd_spiral_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        if args.command is None:
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except CliError as exc:
        print(f"error[{exc.code}]: {' '.join(str(exc).split())}", file=sys.stderr)
        return exc.exit_code
    except KeyboardInterrupt:
        print("error[E_INTERRUPTED]: interrupted", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
