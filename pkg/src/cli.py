"""
cli.py
------
Command-line entry point (`coin-pi`, or `python -m src.cli`).

Subcommands
-----------
simulate   estimate π from coin-toss trials under a trial or flip budget
exact      pmf / series terms with partial sums and remainder bounds
oracle     exhaustive enumeration cross-checked against the closed forms
converge   median |error| against flip budget and the fitted log-log slope
parker     replication of the 10,000-flip experiment
bounds     fraction range and the (3, 4) band for π
buffon     Buffon's needle baseline

Output
------
JSON on stdout by default (`--format csv` where supported); experiment
tables (converge, parker, buffon) are always CSV. Every output carries a
manifest: under the "manifest" key for JSON, as a leading
`# manifest: {...}` line for CSV. The stdout manifest leaves out wall time
and the worker count so reruns compare byte for byte; `--out PATH` writes
the result to PATH and the full manifest (with wall time) to
`PATH.manifest.json`.

Exit codes: 0 success, 1 usage error (bad flags, input or config file),
2 internal invariant violation, 3 runtime failure such as an unwritable --out.

Usage
-----
Example:
    coin-pi simulate --seed 1 --trials 1000 --method direct
    coin-pi exact --what invtau-series --terms 1
    coin-pi oracle --max-len 21
    coin-pi converge --budgets 1000 10000 100000 1000000 --reps 50 --out artifacts/experiments/convergence.csv
"""

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
import argparse
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

# -------------------------------------------------------------------
# Third-Party Imports
# -------------------------------------------------------------------
import pandas as pd

# -------------------------------------------------------------------
# Internal Imports
# -------------------------------------------------------------------
from src import __version__
from src.logger import get_logger
from src.custom_exception import CustomException, InvalidInputError, InvariantViolationError
from src.analytics import (
    arcsin_tail_bound,
    fraction_tail_bound,
    inv_tau_tail_bound,
    iter_series,
    tau_tail,
)
from src.oracle import oracle_vs_analytics
from src.stats_experiments import (
    ESTIMATE_COLUMNS,
    Budget,
    ExperimentConfig,
    bounds_demonstration,
    buffon_experiment,
    convergence_experiment,
    estimate_pi,
    estimate_row,
    flips_for_target_error,
    parker_replication,
    stack_rows,
    statistic_rows,
)
from config.paths_config import CONFIG_PATH
from utils.common_functions import canonical_json, checksum, read_yaml, render_table, write_output

# -------------------------------------------------------------------
# Logger Setup
# -------------------------------------------------------------------
logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2
EXIT_RUNTIME = 3

# --what flag -> analytics series target, and the value each partial sum approaches
EXACT_TARGETS = {
    "pmf": ("pmf", lambda x: 1.0),
    "fraction-series": ("fraction-mean", lambda x: math.pi / 4),
    "invtau-series": ("inv-tau-mean", lambda x: math.pi / 2 - 1),
    "arcsin": ("arcsine", math.asin),
}


# -------------------------------------------------------------------
# Class: CommandResult
# -------------------------------------------------------------------
@dataclass
class CommandResult:
    """What a subcommand produced, before rendering."""

    payload: Union[Dict[str, Any], pd.DataFrame]
    config: Dict[str, Any]
    seed: Optional[int] = None
    exit_code: int = EXIT_OK
    warnings: List[str] = field(default_factory=list)


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -------------------------------------------------------------------
# Config resolution
# -------------------------------------------------------------------
def _pick(value: Any, section: Dict[str, Any], key: str, default: Any = None) -> Any:
    """Flag value if given, otherwise the YAML default, otherwise `default`."""
    if value is not None:
        return value
    return section.get(key, default)


# -------------------------------------------------------------------
# Subcommands
# -------------------------------------------------------------------
def cmd_simulate(args: argparse.Namespace, cfg: Dict[str, Any]) -> CommandResult:
    section = cfg.get("simulation", {})
    execution = cfg.get("execution", {})
    if args.trials is not None:
        budget = Budget("trials", args.trials)
    elif args.flips is not None:
        budget = Budget("flips", args.flips)
    else:
        budget = Budget(section.get("budget_kind", "trials"), int(section.get("budget", 100_000)))

    config = ExperimentConfig(
        seed=int(_pick(args.seed, section, "seed", 1)),
        method=_pick(args.method, section, "method", "direct"),
        cap=int(_pick(args.cap, section, "cap", ExperimentConfig.cap)),
        budget=budget,
        chunk_size=int(execution.get("chunk_size", ExperimentConfig.chunk_size)),
        table_max_terms=int(execution.get("table_max_terms", ExperimentConfig.table_max_terms)),
    )
    summary = estimate_pi(config, n_jobs=args.threads)
    echo = config.to_dict()
    warnings = [] if summary.has_data else ["no trial completed within the budget"]

    if args.format == "csv":
        budget_flips = budget.amount if budget.kind == "flips" else None
        row = pd.DataFrame([estimate_row("simulate", config.method, config.seed, budget_flips, summary)], columns=ESTIMATE_COLUMNS)
        stats = statistic_rows([
            ("stderr_pi", summary.stderr_pi),
            ("flips_used", summary.flips_used),
            ("discarded_flips", summary.discarded_flips),
            ("pi_hat_inv_tau", summary.pi_hat_inv_tau),
            ("censoring_bias_bound", summary.censoring_bias_bound),
        ])
        return CommandResult(stack_rows(ESTIMATE_COLUMNS, row, stats), echo, config.seed, warnings=warnings)

    payload = {"method": config.method, "budget_kind": budget.kind, "budget": budget.amount, **summary.to_dict()}
    return CommandResult(payload, echo, config.seed, warnings=warnings)


def _row_bound(what: str, k: int, x: float) -> Optional[float]:
    if what == "pmf":
        return tau_tail(k)
    if what == "arcsin" and abs(x) < 1.0:
        return arcsin_tail_bound(x, k)
    if k < 1:
        return None
    if what == "fraction-series":
        return fraction_tail_bound(k)
    if what == "invtau-series":
        return inv_tau_tail_bound(k)
    return arcsin_tail_bound(x, k)


def cmd_exact(args: argparse.Namespace, cfg: Dict[str, Any]) -> CommandResult:
    section = cfg.get("exact", {})
    what = _pick(args.what, section, "what", "fraction-series")
    terms = int(_pick(args.terms, section, "terms", 20))
    if args.x is not None and what != "arcsin":
        raise InvalidInputError("--x only applies to --what arcsin")
    x = float(_pick(args.x, section, "x", 1.0)) if what == "arcsin" else 1.0
    if what not in EXACT_TARGETS:
        raise InvalidInputError(f"Unknown --what {what!r}; expected one of {sorted(EXACT_TARGETS)}")

    target, limit = EXACT_TARGETS[what]
    rows = [
        {"k": s.k, "term": s.term, "partial_sum": s.partial_sum, "tail_bound": _row_bound(what, s.k, x)}
        for s in iter_series(target, terms, x)
    ]
    echo = {"what": what, "terms": terms, "x": x if what == "arcsin" else None}
    if args.format == "csv":
        return CommandResult(pd.DataFrame(rows, columns=["k", "term", "partial_sum", "tail_bound"]), echo)

    last = rows[-1]
    payload = {
        "what": what,
        "terms": terms,
        "x": echo["x"],
        "limit": limit(x),
        "partial_sum": last["partial_sum"],
        "tail_bound": last["tail_bound"],
        "rows": rows,
    }
    return CommandResult(payload, echo)


def cmd_oracle(args: argparse.Namespace, cfg: Dict[str, Any]) -> CommandResult:
    max_len = int(_pick(args.max_len, cfg.get("oracle", {}), "max_len", 21))
    echo = {"max_len": max_len}
    try:
        comparison = oracle_vs_analytics(max_len, n_jobs=args.threads)
    except InvariantViolationError as e:
        if e.record is None:
            raise
        return CommandResult(e.record.to_dict(), echo, exit_code=EXIT_INVARIANT, warnings=[e.message])
    return CommandResult(comparison.to_dict(), echo)


def _experiment_config(args: argparse.Namespace, cfg: Dict[str, Any]) -> ExperimentConfig:
    section = cfg.get("convergence", {})
    execution = cfg.get("execution", {})
    return ExperimentConfig(
        seed=int(_pick(args.seed, section, "seed", 2025)),
        method=_pick(args.method, section, "method", "walk"),
        cap=int(_pick(args.cap, section, "cap", ExperimentConfig.cap)),
        reps=int(_pick(args.reps, section, "reps", 50)),
        budgets=tuple(int(b) for b in _pick(args.budgets, section, "budgets", [])),
        table_max_terms=int(execution.get("table_max_terms", ExperimentConfig.table_max_terms)),
    )


def cmd_converge(args: argparse.Namespace, cfg: Dict[str, Any]) -> CommandResult:
    config = _experiment_config(args, cfg)
    result = convergence_experiment(config, n_jobs=args.threads)
    table = result.to_frame()
    echo = {**config.to_dict(), "target_error": args.target_error}
    if args.target_error is not None:
        projection = flips_for_target_error(result, args.target_error)
        extra = statistic_rows([
            ("projected_flips", projection["flips"]),
            ("projected_years_at_one_flip_per_second", projection["years_at_one_flip_per_second"]),
        ])
        table = stack_rows(ESTIMATE_COLUMNS, table, extra)
    return CommandResult(table, echo, config.seed)


def cmd_parker(args: argparse.Namespace, cfg: Dict[str, Any]) -> CommandResult:
    section = cfg.get("parker", {})
    seed = int(_pick(args.seed, section, "seed", 10_000))
    reps = int(_pick(args.reps, section, "reps", 1000))
    cap = int(_pick(args.cap, section, "cap", ExperimentConfig.cap))
    result = parker_replication(reps, seed, n_jobs=args.threads, cap=cap)
    return CommandResult(result.to_frame(), {"reps": reps, "cap": cap}, seed)


def cmd_bounds(args: argparse.Namespace, cfg: Dict[str, Any]) -> CommandResult:
    section = cfg.get("bounds", {})
    seed = int(_pick(args.seed, section, "seed", 314))
    trials = int(_pick(args.trials, section, "trials", 1_000_000))
    method = _pick(args.method, section, "method", "direct")
    chunk_size = int(cfg.get("execution", {}).get("chunk_size", ExperimentConfig.chunk_size))
    report = bounds_demonstration(trials, seed, n_jobs=args.threads, method=method, chunk_size=chunk_size)
    echo = {"trials": trials, "method": method, "chunk_size": chunk_size}
    if args.format == "csv":
        return CommandResult(statistic_rows(list(report.to_dict().items())), echo, seed)
    return CommandResult(report.to_dict(), echo, seed)


def cmd_buffon(args: argparse.Namespace, cfg: Dict[str, Any]) -> CommandResult:
    section = cfg.get("buffon", {})
    seed = int(_pick(args.seed, section, "seed", 271))
    drops = int(_pick(args.drops, section, "drops", 1_000_000))
    needle_len = float(_pick(args.needle_len, section, "needle_len", 1.0))
    spacing = float(_pick(args.spacing, section, "spacing", 1.0))
    chunk_size = int(cfg.get("execution", {}).get("chunk_size", ExperimentConfig.chunk_size))
    result = buffon_experiment(drops, seed, needle_len, spacing, n_jobs=args.threads, chunk_size=chunk_size)
    echo = {"drops": drops, "needle_len": needle_len, "spacing": spacing, "chunk_size": chunk_size}
    return CommandResult(result.to_frame(), echo, seed)


# -------------------------------------------------------------------
# Parser
# -------------------------------------------------------------------
def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(prog="coin-pi", description="Estimate π by tossing coins.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, handler: Callable, help_text: str, formats: bool = False) -> CliArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--threads", type=int, default=None, help="Worker processes (results do not depend on it)")
        p.add_argument("--out", default=None, help="Write the result here plus a .manifest.json sidecar")
        p.add_argument("--config", default=CONFIG_PATH, help="YAML file with run defaults")
        if formats:
            p.add_argument("--format", choices=["json", "csv"], default=None)
        return p

    p = add("simulate", cmd_simulate, "Estimate π from coin-toss trials", formats=True)
    p.add_argument("--seed", type=int)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--trials", type=int)
    budget.add_argument("--flips", type=int)
    p.add_argument("--method", choices=["walk", "direct"])
    p.add_argument("--cap", type=int)

    p = add("exact", cmd_exact, "Series terms, partial sums and remainder bounds", formats=True)
    p.add_argument("--what", choices=sorted(EXACT_TARGETS))
    p.add_argument("--terms", type=int)
    p.add_argument("--x", type=float)

    p = add("oracle", cmd_oracle, "Exhaustive first-passage enumeration checked against the closed forms")
    p.add_argument("--max-len", type=int)

    p = add("converge", cmd_converge, "Error against flip budget and the fitted slope")
    p.add_argument("--seed", type=int)
    p.add_argument("--budgets", type=int, nargs="+")
    p.add_argument("--reps", type=int)
    p.add_argument("--method", choices=["walk", "direct"])
    p.add_argument("--cap", type=int)
    p.add_argument("--target-error", type=float, default=None, help="Project the flips needed for this median error")

    p = add("parker", cmd_parker, "Replicate the 10,000-flip experiment")
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--cap", type=int)

    p = add("bounds", cmd_bounds, "Fraction range and the (3, 4) band", formats=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--method", choices=["walk", "direct"])

    p = add("buffon", cmd_buffon, "Buffon's needle baseline")
    p.add_argument("--seed", type=int)
    p.add_argument("--drops", type=int)
    p.add_argument("--needle-len", type=float)
    p.add_argument("--spacing", type=float)
    return parser


# -------------------------------------------------------------------
# Rendering
# -------------------------------------------------------------------
def render(subcommand: str, result: CommandResult) -> Tuple[str, Dict[str, Any]]:
    """Return (text, manifest) for a command result."""
    manifest = {
        "subcommand": subcommand,
        "config": result.config,
        "seed": result.seed,
        "version": __version__,
    }
    if isinstance(result.payload, pd.DataFrame):
        body = render_table(result.payload, {})
        manifest["output_checksum"] = checksum(body.split("\n", 1)[1])
        return render_table(result.payload, manifest), manifest

    manifest["output_checksum"] = checksum(result.payload)
    return canonical_json({**result.payload, "manifest": manifest}) + "\n", manifest


# -------------------------------------------------------------------
# Function: main
# -------------------------------------------------------------------
def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) if not isinstance(e.code, str) else EXIT_USAGE

    try:
        try:
            cfg = read_yaml(args.config)
        except CustomException as e:
            raise InvalidInputError(f"Cannot read --config {args.config}", sys) from e
        if args.threads is None:
            args.threads = int(cfg.get("execution", {}).get("threads", 1))
        if args.threads < 1:
            raise InvalidInputError(f"--threads must be >= 1, got {args.threads}")
        if hasattr(args, "format") and args.format is None:
            args.format = cfg.get("simulation", {}).get("format", "json")

        logger.info(f"coin-pi {args.subcommand} started: {vars(args)}")
        started = time.perf_counter()
        result = args.handler(args, cfg)
        text, manifest = render(args.subcommand, result)
        wall_time = time.perf_counter() - started
        logger.info(f"coin-pi {args.subcommand} finished in {wall_time:.3f}s")

        for warning in result.warnings:
            print(f"coin-pi: warning: {warning}", file=sys.stderr)
        if args.out:
            write_output(args.out, text, manifest, wall_time)
        else:
            sys.stdout.write(text)
        return result.exit_code

    except InvalidInputError as e:
        logger.error(f"Invalid input: {e}")
        print(f"coin-pi: error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolationError as e:
        logger.error(f"Invariant violation: {e}")
        print(f"coin-pi: internal check failed: {e.message}", file=sys.stderr)
        return EXIT_INVARIANT
    except CustomException as e:
        logger.error(f"Command failed: {e}")
        print(f"coin-pi: error: {e.message}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
