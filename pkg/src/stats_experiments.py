"""
stats_experiments.py
--------------------
Streaming estimation of π from coin-toss trials, and the experiments
built on it.

1) `EstimateSummary` / `stream_update` - single-pass moments of the trial
   fractions (and of 1/τ), flip and censoring accounting
2) `estimate_pi`              - runs trials under a trial or flip budget
3) `convergence_experiment`   - median |error| against flip budget and the
                                fitted log-log slope (about −1/4)
4) `parker_replication`       - many independent 10,000-flip estimates
5) `bounds_demonstration`     - the fraction is 1 half the time and always
                                in (1/2, 1], so 3 < π < 4
6) `buffon_experiment`        - Buffon's needle baseline

Parallel work is split into chunks (or repetitions), each on its own
substream `NumpyBitSource(seed).spawn(...)`. Chunk summaries are merged
in a fixed pairwise tree, so results do not depend on the worker count.

Usage
-----
Example:
    from src.stats_experiments import Budget, ExperimentConfig, estimate_pi

    config = ExperimentConfig(seed=1, method="direct", budget=Budget("trials", 10**6))
    summary = estimate_pi(config, n_jobs=4)
    print(summary.pi_hat, summary.stderr_pi)
"""

from __future__ import annotations

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

# -------------------------------------------------------------------
# Third-Party Imports
# -------------------------------------------------------------------
import numpy as np
import pandas as pd
import statsmodels.api as sm
from joblib import Parallel, delayed

# -------------------------------------------------------------------
# Internal Imports
# -------------------------------------------------------------------
from src.logger import get_logger
from src.custom_exception import CustomException, InvalidInputError
from src.analytics import TauTable, tau_tail
from src.walk_sim import (
    BitSource,
    NumpyBitSource,
    Trial,
    buffon_batch,
    buffon_probability,
    run_trial_direct,
    run_trial_walk,
    run_trials_direct,
)
from config.experiment_params import (
    BOUNDS_MIN_TRIALS,
    CONVERGENCE_MIN_BUDGETS,
    CONVERGENCE_MIN_DECADES,
    CONVERGENCE_MIN_REPS,
    DEFAULT_CAP,
    GATE_SIGMAS,
    PARKER_ABS_ERROR,
    PARKER_ESTIMATE,
    PARKER_FLIPS,
    PARKER_MIN_REPS,
    PI,
    SECONDS_PER_YEAR,
    TABLE_MAX_TERMS,
    TAU_HISTOGRAM_DEPTH,
)

# -------------------------------------------------------------------
# Logger Setup
# -------------------------------------------------------------------
logger = get_logger(__name__)

METHODS = ("walk", "direct")
BUDGET_KINDS = ("trials", "flips")
ESTIMATE_COLUMNS = [
    "run_id", "method", "seed", "budget_flips", "trials", "censored",
    "pi_hat", "abs_error", "statistic", "value",
]


# -------------------------------------------------------------------
# Class: EstimateSummary
# -------------------------------------------------------------------
@dataclass
class EstimateSummary:
    """
    Streaming summary of a run of trials.

    Moments use the single-pass mean/M2 update; two summaries merge with
    the pairwise formula, so chunk results can be combined in any fixed
    order.

    Attributes
    ----------
    trials : int
        Completed (non-censored) trials included in the mean.
    mean_fraction, m2 : float
        Mean of H_τ/τ and sum of squared deviations.
    mean_inv_tau, m2_inv_tau : float
        Same moments for 1/τ.
    completed_flips, censored_flips, discarded_flips : int
        Flip accounting; their sum is `flips_used`.
    censored_trials : int
        Walk trials that hit the cap.
    tau_histogram : list of int
        Counts of τ = 2k+1 for k < TAU_HISTOGRAM_DEPTH.
    cap : int or None
        Walk cap in force, for the censoring bias bound.
    """

    trials: int = 0
    mean_fraction: float = 0.0
    m2: float = 0.0
    mean_inv_tau: float = 0.0
    m2_inv_tau: float = 0.0
    completed_flips: int = 0
    censored_trials: int = 0
    censored_flips: int = 0
    discarded_flips: int = 0
    min_fraction: Optional[float] = None
    max_fraction: Optional[float] = None
    tau_histogram: List[int] = field(default_factory=lambda: [0] * TAU_HISTOGRAM_DEPTH)
    cap: Optional[int] = None

    # -------------------------------------------------------------------
    # Derived statistics
    # -------------------------------------------------------------------
    @property
    def has_data(self) -> bool:
        return self.trials > 0

    @property
    def flips_used(self) -> int:
        return self.completed_flips + self.censored_flips + self.discarded_flips

    @property
    def variance(self) -> Optional[float]:
        return self.m2 / (self.trials - 1) if self.trials > 1 else None

    @property
    def pi_hat(self) -> Optional[float]:
        return 4.0 * self.mean_fraction if self.has_data else None

    @property
    def stderr_pi(self) -> Optional[float]:
        if self.variance is None:
            return None
        return 4.0 * math.sqrt(self.variance / self.trials)

    @property
    def pi_hat_inv_tau(self) -> Optional[float]:
        """π from E[1/τ] = π/2 − 1."""
        return 2.0 * (self.mean_inv_tau + 1.0) if self.has_data else None

    @property
    def stderr_pi_inv_tau(self) -> Optional[float]:
        if self.trials < 2:
            return None
        return 2.0 * math.sqrt(self.m2_inv_tau / (self.trials - 1) / self.trials)

    @property
    def frequency_tau_one(self) -> Optional[float]:
        return self.tau_histogram[0] / self.trials if self.has_data else None

    @property
    def censoring_bias_bound(self) -> Optional[float]:
        """Upper bound P(τ > cap)/2 on the bias of the mean from excluding censored trials."""
        if self.cap is None:
            return None
        return tau_tail((self.cap - 1) // 2) / 2.0

    def abs_error(self) -> Optional[float]:
        return abs(self.pi_hat - PI) if self.has_data else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": "ok" if self.has_data else "no_data",
            "trials": self.trials,
            "pi_hat": self.pi_hat,
            "stderr_pi": self.stderr_pi,
            "mean_fraction": self.mean_fraction if self.has_data else None,
            "variance": self.variance,
            "pi_hat_inv_tau": self.pi_hat_inv_tau,
            "stderr_pi_inv_tau": self.stderr_pi_inv_tau,
            "flips_used": self.flips_used,
            "completed_flips": self.completed_flips,
            "censored_trials": self.censored_trials,
            "censored_flips": self.censored_flips,
            "discarded_flips": self.discarded_flips,
            "min_fraction": self.min_fraction,
            "max_fraction": self.max_fraction,
            "frequency_tau_one": self.frequency_tau_one,
            "tau_histogram": list(self.tau_histogram),
            "cap": self.cap,
            "censoring_bias_bound": self.censoring_bias_bound,
        }

    # -------------------------------------------------------------------
    # Construction from a batch of direct draws
    # -------------------------------------------------------------------
    @classmethod
    def from_k(cls, k: np.ndarray, cap: Optional[int] = None) -> "EstimateSummary":
        """Summary of trials with τ = 2k+1, computed with array operations."""
        summary = cls(cap=cap)
        if len(k) == 0:
            return summary
        taus = 2 * k + 1
        fractions = ((k + 1) / taus).astype(np.float64)
        inv_taus = (1.0 / taus).astype(np.float64)
        summary.trials = len(k)
        summary.mean_fraction = float(fractions.mean())
        summary.m2 = float(np.sum((fractions - summary.mean_fraction) ** 2))
        summary.mean_inv_tau = float(inv_taus.mean())
        summary.m2_inv_tau = float(np.sum((inv_taus - summary.mean_inv_tau) ** 2))
        if taus.dtype == np.int64 and int(taus.max()) < 2**40:
            summary.completed_flips = int(taus.sum())
        else:
            summary.completed_flips = sum(int(t) for t in taus)
        summary.min_fraction = float(fractions.min())
        summary.max_fraction = float(fractions.max())
        shallow = np.asarray([int(v) for v in k if v < TAU_HISTOGRAM_DEPTH], dtype=np.int64) \
            if k.dtype == object else k[k < TAU_HISTOGRAM_DEPTH]
        summary.tau_histogram = np.bincount(shallow, minlength=TAU_HISTOGRAM_DEPTH).tolist()
        return summary


# -------------------------------------------------------------------
# Streaming updates and merges
# -------------------------------------------------------------------
def stream_update(summary: EstimateSummary, trial: Trial) -> EstimateSummary:
    """
    Fold one completed trial into `summary` (in place) and return it.

    Raises
    ------
    InvalidInputError
        If the trial is censored; use `record_censored` for those.
    """
    if trial.censored:
        raise InvalidInputError("Censored trials are accounted with record_censored, not stream_update")

    summary.trials += 1
    n = summary.trials

    delta = trial.fraction - summary.mean_fraction
    summary.mean_fraction += delta / n
    summary.m2 += delta * (trial.fraction - summary.mean_fraction)

    delta_inv = trial.inv_tau - summary.mean_inv_tau
    summary.mean_inv_tau += delta_inv / n
    summary.m2_inv_tau += delta_inv * (trial.inv_tau - summary.mean_inv_tau)

    summary.completed_flips += trial.flips_consumed
    summary.min_fraction = trial.fraction if summary.min_fraction is None else min(summary.min_fraction, trial.fraction)
    summary.max_fraction = trial.fraction if summary.max_fraction is None else max(summary.max_fraction, trial.fraction)
    if trial.k < TAU_HISTOGRAM_DEPTH:
        summary.tau_histogram[trial.k] += 1
    return summary


def record_censored(summary: EstimateSummary, trial: Trial) -> EstimateSummary:
    summary.censored_trials += 1
    summary.censored_flips += trial.flips_consumed
    return summary


def record_discarded(summary: EstimateSummary, flips: int) -> EstimateSummary:
    """Account the flips of a trial cut short by the flip budget."""
    summary.discarded_flips += int(flips)
    return summary


def merge_summaries(a: EstimateSummary, b: EstimateSummary) -> EstimateSummary:
    """Pairwise merge of two summaries (moments combined with the parallel-variance formula)."""
    merged = replace(
        a,
        completed_flips=a.completed_flips + b.completed_flips,
        censored_trials=a.censored_trials + b.censored_trials,
        censored_flips=a.censored_flips + b.censored_flips,
        discarded_flips=a.discarded_flips + b.discarded_flips,
        tau_histogram=[x + y for x, y in zip(a.tau_histogram, b.tau_histogram)],
        cap=a.cap if a.cap is not None else b.cap,
    )
    if b.trials == 0:
        return merged
    if a.trials == 0:
        return replace(
            merged,
            trials=b.trials,
            mean_fraction=b.mean_fraction,
            m2=b.m2,
            mean_inv_tau=b.mean_inv_tau,
            m2_inv_tau=b.m2_inv_tau,
            min_fraction=b.min_fraction,
            max_fraction=b.max_fraction,
        )

    n = a.trials + b.trials
    delta = b.mean_fraction - a.mean_fraction
    delta_inv = b.mean_inv_tau - a.mean_inv_tau
    weight = a.trials * b.trials / n
    return replace(
        merged,
        trials=n,
        mean_fraction=a.mean_fraction + delta * b.trials / n,
        m2=a.m2 + b.m2 + delta * delta * weight,
        mean_inv_tau=a.mean_inv_tau + delta_inv * b.trials / n,
        m2_inv_tau=a.m2_inv_tau + b.m2_inv_tau + delta_inv * delta_inv * weight,
        min_fraction=min(a.min_fraction, b.min_fraction),
        max_fraction=max(a.max_fraction, b.max_fraction),
    )


def merge_tree(summaries: Sequence[EstimateSummary]) -> EstimateSummary:
    """Merge adjacent pairs level by level; the tree depends only on the list length."""
    level = list(summaries)
    if not level:
        return EstimateSummary()
    while len(level) > 1:
        paired = [merge_summaries(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


# -------------------------------------------------------------------
# Configuration
# -------------------------------------------------------------------
@dataclass(frozen=True)
class Budget:
    """Either a number of trials or a number of coin flips."""

    kind: str
    amount: int

    def __post_init__(self):
        if self.kind not in BUDGET_KINDS:
            raise InvalidInputError(f"Budget kind must be one of {BUDGET_KINDS}, got {self.kind!r}")
        if int(self.amount) < 1:
            raise InvalidInputError(f"Budget must be >= 1, got {self.amount}")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Parameters of a simulation run or experiment.

    Parameters
    ----------
    seed : int
        Master seed; every chunk or repetition derives a substream from it.
    method : {"walk", "direct"}
        Trial generator.
    cap : int
        Walk step cap.
    budget : Budget
        Trials or flips for `estimate_pi`.
    reps : int
        Repetitions per budget (scaling study, replication).
    budgets : tuple of int
        Strictly increasing flip budgets for the scaling study.
    chunk_size : int
        Trials per substream chunk under a trial budget.
    table_max_terms : int
        Size limit of the τ table used by the direct method.
    """

    seed: int = 1
    method: str = "direct"
    cap: int = DEFAULT_CAP
    budget: Budget = Budget("trials", 100_000)
    reps: int = 1
    budgets: Tuple[int, ...] = ()
    chunk_size: int = 65_536
    table_max_terms: int = TABLE_MAX_TERMS

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.seed < 0:
            raise InvalidInputError(f"seed must be non-negative, got {self.seed}")
        if self.cap < 1:
            raise InvalidInputError(f"cap must be >= 1, got {self.cap}")
        if self.reps < 1:
            raise InvalidInputError(f"reps must be >= 1, got {self.reps}")
        if self.chunk_size < 1:
            raise InvalidInputError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if any(b < 1 for b in self.budgets) or any(b >= c for b, c in zip(self.budgets, self.budgets[1:])):
            raise InvalidInputError(f"budgets must be positive and strictly increasing, got {list(self.budgets)}")

    @classmethod
    def from_dict(cls, section: Dict[str, Any], execution: Optional[Dict[str, Any]] = None) -> "ExperimentConfig":
        """Build from a `config.yaml` section (plus the optional `execution` section)."""
        execution = execution or {}
        budget = cls.budget
        if "budget" in section:
            budget = Budget(section.get("budget_kind", "trials"), int(section["budget"]))
        return cls(
            seed=int(section.get("seed", cls.seed)),
            method=section.get("method", cls.method),
            cap=int(section.get("cap", cls.cap)),
            budget=budget,
            reps=int(section.get("reps", cls.reps)),
            budgets=tuple(int(b) for b in section.get("budgets", ())),
            chunk_size=int(execution.get("chunk_size", cls.chunk_size)),
            table_max_terms=int(execution.get("table_max_terms", cls.table_max_terms)),
        )

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["budgets"] = list(self.budgets)
        return payload


# -------------------------------------------------------------------
# Trial runners on a single stream
# -------------------------------------------------------------------
def _run_trials(bits: BitSource, method: str, cap: int, n: int, table: TauTable) -> EstimateSummary:
    if method == "direct":
        return EstimateSummary.from_k(run_trials_direct(bits, n, table))

    summary = EstimateSummary(cap=cap)
    for _ in range(n):
        trial = run_trial_walk(bits, cap)
        if trial.censored:
            record_censored(summary, trial)
        else:
            stream_update(summary, trial)
    return summary


def _run_flip_budget(bits: BitSource, method: str, cap: int, flips: int, table: TauTable) -> EstimateSummary:
    """
    Spend exactly `flips` coin tosses.

    A trial still running when the budget runs out is discarded and its
    flips are counted as discarded.
    """
    summary = EstimateSummary(cap=cap if method == "walk" else None)
    remaining = flips
    while remaining > 0:
        if method == "walk":
            limit = min(cap, remaining)
            trial = run_trial_walk(bits, limit)
            if not trial.censored:
                stream_update(summary, trial)
            elif limit == cap:
                record_censored(summary, trial)
            else:
                record_discarded(summary, trial.flips_consumed)
                break
        else:
            trial = run_trial_direct(bits, table)
            if trial.tau > remaining:
                record_discarded(summary, remaining)
                break
            stream_update(summary, trial)
        remaining -= trial.flips_consumed
    return summary


def estimate_from_bits(
    bits: BitSource,
    method: str,
    budget: Budget,
    cap: int = DEFAULT_CAP,
    table: Optional[TauTable] = None,
) -> EstimateSummary:
    """Run a budget on one given bit source (no chunking)."""
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    table = table or TauTable()
    if budget.kind == "flips":
        return _run_flip_budget(bits, method, cap, budget.amount, table)
    return _run_trials(bits, method, cap, budget.amount, table)


def _trial_chunk(seed: int, chunk: int, method: str, cap: int, n: int, table_max_terms: int) -> EstimateSummary:
    bits = NumpyBitSource(seed).spawn(chunk)
    return _run_trials(bits, method, cap, n, TauTable(table_max_terms))


def _flip_rep(seed: int, key: Tuple[int, ...], method: str, cap: int, flips: int, table_max_terms: int) -> EstimateSummary:
    bits = NumpyBitSource(seed).spawn(*key)
    return _run_flip_budget(bits, method, cap, flips, TauTable(table_max_terms))


# -------------------------------------------------------------------
# Function: estimate_pi
# -------------------------------------------------------------------
def estimate_pi(config: ExperimentConfig, n_jobs: int = 1) -> EstimateSummary:
    """
    Estimate π as 4 × the mean fraction of heads at the stopping time.

    Under a trial budget the trials are split into chunks of
    `config.chunk_size`; chunk c uses substream c and the chunk summaries
    are merged in a fixed tree. A flip budget is one sequential stream
    (substream 0), because whether a trial fits depends on every earlier one.

    Parameters
    ----------
    config : ExperimentConfig
        Seed, method, cap and budget.
    n_jobs : int
        Worker processes; the result is identical for any value.

    Returns
    -------
    EstimateSummary
        `has_data` is False when no trial completed.
    """
    logger.info(f"Estimating pi: {config.to_dict()}")
    try:
        if config.budget.kind == "flips":
            summary = _flip_rep(config.seed, (0,), config.method, config.cap, config.budget.amount, config.table_max_terms)
        else:
            total = config.budget.amount
            sizes = [min(config.chunk_size, total - start) for start in range(0, total, config.chunk_size)]
            parts = Parallel(n_jobs=n_jobs)(
                delayed(_trial_chunk)(config.seed, c, config.method, config.cap, n, config.table_max_terms)
                for c, n in enumerate(sizes)
            )
            summary = merge_tree(parts)
    except CustomException:
        raise
    except Exception as e:
        logger.error(f"Error while estimating pi: {e}")
        raise CustomException("Failed to estimate pi", sys) from e

    if not summary.has_data:
        logger.warning("No trial completed within the budget; no estimate available.")
    else:
        logger.info(
            f"pi_hat={summary.pi_hat:.6f} stderr={summary.stderr_pi} trials={summary.trials} "
            f"flips={summary.flips_used} censored={summary.censored_trials}"
        )
    return summary


def method_agreement(a: EstimateSummary, b: EstimateSummary) -> float:
    """|pi_a − pi_b| in units of the combined standard error."""
    combined = math.sqrt(a.stderr_pi**2 + b.stderr_pi**2)
    return abs(a.pi_hat - b.pi_hat) / combined


def estimate_row(run_id: str, method: str, seed: int, budget_flips: Optional[int], summary: EstimateSummary) -> Dict[str, Any]:
    return {
        "run_id": run_id,
        "method": method,
        "seed": seed,
        "budget_flips": budget_flips,
        "trials": summary.trials,
        "censored": summary.censored_trials,
        "pi_hat": summary.pi_hat,
        "abs_error": summary.abs_error(),
        "statistic": None,
        "value": None,
    }


def statistic_rows(rows: Sequence[Tuple[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"run_id": "summary", "statistic": name, "value": value} for name, value in rows],
        columns=ESTIMATE_COLUMNS,
    )


def stack_rows(columns: Sequence[str], *frames: pd.DataFrame) -> pd.DataFrame:
    """
    Stack tables row-wise into one frame with `columns`.

    Dtypes are inferred over all rows together, not per part, so a column
    that is empty in one part (statistic/value on estimate rows) keeps the
    numeric dtype of the other parts.
    """
    records = [record for frame in frames for record in frame.to_dict("records")]
    return pd.DataFrame(records, columns=list(columns))


# -------------------------------------------------------------------
# Function: convergence_experiment
# -------------------------------------------------------------------
@dataclass
class ConvergenceResult:
    """Per-rep rows, per-budget medians and the fitted log-log slope."""

    rows: pd.DataFrame
    table: pd.DataFrame
    slope: Optional[float]
    intercept: Optional[float]
    slope_stderr: Optional[float]
    fit_status: str

    def to_frame(self) -> pd.DataFrame:
        stats = [(f"median_abs_error@{int(r.budget_flips)}", r.median_abs_error) for r in self.table.itertuples()]
        stats += [("fitted_slope", self.slope), ("slope_stderr", self.slope_stderr), ("fit_status", self.fit_status)]
        return stack_rows(ESTIMATE_COLUMNS, self.rows, statistic_rows(stats))


def _check_convergence_config(config: ExperimentConfig) -> None:
    budgets = config.budgets
    if len(budgets) < CONVERGENCE_MIN_BUDGETS:
        raise InvalidInputError(f"Need at least {CONVERGENCE_MIN_BUDGETS} budgets, got {len(budgets)}")
    if budgets[-1] < budgets[0] * 10**CONVERGENCE_MIN_DECADES:
        raise InvalidInputError(f"Budgets must span at least {CONVERGENCE_MIN_DECADES} decades")
    if config.reps < CONVERGENCE_MIN_REPS:
        raise InvalidInputError(f"Need at least {CONVERGENCE_MIN_REPS} reps, got {config.reps}")


def fit_power_law(budgets: Sequence[float], errors: Sequence[float]) -> Tuple[Optional[float], Optional[float], Optional[float], str]:
    """
    Least-squares fit of log(error) = intercept + slope·log(N).

    Returns (slope, intercept, slope_stderr, status); slope is None when
    fewer than two usable points remain.
    """
    points = [(n, e) for n, e in zip(budgets, errors) if e is not None and np.isfinite(e) and e > 0]
    if len(points) < 2:
        return None, None, None, f"degenerate fit: {len(points)} usable budget(s)"
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    fit = sm.OLS(y, sm.add_constant(x)).fit()
    stderr = float(fit.bse[1]) if len(points) > 2 else None
    return float(fit.params[1]), float(fit.params[0]), stderr, "ok"


def convergence_experiment(config: ExperimentConfig, n_jobs: int = 1) -> ConvergenceResult:
    """
    Median absolute error of π̂ against flip budget, and its log-log slope.

    For each budget N the run repeats `config.reps` independent flip-budget
    estimates (repetition r of budget i on substream (i, r)), records the
    median |π̂ − π| over repetitions that produced an estimate, and fits a
    line to log(median) against log(N). The expected slope is about −1/4.

    Raises
    ------
    InvalidInputError
        If there are fewer than 4 budgets, they span less than 3 decades,
        or there are fewer than 30 reps.
    """
    _check_convergence_config(config)
    logger.info(f"Convergence experiment: budgets={list(config.budgets)} reps={config.reps}")

    tasks = [(i, r, n) for i, n in enumerate(config.budgets) for r in range(config.reps)]
    summaries = Parallel(n_jobs=n_jobs)(
        delayed(_flip_rep)(config.seed, (i, r), config.method, config.cap, n, config.table_max_terms)
        for i, r, n in tasks
    )
    rows = pd.DataFrame(
        [estimate_row(f"b{i}-r{r}", config.method, config.seed, n, s) for (i, r, n), s in zip(tasks, summaries)],
        columns=ESTIMATE_COLUMNS,
    )

    table = (
        rows.groupby("budget_flips", sort=True)
        .agg(median_abs_error=("abs_error", "median"), reps_with_data=("abs_error", "count"))
        .reset_index()
    )
    slope, intercept, slope_stderr, status = fit_power_law(
        table["budget_flips"].tolist(), table["median_abs_error"].tolist()
    )
    if slope is None:
        logger.warning(f"Convergence fit unavailable: {status}")
    else:
        logger.info(f"Fitted slope {slope:.4f} (stderr {slope_stderr})")
    return ConvergenceResult(rows, table, slope, intercept, slope_stderr, status)


def flips_for_target_error(result: ConvergenceResult, target_error: float) -> Dict[str, float]:
    """
    Flips needed for a median error of `target_error` under the fitted power law.

    Also reports how many years that takes at one flip per second.
    """
    if result.slope is None or result.slope >= 0:
        raise InvalidInputError("A decreasing fitted power law is required to project flips")
    if target_error <= 0:
        raise InvalidInputError(f"target_error must be positive, got {target_error}")
    flips = math.exp((math.log(target_error) - result.intercept) / result.slope)
    return {
        "target_error": target_error,
        "flips": flips,
        "years_at_one_flip_per_second": flips / SECONDS_PER_YEAR,
    }


# -------------------------------------------------------------------
# Function: parker_replication
# -------------------------------------------------------------------
@dataclass
class ParkerResult:
    """Distribution of |π̂ − π| over independent 10,000-flip experiments."""

    rows: pd.DataFrame
    median_abs_error: float
    q25: float
    q75: float
    parker_quantile: float
    all_in_range: bool
    reps_with_data: int

    @property
    def iqr(self) -> float:
        return self.q75 - self.q25

    def to_frame(self) -> pd.DataFrame:
        stats = [
            ("median_abs_error", self.median_abs_error),
            ("iqr", self.iqr),
            ("parker_estimate", PARKER_ESTIMATE),
            ("parker_abs_error", PARKER_ABS_ERROR),
            ("parker_quantile", self.parker_quantile),
            ("reps_with_data", self.reps_with_data),
        ]
        return stack_rows(ESTIMATE_COLUMNS, self.rows, statistic_rows(stats))


def parker_replication(reps: int, seed: int, n_jobs: int = 1, cap: int = DEFAULT_CAP) -> ParkerResult:
    """
    Repeat the 10,000-flip walk experiment `reps` times.

    Reports the median and quartiles of |π̂ − π| and the empirical quantile
    of the published error |3.2266 − π| ≈ 0.085 within that distribution.
    """
    if reps < PARKER_MIN_REPS:
        raise InvalidInputError(f"Need at least {PARKER_MIN_REPS} reps, got {reps}")
    logger.info(f"Replicating the {PARKER_FLIPS}-flip experiment {reps} times (seed={seed}).")

    summaries = Parallel(n_jobs=n_jobs)(
        delayed(_flip_rep)(seed, (r,), "walk", cap, PARKER_FLIPS, TABLE_MAX_TERMS) for r in range(reps)
    )
    rows = pd.DataFrame(
        [estimate_row(f"r{r}", "walk", seed, PARKER_FLIPS, s) for r, s in enumerate(summaries)],
        columns=ESTIMATE_COLUMNS,
    )
    errors = rows["abs_error"].dropna().to_numpy(dtype=np.float64)
    estimates = rows["pi_hat"].dropna().to_numpy(dtype=np.float64)
    q25, median, q75 = np.quantile(errors, [0.25, 0.5, 0.75])
    result = ParkerResult(
        rows=rows,
        median_abs_error=float(median),
        q25=float(q25),
        q75=float(q75),
        parker_quantile=float(np.mean(errors <= PARKER_ABS_ERROR)),
        all_in_range=bool(np.all((estimates > 2.0) & (estimates <= 4.0))),
        reps_with_data=int(errors.size),
    )
    logger.info(f"Median |error| {result.median_abs_error:.4f}; quantile of 0.085 is {result.parker_quantile:.3f}")
    return result


# -------------------------------------------------------------------
# Function: bounds_demonstration
# -------------------------------------------------------------------
@dataclass
class BoundsReport:
    """Evidence that the fraction is 1 half the time and that 3 < π < 4."""

    summary: EstimateSummary
    frequency_tau_one: float
    frequency_stderr: float
    frequency_z: float
    min_fraction: float
    max_fraction: float
    lower: float
    upper: float

    @property
    def band_inside_3_4(self) -> bool:
        return 3.0 < self.lower and self.upper < 4.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.summary.trials,
            "frequency_tau_one": self.frequency_tau_one,
            "frequency_stderr": self.frequency_stderr,
            "frequency_z": self.frequency_z,
            "min_fraction": self.min_fraction,
            "max_fraction": self.max_fraction,
            "pi_hat": self.summary.pi_hat,
            "stderr_pi": self.summary.stderr_pi,
            "lower": self.lower,
            "upper": self.upper,
            "band_inside_3_4": self.band_inside_3_4,
        }


def bounds_demonstration(
    trials: int,
    seed: int,
    n_jobs: int = 1,
    method: str = "direct",
    chunk_size: int = 65_536,
) -> BoundsReport:
    """
    Check empirically that H_τ/τ equals 1 about half the time and always
    lies in (1/2, 1], and report the 4σ band of π̂ against (3, 4).
    """
    if trials < BOUNDS_MIN_TRIALS:
        raise InvalidInputError(f"Need at least {BOUNDS_MIN_TRIALS} trials, got {trials}")
    config = ExperimentConfig(seed=seed, method=method, budget=Budget("trials", trials), chunk_size=chunk_size)
    summary = estimate_pi(config, n_jobs=n_jobs)

    frequency = summary.frequency_tau_one
    frequency_stderr = 0.5 / math.sqrt(summary.trials)
    half_width = GATE_SIGMAS * summary.stderr_pi
    report = BoundsReport(
        summary=summary,
        frequency_tau_one=frequency,
        frequency_stderr=frequency_stderr,
        frequency_z=(frequency - 0.5) / frequency_stderr,
        min_fraction=summary.min_fraction,
        max_fraction=summary.max_fraction,
        lower=summary.pi_hat - half_width,
        upper=summary.pi_hat + half_width,
    )
    logger.info(f"Bounds demonstration: {report.to_dict()}")
    return report


# -------------------------------------------------------------------
# Function: buffon_experiment
# -------------------------------------------------------------------
BUFFON_COLUMNS = ["run_id", "seed", "drops", "crossings", "frequency", "statistic", "value"]


@dataclass
class BuffonResult:
    """Crossing counts per chunk and the pooled frequency against 2L/(πd)."""

    rows: pd.DataFrame
    drops: int
    crossings: int
    expected: float

    @property
    def frequency(self) -> float:
        return self.crossings / self.drops

    @property
    def stderr(self) -> float:
        return math.sqrt(self.expected * (1.0 - self.expected) / self.drops)

    @property
    def z(self) -> float:
        return (self.frequency - self.expected) / self.stderr

    @property
    def pi_hat(self) -> Optional[float]:
        # expected = 2L/(πd), so π̂ = expected·π / frequency
        return self.expected * PI / self.frequency if self.crossings else None

    def to_frame(self) -> pd.DataFrame:
        stats = [
            ("frequency", self.frequency),
            ("expected", self.expected),
            ("stderr", self.stderr),
            ("z", self.z),
            ("pi_hat", self.pi_hat),
        ]
        summary = pd.DataFrame(
            [{"run_id": "summary", "statistic": name, "value": value} for name, value in stats],
            columns=BUFFON_COLUMNS,
        )
        return stack_rows(BUFFON_COLUMNS, self.rows, summary)


def _buffon_chunk(seed: int, chunk: int, n: int, needle_len: float, spacing: float) -> int:
    return buffon_batch(NumpyBitSource(seed).spawn(chunk), n, needle_len, spacing)


def buffon_experiment(
    drops: int,
    seed: int,
    needle_len: float = 1.0,
    spacing: float = 1.0,
    n_jobs: int = 1,
    chunk_size: int = 65_536,
) -> BuffonResult:
    """Drop `drops` needles in chunks on substreams and pool the crossings."""
    expected = buffon_probability(needle_len, spacing)
    if drops < 1:
        raise InvalidInputError(f"drops must be >= 1, got {drops}")
    sizes = [min(chunk_size, drops - start) for start in range(0, drops, chunk_size)]
    counts = Parallel(n_jobs=n_jobs)(
        delayed(_buffon_chunk)(seed, c, n, needle_len, spacing) for c, n in enumerate(sizes)
    )
    rows = pd.DataFrame(
        [
            {"run_id": f"c{c}", "seed": seed, "drops": n, "crossings": k, "frequency": k / n, "statistic": None, "value": None}
            for c, (n, k) in enumerate(zip(sizes, counts))
        ],
        columns=BUFFON_COLUMNS,
    )
    result = BuffonResult(rows=rows, drops=drops, crossings=int(sum(counts)), expected=expected)
    logger.info(f"Buffon: {result.crossings}/{drops} crossings, z={result.z:.2f}")
    return result
