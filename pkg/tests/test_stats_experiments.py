import math
import warnings

import numpy as np
import pandas as pd
import pytest

from config.experiment_params import AGREEMENT_SIGMAS, GATE_SIGMAS, PARKER_ABS_ERROR
from src.analytics import tau_pmf
from src.custom_exception import InvalidInputError
from src.stats_experiments import (
    ESTIMATE_COLUMNS,
    Budget,
    ConvergenceResult,
    EstimateSummary,
    ExperimentConfig,
    bounds_demonstration,
    buffon_experiment,
    convergence_experiment,
    estimate_from_bits,
    estimate_pi,
    estimate_row,
    fit_power_law,
    flips_for_target_error,
    merge_summaries,
    merge_tree,
    method_agreement,
    parker_replication,
    record_censored,
    stack_rows,
    statistic_rows,
    stream_update,
)
from src.walk_sim import NumpyBitSource, SequenceBitSource, Trial


def _summary_of(ks):
    summary = EstimateSummary()
    for k in ks:
        stream_update(summary, Trial.from_k(k))
    return summary


# -------------------------------------------------------------------
# Streaming summary
# -------------------------------------------------------------------
def test_stream_update_matches_batch_moments():
    ks = [0, 0, 1, 3, 0, 7, 2, 0, 12, 1]
    fractions = np.array([(k + 1) / (2 * k + 1) for k in ks])
    summary = _summary_of(ks)
    assert summary.trials == len(ks)
    assert summary.mean_fraction == pytest.approx(fractions.mean(), rel=1e-14)
    assert summary.variance == pytest.approx(fractions.var(ddof=1), rel=1e-12)
    assert summary.pi_hat == pytest.approx(4 * fractions.mean(), rel=1e-14)
    assert summary.completed_flips == sum(2 * k + 1 for k in ks)
    assert summary.tau_histogram[0] == 4
    assert summary.min_fraction == pytest.approx(13 / 25)
    assert summary.max_fraction == 1.0


def test_stream_mean_does_not_depend_on_trial_order():
    ks = [0] * 40 + [1] * 10 + [2] * 5 + [3, 4, 7, 12, 30, 101]
    reference = _summary_of(ks).mean_fraction
    rng = np.random.default_rng(2024)
    for _ in range(5):
        shuffled = rng.permutation(ks).tolist()
        assert abs(_summary_of(shuffled).mean_fraction - reference) <= 1e-12


def test_censored_trial_is_not_streamed():
    with pytest.raises(InvalidInputError):
        stream_update(EstimateSummary(), Trial.censored_at(10, 3))


def test_censored_trials_only_count_flips():
    summary = record_censored(EstimateSummary(cap=10), Trial.censored_at(10, 3))
    assert summary.censored_trials == 1
    assert summary.flips_used == 10
    assert not summary.has_data
    assert summary.pi_hat is None
    assert summary.to_dict()["status"] == "no_data"


def test_single_trial_has_no_stderr():
    summary = _summary_of([0])
    assert summary.pi_hat == 4.0
    assert summary.stderr_pi is None


def test_from_k_matches_streaming():
    ks = np.array([0, 5, 0, 1, 20, 0, 3, 3, 100])
    batch = EstimateSummary.from_k(ks)
    streamed = _summary_of(ks.tolist())
    assert batch.trials == streamed.trials
    assert batch.mean_fraction == pytest.approx(streamed.mean_fraction, rel=1e-14)
    assert batch.m2 == pytest.approx(streamed.m2, rel=1e-12)
    assert batch.mean_inv_tau == pytest.approx(streamed.mean_inv_tau, rel=1e-14)
    assert batch.tau_histogram == streamed.tau_histogram
    assert batch.completed_flips == streamed.completed_flips


def test_merge_matches_single_stream():
    ks = [0, 2, 0, 1, 9, 0, 4, 0, 0, 3, 1]
    whole = _summary_of(ks)
    merged = merge_summaries(_summary_of(ks[:4]), _summary_of(ks[4:]))
    assert merged.trials == whole.trials
    assert merged.mean_fraction == pytest.approx(whole.mean_fraction, rel=1e-14)
    assert merged.m2 == pytest.approx(whole.m2, rel=1e-12)
    assert merged.m2_inv_tau == pytest.approx(whole.m2_inv_tau, rel=1e-12)
    assert merged.tau_histogram == whole.tau_histogram


def test_merge_with_empty_summary():
    part = _summary_of([0, 1])
    assert merge_summaries(EstimateSummary(), part).mean_fraction == part.mean_fraction
    assert merge_summaries(part, EstimateSummary()).trials == 2
    assert merge_tree([]).trials == 0


def test_merge_tree_uses_every_part():
    parts = [_summary_of([k]) for k in range(7)]
    assert merge_tree(parts).trials == 7


def test_merge_tree_pairs_neighbours_level_by_level():
    a, b, c, d, e = (_summary_of(ks) for ks in ([0], [1, 2], [3], [0, 5, 9], [4]))
    expected = merge_summaries(merge_summaries(merge_summaries(a, b), merge_summaries(c, d)), e)
    tree = merge_tree([a, b, c, d, e])
    assert tree.mean_fraction == expected.mean_fraction
    assert tree.m2 == expected.m2
    assert tree.mean_inv_tau == expected.mean_inv_tau
    assert tree.m2_inv_tau == expected.m2_inv_tau


def test_stacked_table_keeps_numeric_columns():
    row = pd.DataFrame([estimate_row("r0", "direct", 1, None, _summary_of([0, 1, 2]))], columns=ESTIMATE_COLUMNS)
    stats = statistic_rows([("stderr_pi", 0.25), ("fit_status", "ok")])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        table = stack_rows(ESTIMATE_COLUMNS, row, stats)
    assert list(table.columns) == ESTIMATE_COLUMNS
    assert table["trials"].dtype == np.float64
    assert table["pi_hat"].dtype == np.float64
    assert table["statistic"].tolist()[1:] == ["stderr_pi", "fit_status"]
    assert table["value"].tolist()[1:] == [0.25, "ok"]


def test_inv_tau_estimator():
    summary = _summary_of([0, 1, 2])
    expected_mean = (1 + 1 / 3 + 1 / 5) / 3
    assert summary.pi_hat_inv_tau == pytest.approx(2 * (expected_mean + 1))


# -------------------------------------------------------------------
# Configuration
# -------------------------------------------------------------------
@pytest.mark.parametrize(
    "kwargs",
    [
        {"method": "coin"},
        {"seed": -1},
        {"cap": 0},
        {"reps": 0},
        {"budgets": (100, 100, 1000)},
        {"budgets": (1000, 100)},
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(InvalidInputError):
        ExperimentConfig(**kwargs)


@pytest.mark.parametrize("kind,amount", [("seconds", 10), ("trials", 0)])
def test_invalid_budget(kind, amount):
    with pytest.raises(InvalidInputError):
        Budget(kind, amount)


def test_config_from_yaml_section():
    config = ExperimentConfig.from_dict(
        {"seed": 9, "method": "walk", "budgets": [10, 100], "reps": 3, "budget_kind": "flips", "budget": 500},
        {"chunk_size": 128},
    )
    assert config.seed == 9
    assert config.budgets == (10, 100)
    assert config.budget == Budget("flips", 500)
    assert config.chunk_size == 128
    assert config.to_dict()["budgets"] == [10, 100]


# -------------------------------------------------------------------
# Estimation
# -------------------------------------------------------------------
def test_walk_cap_censors_and_reports_bias_bound():
    summary = estimate_from_bits(SequenceBitSource.from_flips("TTH"), "walk", Budget("trials", 3), cap=1)
    assert summary.trials == 1
    assert summary.censored_trials == 2
    assert summary.flips_used == 3
    assert summary.censoring_bias_bound == pytest.approx(0.25)


def test_flip_budget_discards_partial_trial():
    summary = estimate_from_bits(SequenceBitSource.from_flips("HTT"), "walk", Budget("flips", 3))
    assert summary.trials == 1
    assert summary.discarded_flips == 2
    assert summary.flips_used == 3


def test_flip_budget_without_completed_trial():
    summary = estimate_from_bits(SequenceBitSource.from_flips("TH"), "walk", Budget("flips", 1))
    assert not summary.has_data
    assert summary.pi_hat is None
    assert summary.discarded_flips == 1


@pytest.mark.parametrize("method", ["walk", "direct"])
def test_flip_budget_is_spent_exactly(method):
    summary = estimate_from_bits(NumpyBitSource(4).spawn(0), method, Budget("flips", 10_000), cap=10_000)
    assert summary.flips_used == 10_000
    assert 2.0 < summary.pi_hat <= 4.0


def test_estimate_is_independent_of_worker_count():
    config = ExperimentConfig(seed=3, method="direct", budget=Budget("trials", 5_000), chunk_size=1_000)
    assert estimate_pi(config, n_jobs=1).to_dict() == estimate_pi(config, n_jobs=2).to_dict()


def test_estimate_is_reproducible():
    config = ExperimentConfig(seed=1, method="direct", budget=Budget("trials", 1_000))
    first = estimate_pi(config).to_dict()
    assert first == estimate_pi(config).to_dict()
    assert 2.0 < first["pi_hat"] <= 4.0


def test_direct_estimate_is_within_four_sigma():
    config = ExperimentConfig(seed=2024, method="direct", budget=Budget("trials", 200_000))
    summary = estimate_pi(config)
    assert abs(summary.pi_hat - math.pi) <= 4 * summary.stderr_pi
    assert abs(summary.pi_hat_inv_tau - math.pi) <= 4 * summary.stderr_pi_inv_tau


def test_walk_estimate_is_within_four_sigma():
    config = ExperimentConfig(seed=77, method="walk", cap=2**20 - 1, budget=Budget("trials", 20_000), chunk_size=5_000)
    summary = estimate_pi(config)
    bias = 4 * summary.censoring_bias_bound
    assert abs(summary.pi_hat - math.pi) <= 4 * summary.stderr_pi + bias


# -------------------------------------------------------------------
# Experiments
# -------------------------------------------------------------------
def test_power_law_fit_recovers_slope():
    budgets = [1e3, 1e4, 1e5, 1e6]
    slope, intercept, stderr, status = fit_power_law(budgets, [2 * n**-0.25 for n in budgets])
    assert status == "ok"
    assert slope == pytest.approx(-0.25)
    assert math.exp(intercept) == pytest.approx(2.0)
    assert stderr == pytest.approx(0.0, abs=1e-10)


def test_power_law_fit_degenerates_gracefully():
    slope, _, _, status = fit_power_law([1e3, 1e4], [0.1, None])
    assert slope is None
    assert status.startswith("degenerate")


def test_flips_for_target_error():
    result = ConvergenceResult(pd.DataFrame(), pd.DataFrame(), -0.25, 0.0, 0.01, "ok")
    projection = flips_for_target_error(result, 1e-3)
    assert projection["flips"] == pytest.approx(1e12, rel=1e-9)
    assert projection["years_at_one_flip_per_second"] == pytest.approx(31_688, rel=1e-3)


def test_convergence_rejects_short_designs():
    with pytest.raises(InvalidInputError):
        convergence_experiment(ExperimentConfig(budgets=(100, 1000, 10_000), reps=30))
    with pytest.raises(InvalidInputError):
        convergence_experiment(ExperimentConfig(budgets=(100, 200, 300, 400), reps=30))
    with pytest.raises(InvalidInputError):
        convergence_experiment(ExperimentConfig(budgets=(10, 100, 1000, 10_000), reps=5))


def test_small_convergence_run():
    config = ExperimentConfig(seed=5, method="walk", cap=10**5, reps=30, budgets=(100, 1_000, 10_000, 100_000))
    result = convergence_experiment(config)
    assert len(result.rows) == 4 * 30
    assert list(result.table["budget_flips"]) == [100, 1_000, 10_000, 100_000]
    assert result.slope is not None and result.slope < 0
    frame = result.to_frame()
    assert "fitted_slope" in set(frame["statistic"].dropna())


def test_parker_requires_enough_reps():
    with pytest.raises(InvalidInputError):
        parker_replication(reps=10, seed=1)


def test_small_parker_replication():
    result = parker_replication(reps=100, seed=10_000)
    assert 0.01 <= result.median_abs_error <= 0.5
    assert result.all_in_range
    assert 0.0 <= result.parker_quantile <= 1.0
    assert result.q25 <= result.median_abs_error <= result.q75


def test_bounds_requires_enough_trials():
    with pytest.raises(InvalidInputError):
        bounds_demonstration(trials=1_000, seed=1)


def test_bounds_demonstration():
    report = bounds_demonstration(trials=100_000, seed=314)
    assert report.min_fraction > 0.5
    assert report.max_fraction == 1.0
    assert abs(report.frequency_z) <= 4
    assert report.lower < report.upper


def test_buffon_frequency():
    result = buffon_experiment(drops=200_000, seed=271)
    assert abs(result.z) <= 4
    assert result.pi_hat == pytest.approx(math.pi, rel=0.02)


def test_buffon_is_independent_of_worker_count():
    a = buffon_experiment(drops=50_000, seed=1, chunk_size=10_000, n_jobs=1)
    b = buffon_experiment(drops=50_000, seed=1, chunk_size=10_000, n_jobs=2)
    assert a.crossings == b.crossings


# -------------------------------------------------------------------
# Desk-scale acceptance runs
# -------------------------------------------------------------------
@pytest.mark.slow
def test_million_direct_trials():
    summary = estimate_pi(ExperimentConfig(seed=1, method="direct", budget=Budget("trials", 10**6)))
    assert abs(summary.pi_hat - math.pi) <= 4 * summary.stderr_pi
    n = summary.trials
    for k in range(6):
        p = tau_pmf(k)
        assert abs(summary.tau_histogram[k] / n - p) <= 4 * math.sqrt(p * (1 - p) / n)


@pytest.mark.slow
def test_walk_and_direct_methods_agree():
    direct = estimate_pi(ExperimentConfig(seed=11, method="direct", budget=Budget("trials", 10**6)))
    walk = estimate_pi(ExperimentConfig(seed=12, method="walk", budget=Budget("trials", 10**6)), n_jobs=-1)
    assert method_agreement(direct, walk) <= AGREEMENT_SIGMAS
    n = walk.trials
    for k in range(6):
        p = tau_pmf(k)
        assert abs(walk.tau_histogram[k] / n - p) <= GATE_SIGMAS * math.sqrt(p * (1 - p) / n)


@pytest.mark.slow
def test_scaling_law():
    config = ExperimentConfig(seed=2025, method="walk", reps=50, budgets=(10**3, 10**4, 10**5, 10**6))
    result = convergence_experiment(config, n_jobs=-1)
    assert -0.40 <= result.slope <= -0.15


@pytest.mark.slow
def test_parker_replication_at_full_scale():
    result = parker_replication(reps=1000, seed=10_000, n_jobs=-1)
    assert 0.01 <= result.median_abs_error <= 0.5
    assert 0.05 < result.parker_quantile < 0.95
    assert PARKER_ABS_ERROR == pytest.approx(0.0850, abs=1e-4)


@pytest.mark.slow
def test_bounds_at_full_scale():
    report = bounds_demonstration(trials=10**6, seed=314)
    assert report.band_inside_3_4
    assert abs(report.frequency_z) <= 4
