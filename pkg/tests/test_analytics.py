import math
from fractions import Fraction

import numpy as np
import pytest

from src.analytics import (
    TauTable,
    arcsin_series,
    arcsin_tail_bound,
    catalan,
    exact_fraction_mean_truncated,
    exact_inv_tau_mean_truncated,
    exact_tau_pmf,
    exact_tau_tail,
    fraction_mean_truncated,
    fraction_tail_bound,
    inv_tau_mean_truncated,
    inv_tau_tail_bound,
    iter_series,
    sample_tau_direct,
    series_terms,
    tail_closed_form,
    tau_pmf,
    tau_tail,
)
from src.custom_exception import InvalidInputError


CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796]


def test_catalan_numbers():
    assert [catalan(k) for k in range(11)] == CATALAN
    assert catalan(30) == math.comb(60, 30) // 31


def test_catalan_rejects_negative_index():
    with pytest.raises(InvalidInputError):
        catalan(-1)


def test_pmf_first_values():
    assert tau_pmf(0) == 0.5
    assert tau_pmf(1) == 0.125
    assert tau_pmf(2) == pytest.approx(2 / 32, rel=1e-15)


def test_pmf_matches_exact_rationals():
    for k in range(40):
        assert tau_pmf(k) == pytest.approx(float(exact_tau_pmf(k)), rel=1e-13)


def test_exact_pmf_is_catalan_over_power_of_two():
    for k in range(11):
        assert exact_tau_pmf(k) == Fraction(CATALAN[k], 2 ** (2 * k + 1))


def test_tail_is_one_minus_partial_pmf():
    table = TauTable()
    for k in (0, 1, 10, 500):
        assert table.pmf[: k + 1].sum() + table.tail[k] == pytest.approx(1.0, abs=1e-12)


def test_tail_matches_closed_forms():
    for k in (0, 3, 50, 900):
        assert tau_tail(k) == pytest.approx(float(exact_tau_tail(k)), rel=1e-12)
        assert tail_closed_form(k) == pytest.approx(float(exact_tau_tail(k)), rel=1e-12)


def test_tail_beyond_table_uses_closed_form():
    table = TauTable(max_terms=1024)
    k = 10**7
    assert table.tail_at(k) == pytest.approx(1 / math.sqrt(math.pi * (k + 1)), rel=1e-6)
    assert len(table) == 1024


def test_table_terms_do_not_depend_on_growth_history():
    small = TauTable(max_terms=1024)
    large = TauTable()
    large.extend_to(5000)
    assert np.array_equal(small.pmf, large.pmf[: len(small)])
    assert np.array_equal(small.tail, large.tail[: len(small)])


def test_sample_boundaries():
    assert sample_tau_direct(0.0) == 0
    assert sample_tau_direct(0.4999) == 0
    assert sample_tau_direct(0.5) == 1
    assert sample_tau_direct(0.6) == 1
    assert sample_tau_direct(0.625) == 2


@pytest.mark.parametrize("u", [1.0, -0.1, 1.5])
def test_sample_rejects_u_outside_unit_interval(u):
    with pytest.raises(InvalidInputError):
        sample_tau_direct(u)


def test_far_tail_sampling_terminates_and_inverts_tail():
    table = TauTable(max_terms=1024)
    for u in (1 - 2**-20, 1 - 2**-40, 1 - 2**-53):
        k = table.sample(u)
        assert k >= len(table) - 1
        assert tail_closed_form(k) < 1 - u <= tail_closed_form(k - 1)


def test_sample_many_matches_scalar_sampling():
    table = TauTable(max_terms=1024)
    u = np.array([0.0, 0.3, 0.5, 0.9, 0.999, 0.999999, 1 - 2**-30])
    assert table.sample_many(u).tolist() == [table.sample(float(v)) for v in u]


def test_series_terms_are_stable_under_truncation():
    short = series_terms("fraction-mean", 10)
    long = series_terms("fraction-mean", 1000)
    assert np.array_equal(short, long[:11])


def test_fraction_series_small_partials():
    assert fraction_mean_truncated(0) == 0.5
    assert fraction_mean_truncated(1) == pytest.approx(0.5 + 1 / 12, abs=1e-16)


def test_inv_tau_series_small_partials():
    assert inv_tau_mean_truncated(0) == 0.5
    assert inv_tau_mean_truncated(1) == pytest.approx(0.541667, abs=1e-6)


def test_fraction_series_limit_and_bound():
    K = 10**6
    s = fraction_mean_truncated(K)
    assert s < math.pi / 4
    assert math.pi / 4 - s <= fraction_tail_bound(K)
    assert fraction_tail_bound(K) == pytest.approx(2.82e-4, rel=1e-2)


def test_fraction_series_increases_towards_limit():
    partials = [p.partial_sum for p in iter_series("fraction-mean", 200)]
    assert all(a < b for a, b in zip(partials, partials[1:]))
    assert partials[-1] < math.pi / 4


def test_inv_tau_series_limit():
    s = inv_tau_mean_truncated(10**4)
    assert abs(s - (math.pi / 2 - 1)) <= 1e-5
    assert (math.pi / 2 - 1) - s <= inv_tau_tail_bound(10**4)


@pytest.mark.parametrize("K", [1, 10, 100, 1000])
def test_remainder_bounds_hold(K):
    assert math.pi / 4 - fraction_mean_truncated(K) <= fraction_tail_bound(K)
    assert (math.pi / 2 - 1) - inv_tau_mean_truncated(K) <= inv_tau_tail_bound(K)
    assert math.pi / 2 - arcsin_series(1.0, K) <= arcsin_tail_bound(1.0, K)


@pytest.mark.parametrize("K", [0, 10, 1000])
def test_arcsine_at_one_is_twice_fraction_series(K):
    assert abs(arcsin_series(1.0, K) - 2 * fraction_mean_truncated(K)) <= 1e-14


def test_arcsine_at_one_half():
    assert abs(arcsin_series(0.5, 30) - math.pi / 6) <= 1e-12
    assert abs(arcsin_series(0.5, 5) - math.pi / 6) <= arcsin_tail_bound(0.5, 5)


def test_arcsine_is_odd():
    assert arcsin_series(-0.3, 20) == -arcsin_series(0.3, 20)


def test_arcsine_rejects_x_outside_unit_interval():
    with pytest.raises(InvalidInputError):
        arcsin_series(1.01, 5)


def test_bounds_reject_zero_terms():
    with pytest.raises(InvalidInputError):
        fraction_tail_bound(0)


def test_negative_terms_rejected():
    with pytest.raises(InvalidInputError):
        fraction_mean_truncated(-1)


def test_exact_partial_sums_match_floats():
    for K in (0, 5, 10):
        assert float(exact_fraction_mean_truncated(K)) == pytest.approx(fraction_mean_truncated(K), abs=1e-15)
        assert float(exact_inv_tau_mean_truncated(K)) == pytest.approx(inv_tau_mean_truncated(K), abs=1e-15)


def test_iter_series_rows():
    states = list(iter_series("inv-tau-mean", 3))
    assert [s.k for s in states] == [0, 1, 2, 3]
    assert states[-1].partial_sum == pytest.approx(inv_tau_mean_truncated(3), abs=1e-16)
    assert states[1].term == pytest.approx(1 / 24)


def test_unknown_series_target():
    with pytest.raises(InvalidInputError):
        series_terms("harmonic", 3)
