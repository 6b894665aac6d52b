import math

import numpy as np
import pytest

from src.analytics import TauTable
from src.custom_exception import BitSourceExhaustedError, InvalidInputError
from src.oracle import iter_first_passage_paths
from src.walk_sim import (
    NeedleDrop,
    NumpyBitSource,
    SequenceBitSource,
    Trial,
    buffon_batch,
    buffon_probability,
    buffon_trial,
    run_trial_direct,
    run_trial_walk,
    run_trials_direct,
)


# -------------------------------------------------------------------
# Scripted walks
# -------------------------------------------------------------------
def test_heads_first_stops_immediately(flips):
    trial = run_trial_walk(flips("H"), cap=100)
    assert trial == Trial(tau=1, heads=1, fraction=1.0, censored=False, flips_consumed=1)


def test_tails_then_two_heads(flips):
    trial = run_trial_walk(flips("THH"), cap=100)
    assert trial.tau == 3
    assert trial.heads == 2
    assert trial.fraction == pytest.approx(2 / 3)


def test_longer_excursion(flips):
    trial = run_trial_walk(flips("TTHHH"), cap=100)
    assert (trial.tau, trial.heads, trial.k) == (5, 3, 2)
    assert trial.inv_tau == pytest.approx(0.2)


def test_trials_consume_only_their_flips(flips):
    source = flips("HTHHTTHHH")
    taus = [run_trial_walk(source, cap=100).tau for _ in range(3)]
    assert taus == [1, 3, 5]
    assert source.remaining == 0


def test_cap_censors_the_trial(flips):
    source = flips("TTTTH")
    trial = run_trial_walk(source, cap=3)
    assert trial.censored
    assert trial.tau is None and trial.fraction is None
    assert trial.flips_consumed == 3
    assert source.remaining == 2


def test_exhausted_sequence_raises(flips):
    with pytest.raises(BitSourceExhaustedError):
        run_trial_walk(flips("TT"), cap=10)


@pytest.mark.parametrize("cap", [0, -5, 2.5])
def test_invalid_cap(flips, cap):
    with pytest.raises(InvalidInputError):
        run_trial_walk(flips("H"), cap=cap)


def test_every_first_passage_path_replays_to_its_length():
    paths = list(iter_first_passage_paths(11))
    assert len(paths) == sum([1, 1, 2, 5, 14, 42])
    for path in paths:
        trial = run_trial_walk(SequenceBitSource(path), cap=11)
        assert trial.tau == len(path)
        assert trial.heads == sum(path)


def test_long_walk_crosses_block_boundaries():
    # 200 tails, then 201 heads: first passage at flip 401.
    source = SequenceBitSource([0] * 200 + [1] * 201 + [1])
    trial = run_trial_walk(source, cap=10_000)
    assert trial.tau == 401
    assert source.remaining == 1


# -------------------------------------------------------------------
# Bit sources
# -------------------------------------------------------------------
def test_seeded_streams_are_reproducible():
    a = NumpyBitSource(7).spawn(1).take_bits(1000)
    b = NumpyBitSource(7, key=(1,)).take_bits(1000)
    assert np.array_equal(a, b)


def test_substreams_differ():
    a = NumpyBitSource(7).spawn(1).take_bits(256)
    b = NumpyBitSource(7).spawn(2).take_bits(256)
    c = NumpyBitSource(8).spawn(1).take_bits(256)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_peek_does_not_consume(bits):
    first = bits.peek_bits(10).copy()
    assert np.array_equal(bits.take_bits(10), first)


def test_reads_across_refills_match_one_large_read():
    small = NumpyBitSource(3)
    pieces = [small.take_bits(n) for n in (5, 70_000, 3, 100_000)]
    assert np.array_equal(np.concatenate(pieces), NumpyBitSource(3).take_bits(170_008))


def test_bits_are_philox_bytes_most_significant_first():
    sequence = np.random.SeedSequence(entropy=1, spawn_key=(0,))
    raw = np.random.Generator(np.random.Philox(sequence)).bytes(64)
    expected = [(byte >> (7 - i)) & 1 for byte in raw for i in range(8)]
    assert NumpyBitSource(1).spawn(0).take_bits(512).tolist() == expected


def test_uniform_reads_53_bits_as_a_binary_fraction():
    source = NumpyBitSource(1).spawn(0)
    bits = source.peek_bits(53).tolist()
    assert source.uniform53() == int("".join(map(str, bits)), 2) / 2**53


def test_uniform_from_53_bits():
    assert SequenceBitSource([1] + [0] * 52).uniform53() == 0.5
    assert SequenceBitSource([1] * 53).uniform53() == 1 - 2**-53
    assert SequenceBitSource([0] * 53).uniform53() == 0.0


def test_uniforms_lie_in_unit_interval(bits):
    u = bits.uniforms(10_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 4 * math.sqrt(1 / 12 / 10_000)


@pytest.mark.parametrize("seed", [-1, 1.5, True])
def test_invalid_seed(seed):
    with pytest.raises(InvalidInputError):
        NumpyBitSource(seed)


def test_scripted_sequence_has_no_substreams(flips):
    with pytest.raises(InvalidInputError):
        flips("HT").spawn(0)


def test_from_flips_rejects_other_symbols():
    with pytest.raises(InvalidInputError):
        SequenceBitSource.from_flips("HTX")


# -------------------------------------------------------------------
# Direct method
# -------------------------------------------------------------------
def test_direct_trial_from_scripted_uniform():
    # leading 0 bit: u < 1/2, so tau = 1
    assert run_trial_direct(SequenceBitSource([0] * 53)).tau == 1
    # u = 0.5 + 0.0625 = 0.5625 lies in [0.5, 0.625): tau = 3
    assert run_trial_direct(SequenceBitSource([1, 0, 0, 1] + [0] * 49)).tau == 3


def test_batch_direct_matches_single_trials():
    table = TauTable()
    one_by_one = NumpyBitSource(11)
    batch = run_trials_direct(NumpyBitSource(11), 500, table)
    singles = [run_trial_direct(one_by_one, table).k for _ in range(500)]
    assert batch.tolist() == singles


def test_direct_fraction_is_in_range(bits):
    k = run_trials_direct(bits, 20_000)
    fractions = (k + 1) / (2 * k + 1)
    assert fractions.min() > 0.5
    assert fractions.max() == 1.0


def test_walk_frequency_of_single_flip(bits):
    n = 20_000
    taus = np.array([run_trial_walk(bits, cap=10_001).tau or 0 for _ in range(n)])
    frequency = np.mean(taus == 1)
    assert abs(frequency - 0.5) <= 4 * 0.5 / math.sqrt(n)


# -------------------------------------------------------------------
# Buffon's needle
# -------------------------------------------------------------------
def test_buffon_probability():
    assert buffon_probability(1.0, 1.0) == pytest.approx(2 / math.pi)
    assert buffon_probability(0.5, 2.0) == pytest.approx(0.5 / math.pi)


@pytest.mark.parametrize("needle_len,spacing", [(2.0, 1.0), (0.0, 1.0), (-1.0, 1.0)])
def test_buffon_rejects_unsupported_needles(needle_len, spacing):
    with pytest.raises(InvalidInputError):
        buffon_probability(needle_len, spacing)


def test_needle_geometry():
    assert NeedleDrop.from_geometry(0.0, math.pi / 2, 1.0).crossed
    assert not NeedleDrop.from_geometry(0.49, 0.01, 1.0).crossed
    assert NeedleDrop.from_geometry(0.5, math.pi / 2, 1.0).crossed


def test_buffon_batch_matches_single_drops():
    batch = buffon_batch(NumpyBitSource(5), 300, 1.0, 1.0)
    source = NumpyBitSource(5)
    singles = sum(buffon_trial(source, 1.0, 1.0).crossed for _ in range(300))
    assert batch == singles
