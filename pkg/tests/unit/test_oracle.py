"""
Unit tests for comparator enumeration, regret bounds and their closed forms.
"""

import math

import numpy as np
import pytest
from scipy.special import comb

from core.algorithms.markov import fixed_share_kernel
from core.errors import EmptyComparatorClassError, GuardExceededError, InvalidInputError
from core.harness.scenarios import make_rng
from core.oracle import bounds, display
from core.oracle.comparators import (
    ComparatorSequence,
    best_comparator_loss,
    enumerate_comparators,
    enumeration_size_bound,
    sample_comparator,
)
from core.priors import PriorPreset, PriorWeights, RateSequence
from core.schedule import EntrySchedule


class TestComparatorSequence:
    """Test cases for ComparatorSequence."""

    def test_shift_classification(self, growing_schedule):
        sequence = ComparatorSequence.from_indices([1, 2, 3, 1, 1, 1, 5, 5], growing_schedule)
        assert sequence.shifts == (2, 3, 4, 7)
        assert sequence.fresh_shifts == (3, 7)
        assert sequence.incumbent_shifts == (2, 4)
        assert sequence.k == 4 and sequence.k0 == 2 and sequence.k1 == 2
        assert sequence.pool == (1, 2, 3, 5)
        assert not sequence.is_fresh

    def test_rejects_unentered_expert(self, growing_schedule):
        with pytest.raises(InvalidInputError):
            ComparatorSequence.from_indices([3, 3], growing_schedule)

    def test_segments(self, growing_schedule):
        sequence = ComparatorSequence.from_indices([1, 1, 3, 3, 3, 3, 5, 5], growing_schedule)
        assert sequence.segment_starts() == (1, 3, 7)
        assert sequence.segment_ends() == (2, 6, 8)

    def test_wake_bits(self, growing_schedule):
        sequence = ComparatorSequence.from_indices([1, 2, 1, 1], growing_schedule.truncated(4))
        np.testing.assert_array_equal(sequence.wake_bits(), [[1, 0, 1, 1], [0, 1, 0, 0]])

    def test_loss(self, growing_schedule):
        losses = np.arange(8 * 6, dtype=float).reshape(8, 6)
        sequence = ComparatorSequence.from_indices([1] * 8, growing_schedule)
        assert sequence.loss(losses) == float(sum(6 * t for t in range(8)))


class TestEnumeration:
    """Test cases for exhaustive comparator enumeration."""

    def test_admissible_count_on_fixed_set(self):
        schedule = EntrySchedule.fixed(3, 5)
        comparators = enumerate_comparators("admissible", schedule, 5, 2)
        expected = sum(3 * 2 ** k * comb(4, k, exact=True) for k in range(3))
        assert len(comparators) == expected
        assert len({c.indices for c in comparators}) == expected

    def test_constant_class(self, growing_schedule):
        comparators = enumerate_comparators("constant", growing_schedule, 8, 3)
        assert [c.indices[0] for c in comparators] == [1, 2]

    def test_fresh_class_only_switches_to_entrants(self, growing_schedule):
        for c in enumerate_comparators("fresh", growing_schedule, 8, 2):
            assert c.is_fresh

    def test_sparse_pool_bound(self, growing_schedule):
        comparators = enumerate_comparators("sparse", growing_schedule, 8, 3, pool_size=2)
        assert all(c.n <= 2 for c in comparators)
        assert any(c.n == 2 and c.k == 3 for c in comparators)

    def test_sparse_needs_pool(self, growing_schedule):
        with pytest.raises(InvalidInputError):
            enumerate_comparators("sparse", growing_schedule, 8, 1)

    def test_lexicographic_order(self, growing_schedule):
        comparators = enumerate_comparators("admissible", growing_schedule, 5, 1)
        indices = [c.indices for c in comparators]
        assert indices == sorted(indices)

    def test_guard(self, growing_schedule):
        assert enumeration_size_bound(growing_schedule, 8, 2) == 6 ** 3 * 21
        with pytest.raises(GuardExceededError):
            enumerate_comparators("admissible", growing_schedule, 8, 2, limit=100)

    def test_best_comparator_ties_to_smallest(self):
        schedule = EntrySchedule.fixed(2, 2)
        comparators = enumerate_comparators("admissible", schedule, 2, 1)
        best, loss = best_comparator_loss(comparators, np.zeros((2, 2)))
        assert best.indices == (1, 1)
        assert loss == 0.0
        with pytest.raises(EmptyComparatorClassError):
            best_comparator_loss([], np.zeros((2, 2)))

    def test_sample_comparator_respects_limits(self, growing_schedule):
        rng = make_rng(5)
        for _ in range(50):
            c = sample_comparator(rng, growing_schedule, 8, 3, pool_size=2)
            assert c.k <= 3
            assert c.n <= 2
            assert c.horizon == 8


class TestBounds:
    """Test cases for the exact bound calculators."""

    def test_telescoping_sum(self):
        for horizon in (1, 2, 10, 1000):
            assert bounds.telescoping_sum(horizon) == pytest.approx(math.log(horizon), abs=1e-12)

    def test_binary_entropy(self):
        assert bounds.binary_entropy(0.0) == 0.0
        assert bounds.binary_entropy(0.5) == pytest.approx(math.log(2))
        with pytest.raises(InvalidInputError):
            bounds.binary_entropy(1.5)

    def test_hedge_and_mixture(self):
        assert bounds.bound_hedge([1, 1, 2], 3, 1.0) == pytest.approx(math.log(2))
        assert bounds.bound_mixture([0, 0, 1], [1, 1, 2], 0.5) == pytest.approx(2 * math.log(2))

    def test_growing_hedge(self, growing_schedule):
        pi = PriorWeights(PriorPreset.ENTRY_UNIFORM).realize(growing_schedule)
        assert bounds.bound_growing_hedge(pi, growing_schedule, 3, 4, 1.0) == pytest.approx(math.log(3))
        with pytest.raises(InvalidInputError):
            bounds.bound_growing_hedge(pi, growing_schedule, 5, 4, 1.0)

    def test_fresh(self, growing_schedule):
        pi = np.ones(6)
        sequence = ComparatorSequence.from_indices([1, 1, 3, 3, 3, 3, 5, 5], growing_schedule)
        expected = math.log(2 / 1) + math.log(4 / 1) + math.log(6 / 1)
        assert bounds.bound_fresh(pi, growing_schedule, sequence, 1.0) == pytest.approx(expected)
        incumbent = ComparatorSequence.from_indices([1, 2] + [2] * 6, growing_schedule)
        with pytest.raises(InvalidInputError):
            bounds.bound_fresh(pi, growing_schedule, incumbent, 1.0)

    def test_growing_markov_reduces_to_fresh_terms(self, growing_schedule):
        pi = np.ones(6)
        sequence = ComparatorSequence.from_indices([1, 1, 3, 3, 3, 3, 5, 5], growing_schedule)
        switching = sum(-math.log(1 - 1 / t) for t in range(2, 9) if t not in (3, 7))
        assert bounds.bound_growing_markov(pi, growing_schedule, sequence, None, 1.0) == pytest.approx(
            bounds.bound_fresh(pi, growing_schedule, sequence, 1.0) + switching)

    def test_markov_matches_fixed_share(self):
        indices = [1, 1, 2, 2, 2, 3]
        exact = bounds.bound_markov(np.ones(3) / 3, fixed_share_kernel(0.2, 3), indices, 1.0)
        closed = bounds.bound_fixed_share(3, 6, 2, 0.2, 1.0)
        assert exact <= closed + 1e-12

    def test_markov_zero_transition_is_infinite(self):
        assert bounds.bound_markov([1.0, 0.0], [np.eye(2)], [1, 2], 1.0) == math.inf

    def test_fixed_share_tuned(self):
        assert bounds.bound_fixed_share_tuned(4, 11, 2, 1.0) == pytest.approx(
            bounds.bound_fixed_share(4, 11, 2, 0.2, 1.0))

    def test_sleeping(self, growing_schedule):
        pi = np.ones(6)
        sequence = ComparatorSequence.from_indices([1, 1, 3, 3, 1, 1, 1, 1], growing_schedule)
        value = bounds.bound_sleeping(pi, growing_schedule, sequence, None, None, 1.0)
        expected = 2 * math.log(3) + 2 * math.log(2)
        expected += sum(-2 * math.log(1 - 1 / t) for t in range(2, 9))
        expected += 2 * math.log(3) + 2 * math.log(5)
        assert value == pytest.approx(expected)

    def test_info_bounds(self):
        assert bounds.info_bound_admissible(4, 10, 2, 1, 1.0) == pytest.approx(3 * math.log(4) + math.log(9))
        assert bounds.info_bound_sparse(8, 2, 0, 10, 1.0) == pytest.approx(2 * math.log(4) + math.log(2))
        assert bounds.info_bound_fixed_share(3, 5, 1, 2.0) == pytest.approx((2 * math.log(3) + math.log(4)) / 2)

    def test_eta_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            bounds.bound_hedge([1.0], 1, 0.0)


class TestDisplay:
    """The closed forms dominate the exact bounds for their presets."""

    def test_constant_entry_time(self, growing_schedule):
        pi = PriorWeights(PriorPreset.ENTRY_TIME_UNIFORM).realize(growing_schedule)
        for i in range(1, 7):
            assert bounds.bound_growing_hedge(pi, growing_schedule, i, 8, 1.0) <= \
                display.display_constant_entry_time(growing_schedule, i, 8, 1.0) + 1e-12

    def test_constant_inverse_index(self, growing_schedule):
        pi = PriorWeights(PriorPreset.INVERSE_INDEX).realize(growing_schedule)
        for i in range(1, 7):
            assert bounds.bound_growing_hedge(pi, growing_schedule, i, 8, 1.0) <= \
                display.display_constant_inverse_index(i, 6, 1.0) + 1e-12

    def test_constant_nu_and_upsilon(self, growing_schedule):
        rate = RateSequence.power(2.0)
        nu = PriorWeights(PriorPreset.NU_SEQUENCE, sequence=rate).realize(growing_schedule)
        upsilon = PriorWeights(PriorPreset.UPSILON_SEQUENCE, sequence=rate).realize(growing_schedule)
        for i in range(1, 7):
            assert bounds.bound_growing_hedge(nu, growing_schedule, i, 8, 1.0) <= \
                display.display_constant_nu(growing_schedule, i, 8, rate, 1.0) + 1e-12
            assert bounds.bound_growing_hedge(upsilon, growing_schedule, i, 8, 1.0) == pytest.approx(
                display.display_constant_upsilon(growing_schedule, i, 8, rate, 1.0))

    def test_constant_sparse_rounds(self, growing_schedule):
        pi = PriorWeights(PriorPreset.SPARSE_ROUNDS).realize(growing_schedule)
        for i in range(1, 7):
            assert bounds.bound_growing_hedge(pi, growing_schedule, i, 8, 1.0) <= \
                display.display_constant_sparse_rounds(growing_schedule, i, 8, 1.0) + 1e-12

    def test_fresh_and_admissible(self, growing_schedule):
        pi = PriorWeights(PriorPreset.ENTRY_UNIFORM).realize(growing_schedule)
        for c in enumerate_comparators("admissible", growing_schedule, 8, 2):
            exact = bounds.bound_growing_markov(pi, growing_schedule, c, None, 1.0)
            assert exact <= display.display_admissible(growing_schedule, c, 1.0) + 1e-12
            if c.is_fresh:
                fresh = bounds.bound_fresh(pi, growing_schedule, c, 1.0)
                assert fresh <= display.display_fresh(growing_schedule, c, 1.0) + 1e-12

    def test_sparse(self, growing_schedule):
        pi = PriorWeights(PriorPreset.ENTRY_TIME_UNIFORM).realize(growing_schedule)
        for c in enumerate_comparators("sparse", growing_schedule, 8, 2, pool_size=2):
            exact = bounds.bound_sleeping(pi, growing_schedule, c, None, None, 1.0)
            assert exact <= display.display_sparse(growing_schedule, c, 1.0) + 1e-12

    def test_uniform_forms(self, growing_schedule):
        pi = np.ones(6)
        for c in enumerate_comparators("admissible", growing_schedule, 8, 2):
            exact = bounds.bound_growing_markov(pi, growing_schedule, c, None, 1.0)
            assert exact <= display.uniform_admissible(growing_schedule, c, 1.0) + 1e-12
            if c.is_fresh:
                assert bounds.bound_fresh(pi, growing_schedule, c, 1.0) <= \
                    display.uniform_fresh(growing_schedule, c, 1.0) + 1e-12
        assert display.uniform_constant(6, 2.0) == pytest.approx(math.log(6) / 2)

    def test_uniform_sparse(self):
        schedule = EntrySchedule.fixed(4, 6)
        alpha = RateSequence(kind="inverse_t_log_t")
        for c in enumerate_comparators("sparse", schedule, 6, 2, pool_size=2):
            exact = bounds.bound_sleeping(np.ones(4), schedule, c, alpha, alpha, 1.0)
            assert exact <= display.uniform_sparse(4, 2, c.k, 6, 1.0) + 1e-9
        with pytest.raises(InvalidInputError):
            display.uniform_sparse(4, 2, 0, 2, 1.0)

    def test_share_forms(self):
        assert bounds.bound_fixed_share_tuned(4, 11, 2, 1.0) <= display.display_fixed_share(4, 11, 2, 1.0) + 1e-12
        assert bounds.bound_decreasing_share(3, [4, 7], 10, 1.0) == pytest.approx(
            display.display_decreasing_share(3, [4, 7], 10, 1.0))
