"""
Unit tests for sleeping Markov aggregation.
"""

import math

import numpy as np
import pytest

from core.algorithms import algorithm_registry
from core.algorithms.sleeping import (
    ASLEEP,
    AWAKE,
    WakeSleepRates,
    gsmh_admit,
    gsmh_init,
    gsmh_step,
    smh_init,
    smh_step,
    universe_initial,
    universe_wake_kernels,
    wake_sleep_kernel,
)
from core.errors import DegenerateStateError, InvalidInputError
from core.harness.engine import ExperimentEngine
from core.harness.scenarios import fuzz_scenario, make_rng
from core.oracle.brute_force import brute_force_sleeping_aggregation
from core.oracle.comparators import ComparatorClassSpec
from core.priors import PriorPreset, PriorWeights, RateSequence


def _pad(x, size):
    out = np.repeat(x[:1], size, axis=0)
    out[:len(x)] = x
    return out


class TestWakeSleepKernel:
    """Test cases for the per-expert 2x2 transitions."""

    def test_layout(self):
        kernel = wake_sleep_kernel(0.1, 0.3, size=2)
        assert kernel.shape == (2, 2, 2)
        assert kernel[0, ASLEEP, AWAKE] == pytest.approx(0.1)
        assert kernel[0, AWAKE, ASLEEP] == pytest.approx(0.3)
        np.testing.assert_allclose(kernel.sum(axis=1), 1.0)

    @pytest.mark.parametrize("alpha, beta", [(1.2, 0.1), (0.0, 0.5), (0.5, 1.0), (0.5, -0.2)])
    def test_rejects_rates_outside_open_unit_interval(self, alpha, beta):
        with pytest.raises(InvalidInputError):
            wake_sleep_kernel(alpha, beta)

    def test_universe_kernels_keep_unentered_asleep(self, growing_schedule):
        kernels = universe_wake_kernels(growing_schedule, WakeSleepRates())
        kernel = kernels(3)
        assert kernel[2, AWAKE, ASLEEP] == 0.5
        assert kernel[3, ASLEEP, ASLEEP] == 1.0
        assert kernel[3, AWAKE, ASLEEP] == 0.0
        assert kernel[0, AWAKE, ASLEEP] == pytest.approx(1 / 3)

    def test_universe_initial(self, growing_schedule):
        initial = universe_initial(growing_schedule)
        np.testing.assert_allclose(initial[:2], 0.5)
        np.testing.assert_allclose(initial[2:, ASLEEP], 1.0)


class TestSleepingMarkovHedge:
    """Test cases for the fixed-universe sleeping aggregation."""

    def test_init_needs_awake_mass(self):
        with pytest.raises(DegenerateStateError):
            smh_init([1.0, 1.0], [1.0, 0.0])

    def test_init_broadcasts_shared_initial(self):
        state = smh_init([1.0, 3.0], [0.5, 0.5])
        np.testing.assert_allclose(state.awake, [0.25, 0.75])

    @pytest.mark.oracle
    @pytest.mark.parametrize("seed", range(4))
    def test_matches_brute_force(self, seed, log_loss):
        rng = make_rng(seed)
        horizon, size = 5, 3
        prior = rng.uniform(0.1, 1.0, size=size)
        initial = rng.dirichlet(np.ones(2), size=size)
        kernels = [np.stack([rng.dirichlet(np.ones(2), size=2).T for _ in range(size)])
                   for _ in range(horizon)]
        xs = rng.dirichlet(np.ones(2), size=(horizon, size))
        ys = [int(y) for y in rng.integers(0, 2, size=horizon)]
        reference = brute_force_sleeping_aggregation(prior, initial, kernels[:horizon - 1], xs, ys, log_loss)
        state = smh_init(prior, initial)
        for t in range(horizon):
            prediction, _, state = smh_step(state, lambda r: kernels[r - 2], xs[t], ys[t], log_loss)
            np.testing.assert_allclose(prediction.value, reference.predictions[t].value, rtol=1e-9)

    def test_asleep_experts_keep_their_standing(self, log_loss):
        """With no transitions, an always-asleep pair keeps its share of the mass."""
        state = smh_init([1.0, 1.0], np.array([[0.0, 1.0], [1.0, 0.0]]))
        xs = np.array([[0.9, 0.1], [0.1, 0.9]])
        _, _, state = smh_step(state, np.eye(2), xs, 0, log_loss)
        assert state.v[1, ASLEEP] == pytest.approx(0.5)


class TestGrowingSleepingMarkovHedge:
    """Test cases for the growing sleeping aggregation."""

    def test_entrants_split_evenly(self):
        state = gsmh_admit(gsmh_init(), [0.5, 0.25])
        np.testing.assert_allclose(np.exp(state.log_w), [[0.25, 0.25], [0.125, 0.125]])
        assert gsmh_admit(state, []).size == 2

    def test_step_before_admit_fails(self, log_loss):
        with pytest.raises(InvalidInputError):
            gsmh_step(gsmh_init(), np.array([[0.5, 0.5]]), 0, log_loss, 0.5, 0.5)

    @pytest.mark.parametrize("alpha, beta", [(1.5, 0.5), (0.5, -0.2), (0.0, 0.5), (0.5, 1.0)])
    def test_step_rejects_rates_outside_open_unit_interval(self, alpha, beta, log_loss):
        state = gsmh_admit(gsmh_init(), [1.0])
        with pytest.raises(InvalidInputError, match="must lie in"):
            gsmh_step(state, np.array([[0.5, 0.5]]), 0, log_loss, alpha, beta)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_universe_sleeping_markov_hedge(self, seed):
        scenario = fuzz_scenario(seed, max_horizon=25, max_experts=6)
        schedule, model = scenario.schedule, scenario.model
        priors = PriorWeights(PriorPreset.ENTRY_TIME_UNIFORM).realize(schedule)
        rates = WakeSleepRates(RateSequence.inverse_time(), RateSequence.power(0.5))
        kernels = universe_wake_kernels(schedule, rates)
        universe = smh_init(priors, universe_initial(schedule), model.eta)
        state = gsmh_init(model.eta)
        scenario.panel.reset()
        for t in range(1, scenario.horizon + 1):
            xs = scenario.panel.predict(t)
            y = scenario.outcome(t, None)
            state = gsmh_admit(state, priors[schedule.entered(t - 1):schedule.entered(t)])
            alpha, beta = rates.at(t + 1)
            prediction, _, state = gsmh_step(state, xs, y, model, alpha, beta)
            expected, _, universe = smh_step(universe, kernels, _pad(xs, schedule.total), y, model)
            np.testing.assert_allclose(np.atleast_1d(prediction.value), np.atleast_1d(expected.value), rtol=1e-9)
            scenario.panel.observe(t, y)

    def test_constant_bound_includes_wake_cost(self, growing_schedule, log_loss, sample_config):
        algorithm = algorithm_registry.create_algorithm(sample_config("growing_sleeping_markov_hedge"),
                                                        growing_schedule, log_loss)
        expected = math.log(6) + math.log(2) + sum(-math.log(1 - 1 / t) for t in range(5, 9))
        assert algorithm.bound("constant", 4, 8) == pytest.approx(expected)

    @pytest.mark.bounds
    @pytest.mark.parametrize("seed", range(3))
    def test_sparse_regret_within_bound(self, seed, sample_config):
        scenario = fuzz_scenario(seed, max_horizon=8, max_experts=4, min_horizon=3)
        config = sample_config("growing_sleeping_markov_hedge", PriorPreset.ENTRY_TIME_UNIFORM)
        report = ExperimentEngine().run_experiment(
            scenario, config, [ComparatorClassSpec("sparse", max_shifts=2, pool_size=2)])
        assert report.comparators[0].count > 0
        assert report.comparators[0].worst_slack >= -1e-9
        assert report.worst_slack >= -1e-9
