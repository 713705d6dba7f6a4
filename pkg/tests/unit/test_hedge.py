"""
Unit tests for exponential weights, its specialist variant and GrowingHedge.
"""

import math

import numpy as np
import pytest

from core.algorithms import algorithm_registry
from core.algorithms.growing import gh_admit, gh_init, gh_predict, gh_step
from core.algorithms.growing_markov import fmh_init, fmh_step
from core.algorithms.hedge import (
    hedge_init,
    hedge_predict,
    hedge_step,
    hedge_update,
    specialist_step,
)
from core.errors import DegenerateStateError, InvalidInputError
from core.harness.engine import ExperimentEngine
from core.oracle import bounds
from core.priors import PriorPreset, PriorWeights
from core.schedule import EntrySchedule


class TestHedge:
    """Test cases for the fixed-set forecaster."""

    def test_init_normalizes_prior(self):
        state = hedge_init([1.0, 3.0])
        np.testing.assert_allclose(state.weights, [0.25, 0.75])

    def test_init_from_preset(self, growing_schedule):
        state = hedge_init(PriorWeights(PriorPreset.INVERSE_INDEX), 1.0, growing_schedule)
        assert state.size == growing_schedule.total
        with pytest.raises(InvalidInputError):
            hedge_init(PriorWeights(PriorPreset.INVERSE_INDEX))

    def test_init_rejects_bad_prior(self):
        with pytest.raises(InvalidInputError):
            hedge_init([1.0, 0.0])
        with pytest.raises(InvalidInputError):
            hedge_init([])

    def test_update_is_exponential(self):
        state = hedge_update(hedge_init([1.0, 1.0], eta=0.5), [0.0, 2.0])
        np.testing.assert_allclose(state.weights, np.array([1.0, math.exp(-1.0)]) / (1.0 + math.exp(-1.0)))
        assert state.round == 2

    def test_update_survives_huge_losses(self):
        state = hedge_update(hedge_init([1.0, 1.0]), [0.0, 1e6])
        assert state.weights[0] == pytest.approx(1.0)
        assert np.all(np.isfinite(state.log_w))

    def test_update_rejects_all_infinite(self):
        with pytest.raises(DegenerateStateError):
            hedge_update(hedge_init([1.0, 1.0]), [np.inf, np.inf])

    def test_predict_checks_size(self, square_loss):
        with pytest.raises(InvalidInputError):
            hedge_predict(hedge_init([1.0, 1.0]), np.array([0.5]), square_loss)

    def test_step_loss_matches_prediction(self, log_loss):
        xs = np.array([[0.2, 0.8], [0.6, 0.4]])
        prediction, loss, state = hedge_step(hedge_init([1.0, 1.0]), xs, 1, log_loss)
        np.testing.assert_allclose(prediction.value, [0.4, 0.6])
        assert loss == pytest.approx(-math.log(0.6))
        assert state.learner_loss == pytest.approx(loss)

    def test_regret_below_log_prior(self, log_loss, random_distributions, rng):
        """Log loss: the learner loses at most ln(1/pi_i) more than expert i."""
        xs = random_distributions(40, 5)
        ys = rng.integers(0, 2, size=40)
        state = hedge_init(np.ones(5))
        expert_losses = np.zeros(5)
        for x, y in zip(xs, ys):
            expert_losses += log_loss.losses(x, int(y))
            _, _, state = hedge_step(state, x, int(y), log_loss)
        assert np.all(state.learner_loss - expert_losses <= math.log(5) + 1e-12)


class TestSpecialist:
    """Test cases for specialist aggregation."""

    def test_inactive_mass_unchanged(self, log_loss):
        state = hedge_init([1.0, 1.0, 2.0])
        before = state.weights[2]
        xs = np.array([[0.9, 0.1], [0.2, 0.8]])
        _, _, state = specialist_step(state, [1, 2], xs, 0, log_loss)
        assert state.weights[2] == pytest.approx(before, rel=1e-12)

    def test_all_active_is_hedge(self, log_loss, random_distributions):
        xs = random_distributions(10, 3)
        a = b = hedge_init([1.0, 2.0, 3.0])
        for x in xs:
            pa, _, a = specialist_step(a, [1, 2, 3], x, 0, log_loss)
            pb, _, b = hedge_step(b, x, 0, log_loss)
            assert pa.allclose(pb)

    def test_inactive_mass_does_not_shrink_under_square_loss(self, square_loss, rng):
        for _ in range(200):
            size = int(rng.integers(2, 7))
            state = hedge_init(rng.uniform(0.1, 2.0, size=size), square_loss.eta)
            active = np.sort(rng.choice(np.arange(1, size + 1), size=int(rng.integers(1, size)), replace=False))
            inactive = np.setdiff1d(np.arange(size), active - 1)
            before = state.weights[inactive]
            _, _, state = specialist_step(state, active, rng.uniform(0.0, 1.0, size=active.size),
                                          float(rng.uniform()), square_loss)
            assert np.all(state.weights[inactive] >= before * (1.0 - 1e-12))

    @pytest.mark.bounds
    @pytest.mark.parametrize("loss", ["log_loss", "square_loss"])
    def test_regret_within_bound_for_random_active_sets(self, loss, request, rng):
        model = request.getfixturevalue(loss)
        pi = rng.uniform(0.01, 5.0, size=6)
        state = hedge_init(pi, model.eta)
        charged, union = np.zeros(6), set()
        for _ in range(40):
            active = np.flatnonzero(rng.random(6) < 0.4) + 1
            if active.size == 0:
                active = np.array([1])
            if loss == "log_loss":
                p = rng.uniform(0.02, 0.98, size=active.size)
                xs, y = np.column_stack([1.0 - p, p]), int(rng.integers(2))
            else:
                xs, y = rng.uniform(0.0, 1.0, size=active.size), float(rng.uniform())
            _, learner_loss, state = specialist_step(state, active, xs, y, model)
            round_losses = np.full(6, learner_loss)
            round_losses[active - 1] = model.losses(xs, y)
            charged += round_losses
            union.update(int(i) for i in active)
        for i in union:
            regret = state.learner_loss - charged[i - 1]
            assert regret <= bounds.bound_specialist(pi, sorted(union), i, model.eta) + 1e-9

    def test_rejects_empty_active_set(self, log_loss):
        with pytest.raises(InvalidInputError):
            specialist_step(hedge_init([1.0]), [], np.empty((0, 2)), 0, log_loss)


class TestGrowingHedge:
    """Test cases for GrowingHedge step functions and aggregator."""

    def test_step_before_admit_fails(self, log_loss):
        with pytest.raises(InvalidInputError):
            gh_step(gh_init(), np.array([[0.5, 0.5]]), 0, log_loss)
        with pytest.raises(DegenerateStateError):
            gh_init().weights

    def test_admit_checks_priors(self):
        with pytest.raises(InvalidInputError):
            gh_admit(gh_init(), 2, [1.0])
        with pytest.raises(InvalidInputError):
            gh_admit(gh_init(), 1, [0.0])
        assert gh_admit(gh_init(), 0, []).size == 0

    def test_entrant_starts_at_learner_loss(self, log_loss, random_distributions):
        """An entrant at round t has unnormalized weight pi exp(-eta L_{t-1})."""
        xs = random_distributions(6, 2)
        state = gh_admit(gh_init(), 2, [0.5, 0.5])
        for x in xs:
            _, _, state = gh_step(state, x, 1, log_loss)
        state = gh_admit(state, 1, [0.25])
        expected = 0.25 * math.exp(-state.learner_loss)
        assert state.unnormalized_weights()[-1] == pytest.approx(expected, rel=1e-12)

    def test_matches_hedge_on_fixed_set(self, square_loss, rng):
        priors = np.array([1.0, 2.0, 3.0])
        gh = gh_admit(gh_init(square_loss.eta), 3, priors)
        hedge = hedge_init(priors, square_loss.eta)
        for _ in range(20):
            x, y = rng.uniform(0.0, 1.0, size=3), float(rng.uniform())
            pg, _, gh = gh_step(gh, x, y, square_loss)
            ph, _, hedge = hedge_step(hedge, x, y, square_loss)
            assert pg.as_float() == pytest.approx(ph.as_float(), rel=1e-12)

    def test_matches_specialist_on_universe(self, bernoulli_scenario, recorded):
        schedule, model = bernoulli_scenario.schedule, bernoulli_scenario.model
        priors = PriorWeights(PriorPreset.INVERSE_INDEX).realize(schedule)
        xs, ys = recorded(bernoulli_scenario)
        universe, state = hedge_init(priors), gh_init()
        for t in range(1, bernoulli_scenario.horizon + 1):
            state = gh_admit(state, schedule.count(t), priors[schedule.entered(t - 1):schedule.entered(t)])
            expected, _, universe = specialist_step(universe, range(1, schedule.entered(t) + 1),
                                                    xs[t - 1], ys[t - 1], model)
            prediction, _, state = gh_step(state, xs[t - 1], ys[t - 1], model)
            np.testing.assert_allclose(prediction.value, expected.value, rtol=1e-12)

    def test_coincides_with_fresh_markov_hedge_under_log_loss(self, bernoulli_scenario, recorded):
        schedule, model = bernoulli_scenario.schedule, bernoulli_scenario.model
        priors = PriorWeights(PriorPreset.ENTRY_TIME_UNIFORM).realize(schedule)
        xs, ys = recorded(bernoulli_scenario)
        gh = gh_init()
        fmh = fmh_init(priors[:schedule.entered(1)])
        for t in range(1, bernoulli_scenario.horizon + 1):
            gh = gh_admit(gh, schedule.count(t), priors[schedule.entered(t - 1):schedule.entered(t)])
            pg, _, gh = gh_step(gh, xs[t - 1], ys[t - 1], model)
            pf, _, fmh = fmh_step(fmh, xs[t - 1], ys[t - 1], model,
                                  priors[schedule.entered(t):schedule.entered(t + 1)])
            np.testing.assert_allclose(pg.value, pf.value, rtol=1e-12)

    def test_prior_scale_invariance(self, drifting_scenario, recorded):
        schedule, model = drifting_scenario.schedule, drifting_scenario.model
        base = PriorWeights(PriorPreset.ENTRY_UNIFORM)
        xs, ys = recorded(drifting_scenario)
        states = [gh_init(model.eta), gh_init(model.eta)]
        priors = [base.realize(schedule), base.scaled(1000.0).realize(schedule)]
        for t in range(1, drifting_scenario.horizon + 1):
            predictions = []
            for j in range(2):
                entering = priors[j][schedule.entered(t - 1):schedule.entered(t)]
                states[j] = gh_admit(states[j], schedule.count(t), entering)
                prediction, _, states[j] = gh_step(states[j], xs[t - 1], ys[t - 1], model)
                predictions.append(prediction.as_float())
            assert predictions[0] == pytest.approx(predictions[1], rel=1e-12)

    def test_ops_grow_with_entered_experts(self, growing_schedule, log_loss):
        state = gh_init()
        for t in range(1, growing_schedule.horizon + 1):
            state = gh_admit(state, growing_schedule.count(t), np.ones(growing_schedule.count(t)))
            xs = np.full((state.size, 2), 0.5)
            _, _, state = gh_step(state, xs, 0, log_loss)
        admitted = growing_schedule.total
        stepped = sum(growing_schedule.entered(t) for t in range(1, growing_schedule.horizon + 1))
        assert state.ops == admitted + stepped

    def test_aggregator_bound_holds(self, bernoulli_scenario, sample_config):
        report = ExperimentEngine().run_experiment(
            bernoulli_scenario, sample_config("growing_hedge", PriorPreset.ENTRY_TIME_UNIFORM))
        slack = report.constant_bounds - report.constant_regrets
        assert np.all(np.isfinite(report.constant_bounds))
        assert slack.min() >= -1e-9

    def test_aggregator_predict_admits_entrants(self, growing_schedule, log_loss, sample_config):
        algorithm = algorithm_registry.create_algorithm(sample_config("growing_hedge"), growing_schedule, log_loss)
        algorithm.start()
        assert algorithm.weights().size == 2
        prediction = algorithm.predict(np.array([[0.5, 0.5], [0.1, 0.9]]))
        assert prediction.probability(1) == pytest.approx(0.7)


class TestHedgeAggregator:
    """Test cases for the fixed-set aggregator."""

    def test_rejects_growing_schedule(self, growing_schedule, log_loss, sample_config):
        with pytest.raises(InvalidInputError):
            algorithm_registry.create_algorithm(sample_config("hedge"), growing_schedule, log_loss)

    def test_constant_bound(self, fixed_schedule, log_loss, sample_config):
        algorithm = algorithm_registry.create_algorithm(sample_config("hedge"), fixed_schedule, log_loss)
        assert algorithm.bound("constant", 2, 10) == pytest.approx(math.log(4))
        assert algorithm.bound("fresh", None, 10) is None

    def test_unknown_algorithm(self, fixed_schedule, log_loss, sample_config):
        with pytest.raises(InvalidInputError):
            algorithm_registry.create_algorithm(sample_config("nope"), fixed_schedule, log_loss)

    def test_registry_lists_every_preset(self):
        from config import ALGORITHM_PRESETS
        assert set(algorithm_registry.get_available_algorithms()) == set(ALGORITHM_PRESETS)

    def test_eta_override_flagged(self, fixed_schedule, log_loss, sample_config):
        algorithm = algorithm_registry.create_algorithm(sample_config("hedge", eta=0.5), fixed_schedule, log_loss)
        assert algorithm.eta == 0.5
        assert algorithm.eta_overridden

    def test_fixed_set_schedule(self):
        assert EntrySchedule.fixed(2, 3).is_fixed()
