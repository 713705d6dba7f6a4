"""
Property suites run by ``verify``.

Every check draws a random instance from its seed and returns a slack:
bound minus regret for the bound checks, minus the largest discrepancy for
the equivalence checks. A check fails on a seed when its slack drops below
minus the check's tolerance.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from config import get_settings
from core.algorithms import AlgorithmConfig
from core.algorithms.growing import gh_admit, gh_init, gh_step
from core.algorithms.growing_markov import fmh_init, fmh_step, gmh_init, gmh_step
from core.algorithms.hedge import hedge_init, specialist_step
from core.algorithms.markov import DenseKernel, FreshKernel, GrowingFreshKernel, mh_init, mh_step
from core.algorithms.sleeping import (
    WakeSleepRates,
    gsmh_admit,
    gsmh_init,
    gsmh_step,
    smh_init,
    smh_step,
    universe_initial,
    universe_wake_kernels,
)
from core.harness.engine import ExperimentEngine
from core.harness.scenarios import Scenario, fuzz_scenario, make_rng
from core.losses import LossModel
from core.oracle import bounds, display
from core.oracle.brute_force import brute_force_sequence_aggregation, brute_force_sleeping_aggregation
from core.oracle.comparators import (
    ComparatorClass,
    ComparatorClassSpec,
    iter_comparators,
    sample_comparator,
)
from core.priors import PriorPreset, PriorWeights, RateSequence
from core.schedule import EntrySchedule

logger = logging.getLogger(__name__)

SUITE_NAMES = ("oracle", "bounds", "coincidence")

FUZZ_PRESETS = [p for p in PriorPreset if p != PriorPreset.CUSTOM]


@dataclass
class CheckResult:
    """Outcome of one check over a range of seeds."""
    name: str
    tolerance: float
    runs: int = 0
    worst_slack: float = math.inf
    worst_seed: Optional[int] = None
    violations: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, seed: int, slack: float):
        self.runs += 1
        if math.isnan(slack) or slack < self.worst_slack:
            self.worst_slack, self.worst_seed = slack, seed
        if math.isnan(slack) or slack < -self.tolerance:
            self.violations.append(seed)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "runs": self.runs,
            "worst_slack": self.worst_slack,
            "worst_seed": self.worst_seed,
            "tolerance": self.tolerance,
            "violations": list(self.violations),
        }


@dataclass
class SuiteResult:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict:
        return {"suite": self.suite, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[int], float]
    tolerance: float
    seeded: bool = True


# Helpers

def _gap(actual, expected) -> float:
    """Largest absolute difference relative to the size of ``expected``."""
    actual, expected = np.asarray(actual, dtype=float), np.asarray(expected, dtype=float)
    scale = max(float(np.max(np.abs(expected))), 1e-300)
    return float(np.max(np.abs(actual - expected))) / scale


def _linear_model() -> LossModel:
    # the point prediction of an expert is its loss
    return LossModel.custom(lambda arr, y: arr, eta=1.0)


def _random_prior(rng: np.random.Generator) -> PriorWeights:
    return PriorWeights(FUZZ_PRESETS[int(rng.integers(len(FUZZ_PRESETS)))])


def _record(scenario: Scenario) -> Tuple[List[np.ndarray], List]:
    """Expert predictions of the entered experts and outcomes, round by round."""
    scenario.panel.reset()
    xs, ys = [], []
    for t in range(1, scenario.horizon + 1):
        x = scenario.panel.predict(t)
        y = scenario.outcome(t, None)
        scenario.panel.observe(t, y)
        xs.append(x)
        ys.append(y)
    return xs, ys


def _pad(x: np.ndarray, size: int) -> np.ndarray:
    """Fill the rows of unentered experts with a valid placeholder prediction."""
    if len(x) == size:
        return x
    return np.concatenate([x, np.repeat(x[:1], size - len(x), axis=0)])


def _charged_slack(learner_losses: np.ndarray, expert_losses: np.ndarray, schedule: EntrySchedule,
                   bound_matrix: np.ndarray) -> float:
    """min over rounds t and entered experts i of bound[t, i] - regret_i(t)."""
    charged = np.where(np.isnan(expert_losses), learner_losses[:, np.newaxis], expert_losses)
    regret = np.cumsum(learner_losses)[:, np.newaxis] - np.cumsum(charged, axis=0)
    entered = np.arange(1, schedule.total + 1)[np.newaxis, :] <= schedule.cumulative[:, np.newaxis]
    return float(np.min(np.where(entered, bound_matrix - regret, np.inf)))


def _engine() -> ExperimentEngine:
    return ExperimentEngine()


# Oracle suite

def check_markov_oracle(seed: int) -> float:
    """MarkovHedge against the enumerated sequence mixture, random kernels and losses in [0, 3]."""
    rng = make_rng(seed)
    size, horizon = int(rng.integers(1, 4)), int(rng.integers(1, 7))
    theta_1 = rng.dirichlet(np.ones(size))
    kernels = [rng.dirichlet(np.ones(size), size=size).T for _ in range(horizon)]
    losses = rng.uniform(0.0, 3.0, size=(horizon, size))
    model = _linear_model()
    reference = brute_force_sequence_aggregation(theta_1, kernels, losses, [0] * horizon, model)

    kernel = DenseKernel(lambda t: kernels[t - 2])
    state = mh_init(theta_1, model.eta)
    gap = 0.0
    for t in range(horizon):
        gap = max(gap, _gap(state.v, reference.marginals[t]))
        prediction, _, state = mh_step(state, kernel, losses[t], 0, model)
        gap = max(gap, _gap(prediction.value, reference.predictions[t].value))
    return -gap


def check_sleeping_oracle(seed: int) -> float:
    """SleepingMarkovHedge against the enumerated (expert, wake pattern) mixture."""
    rng = make_rng(seed)
    size, horizon = int(rng.integers(1, 4)), int(rng.integers(1, 6))
    prior = rng.uniform(0.1, 1.0, size=size)
    initial = rng.dirichlet(np.ones(2), size=size)
    kernels = [np.stack([rng.dirichlet(np.ones(2), size=2).T for _ in range(size)]) for _ in range(horizon)]
    losses = rng.uniform(0.0, 3.0, size=(horizon, size))
    model = _linear_model()
    reference = brute_force_sleeping_aggregation(prior, initial, kernels, losses, [0] * horizon, model)

    state = smh_init(prior, initial, model.eta)
    gap = 0.0
    for t in range(horizon):
        gap = max(gap, _gap(state.awake, reference.marginals[t]))
        prediction, _, state = smh_step(state, lambda r: kernels[r - 2], losses[t], 0, model)
        gap = max(gap, _gap(prediction.value, reference.predictions[t].value))
    return -gap


def check_fresh_universe(seed: int) -> float:
    """FreshMarkovHedge on entered experts against MarkovHedge on the muted universe."""
    scenario = fuzz_scenario(seed, max_horizon=30, max_experts=8)
    schedule, model = scenario.schedule, scenario.model
    priors = _random_prior(make_rng(seed + 1)).realize(schedule)
    xs, ys = _record(scenario)

    theta_1 = np.zeros(schedule.total)
    theta_1[:schedule.entered(1)] = priors[:schedule.entered(1)]
    universe, kernel = mh_init(theta_1, model.eta), FreshKernel(schedule, priors)
    state = fmh_init(priors[:schedule.entered(1)], model.eta)
    gap = 0.0
    for t in range(1, scenario.horizon + 1):
        entrants = priors[schedule.entered(t):schedule.entered(t + 1)]
        expected, _, universe = mh_step(universe, kernel, _pad(xs[t - 1], schedule.total), ys[t - 1], model)
        prediction, _, state = fmh_step(state, xs[t - 1], ys[t - 1], model, entrants)
        gap = max(gap, _gap(prediction.value, expected.value))
    return -gap


def check_growing_universe(seed: int) -> float:
    """GrowingMarkovHedge on entered experts against MarkovHedge on the muted universe."""
    scenario = fuzz_scenario(seed, max_horizon=30, max_experts=8)
    schedule, model = scenario.schedule, scenario.model
    priors = _random_prior(make_rng(seed + 1)).realize(schedule)
    xs, ys = _record(scenario)

    theta_1 = np.zeros(schedule.total)
    theta_1[:schedule.entered(1)] = priors[:schedule.entered(1)]
    universe, kernel = mh_init(theta_1, model.eta), GrowingFreshKernel(schedule, priors)
    state = gmh_init(priors[:schedule.entered(1)], model.eta)
    gap = 0.0
    for t in range(1, scenario.horizon + 1):
        entrants = priors[schedule.entered(t):schedule.entered(t + 1)]
        expected, _, universe = mh_step(universe, kernel, _pad(xs[t - 1], schedule.total), ys[t - 1], model)
        prediction, _, state = gmh_step(state, xs[t - 1], ys[t - 1], model, entrants)
        gap = max(gap, _gap(prediction.value, expected.value))
    return -gap


def check_sleeping_universe(seed: int) -> float:
    """GrowingSleepingMarkovHedge against SleepingMarkovHedge on the universe."""
    scenario = fuzz_scenario(seed, max_horizon=30, max_experts=8)
    schedule, model = scenario.schedule, scenario.model
    priors = _random_prior(make_rng(seed + 1)).realize(schedule)
    rates = WakeSleepRates()
    xs, ys = _record(scenario)

    universe = smh_init(priors, universe_initial(schedule), model.eta)
    kernels = universe_wake_kernels(schedule, rates)
    state = gsmh_init(model.eta)
    gap = 0.0
    for t in range(1, scenario.horizon + 1):
        state = gsmh_admit(state, priors[schedule.entered(t - 1):schedule.entered(t)])
        expected, _, universe = smh_step(universe, kernels, _pad(xs[t - 1], schedule.total), ys[t - 1], model)
        prediction, _, state = gsmh_step(state, xs[t - 1], ys[t - 1], model, *rates.at(t + 1))
        gap = max(gap, _gap(prediction.value, expected.value))
    return -gap


# Bounds suite

def check_growing_hedge_bound(seed: int) -> float:
    """Regret of GrowingHedge against every expert over [tau_i, t] for every t."""
    scenario = fuzz_scenario(seed, max_horizon=200, max_experts=50)
    prior = _random_prior(make_rng(seed + 1))
    report = _engine().run_experiment(scenario, AlgorithmConfig("growing_hedge", "growing_hedge", prior=prior))
    schedule = scenario.schedule
    pi = prior.realize(schedule)
    partial = bounds.prior_partial_sums(pi)
    bound_matrix = np.log(partial[schedule.cumulative][:, np.newaxis] / pi[np.newaxis, :]) / report.eta
    return _charged_slack(report.learner_losses, report.expert_losses, schedule, bound_matrix)


def check_mixture_bound(seed: int) -> float:
    """Hedge against random mixtures u of experts: regret <= KL(u || pi) / eta."""
    scenario = fuzz_scenario(seed, max_horizon=200, max_experts=50, fixed=True)
    rng = make_rng(seed + 1)
    prior = _random_prior(rng)
    report = _engine().run_experiment(scenario, AlgorithmConfig("hedge", "hedge", prior=prior))
    pi = prior.realize(scenario.schedule)
    totals = report.expert_losses.sum(axis=0)
    slack = math.inf
    for _ in range(100):
        u = rng.dirichlet(np.full(pi.size, 0.5))
        regret = report.total_loss - float(u @ totals)
        slack = min(slack, bounds.bound_mixture(u, pi, report.eta) - regret)
    return slack


def _binary_or_point(rng: np.random.Generator,
                     seed: int) -> Tuple[LossModel, Callable[[int], np.ndarray], Callable[[], object]]:
    """Log loss on binary forecasts for even seeds, square loss on [0, 1] for odd ones."""
    if seed % 2 == 0:
        def forecasts(size):
            p = rng.uniform(0.02, 0.98, size=size)
            return np.column_stack([1.0 - p, p])
        return LossModel.log_loss(2), forecasts, lambda: int(rng.integers(2))
    return LossModel.square_loss(0.0, 1.0), lambda size: rng.uniform(0.0, 1.0, size=size), lambda: float(rng.uniform())


def check_specialist_bound(seed: int) -> float:
    """Specialist Hedge with random active sets and an unnormalized prior, against every expert ever active."""
    rng = make_rng(seed)
    size, horizon = int(rng.integers(1, 11)), int(rng.integers(1, 51))
    pi = rng.uniform(0.01, 5.0, size=size)
    model, forecasts, outcome = _binary_or_point(rng, seed)

    state = hedge_init(pi, model.eta)
    charged = np.zeros(size)
    union = set()
    for _ in range(horizon):
        active = np.flatnonzero(rng.random(size) < 0.5) + 1
        if active.size == 0:
            active = np.array([int(rng.integers(1, size + 1))])
        xs = forecasts(size)[active - 1]
        y = outcome()
        _, learner_loss, state = specialist_step(state, active, xs, y, model)
        round_losses = np.full(size, learner_loss)
        round_losses[active - 1] = model.losses(xs, y)
        charged += round_losses
        union.update(int(i) for i in active)

    return min(bounds.bound_specialist(pi, sorted(union), i, model.eta) - (state.learner_loss - charged[i - 1])
               for i in union)


def check_markov_bound(seed: int) -> float:
    """MarkovHedge with random dense kernels against every sequence of a fixed set."""
    rng = make_rng(seed)
    size, horizon = int(rng.integers(1, 4)), int(rng.integers(1, 7))
    theta_1 = rng.dirichlet(np.ones(size))
    kernels = [rng.dirichlet(np.ones(size), size=size).T for _ in range(horizon)]
    model, forecasts, outcome = _binary_or_point(rng, seed)

    kernel = DenseKernel(lambda t: kernels[t - 2])
    state = mh_init(theta_1, model.eta)
    losses = np.empty((horizon, size))
    for t in range(horizon):
        xs, y = forecasts(size), outcome()
        losses[t] = model.losses(xs, y)
        _, _, state = mh_step(state, kernel, xs, y, model)

    schedule = EntrySchedule.fixed(size, horizon)
    slack = math.inf
    for comparator in iter_comparators(ComparatorClass.ADMISSIBLE, schedule, horizon, horizon - 1):
        regret = state.learner_loss - comparator.loss(losses)
        slack = min(slack, bounds.bound_markov(theta_1, kernels, comparator.indices, model.eta) - regret)
    return slack


def check_exp_concavity(seed: int) -> float:
    """l(sum v_i x_i, y) <= -(1/eta) ln sum v_i exp(-eta l(x_i, y)) for both loss families."""
    rng = make_rng(seed)
    slack = math.inf
    for _ in range(50):
        size = int(rng.integers(1, 6))
        v = rng.dirichlet(np.ones(size))
        alphabet = int(rng.integers(2, 5))
        model = LossModel.log_loss(alphabet)
        xs = rng.dirichlet(np.ones(alphabet), size=size)
        y = int(rng.integers(alphabet))
        slack = min(slack, model.mixability_bound(v, model.losses(xs, y)) - model.loss(model.mix(v, xs), y))

        lower = float(rng.uniform(-2.0, 1.0))
        model = LossModel.square_loss(lower, lower + float(rng.uniform(0.5, 3.0)))
        xs = rng.uniform(model.lower, model.upper, size=size)
        y = float(rng.uniform(model.lower, model.upper))
        slack = min(slack, model.mixability_bound(v, model.losses(xs, y)) - model.loss(model.mix(v, xs), y))
    return slack


def _enumerated_slack(scenario: Scenario, preset: str, classes: Sequence[ComparatorClassSpec],
                      prior: Optional[PriorWeights] = None, alpha: Optional[RateSequence] = None) -> float:
    config = AlgorithmConfig(preset, preset, prior=prior or PriorWeights(), alpha=alpha)
    report = _engine().run_experiment(scenario, config, classes)
    return report.worst_slack


def check_fresh_admissible_bounds(seed: int) -> float:
    """GrowingHedge and FreshMarkovHedge on fresh sequences, GrowingMarkovHedge on admissible ones."""
    scenario = fuzz_scenario(seed, max_horizon=10, max_experts=4)
    prior = _random_prior(make_rng(seed + 1))
    fresh = [ComparatorClassSpec(ComparatorClass.FRESH, 2)]
    admissible = [ComparatorClassSpec(ComparatorClass.ADMISSIBLE, 2)]
    return min(
        _enumerated_slack(scenario, "growing_hedge", fresh, prior),
        _enumerated_slack(scenario, "fresh_markov_hedge", fresh, prior),
        _enumerated_slack(scenario, "growing_markov_hedge", admissible, prior),
    )


def check_sparse_bounds(seed: int) -> float:
    """GrowingSleepingMarkovHedge on every sparse sequence with n <= 3 and k <= 2."""
    scenario = fuzz_scenario(seed, max_horizon=8, max_experts=4)
    prior = _random_prior(make_rng(seed + 1))
    sparse = [ComparatorClassSpec(ComparatorClass.SPARSE, 2, 3)]
    return _enumerated_slack(scenario, "growing_sleeping_markov_hedge", sparse, prior)


def check_sleeping_exact_bound(seed: int) -> float:
    """SleepingMarkovHedge with random per-expert kernels against every sequence of a fixed set."""
    rng = make_rng(seed)
    size, horizon = int(rng.integers(1, 4)), int(rng.integers(1, 6))
    prior = rng.uniform(0.1, 1.0, size=size)
    initial = rng.dirichlet(np.ones(2), size=size)
    kernels = [np.stack([rng.dirichlet(np.ones(2), size=2).T for _ in range(size)]) for _ in range(horizon)]
    model = LossModel.log_loss(2)
    p = rng.uniform(0.05, 0.95, size=(horizon, size))
    outcomes = rng.integers(0, 2, size=horizon)

    state = smh_init(prior, initial, model.eta)
    losses = np.empty((horizon, size))
    for t in range(horizon):
        xs = np.column_stack([1.0 - p[t], p[t]])
        losses[t] = model.losses(xs, int(outcomes[t]))
        _, _, state = smh_step(state, lambda r: kernels[r - 2], xs, int(outcomes[t]), model)

    schedule = EntrySchedule.fixed(size, horizon)
    slack = math.inf
    for comparator in iter_comparators(ComparatorClass.SPARSE, schedule, horizon, horizon - 1, size):
        regret = state.learner_loss - comparator.loss(losses)
        bound = bounds.bound_sleeping_markov(prior, initial, kernels, comparator, model.eta)
        slack = min(slack, bound - regret)
    return slack


def check_sparse_display(seed: int) -> float:
    """The closed sparse form with pi = 1/(tau m) and alpha = beta = 1/t on longer runs."""
    scenario = fuzz_scenario(seed, max_horizon=100, max_experts=20)
    prior = PriorWeights(PriorPreset.ENTRY_TIME_UNIFORM)
    config = AlgorithmConfig("growing_sleeping_markov_hedge", "growing_sleeping_markov_hedge", prior=prior)
    report = _engine().run_experiment(scenario, config)
    rng = make_rng(seed + 1)
    slack = math.inf
    for _ in range(20):
        comparator = sample_comparator(rng, scenario.schedule, scenario.horizon, 3, 3)
        regret = report.total_loss - comparator.loss(report.expert_losses)
        slack = min(slack, display.display_sparse(scenario.schedule, comparator, report.eta) - regret)
    return slack


def _sampled_share_slack(scenario: Scenario, config: AlgorithmConfig, rng: np.random.Generator,
                         samples: int) -> float:
    engine = _engine()
    report = engine.run_experiment(scenario, config)
    algorithm = engine.create_algorithm(scenario, config)
    slack = math.inf
    for _ in range(samples):
        comparator = sample_comparator(rng, scenario.schedule, scenario.horizon, 5)
        regret = report.total_loss - comparator.loss(report.expert_losses)
        slack = min(slack, algorithm.bound(ComparatorClass.ADMISSIBLE, comparator, scenario.horizon) - regret)
    return slack


def check_share_bounds(seed: int) -> float:
    """Fixed Share and Decreasing Share: all sequences of small instances, sampled ones of larger instances."""
    rng = make_rng(seed + 1)
    alpha = RateSequence.constant(float(rng.uniform(0.01, 0.3)))
    small = fuzz_scenario(seed, max_horizon=10, max_experts=4, fixed=True)
    admissible = [ComparatorClassSpec(ComparatorClass.ADMISSIBLE, 2)]
    slack = min(
        _enumerated_slack(small, "fixed_share", admissible, alpha=alpha),
        _enumerated_slack(small, "decreasing_share", admissible),
    )
    large = fuzz_scenario(seed, max_horizon=100, max_experts=8, fixed=True)
    for preset, rate in (("fixed_share", alpha), ("decreasing_share", None)):
        config = AlgorithmConfig(preset, preset, alpha=rate)
        slack = min(slack, _sampled_share_slack(large, config, rng, 20))
    return slack


def check_telescoping(_seed: int) -> float:
    """sum_{t=2}^T ln(t/(t-1)) = ln T."""
    return -max(abs(bounds.telescoping_sum(horizon) - math.log(horizon)) for horizon in (1, 2, 10, 1000, 100_000))


# Coincidence suite

def _coincidence(seed: int, other: str, family: Optional[str]) -> float:
    scenario = fuzz_scenario(seed, max_horizon=100, max_experts=20, family=family)
    prior = _random_prior(make_rng(seed + 1))
    engine = _engine()
    reference = engine.run_experiment(scenario, AlgorithmConfig("growing_hedge", "growing_hedge", prior=prior))
    candidate = engine.run_experiment(scenario, AlgorithmConfig(other, other, prior=prior))
    gap = np.abs(candidate.learner_losses - reference.learner_losses) / np.maximum(1.0, np.abs(reference.learner_losses))
    return -float(gap.max())


def check_fresh_markov_coincidence(seed: int) -> float:
    """GrowingHedge and FreshMarkovHedge suffer the same losses under log loss."""
    return _coincidence(seed, "fresh_markov_hedge", "bernoulli_forecasters")


def check_specialist_coincidence(seed: int) -> float:
    """GrowingHedge and the specialist construction on the universe suffer the same losses."""
    return _coincidence(seed, "specialist_hedge", None)


def check_specialist_universe(seed: int) -> float:
    """GrowingHedge step functions against specialist steps on the universe, prediction by prediction."""
    scenario = fuzz_scenario(seed, max_horizon=50, max_experts=10)
    schedule, model = scenario.schedule, scenario.model
    priors = _random_prior(make_rng(seed + 1)).realize(schedule)
    xs, ys = _record(scenario)

    universe = hedge_init(priors, model.eta)
    state = gh_init(model.eta)
    gap = 0.0
    for t in range(1, scenario.horizon + 1):
        state = gh_admit(state, schedule.count(t), priors[schedule.entered(t - 1):schedule.entered(t)])
        active = range(1, schedule.entered(t) + 1)
        expected, _, universe = specialist_step(universe, active, xs[t - 1], ys[t - 1], model)
        prediction, _, state = gh_step(state, xs[t - 1], ys[t - 1], model)
        gap = max(gap, _gap(prediction.value, expected.value))
    return -gap


def suite_checks(suite: str) -> List[Check]:
    tolerance = get_settings().tolerance
    if suite == "oracle":
        return [
            Check("markov_hedge_vs_brute_force", check_markov_oracle, 1e-9),
            Check("sleeping_markov_hedge_vs_brute_force", check_sleeping_oracle, 1e-9),
            Check("fresh_markov_hedge_vs_universe", check_fresh_universe, 1e-9),
            Check("growing_markov_hedge_vs_universe", check_growing_universe, 1e-9),
            Check("growing_sleeping_vs_universe", check_sleeping_universe, 1e-9),
        ]
    if suite == "bounds":
        return [
            Check("growing_hedge_constant", check_growing_hedge_bound, tolerance),
            Check("hedge_mixture", check_mixture_bound, tolerance),
            Check("specialist", check_specialist_bound, tolerance),
            Check("markov_hedge_dense", check_markov_bound, tolerance),
            Check("exp_concavity", check_exp_concavity, tolerance),
            Check("fresh_and_admissible", check_fresh_admissible_bounds, tolerance),
            Check("sparse", check_sparse_bounds, tolerance),
            Check("sleeping_markov_exact", check_sleeping_exact_bound, tolerance),
            Check("sparse_closed_form", check_sparse_display, tolerance),
            Check("fixed_and_decreasing_share", check_share_bounds, tolerance),
            Check("telescoping", check_telescoping, 1e-12, seeded=False),
        ]
    if suite == "coincidence":
        return [
            Check("growing_hedge_vs_fresh_markov_hedge", check_fresh_markov_coincidence, 1e-12),
            Check("growing_hedge_vs_specialist_hedge", check_specialist_coincidence, 1e-12),
            Check("growing_hedge_vs_specialist_steps", check_specialist_universe, 1e-12),
        ]
    raise ValueError(f"Unknown suite: {suite}")


def run_check(check: Check, seeds: int, seed_offset: int = 0) -> CheckResult:
    """One check on seeds seed_offset, ..., seed_offset + seeds - 1 (once for unseeded checks)."""
    outcome = CheckResult(check.name, check.tolerance)
    for seed in (range(seed_offset, seed_offset + seeds) if check.seeded else [seed_offset]):
        outcome.record(seed, check.run(seed))
    return outcome


def run_suite(suite: str, seeds: int, seed_offset: Optional[int] = None) -> SuiteResult:
    """
    Run every check of a suite on ``seeds`` consecutive seeds.

    Args:
        suite: oracle, bounds or coincidence
        seeds: number of seeds per check
        seed_offset: first seed (defaults to settings.suite_seed_offset, then 0)

    Returns:
        Per-check worst slack and offending seeds
    """
    settings = get_settings()
    offset = seed_offset if seed_offset is not None else (settings.suite_seed_offset or 0)
    result = SuiteResult(suite)
    for check in suite_checks(suite):
        outcome = run_check(check, seeds, offset)
        if outcome.passed:
            logger.info(f"{suite}/{check.name}: {outcome.runs} runs, worst slack {outcome.worst_slack:.3e}")
        else:
            logger.error(f"{suite}/{check.name}: violated on seeds {outcome.violations}")
        result.checks.append(outcome)
    return result


def run_suites(name: str, seeds: int, seed_offset: Optional[int] = None) -> List[SuiteResult]:
    """``all`` expands to every suite."""
    names = SUITE_NAMES if name == "all" else (name,)
    return [run_suite(n, seeds, seed_offset) for n in names]
