"""
Experiment engine: runs aggregation algorithms on scenarios and measures regret.
"""

from concurrent.futures import ThreadPoolExecutor
import copy
from typing import Iterable, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from config import get_settings
from core.algorithms import AlgorithmConfig, AlgorithmStatus, BaseAggregator, algorithm_registry
from core.errors import ExperimentError, GrowingExpertsError, GuardExceededError, InvalidInputError
from core.harness.report import ComparatorResult, RegretReport
from core.harness.scenarios import Scenario
from core.oracle import bounds
from core.oracle.comparators import (
    ComparatorClass,
    ComparatorClassSpec,
    check_enumeration_guard,
    iter_comparators,
)

logger = logging.getLogger(__name__)


class ExperimentEngine:
    """
    Drives admit -> predict -> observe for every round and builds the report.

    Expert predictions are requested for the entered experts only; the
    outcome of a round is revealed after the learner's prediction.
    """

    def __init__(self, enumeration_limit: Optional[int] = None):
        settings = get_settings()
        self.enumeration_limit = enumeration_limit or settings.enumeration_limit
        self.tolerance = settings.tolerance
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def create_algorithm(self, scenario: Scenario, config: AlgorithmConfig) -> BaseAggregator:
        return algorithm_registry.create_algorithm(config, scenario.schedule, scenario.model)

    def run_experiment(self,
                       scenario: Scenario,
                       config: AlgorithmConfig,
                       comparator_classes: Sequence[ComparatorClassSpec] = ()) -> RegretReport:
        """
        Run one algorithm on one scenario.

        Args:
            scenario: the instance to play
            config: algorithm configuration (``config.name`` is the preset)
            comparator_classes: classes to evaluate at the final round besides constant experts

        Returns:
            RegretReport with per-round losses, regrets and bounds
        """
        algorithm = self.create_algorithm(scenario, config)
        model, schedule = scenario.model, scenario.schedule
        horizon, total = scenario.horizon, schedule.total

        learner_losses = np.zeros(horizon)
        expert_losses = np.full((horizon, total), np.nan)

        self.logger.info(f"Running {config.algorithm_id} on {scenario.name} (T={horizon}, M_T={total})")
        scenario.panel.reset()
        algorithm.start()
        try:
            for t in range(1, horizon + 1):
                m_t = schedule.entered(t)
                xs = scenario.panel.predict(t)
                prediction = algorithm.predict(xs)
                y = scenario.outcome(t, prediction)
                learner_losses[t - 1] = model.loss(prediction, y)
                expert_losses[t - 1, :m_t] = model.losses(xs, y)
                algorithm.observe(xs, y)
                scenario.panel.observe(t, y)
        except InvalidInputError:
            algorithm.status = AlgorithmStatus.ERROR
            raise
        except GrowingExpertsError as e:
            algorithm.status = AlgorithmStatus.ERROR
            self.logger.error(f"{config.algorithm_id} failed on {scenario.name} at round {t}: {e}")
            raise ExperimentError(f"{config.algorithm_id} failed on {scenario.name} at round {t}: {e}") from e
        algorithm.finish()

        best_losses, best_experts, constant_bounds = self._constant_class(algorithm, learner_losses, expert_losses)
        comparators = [
            self._evaluate_class(algorithm, spec, learner_losses, expert_losses)
            for spec in comparator_classes
            if ComparatorClass(spec.kind) != ComparatorClass.CONSTANT
        ]

        cap = model.loss_cap
        flags = {
            "loss_cap_triggered": bool(math.isfinite(cap) and (
                np.any(learner_losses >= cap) or np.any(np.nan_to_num(expert_losses) >= cap))),
            "eta_overridden": algorithm.eta_overridden,
            "guard_exceeded": [c.kind for c in comparators if c.bound_only],
        }
        if flags["loss_cap_triggered"]:
            self.logger.warning(f"Loss cap {cap} reached in {scenario.name}; bounds assume uncapped losses")
        if flags["eta_overridden"]:
            self.logger.warning(f"{config.algorithm_id} runs with eta={algorithm.eta}, bounds use the same eta")

        return RegretReport(
            scenario=scenario.name,
            algorithm=config.algorithm_id,
            preset=config.name,
            eta=algorithm.eta,
            learner_losses=learner_losses,
            expert_losses=expert_losses,
            best_constant_losses=best_losses,
            best_constant_experts=best_experts,
            constant_bounds=constant_bounds,
            comparators=comparators,
            flags=flags,
            ops=algorithm.ops,
            scenario_info={
                "name": scenario.name,
                "family": scenario.family,
                "seed": scenario.seed,
                "horizon": horizon,
                "experts": total,
                "entry_counts": schedule.counts.tolist(),
            },
        )

    def _constant_class(self, algorithm: BaseAggregator, learner_losses: np.ndarray,
                        expert_losses: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Best constant expert per round, charging experts the learner's loss before they enter."""
        schedule = algorithm.schedule
        horizon = learner_losses.size
        charged = np.where(np.isnan(expert_losses), learner_losses[:, np.newaxis], expert_losses)
        cumulative = np.cumsum(charged, axis=0)
        best_losses = np.empty(horizon)
        best_experts = np.empty(horizon, dtype=np.int64)
        constant_bounds = np.full(horizon, np.nan)
        for t in range(1, horizon + 1):
            m_t = schedule.entered(t)
            i = int(np.argmin(cumulative[t - 1, :m_t]))
            best_losses[t - 1] = cumulative[t - 1, i]
            best_experts[t - 1] = i + 1
            bound = algorithm.bound(ComparatorClass.CONSTANT, i + 1, t)
            if bound is not None:
                constant_bounds[t - 1] = bound
        return best_losses, best_experts, constant_bounds

    def _evaluate_class(self, algorithm: BaseAggregator, spec: ComparatorClassSpec,
                        learner_losses: np.ndarray, expert_losses: np.ndarray) -> ComparatorResult:
        schedule = algorithm.schedule
        horizon = learner_losses.size
        kind = ComparatorClass(spec.kind)
        result = ComparatorResult(kind=kind.value, max_shifts=spec.max_shifts, pool_size=spec.pool_size)
        result.reference_bound = self._reference_bound(kind, spec, schedule.entered(horizon), horizon,
                                                       algorithm.eta)
        try:
            check_enumeration_guard(schedule, horizon, spec.max_shifts, self.enumeration_limit)
        except GuardExceededError as e:
            self.logger.warning(f"{kind.value} comparators reported bound-only: {e}")
            result.bound_only = True
            return result

        total_loss = float(learner_losses.sum())
        rows = np.arange(horizon)
        best, best_loss, count = None, math.inf, 0
        worst_slack, worst = math.inf, None
        for comparator in iter_comparators(kind, schedule, horizon, spec.max_shifts, spec.pool_size,
                                           self.enumeration_limit):
            count += 1
            loss = float(expert_losses[rows, np.asarray(comparator.indices) - 1].sum())
            if loss < best_loss:
                best, best_loss = comparator, loss
            bound = algorithm.bound(kind, comparator, horizon)
            if bound is not None and bound - (total_loss - loss) < worst_slack:
                worst_slack, worst = bound - (total_loss - loss), comparator

        result.count = count
        if best is None:
            return result
        result.best = list(best.indices)
        result.best_loss = best_loss
        result.regret = total_loss - best_loss
        bound = algorithm.bound(kind, best, horizon)
        if bound is not None:
            result.bound = bound
            result.slack = bound - result.regret
        if worst is not None:
            result.worst_slack = worst_slack
            result.worst_comparator = list(worst.indices)
        return result

    @staticmethod
    def _reference_bound(kind: ComparatorClass, spec: ComparatorClassSpec, max_experts: int,
                         horizon: int, eta: float) -> Optional[float]:
        k = min(spec.max_shifts, horizon - 1)
        if kind == ComparatorClass.SPARSE:
            n = min(spec.pool_size or 1, max_experts)
            return bounds.info_bound_sparse(max_experts, n, k, horizon, eta)
        incumbent = 0 if kind == ComparatorClass.FRESH else k
        return bounds.info_bound_admissible(max_experts, horizon, k, incumbent, eta)

    def run_suite(self,
                  scenarios: Iterable[Scenario],
                  configs: Sequence[AlgorithmConfig],
                  comparator_classes: Sequence[ComparatorClassSpec] = (),
                  max_workers: Optional[int] = None) -> List[RegretReport]:
        """
        Every algorithm on every scenario.

        Pairs run in parallel when ``max_workers`` > 1; each pair is
        sequential inside. Reports come back in (scenario, algorithm) order.
        """
        pairs = [(s, c) for s in scenarios for c in configs]
        workers = max_workers or get_settings().max_workers
        if workers <= 1 or len(pairs) <= 1:
            return [self.run_experiment(s, c, comparator_classes) for s, c in pairs]
        # expert panels keep per-run state; every worker plays its own copy
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(self.run_experiment, copy.deepcopy(s), c, comparator_classes) for s, c in pairs]
            return [f.result() for f in futures]
