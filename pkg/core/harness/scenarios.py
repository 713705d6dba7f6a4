"""
Scenario generation: entry schedules, signals and expert panels.

A scenario is fully determined by its ``ScenarioSpec`` and seed. Signals are drawn
upfront from a PCG64 generator; expert predictions are produced round by
round from the outcomes seen so far, so nothing at round t depends on y_t
or later.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence
import logging
import math

import numpy as np

from config import ENTRY_KINDS, SCENARIO_FAMILIES, get_settings
from core.errors import InvalidInputError
from core.losses import LossKind, LossModel, Prediction
from core.schedule import EntrySchedule

logger = logging.getLogger(__name__)

TIGHTNESS_EPSILON = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    """Portable seeded generator (PCG64)."""
    return np.random.Generator(np.random.PCG64(seed))


def make_schedule(kind: str, horizon: int, rng: Optional[np.random.Generator] = None,
                  experts: int = 1, period: int = 5, rounds: Sequence[int] = (1,),
                  rate: float = 0.5, counts: Optional[Sequence[int]] = None) -> EntrySchedule:
    """
    Build an entry schedule.

    Args:
        kind: fixed, periodic, burst, exponential, random or explicit
        horizon: T
        rng: generator for kind=random
        experts: experts per entry event (the whole set for kind=fixed)
        period: rounds between two entries (periodic)
        rounds: burst rounds
        rate: Poisson mean per round (random)
        counts: explicit m_1, ..., padded with zeros up to T

    Returns:
        The entry schedule
    """
    if kind not in ENTRY_KINDS:
        raise InvalidInputError(f"Unknown entry kind: {kind}")
    if horizon < 1:
        raise InvalidInputError(f"Horizon must be positive, got {horizon}")
    m = np.zeros(horizon, dtype=np.int64)
    if kind == "fixed":
        m[0] = experts
    elif kind == "periodic":
        m[::period] = experts
    elif kind == "burst":
        for r in rounds:
            if not 1 <= r <= horizon:
                raise InvalidInputError(f"Burst round {r} outside 1..{horizon}")
            m[r - 1] = experts
    elif kind == "exponential":
        t = 1
        while t <= horizon:
            m[t - 1] = experts
            t *= 2
    elif kind == "random":
        rng = rng if rng is not None else make_rng(0)
        m[:] = rng.poisson(rate, size=horizon)
        m[0] = max(m[0], 1)
    else:
        if counts is None or len(counts) > horizon:
            raise InvalidInputError("Explicit entry needs at most T counts")
        m[:len(counts)] = counts
    return EntrySchedule(m)


class ExpertPanel(ABC):
    """Experts producing predictions from the outcomes observed so far."""

    def __init__(self, schedule: EntrySchedule, model: LossModel):
        self.schedule = schedule
        self.model = model

    def reset(self):
        pass

    @abstractmethod
    def predict(self, t: int) -> np.ndarray:
        """Predictions of experts 1..M_t at round t."""
        pass

    def observe(self, t: int, y: Any):
        pass


class BernoulliForecasters(ExpertPanel):
    """
    Probability forecasters for a binary signal.

    Odd-numbered experts forecast a constant probability; even-numbered
    ones run a Krichevsky-Trofimov estimate on the outcomes seen since
    their entry.
    """

    def __init__(self, schedule: EntrySchedule, model: LossModel, constants: np.ndarray):
        super().__init__(schedule, model)
        self.constants = constants
        self.entry_times = schedule.entry_times()
        self.adaptive = (np.arange(1, schedule.total + 1) % 2) == 0

    def reset(self):
        self._ones = np.zeros(self.schedule.horizon + 1)

    def predict(self, t):
        m_t = self.schedule.entered(t)
        since = self.entry_times[:m_t] - 1
        seen = (t - 1) - since
        ones = self._ones[t - 1] - self._ones[since]
        kt = (ones + 0.5) / (seen + 1.0)
        p = np.where(self.adaptive[:m_t], kt, self.constants[:m_t])
        return np.column_stack([1.0 - p, p])

    def observe(self, t, y):
        self._ones[t] = self._ones[t - 1] + float(y)


class ConstantPointExperts(ExpertPanel):
    """Each expert predicts one fixed point of the square-loss range."""

    def __init__(self, schedule: EntrySchedule, model: LossModel, points: np.ndarray):
        super().__init__(schedule, model)
        self.points = points

    def predict(self, t):
        return self.points[:self.schedule.entered(t)].copy()


class TightnessExperts(ExpertPanel):
    """
    Experts of the worst-case instance: all put their mass on outcome 0
    before the last round; at round T expert i puts 1 - epsilon on outcome i-1.
    """

    def __init__(self, schedule: EntrySchedule, model: LossModel, epsilon: float = TIGHTNESS_EPSILON):
        super().__init__(schedule, model)
        self.epsilon = epsilon

    def predict(self, t):
        m_t, k = self.schedule.entered(t), self.model.alphabet_size
        xs = np.zeros((m_t, k))
        if t < self.schedule.horizon:
            xs[:, 0] = 1.0
            return xs
        if k == 1:
            xs[:, 0] = 1.0
            return xs
        xs[:] = self.epsilon / (k - 1)
        xs[np.arange(m_t), np.arange(m_t)] = 1.0 - self.epsilon
        return xs


Adversary = Callable[[int, Prediction], Any]


@dataclass(eq=False)
class Scenario:
    """A reproducible online-prediction instance."""
    name: str
    family: str
    schedule: EntrySchedule
    model: LossModel
    panel: ExpertPanel
    seed: int
    outcomes: Optional[np.ndarray] = None
    adversary: Optional[Adversary] = None
    metadata: dict = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.schedule.horizon

    def outcome(self, t: int, prediction: Prediction) -> Any:
        """y_t, chosen after the learner has committed to its prediction."""
        if self.adversary is not None:
            return self.adversary(t, prediction)
        y = self.outcomes[t - 1]
        return int(y) if self.model.kind == LossKind.LOG_LOSS else float(y)

    def with_outcomes(self, outcomes: np.ndarray) -> "Scenario":
        """Same panel and schedule with a replaced signal."""
        return Scenario(self.name, self.family, self.schedule, self.model, self.panel, self.seed,
                        outcomes=np.asarray(outcomes), adversary=self.adversary, metadata=dict(self.metadata))


def _bernoulli_signal(rng: np.random.Generator, horizon: int, segment_length: int) -> np.ndarray:
    segments = math.ceil(horizon / segment_length)
    probabilities = np.repeat(rng.uniform(0.05, 0.95, size=segments), segment_length)[:horizon]
    return (rng.random(horizon) < probabilities).astype(np.int64)


def _drifting_signal(rng: np.random.Generator, horizon: int, segment_length: int, noise: float,
                     lower: float, upper: float) -> np.ndarray:
    segments = math.ceil(horizon / segment_length) + 1
    anchors = rng.uniform(lower, upper, size=segments)
    position = np.arange(horizon) / segment_length
    means = np.interp(position, np.arange(segments), anchors)
    return np.clip(means + noise * (upper - lower) * rng.standard_normal(horizon), lower, upper)


def _build_panel(family: str, schedule: EntrySchedule, model: LossModel, rng: np.random.Generator,
                 horizon: int, segment_length: int, noise: float):
    if family == "bernoulli_forecasters":
        if model.kind != LossKind.LOG_LOSS or model.alphabet_size != 2:
            raise InvalidInputError("Bernoulli forecasters need log loss on a binary alphabet")
        constants = rng.uniform(0.05, 0.95, size=schedule.total)
        outcomes = _bernoulli_signal(rng, horizon, segment_length)
        return BernoulliForecasters(schedule, model, constants), outcomes
    if model.kind != LossKind.SQUARE_LOSS:
        raise InvalidInputError("Constant-point experts need square loss")
    points = rng.uniform(model.lower, model.upper, size=schedule.total)
    outcomes = _drifting_signal(rng, horizon, segment_length, noise, model.lower, model.upper)
    return ConstantPointExperts(schedule, model, points), outcomes


def _default_model(family: str, loss_cap: float) -> LossModel:
    if family == "drifting_mean":
        return LossModel.square_loss(0.0, 1.0)
    return LossModel.log_loss(2, loss_cap)


def generate_scenario(spec) -> Scenario:
    """
    Build a scenario from a ``ScenarioSpec``.

    Args:
        spec: validated scenario spec (family, horizon, seed, entry, loss, ...)

    Returns:
        The scenario; identical specs give identical scenarios
    """
    if spec.family not in SCENARIO_FAMILIES:
        raise InvalidInputError(f"Unknown scenario family: {spec.family}")
    rng = make_rng(spec.seed)
    settings = get_settings()

    if spec.family == "adversarial_tightness":
        max_experts = spec.max_experts or spec.entry.experts
        model = spec.loss.build(settings.loss_cap) if spec.loss else LossModel.log_loss(max_experts, settings.loss_cap)
        schedule = _tightness_schedule(spec, max_experts, rng)
        return adversarial_tightness_instance(max_experts, schedule, model, name=spec.name, seed=spec.seed)

    entry = spec.entry
    schedule = make_schedule(entry.kind, spec.horizon, rng, experts=entry.experts, period=entry.period,
                             rounds=entry.rounds, rate=entry.rate, counts=entry.counts)
    model = spec.loss.build(settings.loss_cap) if spec.loss else _default_model(spec.family, settings.loss_cap)
    panel, outcomes = _build_panel(spec.family, schedule, model, rng, spec.horizon, spec.segment_length, spec.noise)

    logger.debug(f"Generated scenario {spec.name}: T={spec.horizon}, M_T={schedule.total}")
    return Scenario(spec.name, spec.family, schedule, model, panel, spec.seed, outcomes=outcomes)


def fuzz_scenario(seed: int, max_horizon: int, max_experts: int, family: Optional[str] = None,
                  min_horizon: int = 1, fixed: bool = False) -> Scenario:
    """
    Random small scenario for property checks: random horizon, random entry
    times with M_T <= ``max_experts`` (all at round 1 when ``fixed``),
    random signal and panel.
    """
    rng = make_rng(seed)
    family = family or str(rng.choice(["bernoulli_forecasters", "drifting_mean"]))
    horizon = int(rng.integers(min_horizon, max_horizon + 1))
    total = int(rng.integers(1, max_experts + 1))
    taus = np.sort(np.concatenate([[1], rng.integers(1, horizon + 1, size=total - 1)]))
    if fixed:
        taus[:] = 1
    schedule = EntrySchedule.from_entry_times(taus, horizon)
    if family == "drifting_mean":
        lower = float(rng.uniform(-2.0, 1.0))
        model = LossModel.square_loss(lower, lower + float(rng.uniform(0.5, 3.0)))
    else:
        model = _default_model(family, get_settings().loss_cap)
    segment_length = int(rng.integers(1, max(2, horizon // 2) + 1))
    panel, outcomes = _build_panel(family, schedule, model, rng, horizon, segment_length, 0.1)
    return Scenario(f"fuzz-{seed}", family, schedule, model, panel, seed, outcomes=outcomes)


def _tightness_schedule(spec, max_experts: int, rng) -> EntrySchedule:
    entry = spec.entry
    if entry.kind == "fixed":
        return EntrySchedule.fixed(max_experts, spec.horizon)
    schedule = make_schedule(entry.kind, spec.horizon, rng, experts=entry.experts, period=entry.period,
                             rounds=entry.rounds, rate=entry.rate, counts=entry.counts)
    if schedule.total != max_experts:
        raise InvalidInputError(f"Entry schedule brings {schedule.total} experts, instance needs {max_experts}")
    return schedule


def adversarial_tightness_instance(max_experts: int, schedule: Optional[EntrySchedule] = None,
                                   model: Optional[LossModel] = None, name: str = "adversarial_tightness",
                                   seed: int = 0, epsilon: float = TIGHTNESS_EPSILON) -> Scenario:
    """
    Log-loss instance on which GrowingHedge with a uniform prior has regret ln M_T.

    Outcomes are 0 before the last round. At round T expert i predicts
    outcome i-1 and the adversary picks the outcome the learner gives the
    least mass, ties broken to the smallest outcome.

    Args:
        max_experts: M_T
        schedule: entry schedule with M_T experts (defaults to one expert per round)
        model: log loss over an alphabet of at least M_T outcomes
        epsilon: mass the experts spread off their chosen outcome at round T
    """
    if max_experts < 1:
        raise InvalidInputError(f"Need at least one expert, got {max_experts}")
    model = model or LossModel.log_loss(max_experts, get_settings().loss_cap)
    if model.kind != LossKind.LOG_LOSS:
        raise InvalidInputError("The tightness instance is defined for log loss only")
    if model.alphabet_size < max_experts:
        raise InvalidInputError(f"Alphabet of size {model.alphabet_size} cannot give each of {max_experts} experts an outcome")
    schedule = schedule or EntrySchedule(np.ones(max_experts, dtype=np.int64))
    if schedule.total != max_experts:
        raise InvalidInputError(f"Schedule brings {schedule.total} experts, expected {max_experts}")

    horizon = schedule.horizon

    def adversary(t: int, prediction: Prediction) -> int:
        if t < horizon:
            return 0
        return int(np.argmin(prediction.value[:max_experts]))

    panel = TightnessExperts(schedule, model, epsilon)
    return Scenario(name, "adversarial_tightness", schedule, model, panel, seed, adversary=adversary,
                    metadata={"max_experts": max_experts, "epsilon": epsilon})
