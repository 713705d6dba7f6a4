"""
Sleeping Markov aggregation: each expert carries a hidden awake/asleep
chain and the learner predicts with the awake experts only.

Weights live on pairs (i, a) with a = 1 for awake and a = 0 for asleep.
Asleep pairs are charged the learner's own loss, so sleeping never changes
their relative standing. Per-expert transitions are 2x2 matrices
K[a, b] = theta(a | b):

    theta(0 | 0) = 1 - beta    theta(0 | 1) = alpha
    theta(1 | 0) = beta        theta(1 | 1) = 1 - alpha
"""

from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Sequence, Union
import math

import numpy as np
from scipy.special import logsumexp

from core.algorithms.base import BaseAggregator, ComparatorClass
from core.errors import DegenerateStateError, InvalidInputError
from core.losses import LossModel, Prediction
from core.oracle import bounds
from core.priors import RateSequence
from core.schedule import EntrySchedule

ASLEEP, AWAKE = 0, 1


def _check_rates(alpha: float, beta: float):
    for name, rate in (("alpha", alpha), ("beta", beta)):
        if not 0.0 < rate < 1.0:
            raise InvalidInputError(f"{name} must lie in (0, 1), got {rate}")


def wake_sleep_kernel(alpha: float, beta: float, size: int = 1) -> np.ndarray:
    """(size, 2, 2) tensor with [i, a, b] = theta(a | b) for every expert."""
    _check_rates(alpha, beta)
    kernel = np.array([[1.0 - beta, alpha], [beta, 1.0 - alpha]])
    return np.broadcast_to(kernel, (size, 2, 2)).copy()


@dataclass(frozen=True)
class WakeSleepRates:
    """Round-dependent rates alpha_t (awake to asleep) and beta_t (asleep to awake)."""
    alpha: RateSequence = RateSequence.inverse_time()
    beta: RateSequence = RateSequence.inverse_time()

    def at(self, t: int):
        return self.alpha.check_probability(t), self.beta.check_probability(t)

    def tensor(self, size: int, t: int) -> np.ndarray:
        return wake_sleep_kernel(*self.at(t), size=size)


KernelSource = Union[np.ndarray, WakeSleepRates, Callable[[int], np.ndarray]]


def _kernel_at(kernels: KernelSource, size: int, t: int) -> np.ndarray:
    if isinstance(kernels, WakeSleepRates):
        return kernels.tensor(size, t)
    kernel = np.asarray(kernels(t) if callable(kernels) else kernels, dtype=float)
    if kernel.shape == (2, 2):
        kernel = np.broadcast_to(kernel, (size, 2, 2))
    if kernel.shape != (size, 2, 2):
        raise InvalidInputError(f"Wake/sleep kernel has shape {kernel.shape}, expected ({size}, 2, 2)")
    if np.any(kernel < 0) or np.any(np.abs(kernel.sum(axis=1) - 1.0) > 1e-12):
        raise InvalidInputError(f"Wake/sleep kernel for round {t} is not column-stochastic")
    return kernel


@dataclass(frozen=True, eq=False)
class SleepingState:
    """Normalized pair weights, shape (M, 2)."""
    v: np.ndarray
    eta: float
    round: int = 1
    learner_loss: float = 0.0
    ops: int = 0

    @property
    def size(self) -> int:
        return int(self.v.shape[0])

    @property
    def awake(self) -> np.ndarray:
        """Awake weights renormalized, the mixing weights of the next prediction."""
        mass = self.v[:, AWAKE].sum()
        if not mass > 0:
            raise DegenerateStateError("No awake mass left")
        return self.v[:, AWAKE] / mass

    @property
    def weights(self) -> np.ndarray:
        return self.awake


def smh_init(prior: Sequence[float], initial: Union[np.ndarray, Sequence[float]],
             eta: float = 1.0) -> SleepingState:
    """
    v_1(i, a) proportional to pi_i theta_{i,1}(a).

    Args:
        prior: pi over the M experts
        initial: (M, 2) per-expert initial distribution, or a single (2,) one shared by all
        eta: learning rate
    """
    prior = np.asarray(prior, dtype=float)
    if prior.ndim != 1 or prior.size == 0 or np.any(prior <= 0):
        raise InvalidInputError("Prior weights must be a non-empty positive vector")
    initial = np.asarray(initial, dtype=float)
    if initial.shape == (2,):
        initial = np.broadcast_to(initial, (prior.size, 2))
    if initial.shape != (prior.size, 2) or np.any(initial < 0):
        raise InvalidInputError(f"Initial wake distribution has shape {initial.shape}")
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    v = prior[:, np.newaxis] * initial
    if not v[:, AWAKE].sum() > 0:
        raise DegenerateStateError("No expert is awake at round 1")
    return SleepingState(v=v / v.sum(), eta=float(eta), ops=2 * prior.size)


def smh_predict(state: SleepingState, xs, model: LossModel) -> Prediction:
    arr = model.stack(xs)
    if len(arr) != state.size:
        raise InvalidInputError(f"{len(arr)} predictions for {state.size} experts")
    return model.mix(state.awake, arr)


def _pair_losses(expert_losses: np.ndarray, learner_loss: float) -> np.ndarray:
    losses = np.empty((expert_losses.size, 2))
    losses[:, ASLEEP] = learner_loss
    losses[:, AWAKE] = expert_losses
    return losses


def smh_step(state: SleepingState, kernels: KernelSource, xs, y: Any, model: LossModel):
    """
    One round: predict with the awake mass, form the pair posterior,
    apply every expert's wake/sleep transition into round t+1.

    Returns:
        (prediction, learner loss, next state)
    """
    prediction = smh_predict(state, xs, model)
    learner_loss = model.loss(prediction, y)
    losses = _pair_losses(model.losses(xs, y), learner_loss)
    support = state.v > 0
    losses = np.where(support, losses, 0.0)
    vm = np.where(support, state.v * np.exp(-state.eta * (losses - losses[support].min())), 0.0)
    vm /= vm.sum()
    kernel = _kernel_at(kernels, state.size, state.round + 1)
    v = np.einsum("iab,ib->ia", kernel, vm)
    next_state = replace(state, v=v / v.sum(), round=state.round + 1,
                         learner_loss=state.learner_loss + learner_loss,
                         ops=state.ops + 2 * state.size)
    return prediction, learner_loss, next_state


def universe_initial(schedule: EntrySchedule) -> np.ndarray:
    """Round-1 wake distribution on all M_T experts: entrants of round 1 split evenly, the rest asleep."""
    initial = np.zeros((schedule.total, 2))
    first = schedule.entered(1)
    initial[:first] = 0.5
    initial[first:, ASLEEP] = 1.0
    return initial


def universe_wake_kernels(schedule: EntrySchedule, rates: WakeSleepRates) -> Callable[[int], np.ndarray]:
    """
    Per-round kernels on all M_T experts reproducing growth: an expert stays
    asleep with certainty until it enters, then wakes with probability 1/2.
    """
    def kernel(t: int) -> np.ndarray:
        tensor = rates.tensor(schedule.total, t)
        before, after = schedule.entered(t - 1), schedule.entered(t)
        tensor[before:after, :, ASLEEP] = 0.5
        tensor[after:, ASLEEP, ASLEEP] = 1.0
        tensor[after:, AWAKE, ASLEEP] = 0.0
        return tensor
    return kernel


@dataclass(frozen=True, eq=False)
class GrowingSleepingState:
    """
    Unnormalized pair log-weights over the entered experts, shape (M_t, 2).

    Stored values are shifted down by ``log_offset``; the entrant rule applies
    the same shift.
    """
    log_w: np.ndarray
    eta: float
    round: int = 1
    learner_loss: float = 0.0
    log_offset: float = 0.0
    ops: int = 0

    @property
    def size(self) -> int:
        return int(self.log_w.shape[0])

    @property
    def awake(self) -> np.ndarray:
        if self.size == 0:
            raise DegenerateStateError("No expert has entered yet")
        awake = self.log_w[:, AWAKE]
        if not np.isfinite(awake.max()):
            raise DegenerateStateError("No awake mass left")
        return np.exp(awake - logsumexp(awake))

    @property
    def weights(self) -> np.ndarray:
        return self.awake


def gsmh_init(eta: float = 1.0) -> GrowingSleepingState:
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    return GrowingSleepingState(log_w=np.empty((0, 2)), eta=float(eta))


def gsmh_admit(state: GrowingSleepingState, priors: Sequence[float]) -> GrowingSleepingState:
    """
    Append entrants with w(i, a) = (pi_i / 2) exp(-eta L_{t-1}) for both a,
    the mass of a pair that slept through every earlier round.
    """
    priors = np.asarray(priors, dtype=float).reshape(-1)
    if priors.size == 0:
        return state
    if np.any(priors <= 0) or not np.all(np.isfinite(priors)):
        raise InvalidInputError("Prior weights must be positive and finite")
    entrant = np.log(priors / 2.0) - state.eta * state.learner_loss - state.log_offset
    rows = np.repeat(entrant[:, np.newaxis], 2, axis=1)
    return replace(state, log_w=np.concatenate([state.log_w, rows]), ops=state.ops + 2 * priors.size)


def gsmh_predict(state: GrowingSleepingState, xs, model: LossModel) -> Prediction:
    arr = model.stack(xs)
    if len(arr) != state.size:
        raise InvalidInputError(f"{len(arr)} predictions for {state.size} entered experts")
    return model.mix(state.awake, arr)


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def gsmh_step(state: GrowingSleepingState, xs, y: Any, model: LossModel,
              alpha: float, beta: float):
    """
    One round over the entered experts; ``alpha`` and ``beta`` are the
    rates of the transition into the next round.

    Returns:
        (prediction, learner loss, next state)
    """
    _check_rates(alpha, beta)
    if state.size == 0:
        raise InvalidInputError("No expert has entered; admit entrants before stepping")
    prediction = gsmh_predict(state, xs, model)
    learner_loss = model.loss(prediction, y)
    losses = _pair_losses(model.losses(xs, y), learner_loss)
    with np.errstate(invalid="ignore"):
        post = state.log_w - state.eta * np.where(np.isfinite(state.log_w), losses, 0.0)
    log_w = np.empty_like(post)
    log_w[:, ASLEEP] = np.logaddexp(_log(1.0 - beta) + post[:, ASLEEP], _log(alpha) + post[:, AWAKE])
    log_w[:, AWAKE] = np.logaddexp(_log(beta) + post[:, ASLEEP], _log(1.0 - alpha) + post[:, AWAKE])
    top = log_w.max()
    if not np.isfinite(top):
        raise DegenerateStateError("All weights vanished")
    next_state = replace(
        state,
        log_w=log_w - top,
        log_offset=state.log_offset + float(top),
        round=state.round + 1,
        learner_loss=state.learner_loss + learner_loss,
        ops=state.ops + 2 * state.size,
    )
    return prediction, learner_loss, next_state


class GrowingSleepingMarkovHedgeAggregator(BaseAggregator):
    """Sleeping Markov aggregation with experts admitted as they enter."""

    growing = True
    supported_classes = (
        ComparatorClass.CONSTANT,
        ComparatorClass.FRESH,
        ComparatorClass.ADMISSIBLE,
        ComparatorClass.SPARSE,
    )

    def __init__(self, config, schedule, model):
        super().__init__(config, schedule, model)
        self.rates = WakeSleepRates(
            alpha=config.alpha or RateSequence.inverse_time(),
            beta=config.beta or RateSequence.inverse_time(),
        )

    def reset(self):
        self.state = gsmh_init(self.eta)
        self._admitted = 0

    def _admit(self):
        if self._admitted < self.round:
            self.state = gsmh_admit(self.state, self.entrant_priors(self.round))
            self._admitted = self.round

    def predict(self, xs) -> Prediction:
        self._admit()
        return gsmh_predict(self.state, xs, self.model)

    def observe(self, xs, y):
        self._admit()
        alpha, beta = self.rates.at(self.round + 1)
        _, _, self.state = gsmh_step(self.state, xs, y, self.model, alpha, beta)
        self._advance()

    @property
    def ops(self) -> int:
        return self.state.ops

    def weights(self) -> np.ndarray:
        self._admit()
        return self.state.weights

    def bound(self, comparator_class, comparator, horizon):
        comparator_class = ComparatorClass(comparator_class)
        if comparator_class == ComparatorClass.CONSTANT:
            return bounds.bound_sleeping_constant(self.priors, self.schedule, int(comparator), horizon,
                                                  self.rates.alpha, self.eta)
        return bounds.bound_sleeping(self.priors, self.schedule, comparator,
                                     self.rates.alpha, self.rates.beta, self.eta)
