"""
Exponentially weighted average forecaster on a fixed expert set, and its
specialist variant.

Weights are kept in the log domain and shifted by their maximum after every
update; the shift never changes the normalized posterior.
"""

from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from core.algorithms.base import BaseAggregator, ComparatorClass
from core.errors import DegenerateStateError, InvalidInputError
from core.losses import LossModel, Prediction
from core.oracle import bounds
from core.priors import PriorWeights
from core.schedule import EntrySchedule


@dataclass(frozen=True, eq=False)
class HedgeState:
    """Log-weights of a fixed expert set."""
    log_w: np.ndarray
    eta: float
    round: int = 1
    learner_loss: float = 0.0
    ops: int = 0

    @property
    def size(self) -> int:
        return int(self.log_w.size)

    @property
    def weights(self) -> np.ndarray:
        """Normalized weights v_t."""
        return np.exp(self.log_w - logsumexp(self.log_w))


def _log_normalize(log_w: np.ndarray) -> np.ndarray:
    top = log_w.max()
    if not np.isfinite(top):
        raise DegenerateStateError("All weights vanished")
    return log_w - top


def hedge_init(prior: Union[Sequence[float], PriorWeights], eta: float = 1.0,
               schedule: Optional[EntrySchedule] = None) -> HedgeState:
    """
    Initial state from prior weights (normalized internally).

    Args:
        prior: positive weights, or a ``PriorWeights`` realized on ``schedule``
        eta: learning rate
        schedule: needed when ``prior`` is a preset

    Returns:
        The round-1 state
    """
    if isinstance(prior, PriorWeights):
        if schedule is None:
            raise InvalidInputError("A prior preset needs an entry schedule to realize")
        prior = prior.realize(schedule)
    pi = np.asarray(prior, dtype=float)
    if pi.ndim != 1 or pi.size == 0:
        raise InvalidInputError("Hedge needs at least one expert")
    if np.any(pi <= 0) or not np.all(np.isfinite(pi)):
        raise InvalidInputError("Prior weights must be positive and finite")
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    return HedgeState(log_w=_log_normalize(np.log(pi)), eta=float(eta), ops=int(pi.size))


def hedge_predict(state: HedgeState, xs, model: LossModel) -> Prediction:
    """sum_i v_i x_i."""
    arr = model.stack(xs)
    if len(arr) != state.size:
        raise InvalidInputError(f"{len(arr)} predictions for {state.size} experts")
    return model.mix(state.weights, arr)


def hedge_update(state: HedgeState, losses: Sequence[float], learner_loss: float = 0.0) -> HedgeState:
    """v_{t+1}(i) proportional to v_t(i) exp(-eta l_{i,t})."""
    losses = np.asarray(losses, dtype=float)
    if losses.shape != state.log_w.shape:
        raise InvalidInputError(f"{losses.size} losses for {state.size} experts")
    log_w = _log_normalize(state.log_w - state.eta * losses)
    return replace(state, log_w=log_w, round=state.round + 1,
                   learner_loss=state.learner_loss + float(learner_loss),
                   ops=state.ops + state.size)


def hedge_step(state: HedgeState, xs, y: Any, model: LossModel):
    """
    One full round: predict, suffer losses, update.

    Returns:
        (prediction, learner loss, next state)
    """
    prediction = hedge_predict(state, xs, model)
    learner_loss = model.loss(prediction, y)
    return prediction, learner_loss, hedge_update(state, model.losses(xs, y), learner_loss)


def specialist_predict(state: HedgeState, active: Sequence[int], xs, model: LossModel) -> Prediction:
    """Mixture of the active experts with weights renormalized over the active set."""
    idx = _active_index(state, active)
    arr = model.stack(xs)
    if len(arr) != len(idx):
        raise InvalidInputError(f"{len(arr)} predictions for {len(idx)} active experts")
    log_w = state.log_w[idx]
    return model.mix(np.exp(log_w - logsumexp(log_w)), arr)


def specialist_step(state: HedgeState, active: Sequence[int], xs, y: Any, model: LossModel):
    """
    One round with abstaining experts.

    Inactive experts are charged the learner's own loss, so their share of
    the mass is left unchanged.

    Args:
        state: current state over the whole universe
        active: 1-based indices of the experts awake this round
        xs: predictions of the active experts, in increasing index order
        y: outcome
        model: loss model

    Returns:
        (prediction, learner loss, next state)
    """
    idx = _active_index(state, active)
    prediction = specialist_predict(state, active, xs, model)
    learner_loss = model.loss(prediction, y)
    losses = np.full(state.size, learner_loss)
    losses[idx] = model.losses(xs, y)
    return prediction, learner_loss, hedge_update(state, losses, learner_loss)


def _active_index(state: HedgeState, active: Sequence[int]) -> np.ndarray:
    idx = np.unique(np.asarray(list(active), dtype=np.int64)) - 1
    if idx.size == 0:
        raise InvalidInputError("No active expert this round")
    if idx[0] < 0 or idx[-1] >= state.size:
        raise InvalidInputError(f"Active experts outside 1..{state.size}")
    return idx


class HedgeAggregator(BaseAggregator):
    """Exponential weights on a fixed set of experts."""

    growing = False
    supported_classes = (ComparatorClass.CONSTANT,)

    def reset(self):
        self.state = hedge_init(self.priors, self.eta)

    def predict(self, xs) -> Prediction:
        return hedge_predict(self.state, xs, self.model)

    def observe(self, xs, y):
        prediction = hedge_predict(self.state, xs, self.model)
        learner_loss = self.model.loss(prediction, y)
        self.state = hedge_update(self.state, self.model.losses(xs, y), learner_loss)
        self._advance()

    @property
    def ops(self) -> int:
        return self.state.ops

    def weights(self) -> np.ndarray:
        return self.state.weights

    def bound(self, comparator_class, comparator, horizon):
        if ComparatorClass(comparator_class) != ComparatorClass.CONSTANT:
            return None
        return bounds.bound_hedge(self.priors, int(comparator), self.eta)


class SpecialistAggregator(BaseAggregator):
    """
    Specialist exponential weights over the whole universe of M_T experts,
    allocated upfront; expert i abstains until it enters.
    """

    growing = True
    supported_classes = (ComparatorClass.CONSTANT, ComparatorClass.FRESH)

    def reset(self):
        self.state = hedge_init(self.priors, self.eta)

    def _active(self):
        return range(1, self.schedule.entered(self.round) + 1)

    def predict(self, xs) -> Prediction:
        return specialist_predict(self.state, self._active(), xs, self.model)

    def observe(self, xs, y):
        _, _, self.state = specialist_step(self.state, self._active(), xs, y, self.model)
        self._advance()

    @property
    def ops(self) -> int:
        return self.state.ops

    def weights(self) -> np.ndarray:
        m_t = self.schedule.entered(self.round)
        log_w = self.state.log_w[:m_t]
        return np.exp(log_w - logsumexp(log_w))

    def bound(self, comparator_class, comparator, horizon):
        comparator_class = ComparatorClass(comparator_class)
        if comparator_class == ComparatorClass.CONSTANT:
            active = range(1, self.schedule.entered(horizon) + 1)
            return bounds.bound_specialist(self.priors, active, int(comparator), self.eta)
        if comparator_class == ComparatorClass.FRESH and comparator.k == 0:
            return bounds.bound_growing_hedge(self.priors, self.schedule, comparator.indices[0],
                                              horizon, self.eta)
        return None
