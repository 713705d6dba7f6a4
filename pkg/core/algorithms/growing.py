"""
GrowingHedge: exponential weights on an expert set that grows over time.

An expert entering at round tau starts with weight pi_i exp(-eta L_{tau-1}),
as if it had predicted like the learner on every round before its arrival.
Work per round is proportional to the number of entered experts M_t.
"""

from dataclasses import dataclass, replace
from typing import Any, Sequence

import numpy as np
from scipy.special import logsumexp

from core.algorithms.base import BaseAggregator, ComparatorClass
from core.errors import DegenerateStateError, InvalidInputError
from core.losses import LossModel, Prediction
from core.oracle import bounds


@dataclass(frozen=True, eq=False)
class GrowingHedgeState:
    """
    Log-weights of the entered experts.

    ``log_offset`` is the total shift subtracted from every stored log-weight
    so far; entrants are shifted by the same amount.
    """
    log_w: np.ndarray
    eta: float
    round: int = 1
    learner_loss: float = 0.0
    log_offset: float = 0.0
    ops: int = 0

    @property
    def size(self) -> int:
        return int(self.log_w.size)

    @property
    def weights(self) -> np.ndarray:
        if self.size == 0:
            raise DegenerateStateError("No expert has entered yet")
        return np.exp(self.log_w - logsumexp(self.log_w))

    def unnormalized_weights(self) -> np.ndarray:
        """w_{i,t} = pi_i exp(-eta L_{i,t-1}), the undisplaced weights."""
        return np.exp(self.log_w + self.log_offset)


def gh_init(eta: float = 1.0) -> GrowingHedgeState:
    """Empty state before any expert has entered."""
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    return GrowingHedgeState(log_w=np.empty(0), eta=float(eta))


def gh_admit(state: GrowingHedgeState, new_count: int, priors: Sequence[float]) -> GrowingHedgeState:
    """
    Append the experts entering at the current round.

    Args:
        state: state at the start of the round
        new_count: m_t
        priors: their prior weights pi_i (positive)

    Returns:
        State covering M_t = M_{t-1} + m_t experts
    """
    priors = np.asarray(priors, dtype=float)
    if new_count < 0 or priors.shape != (new_count,):
        raise InvalidInputError(f"{priors.size} prior weights for {new_count} entrants")
    if new_count == 0:
        return state
    if np.any(priors <= 0) or not np.all(np.isfinite(priors)):
        raise InvalidInputError("Prior weights must be positive and finite")
    entrants = np.log(priors) - state.eta * state.learner_loss - state.log_offset
    return replace(state, log_w=np.concatenate([state.log_w, entrants]), ops=state.ops + new_count)


def gh_predict(state: GrowingHedgeState, xs, model: LossModel) -> Prediction:
    arr = model.stack(xs)
    if len(arr) != state.size:
        raise InvalidInputError(f"{len(arr)} predictions for {state.size} entered experts")
    return model.mix(state.weights, arr)


def gh_step(state: GrowingHedgeState, xs, y: Any, model: LossModel):
    """
    One round over the M_t entered experts.

    Returns:
        (prediction, learner loss, next state)
    """
    if state.size == 0:
        raise InvalidInputError("No expert has entered; admit entrants before stepping")
    prediction = gh_predict(state, xs, model)
    learner_loss = model.loss(prediction, y)
    log_w = state.log_w - state.eta * model.losses(xs, y)
    top = log_w.max()
    if not np.isfinite(top):
        raise DegenerateStateError("All weights vanished")
    next_state = replace(
        state,
        log_w=log_w - top,
        log_offset=state.log_offset + float(top),
        round=state.round + 1,
        learner_loss=state.learner_loss + learner_loss,
        ops=state.ops + state.size,
    )
    return prediction, learner_loss, next_state


class GrowingHedgeAggregator(BaseAggregator):
    """GrowingHedge driven by the entry schedule."""

    growing = True
    supported_classes = (ComparatorClass.CONSTANT, ComparatorClass.FRESH)

    def reset(self):
        self.state = gh_init(self.eta)
        self._admitted = 0

    def _admit(self):
        if self._admitted < self.round:
            t = self.round
            self.state = gh_admit(self.state, self.schedule.count(t), self.entrant_priors(t))
            self._admitted = t

    def predict(self, xs) -> Prediction:
        self._admit()
        return gh_predict(self.state, xs, self.model)

    def observe(self, xs, y):
        self._admit()
        _, _, self.state = gh_step(self.state, xs, y, self.model)
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
            return bounds.bound_growing_hedge(self.priors, self.schedule, int(comparator), horizon, self.eta)
        if comparator_class == ComparatorClass.FRESH and comparator.is_fresh:
            return bounds.bound_fresh(self.priors, self.schedule, comparator, self.eta)
        return None
