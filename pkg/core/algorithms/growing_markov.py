"""
Markov-prior aggregation on growing expert sets.

FreshMarkovHedge only allows switches to experts at the moment they enter;
GrowingMarkovHedge additionally lets the comparator return to any incumbent.
Both keep the running prior mass Pi_{M_t} so every round costs O(M_t).

The step of round t receives the prior weights of the experts entering at
round t+1, since the transition theta_{t+1} already moves mass onto them.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Optional, Sequence, Union

import numpy as np

from core.algorithms.base import BaseAggregator, ComparatorClass
from core.algorithms.markov import posterior
from core.errors import InvalidInputError
from core.losses import LossModel, Prediction
from core.oracle import bounds
from core.oracle.comparators import ComparatorSequence
from core.priors import RateSequence


class TransitionMode(str, Enum):
    FRESH = "fresh"
    GROWING = "growing"


@dataclass(frozen=True, eq=False)
class GrowingMarkovState:
    """
    Normalized weights over the M_t entered experts.

    ``priors`` keeps pi_1..pi_{M_t}; the growing mode needs them to spread
    the switching mass back onto incumbents.
    """
    v: np.ndarray
    priors: np.ndarray
    prior_sum: float
    eta: float
    mode: TransitionMode
    round: int = 1
    learner_loss: float = 0.0
    ops: int = 0

    @property
    def size(self) -> int:
        return int(self.v.size)

    @property
    def weights(self) -> np.ndarray:
        return self.v


def _check_priors(priors: Sequence[float], allow_empty: bool) -> np.ndarray:
    priors = np.asarray(priors, dtype=float).reshape(-1)
    if priors.size == 0 and not allow_empty:
        raise InvalidInputError("At least one expert must enter at round 1")
    if np.any(priors <= 0) or not np.all(np.isfinite(priors)):
        raise InvalidInputError("Prior weights must be positive and finite")
    return priors


def _init(priors: Sequence[float], eta: float, mode: TransitionMode) -> GrowingMarkovState:
    priors = _check_priors(priors, allow_empty=False)
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    total = float(priors.sum())
    return GrowingMarkovState(v=priors / total, priors=priors, prior_sum=total, eta=float(eta),
                              mode=mode, ops=int(priors.size))


def fmh_init(priors: Sequence[float], eta: float = 1.0) -> GrowingMarkovState:
    """Round-1 state v_1(i) = pi_i / Pi_{M_1} over the first entrants."""
    return _init(priors, eta, TransitionMode.FRESH)


def gmh_init(priors: Sequence[float], eta: float = 1.0) -> GrowingMarkovState:
    return _init(priors, eta, TransitionMode.GROWING)


def gm_predict(state: GrowingMarkovState, xs, model: LossModel) -> Prediction:
    arr = model.stack(xs)
    if len(arr) != state.size:
        raise InvalidInputError(f"{len(arr)} predictions for {state.size} entered experts")
    return model.mix(state.v, arr)


def _transition(state: GrowingMarkovState, vm: np.ndarray, entrants: np.ndarray,
                alpha: float) -> tuple:
    new_sum = state.prior_sum + float(entrants.sum())
    incumbents = vm * (state.prior_sum / new_sum)
    if state.mode == TransitionMode.GROWING:
        incumbents = (1.0 - alpha) * incumbents + alpha * state.priors / new_sum
    v = np.concatenate([incumbents, entrants / new_sum])
    return v / v.sum(), new_sum


def _step(state: GrowingMarkovState, xs, y: Any, model: LossModel,
          entrant_priors: Sequence[float], alpha: float):
    entrants = _check_priors(entrant_priors, allow_empty=True)
    prediction = gm_predict(state, xs, model)
    learner_loss = model.loss(prediction, y)
    vm = posterior(state.v, model.losses(xs, y), state.eta)
    v, new_sum = _transition(state, vm, entrants, alpha)
    next_state = replace(
        state,
        v=v,
        priors=np.concatenate([state.priors, entrants]),
        prior_sum=new_sum,
        round=state.round + 1,
        learner_loss=state.learner_loss + learner_loss,
        ops=state.ops + int(v.size),
    )
    return prediction, learner_loss, next_state


def fmh_step(state: GrowingMarkovState, xs, y: Any, model: LossModel,
             entrant_priors: Sequence[float] = ()):
    """
    One round of FreshMarkovHedge.

    Incumbents are scaled by Pi_{M_t}/Pi_{M_{t+1}} after the posterior update;
    entrant i receives pi_i/Pi_{M_{t+1}}.

    Returns:
        (prediction, learner loss, next state)
    """
    if state.mode != TransitionMode.FRESH:
        raise InvalidInputError("State was not built by fmh_init")
    return _step(state, xs, y, model, entrant_priors, 0.0)


def gmh_step(state: GrowingMarkovState, xs, y: Any, model: LossModel,
             entrant_priors: Sequence[float] = (),
             alpha: Union[float, RateSequence, None] = None):
    """
    One round of GrowingMarkovHedge.

    Incumbents get (1 - alpha_{t+1}) (Pi_{M_t}/Pi_{M_{t+1}}) v^m_i + alpha_{t+1} pi_i/Pi_{M_{t+1}},
    entrants get pi_i/Pi_{M_{t+1}}. ``alpha`` defaults to alpha_t = 1/t.

    Returns:
        (prediction, learner loss, next state)
    """
    if state.mode != TransitionMode.GROWING:
        raise InvalidInputError("State was not built by gmh_init")
    if alpha is None:
        alpha = RateSequence.inverse_time()
    rate = alpha.check_probability(state.round + 1) if isinstance(alpha, RateSequence) else float(alpha)
    if not 0.0 < rate < 1.0:
        raise InvalidInputError(f"Switching rate must lie in (0, 1), got {rate}")
    return _step(state, xs, y, model, entrant_priors, rate)


class _GrowingMarkovAggregator(BaseAggregator):

    growing = True
    mode: TransitionMode = TransitionMode.FRESH

    def reset(self):
        self.state = _init(self.entrant_priors(1), self.eta, self.mode)

    def predict(self, xs) -> Prediction:
        return gm_predict(self.state, xs, self.model)

    def _step(self, xs, y):
        raise NotImplementedError

    def observe(self, xs, y):
        _, _, self.state = self._step(xs, y)
        self._advance()

    @property
    def ops(self) -> int:
        return self.state.ops

    def weights(self) -> np.ndarray:
        return self.state.weights

    def _sequence(self, comparator_class, comparator, horizon) -> Optional[ComparatorSequence]:
        comparator_class = ComparatorClass(comparator_class)
        if comparator_class == ComparatorClass.CONSTANT:
            if self.schedule.entry_time(int(comparator)) != 1:
                return None
            return ComparatorSequence.from_indices([int(comparator)] * horizon, self.schedule)
        if comparator_class in self.supported_classes:
            return comparator
        return None


class FreshMarkovHedgeAggregator(_GrowingMarkovAggregator):
    """Switches only to experts at their entry round."""

    mode = TransitionMode.FRESH
    supported_classes = (ComparatorClass.CONSTANT, ComparatorClass.FRESH)

    def _step(self, xs, y):
        return fmh_step(self.state, xs, y, self.model, self.entrant_priors(self.round + 1))

    def bound(self, comparator_class, comparator, horizon):
        sequence = self._sequence(comparator_class, comparator, horizon)
        if sequence is None or not sequence.is_fresh:
            return None
        return bounds.bound_fresh(self.priors, self.schedule, sequence, self.eta)


class GrowingMarkovHedgeAggregator(_GrowingMarkovAggregator):
    """Switches to entrants at entry and back to incumbents at rate alpha_t."""

    mode = TransitionMode.GROWING
    supported_classes = (ComparatorClass.CONSTANT, ComparatorClass.FRESH, ComparatorClass.ADMISSIBLE)

    @property
    def alpha(self) -> RateSequence:
        return self.config.alpha or RateSequence.inverse_time()

    def _step(self, xs, y):
        return gmh_step(self.state, xs, y, self.model, self.entrant_priors(self.round + 1), self.alpha)

    def bound(self, comparator_class, comparator, horizon):
        sequence = self._sequence(comparator_class, comparator, horizon)
        if sequence is None:
            return None
        return bounds.bound_growing_markov(self.priors, self.schedule, sequence, self.alpha, self.eta)
