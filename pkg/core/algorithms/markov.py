"""
Aggregation under a Markov prior on expert sequences.

The weights v_t are a probability vector over the experts. Each round the
learner predicts with v_t, forms the posterior v_t^m proportional to
v_t exp(-eta l_t) and moves mass with a transition kernel theta_{t+1}.
Kernels are indexed by the round they lead into.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Sequence, Union
import logging

import numpy as np

from config import get_settings
from core.algorithms.base import BaseAggregator, ComparatorClass
from core.errors import DegenerateStateError, GuardExceededError, InvalidInputError
from core.losses import LossModel, Prediction
from core.oracle import bounds
from core.oracle.comparators import ComparatorSequence
from core.priors import PriorPreset, RateKind, RateSequence
from core.schedule import EntrySchedule

logger = logging.getLogger(__name__)

STOCHASTIC_TOLERANCE = 1e-12


def _rate(alpha: Union[float, RateSequence, None], default: RateSequence) -> RateSequence:
    if alpha is None:
        return default
    if isinstance(alpha, RateSequence):
        return alpha
    return RateSequence.constant(float(alpha))


class TransitionKernel(ABC):
    """A column-stochastic transition theta_t(i | j) between consecutive rounds."""

    @abstractmethod
    def apply(self, v: np.ndarray, t: int) -> np.ndarray:
        """Weights at round t from the posterior of round t-1."""
        pass

    @abstractmethod
    def matrix(self, size: int, t: int) -> np.ndarray:
        """theta_t as a matrix, [i, j] = theta_t(i | j) on 0-based indices."""
        pass

    def prob(self, i: int, j: int, t: int) -> float:
        """theta_t(i | j) for 1-based experts."""
        return float(self.matrix(max(i, j), t)[i - 1, j - 1])


class IdentityKernel(TransitionKernel):
    """No switching: MarkovHedge reduces to exponential weights."""

    def apply(self, v, t):
        return v

    def matrix(self, size, t):
        return np.eye(size)

    def prob(self, i, j, t):
        return 1.0 if i == j else 0.0


class DenseKernel(TransitionKernel):
    """
    An explicit matrix per round. Only for small expert sets.

    Args:
        matrices: one matrix for every round, or a callable t -> matrix
    """

    def __init__(self, matrices: Union[np.ndarray, Callable[[int], np.ndarray]]):
        self._matrices = matrices

    def _get(self, t: int) -> np.ndarray:
        theta = np.asarray(self._matrices(t) if callable(self._matrices) else self._matrices, dtype=float)
        size = theta.shape[0]
        if theta.ndim != 2 or theta.shape[1] != size:
            raise InvalidInputError(f"Transition matrix must be square, got shape {theta.shape}")
        if size > get_settings().dense_kernel_max_experts:
            raise GuardExceededError(f"Dense kernel over {size} experts refused")
        if np.any(theta < 0) or np.any(np.abs(theta.sum(axis=0) - 1.0) > STOCHASTIC_TOLERANCE * size):
            raise InvalidInputError(f"Transition matrix for round {t} is not column-stochastic")
        return theta

    def apply(self, v, t):
        return self._get(t) @ v

    def matrix(self, size, t):
        theta = self._get(t)
        if size != theta.shape[0]:
            raise InvalidInputError(f"Kernel covers {theta.shape[0]} experts, asked for {size}")
        return theta

    def prob(self, i, j, t):
        return float(self._get(t)[i - 1, j - 1])


class ShareKernel(TransitionKernel):
    """
    theta_t(i | j) = alpha_t / M + (1 - alpha_t) 1{i = j}.

    A constant alpha gives Fixed Share, alpha_t = 1/t gives Decreasing Share.
    ``size`` is only needed for ``prob``.
    """

    def __init__(self, alpha: Union[float, RateSequence], size: Optional[int] = None):
        self.alpha = _rate(alpha, RateSequence.inverse_time())
        self.size = size

    def apply(self, v, t):
        a = self.alpha.check_probability(t)
        return (1.0 - a) * v + a / v.size

    def matrix(self, size, t):
        a = self.alpha.check_probability(t)
        return (1.0 - a) * np.eye(size) + a / size

    def prob(self, i, j, t):
        if self.size is None:
            raise InvalidInputError("Share kernel probabilities need the number of experts")
        a = self.alpha.check_probability(t)
        return a / self.size + (1.0 - a) * (i == j)


class FreshKernel(TransitionKernel):
    """
    Transitions of FreshMarkovHedge on the universe of M_T experts:
    incumbents keep their expert with probability Pi_{M_{t-1}}/Pi_{M_t}
    and move to entrant i with probability pi_i/Pi_{M_t}.

    Not-yet-entered experts carry no mass and stay put.
    """

    def __init__(self, schedule: EntrySchedule, priors: Sequence[float]):
        self.schedule = schedule
        self.priors = np.asarray(priors, dtype=float)
        self.partial = np.concatenate([[0.0], np.cumsum(self.priors)])

    def _masses(self, t: int):
        before, after = self.schedule.entered(t - 1), self.schedule.entered(t)
        return before, after, self.partial[before], self.partial[after]

    def apply(self, v, t):
        before, after, mass_before, mass_after = self._masses(t)
        out = v.copy()
        out[:before] *= mass_before / mass_after
        out[before:after] = v[:before].sum() * self.priors[before:after] / mass_after
        return out

    def matrix(self, size, t):
        before, after, mass_before, mass_after = self._masses(t)
        theta = np.eye(size)
        theta[:before, :before] *= mass_before / mass_after
        theta[before:after, :before] = (self.priors[before:after] / mass_after)[:, np.newaxis]
        return theta

    def prob(self, i, j, t):
        return float(self.matrix(self.schedule.total, t)[i - 1, j - 1])


class GrowingFreshKernel(FreshKernel):
    """
    Transitions of GrowingMarkovHedge on the universe:
    alpha_t pi_i/Pi_{M_t} + (1 - alpha_t) theta^fresh_t(i | j) for entered j.
    """

    def __init__(self, schedule: EntrySchedule, priors: Sequence[float],
                 alpha: Union[float, RateSequence, None] = None):
        super().__init__(schedule, priors)
        self.alpha = _rate(alpha, RateSequence.inverse_time())

    def apply(self, v, t):
        a = self.alpha.check_probability(t)
        before, after, _, mass_after = self._masses(t)
        out = (1.0 - a) * super().apply(v, t)
        out[:after] += a * v[:before].sum() * self.priors[:after] / mass_after
        out[after:] = v[after:]
        return out

    def matrix(self, size, t):
        a = self.alpha.check_probability(t)
        before, after, _, mass_after = self._masses(t)
        theta = super().matrix(size, t)
        theta[:, :before] *= 1.0 - a
        theta[:after, :before] += a * (self.priors[:after] / mass_after)[:, np.newaxis]
        return theta


@dataclass(frozen=True, eq=False)
class MarkovState:
    """Normalized weights v_t over a fixed set of experts."""
    v: np.ndarray
    eta: float
    round: int = 1
    learner_loss: float = 0.0
    ops: int = 0

    @property
    def size(self) -> int:
        return int(self.v.size)

    @property
    def weights(self) -> np.ndarray:
        return self.v


def mh_init(theta_1: Sequence[float], eta: float = 1.0) -> MarkovState:
    """
    Initial state from the first-round distribution theta_1 (normalized
    internally; zero entries are allowed).
    """
    v = np.asarray(theta_1, dtype=float)
    if v.ndim != 1 or v.size == 0 or np.any(v < 0) or not np.all(np.isfinite(v)) or not v.sum() > 0:
        raise InvalidInputError("theta_1 must be a non-negative vector with positive mass")
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    return MarkovState(v=v / v.sum(), eta=float(eta), ops=int(v.size))


def posterior(v: np.ndarray, losses: np.ndarray, eta: float) -> np.ndarray:
    """v^m proportional to v exp(-eta l), computed on the support of v."""
    support = v > 0
    if not support.any():
        raise DegenerateStateError("Weights carry no mass")
    losses = np.where(support, losses, 0.0)
    shift = losses[support].min()
    vm = np.where(support, v * np.exp(-eta * (losses - shift)), 0.0)
    total = vm.sum()
    if not total > 0 or not np.isfinite(total):
        raise DegenerateStateError("Posterior mass vanished")
    return vm / total


def mh_predict(state: MarkovState, xs, model: LossModel) -> Prediction:
    arr = model.stack(xs)
    if len(arr) != state.size:
        raise InvalidInputError(f"{len(arr)} predictions for {state.size} experts")
    return model.mix(state.v, arr)


def mh_step(state: MarkovState, kernel: TransitionKernel, xs, y: Any, model: LossModel):
    """
    One round: predict with v_t, form the posterior, apply theta_{t+1}.

    Returns:
        (prediction, learner loss, next state)
    """
    prediction = mh_predict(state, xs, model)
    learner_loss = model.loss(prediction, y)
    vm = posterior(state.v, model.losses(xs, y), state.eta)
    v = kernel.apply(vm, state.round + 1)
    v = v / v.sum()
    next_state = replace(state, v=v, round=state.round + 1,
                         learner_loss=state.learner_loss + learner_loss,
                         ops=state.ops + state.size)
    return prediction, learner_loss, next_state


def fixed_share_kernel(alpha: float, size: Optional[int] = None) -> ShareKernel:
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"Fixed Share needs alpha in (0, 1), got {alpha}")
    return ShareKernel(RateSequence.constant(alpha), size)


def decreasing_share_kernel(alpha: Optional[RateSequence] = None, size: Optional[int] = None) -> ShareKernel:
    return ShareKernel(alpha or RateSequence.inverse_time(), size)


class _ShareAggregator(BaseAggregator):
    """Share-kernel MarkovHedge on a fixed expert set."""

    growing = False
    supported_classes = (ComparatorClass.CONSTANT, ComparatorClass.ADMISSIBLE)

    def __init__(self, config, schedule, model):
        super().__init__(config, schedule, model)
        self.kernel = self._kernel()

    def _kernel(self) -> ShareKernel:
        raise NotImplementedError

    def reset(self):
        self.state = mh_init(self.priors, self.eta)

    def predict(self, xs) -> Prediction:
        return mh_predict(self.state, xs, self.model)

    def observe(self, xs, y):
        _, _, self.state = mh_step(self.state, self.kernel, xs, y, self.model)
        self._advance()

    @property
    def ops(self) -> int:
        return self.state.ops

    def weights(self) -> np.ndarray:
        return self.state.weights

    def bound(self, comparator_class, comparator, horizon):
        comparator_class = ComparatorClass(comparator_class)
        if comparator_class == ComparatorClass.CONSTANT:
            sequence = ComparatorSequence.from_indices([int(comparator)] * horizon, self.schedule)
        elif comparator_class == ComparatorClass.ADMISSIBLE:
            sequence = comparator
        else:
            return None
        if self.config.prior.preset != PriorPreset.UNIFORM:
            return self.exact_bound(sequence)
        return self.closed_form_bound(sequence, horizon)

    def closed_form_bound(self, sequence: ComparatorSequence, horizon: int) -> float:
        raise NotImplementedError

    def exact_bound(self, sequence: ComparatorSequence) -> float:
        """ln 1/theta_1(i_1) + sum_t ln 1/theta_t(i_t | i_{t-1}), valid for any initial prior."""
        theta_1 = self.priors / self.priors.sum()
        return bounds.bound_markov(theta_1, self.kernel, sequence.indices, self.eta)


class FixedShareAggregator(_ShareAggregator):
    """MarkovHedge with a constant switching rate alpha."""

    def _kernel(self):
        alpha = self.config.alpha
        if alpha is None:
            value = float(self.config.parameters.get("alpha", 0.05))
        elif alpha.kind == RateKind.CONSTANT:
            value = alpha.value
        else:
            raise InvalidInputError("Fixed Share needs a constant switching rate")
        return fixed_share_kernel(value, self.schedule.total)

    def closed_form_bound(self, sequence, horizon):
        return bounds.bound_fixed_share(self.schedule.total, horizon, sequence.k,
                                        self.kernel.alpha.value, self.eta)


class DecreasingShareAggregator(_ShareAggregator):
    """MarkovHedge with a vanishing switching rate, alpha_t = 1/t by default."""

    def _kernel(self):
        return decreasing_share_kernel(self.config.alpha, self.schedule.total)

    def closed_form_bound(self, sequence, horizon):
        return bounds.bound_decreasing_share(self.schedule.total, sequence.shifts, horizon, self.eta,
                                             alpha=self.kernel.alpha)
