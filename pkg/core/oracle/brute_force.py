"""
Brute-force Bayesian aggregation over full expert sequences.

These reference implementations enumerate every sequence i^T (or every
(expert, wake pattern) pair for the sleeping variant) and mix with the
posterior restricted to the current round. They are exponential in T and
exist only to check the efficient algorithms.
"""

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Union
import itertools
import logging

import numpy as np

from config import get_settings
from core.errors import GuardExceededError, InvalidInputError
from core.losses import LossModel, Prediction

logger = logging.getLogger(__name__)

KernelsLike = Union[Sequence[np.ndarray], Any]


@dataclass(frozen=True)
class BruteForceResult:
    """Per-round predictions and marginal weights of the enumerated mixture."""
    predictions: List[Prediction]
    marginals: np.ndarray
    learner_losses: np.ndarray

    @property
    def cumulative_loss(self) -> float:
        return float(self.learner_losses.sum())


def _guard(size: int, limit: Optional[int], what: str):
    limit = limit or get_settings().brute_force_limit
    if size > limit:
        raise GuardExceededError(f"Brute force over {what} refused: {size} sequences exceed {limit}")


def _kernel_matrix(kernels: KernelsLike, t: int, size: int) -> np.ndarray:
    """theta_t as a size x size matrix with [i, j] = theta_t(i | j), for target round t >= 2."""
    if hasattr(kernels, "matrix"):
        return np.asarray(kernels.matrix(size, t), dtype=float)
    matrix = np.asarray(kernels[t - 2], dtype=float)
    if matrix.shape != (size, size):
        raise InvalidInputError(f"Kernel for round {t} has shape {matrix.shape}, expected {(size, size)}")
    return matrix


def _normalized(log_w: np.ndarray) -> np.ndarray:
    finite = np.isfinite(log_w)
    if not finite.any():
        raise InvalidInputError("Every sequence has zero prior mass")
    w = np.zeros_like(log_w)
    w[finite] = np.exp(log_w[finite] - log_w[finite].max())
    return w / w.sum()


def brute_force_sequence_aggregation(theta_1: Sequence[float],
                                     kernels: KernelsLike,
                                     xs: np.ndarray,
                                     outcomes: Sequence[Any],
                                     model: LossModel,
                                     eta: Optional[float] = None,
                                     limit: Optional[int] = None) -> BruteForceResult:
    """
    Bayesian mixture over all M^T sequences with the Markov prior
    pi(i^T) = theta_1(i_1) prod_t theta_t(i_t | i_{t-1}).

    Args:
        theta_1: initial distribution over the M experts
        kernels: T-1 transition matrices or a kernel object exposing ``matrix(M, t)``
        xs: expert predictions, shape (T, M) or (T, M, K)
        outcomes: y_1, ..., y_T
        model: loss model used to score and mix predictions
        eta: learning rate (defaults to the model's)
        limit: guard override

    Returns:
        Learner predictions, the marginal weight of each expert at each round, and learner losses
    """
    theta_1 = np.asarray(theta_1, dtype=float)
    xs = np.asarray(xs, dtype=float)
    horizon, size = xs.shape[0], xs.shape[1]
    if theta_1.shape != (size,):
        raise InvalidInputError(f"theta_1 has shape {theta_1.shape}, expected ({size},)")
    if len(outcomes) != horizon:
        raise InvalidInputError(f"{len(outcomes)} outcomes for {horizon} rounds")
    _guard(size ** horizon, limit, "expert sequences")
    eta = model.eta if eta is None else float(eta)

    sequences = np.array(list(itertools.product(range(size), repeat=horizon)), dtype=np.int64)
    with np.errstate(divide="ignore"):
        log_prior = np.log(theta_1)[sequences[:, 0]]
        for t in range(2, horizon + 1):
            log_theta = np.log(_kernel_matrix(kernels, t, size))
            log_prior = log_prior + log_theta[sequences[:, t - 1], sequences[:, t - 2]]

    cumulative = np.zeros(len(sequences))
    predictions, marginals, learner_losses = [], np.zeros((horizon, size)), np.zeros(horizon)
    for t in range(horizon):
        w = _normalized(log_prior - eta * cumulative)
        marginals[t] = np.bincount(sequences[:, t], weights=w, minlength=size)
        prediction = model.mix(marginals[t], xs[t])
        predictions.append(prediction)
        learner_losses[t] = model.loss(prediction, outcomes[t])
        # losses of zero-mass experts may be undefined (unentered slots)
        round_losses = np.where(marginals[t] > 0, np.nan_to_num(model.losses(xs[t], outcomes[t])), 0.0)
        cumulative = cumulative + round_losses[sequences[:, t]]

    logger.debug(f"Brute force over {len(sequences)} sequences done (T={horizon}, M={size})")
    return BruteForceResult(predictions, marginals, learner_losses)


def brute_force_sleeping_aggregation(prior: Sequence[float],
                                     initial: np.ndarray,
                                     kernels: Sequence[np.ndarray],
                                     xs: np.ndarray,
                                     outcomes: Sequence[Any],
                                     model: LossModel,
                                     eta: Optional[float] = None,
                                     limit: Optional[int] = None) -> BruteForceResult:
    """
    Bayesian mixture over (expert, wake pattern) pairs with the abstention trick.

    A pair (i, a^T) is charged l(x_{i,t}, y_t) when a_t = 1 and the learner's
    own loss when a_t = 0; the learner predicts with the awake marginal.

    Args:
        prior: pi over the M experts (need not be normalized)
        initial: (M, 2) array, initial[i, a] = theta_{i,1}(a)
        kernels: T-1 arrays of shape (M, 2, 2), [i, a, b] = theta_{i,t}(a | b)
        xs: expert predictions, shape (T, M) or (T, M, K)
        outcomes: y_1, ..., y_T
        model: loss model
        eta: learning rate (defaults to the model's)
        limit: guard override

    Returns:
        Learner predictions, the normalized awake marginals and learner losses
    """
    prior = np.asarray(prior, dtype=float)
    initial = np.asarray(initial, dtype=float)
    xs = np.asarray(xs, dtype=float)
    horizon, size = xs.shape[0], xs.shape[1]
    if initial.shape != (size, 2):
        raise InvalidInputError(f"Initial wake distribution has shape {initial.shape}, expected ({size}, 2)")
    _guard(size * 2 ** horizon, limit, "wake patterns")
    eta = model.eta if eta is None else float(eta)

    patterns = np.array(list(itertools.product((0, 1), repeat=horizon)), dtype=np.int64)
    experts = np.repeat(np.arange(size), len(patterns))
    bits = np.tile(patterns, (size, 1))
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior)[experts] + np.log(initial)[experts, bits[:, 0]]
        for t in range(2, horizon + 1):
            kernel = np.asarray(kernels[t - 2], dtype=float)
            log_prior = log_prior + np.log(kernel)[experts, bits[:, t - 1], bits[:, t - 2]]

    cumulative = np.zeros(len(experts))
    predictions, marginals, learner_losses = [], np.zeros((horizon, size)), np.zeros(horizon)
    for t in range(horizon):
        w = _normalized(log_prior - eta * cumulative)
        awake = np.bincount(experts, weights=w * bits[:, t], minlength=size)
        if awake.sum() <= 0:
            raise InvalidInputError(f"No awake mass at round {t + 1}")
        marginals[t] = awake / awake.sum()
        prediction = model.mix(marginals[t], xs[t])
        predictions.append(prediction)
        learner_losses[t] = model.loss(prediction, outcomes[t])
        expert_losses = np.where(awake > 0, np.nan_to_num(model.losses(xs[t], outcomes[t])), 0.0)
        cumulative = cumulative + np.where(bits[:, t] == 1, expert_losses[experts], learner_losses[t])

    logger.debug(f"Brute force over {len(experts)} wake patterns done (T={horizon}, M={size})")
    return BruteForceResult(predictions, marginals, learner_losses)
