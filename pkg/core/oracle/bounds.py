"""
Exact regret-bound calculators.

All functions return the bound in loss units, i.e. already divided by eta.
Prior vectors are indexed so that ``pi[i - 1]`` is the weight of expert i.
"""

from typing import Optional, Sequence
import math

import numpy as np
from scipy.special import comb, rel_entr, xlogy

from core.errors import InvalidInputError
from core.oracle.comparators import ComparatorSequence
from core.priors import RateSequence
from core.schedule import EntrySchedule


def _prior(pi: Sequence[float]) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or pi.size == 0 or np.any(pi <= 0) or not np.all(np.isfinite(pi)):
        raise InvalidInputError("Prior weights must be a non-empty vector of positive finite numbers")
    return pi


def _eta(eta: float) -> float:
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    return float(eta)


def prior_partial_sums(pi: Sequence[float]) -> np.ndarray:
    """(Pi_0 = 0, Pi_1, ..., Pi_M) with Pi_m = pi_1 + ... + pi_m."""
    return np.concatenate([[0.0], np.cumsum(_prior(pi))])


def binary_entropy(p: float) -> float:
    """H(p) = p ln(1/p) + (1-p) ln(1/(1-p)), with H(0) = H(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"Binary entropy needs p in [0, 1], got {p}")
    return float(-xlogy(p, p) - xlogy(1.0 - p, 1.0 - p))


def telescoping_sum(horizon: int) -> float:
    """sum_{t=2}^T ln(t / (t - 1)), which equals ln T."""
    t = np.arange(2, horizon + 1, dtype=float)
    return math.fsum(np.log1p(1.0 / (t - 1)))


def kl_divergence(u: Sequence[float], pi: Sequence[float]) -> float:
    """KL(u || pi) with the convention 0 ln 0 = 0."""
    u, pi = np.asarray(u, dtype=float), np.asarray(pi, dtype=float)
    if u.shape != pi.shape:
        raise InvalidInputError(f"KL between vectors of shapes {u.shape} and {pi.shape}")
    return float(np.sum(rel_entr(u, pi)))


# Fixed expert sets

def bound_hedge(pi: Sequence[float], i: int, eta: float) -> float:
    """(1/eta) ln(1/pi_i) for the normalized prior."""
    pi = _prior(pi)
    return math.log(pi.sum() / pi[i - 1]) / _eta(eta)


def bound_mixture(u: Sequence[float], pi: Sequence[float], eta: float) -> float:
    """(1/eta) KL(u || pi) against a mixture u of experts."""
    pi = _prior(pi)
    return kl_divergence(u, pi / pi.sum()) / _eta(eta)


def bound_specialist(pi: Sequence[float], active_union: Sequence[int], i: int, eta: float) -> float:
    """(1/eta) ln(sum_{j active at some round} pi_j / pi_i), for i in the union."""
    pi = _prior(pi)
    union = sorted(set(int(j) for j in active_union))
    if i not in union:
        raise InvalidInputError(f"Expert {i} is never active")
    return math.log(pi[np.asarray(union) - 1].sum() / pi[i - 1]) / _eta(eta)


def bound_markov(theta_1: Sequence[float], kernels, indices: Sequence[int], eta: float) -> float:
    """
    Exact bound ln 1/theta_1(i_1) + sum_t ln 1/theta_t(i_t | i_{t-1}) of a
    Markov-prior aggregation against the sequence ``indices``.

    ``kernels`` is a kernel object with ``prob(i, j, t)`` (1-based experts,
    target round t) or a list of matrices [i, j] = theta_t(i | j) for t = 2..T.
    """
    theta_1 = np.asarray(theta_1, dtype=float)
    total = -math.log(theta_1[indices[0] - 1])
    for t in range(2, len(indices) + 1):
        i, j = indices[t - 1], indices[t - 2]
        if hasattr(kernels, "prob"):
            p = kernels.prob(i, j, t)
        else:
            p = float(np.asarray(kernels[t - 2])[i - 1, j - 1])
        if not p > 0:
            return math.inf
        total -= math.log(p)
    return total / _eta(eta)


def bound_sleeping_markov(pi: Sequence[float],
                          initial: np.ndarray,
                          kernels: Sequence[np.ndarray],
                          comparator: ComparatorSequence,
                          eta: float) -> float:
    """
    Exact bound for the per-expert Markov wake/sleep prior.

    sum_p [ ln((1/n) / pi_{e_p}) + ln 1/theta_{e_p,1}(a_{p,1})
            + sum_t ln 1/theta_{e_p,t}(a_{p,t} | a_{p,t-1}) ] / eta
    with pi normalized, a_{p,t} = 1{i_t = e_p}.
    """
    pi = _prior(pi)
    pi = pi / pi.sum()
    initial = np.asarray(initial, dtype=float)
    bits = comparator.wake_bits()
    n = comparator.n
    total = 0.0
    with np.errstate(divide="ignore"):
        for p, e in enumerate(comparator.pool):
            total += math.log((1.0 / n) / pi[e - 1])
            total -= math.log(initial[e - 1, bits[p, 0]])
            for t in range(2, comparator.horizon + 1):
                kernel = np.asarray(kernels[t - 2], dtype=float)
                total -= float(np.log(kernel[e - 1, bits[p, t - 1], bits[p, t - 2]]))
    return total / _eta(eta)


def bound_fixed_share(experts: int, horizon: int, shifts: int, alpha: float, eta: float) -> float:
    """((k+1) ln M + k ln 1/alpha + (T-k-1) ln 1/(1-alpha)) / eta."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    k = shifts
    total = (k + 1) * math.log(experts) + k * math.log(1.0 / alpha)
    total += (horizon - k - 1) * math.log(1.0 / (1.0 - alpha))
    return total / _eta(eta)


def bound_fixed_share_tuned(experts: int, horizon: int, shifts: int, eta: float) -> float:
    """
    The Fixed Share bound at alpha = k/(T-1):
    ((k+1) ln M + (T-1) H(k/(T-1))) / eta.
    """
    if horizon < 2:
        return math.log(experts) / _eta(eta)
    return ((shifts + 1) * math.log(experts)
            + (horizon - 1) * binary_entropy(shifts / (horizon - 1))) / _eta(eta)


def bound_decreasing_share(experts: int, shift_times: Sequence[int], horizon: int, eta: float,
                           alpha: Optional[RateSequence] = None) -> float:
    """
    ((k+1) ln M + sum_j ln 1/alpha_{sigma_j} + sum_{t=2}^T ln 1/(1-alpha_t)) / eta.

    With the default alpha_t = 1/t this is ((k+1) ln M + sum_j ln sigma_j + ln T) / eta.
    """
    alpha = alpha or RateSequence.inverse_time()
    k = len(shift_times)
    total = (k + 1) * math.log(experts)
    total += sum(-math.log(alpha.check_probability(s)) for s in shift_times)
    total += sum(-math.log(1.0 - alpha.check_probability(t)) for t in range(2, horizon + 1))
    return total / _eta(eta)


# Growing expert sets

def bound_growing_hedge(pi: Sequence[float], schedule: EntrySchedule, i: int, horizon: int,
                        eta: float) -> float:
    """(1/eta) ln(Pi_{M_T} / pi_i) for an expert i <= M_T."""
    pi = _prior(pi)
    partial = prior_partial_sums(pi)
    m_total = schedule.entered(horizon)
    if not 1 <= i <= m_total:
        raise InvalidInputError(f"Expert {i} has not entered by round {horizon}")
    return math.log(partial[m_total] / pi[i - 1]) / _eta(eta)


def _segment_sum(pi: np.ndarray, partial: np.ndarray, schedule: EntrySchedule,
                 comparator: ComparatorSequence) -> float:
    """sum_j ln(Pi_{M_{sigma_{j+1}-1}} / pi_{i_{sigma_j}})."""
    total = 0.0
    for start, end in zip(comparator.segment_starts(), comparator.segment_ends()):
        total += math.log(partial[schedule.entered(end)] / pi[comparator.indices[start - 1] - 1])
    return total


def bound_fresh(pi: Sequence[float], schedule: EntrySchedule, comparator: ComparatorSequence,
                eta: float) -> float:
    """
    (1/eta) sum_{j=0}^k ln(Pi_{M_{sigma_{j+1}-1}} / pi_{i_{sigma_j}}) for a fresh
    sequence, with sigma_0 = 1 and sigma_{k+1} = T + 1.
    """
    if not comparator.is_fresh:
        raise InvalidInputError("Comparator switches to an incumbent expert")
    pi = _prior(pi)
    return _segment_sum(pi, prior_partial_sums(pi), schedule, comparator) / _eta(eta)


def bound_growing_markov(pi: Sequence[float], schedule: EntrySchedule,
                         comparator: ComparatorSequence, alpha: Optional[RateSequence],
                         eta: float) -> float:
    """
    Regret bound against an admissible sequence: the fresh-sequence terms,
    plus ln 1/alpha_t at incumbent shifts and ln 1/(1-alpha_t) at every other
    round t >= 2.
    """
    alpha = alpha or RateSequence.inverse_time()
    pi = _prior(pi)
    total = _segment_sum(pi, prior_partial_sums(pi), schedule, comparator)
    shifts = set(comparator.shifts)
    total += sum(-math.log(alpha.check_probability(s)) for s in comparator.incumbent_shifts)
    total += sum(-math.log(1.0 - alpha.check_probability(t))
                 for t in range(2, comparator.horizon + 1) if t not in shifts)
    return total / _eta(eta)


def bound_sleeping(pi: Sequence[float], schedule: EntrySchedule, comparator: ComparatorSequence,
                   alpha: Optional[RateSequence], beta: Optional[RateSequence], eta: float) -> float:
    """
    Regret bound of the growing sleeping aggregation against a sparse sequence
    with pool {e_1, ..., e_n}:

        sum_p ln((Pi_{M_T}/n) / pi_{e_p}) + n ln 2
        + sum_{t=2}^T [ln 1/(1-alpha_t) + (n-1) ln 1/(1-beta_t)]
        + sum_j [ln 1/alpha_{sigma_j} + ln 1/beta_{sigma_j}]

    all divided by eta.
    """
    alpha = alpha or RateSequence.inverse_time()
    beta = beta or RateSequence.inverse_time()
    pi = _prior(pi)
    partial = prior_partial_sums(pi)
    n = comparator.n
    mass = partial[schedule.entered(comparator.horizon)]
    total = sum(math.log((mass / n) / pi[e - 1]) for e in comparator.pool)
    total += n * math.log(2.0)
    for t in range(2, comparator.horizon + 1):
        total -= math.log(1.0 - alpha.check_probability(t))
        total -= (n - 1) * math.log(1.0 - beta.check_probability(t))
    for s in comparator.shifts:
        total -= math.log(alpha.check_probability(s)) + math.log(beta.check_probability(s))
    return total / _eta(eta)


def bound_sleeping_constant(pi: Sequence[float], schedule: EntrySchedule, i: int, horizon: int,
                            alpha: Optional[RateSequence], eta: float) -> float:
    """
    Regret of the growing sleeping aggregation against expert i over the
    rounds after its entry: (ln(Pi_{M_T}/pi_i) + ln 2 + sum_{t>tau_i} ln 1/(1-alpha_t)) / eta.
    """
    alpha = alpha or RateSequence.inverse_time()
    pi = _prior(pi)
    partial = prior_partial_sums(pi)
    m_total = schedule.entered(horizon)
    if not 1 <= i <= m_total:
        raise InvalidInputError(f"Expert {i} has not entered by round {horizon}")
    total = math.log(partial[m_total] / pi[i - 1]) + math.log(2.0)
    total -= sum(math.log(1.0 - alpha.check_probability(t))
                 for t in range(schedule.entry_time(i) + 1, horizon + 1))
    return total / _eta(eta)


# Information-theoretic reference values

def info_bound_admissible(max_experts: int, horizon: int, shifts: int, incumbent_shifts: int,
                          eta: float) -> float:
    """ln(M_T^{k+1} C(T-1, k1)) / eta."""
    return ((shifts + 1) * math.log(max_experts)
            + math.log(comb(horizon - 1, incumbent_shifts, exact=True))) / _eta(eta)


def info_bound_sparse(max_experts: int, pool_size: int, shifts: int, horizon: int, eta: float) -> float:
    """n ln(M_T/n) + (k+1) ln n + k ln(T/k), divided by eta."""
    total = pool_size * math.log(max_experts / pool_size) + (shifts + 1) * math.log(pool_size)
    if shifts > 0:
        total += shifts * math.log(horizon / shifts)
    return total / _eta(eta)


def info_bound_fixed_share(experts: int, horizon: int, shifts: int, eta: float) -> float:
    """ln(C(T-1, k) M^{k+1}) / eta, the log-count of sequences with k shifts."""
    return ((shifts + 1) * math.log(experts)
            + math.log(comb(horizon - 1, shifts, exact=True))) / _eta(eta)
