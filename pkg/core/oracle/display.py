"""
Readable relaxations of the exact bounds for the standard prior presets.

Each function upper-bounds the corresponding exact calculator in
``core.oracle.bounds`` for the stated prior and switching rates. The uniform
variants assume pi_i = 1 and are used for the worst-case comparisons.
"""

import math
from typing import Optional

import numpy as np

from core.errors import InvalidInputError
from core.oracle.bounds import _eta, telescoping_sum
from core.oracle.comparators import ComparatorSequence
from core.priors import RateSequence
from core.schedule import EntrySchedule


def _first_expert_weight_term(schedule: EntrySchedule, i: int) -> float:
    return math.log(schedule.count(schedule.entry_time(i)))


# Constant experts

def display_constant_entry_time(schedule: EntrySchedule, i: int, horizon: int, eta: float) -> float:
    """Prior 1/(tau m_tau): (ln m_tau + ln tau + ln(1 + ln T)) / eta."""
    tau = schedule.entry_time(i)
    return (math.log(schedule.count(tau)) + math.log(tau) + math.log(1.0 + math.log(horizon))) / _eta(eta)


def display_constant_inverse_index(i: int, max_experts: int, eta: float) -> float:
    """Prior 1/i: (ln i + ln(1 + ln M_T)) / eta."""
    return (math.log(i) + math.log(1.0 + math.log(max_experts))) / _eta(eta)


def display_constant_nu(schedule: EntrySchedule, i: int, horizon: int, nu: RateSequence,
                        eta: float) -> float:
    """Prior nu_tau/m_tau: (ln m_tau + ln 1/nu_tau + ln sum_{t<=T} nu_t) / eta."""
    tau = schedule.entry_time(i)
    return (math.log(schedule.count(tau)) - math.log(nu(tau))
            + math.log(nu.values(1, horizon).sum())) / _eta(eta)


def display_constant_upsilon(schedule: EntrySchedule, i: int, horizon: int, upsilon: RateSequence,
                             eta: float) -> float:
    """Prior upsilon_tau: (ln 1/upsilon_tau + ln sum_{t<=T} m_t upsilon_t) / eta."""
    tau = schedule.entry_time(i)
    counts = np.array([schedule.count(t) for t in range(1, horizon + 1)], dtype=float)
    return (-math.log(upsilon(tau)) + math.log(counts @ upsilon.values(1, horizon))) / _eta(eta)


def display_constant_sparse_rounds(schedule: EntrySchedule, i: int, horizon: int, eta: float) -> float:
    """Prior 1/(s(tau) m_tau): (ln m_tau + ln s(tau) + ln(1 + ln s(T))) / eta."""
    tau = schedule.entry_time(i)
    return (math.log(schedule.count(tau)) + math.log(schedule.active_rounds(tau))
            + math.log(1.0 + math.log(schedule.active_rounds(horizon)))) / _eta(eta)


# Sequences of experts, prior pi_i = 1/m_{tau_i}

def display_fresh(schedule: EntrySchedule, comparator: ComparatorSequence, eta: float) -> float:
    """(ln m_1 + sum_j (ln m_{sigma_j} + ln sigma_j) + ln T) / eta."""
    if not comparator.is_fresh:
        raise InvalidInputError("Comparator switches to an incumbent expert")
    total = math.log(schedule.count(1)) + math.log(comparator.horizon)
    total += sum(math.log(schedule.count(s)) + math.log(s) for s in comparator.shifts)
    return total / _eta(eta)


def display_admissible(schedule: EntrySchedule, comparator: ComparatorSequence, eta: float) -> float:
    """
    With alpha_t = 1/t:
    (ln m_{tau(i_1)} + sum_j (ln m_{tau(i_{sigma_j})} + ln sigma_j) + sum_{sigma^1} ln sigma + 2 ln T) / eta.
    """
    total = _first_expert_weight_term(schedule, comparator.indices[0]) + 2.0 * math.log(comparator.horizon)
    for s in comparator.shifts:
        total += _first_expert_weight_term(schedule, comparator.indices[s - 1]) + math.log(s)
    total += sum(math.log(s) for s in comparator.incumbent_shifts)
    return total / _eta(eta)


def display_sparse(schedule: EntrySchedule, comparator: ComparatorSequence, eta: float,
                   include_prior_mass: bool = True) -> float:
    """
    Prior 1/(tau m_tau) with alpha_t = beta_t = 1/t:
    (sum_p (ln tau_{e_p} + ln(m_{tau_{e_p}}/n)) + n ln(2T) + 2 sum_j ln sigma_j) / eta,
    plus (n/eta) ln Pi_{M_T} when ``include_prior_mass``; Pi_{M_T} <= 1 + ln T.
    """
    n = comparator.n
    horizon = comparator.horizon
    total = 0.0
    for e in comparator.pool:
        tau = schedule.entry_time(e)
        total += math.log(tau) + math.log(schedule.count(tau) / n)
    total += n * math.log(2.0 * horizon) + 2.0 * sum(math.log(s) for s in comparator.shifts)
    if include_prior_mass:
        rounds = np.array([t for t in range(1, horizon + 1) if schedule.count(t) > 0], dtype=float)
        total += n * math.log(np.sum(1.0 / rounds))
    return total / _eta(eta)


def display_fixed_share(experts: int, horizon: int, shifts: int, eta: float) -> float:
    """((k+1) ln M + k ln((T-1)/k) + k) / eta, the tuned Fixed Share bound relaxed."""
    total = (shifts + 1) * math.log(experts)
    if shifts > 0:
        total += shifts * math.log((horizon - 1) / shifts) + shifts
    return total / _eta(eta)


def display_decreasing_share(experts: int, comparator_shifts, horizon: int, eta: float) -> float:
    """((k+1) ln M + sum_j ln sigma_j + ln T) / eta."""
    return ((len(comparator_shifts) + 1) * math.log(experts)
            + sum(math.log(s) for s in comparator_shifts) + telescoping_sum(horizon)) / _eta(eta)


# Uniform prior pi_i = 1

def uniform_constant(max_experts: int, eta: float) -> float:
    """ln M_T / eta."""
    return math.log(max_experts) / _eta(eta)


def uniform_fresh(schedule: EntrySchedule, comparator: ComparatorSequence, eta: float) -> float:
    """(sum_j ln M_{sigma_j - 1} + ln M_T) / eta."""
    total = math.log(schedule.entered(comparator.horizon))
    total += sum(math.log(schedule.entered(s - 1)) for s in comparator.shifts)
    return total / _eta(eta)


def uniform_admissible(schedule: EntrySchedule, comparator: ComparatorSequence, eta: float) -> float:
    """((k+1) ln M_T + (k1+1) ln T) / eta, with alpha_t = 1/t."""
    horizon = comparator.horizon
    return ((comparator.k + 1) * math.log(schedule.entered(horizon))
            + (comparator.k1 + 1) * math.log(horizon)) / _eta(eta)


def uniform_sparse(max_experts: int, pool_size: int, shifts: int, horizon: int, eta: float,
                   alpha: Optional[RateSequence] = None) -> float:
    """
    With alpha_t = beta_t = 1/(t ln t):
    n ln(M_T/n) + n(ln 2 + c_T ln ln T) + 2k ln T + 2k ln ln T, divided by eta,
    where c_T ln ln T = sum_{t=2}^T ln 1/(1 - alpha_t).
    """
    if horizon < 3:
        raise InvalidInputError("The ln ln T form needs T >= 3")
    alpha = alpha or RateSequence(kind="inverse_t_log_t")
    switching = float(-np.sum(np.log1p(-alpha.values(2, horizon)))) if horizon >= 2 else 0.0
    n, k = pool_size, shifts
    log_log = math.log(math.log(horizon))
    total = n * math.log(max_experts / n) + n * (math.log(2.0) + switching)
    total += 2 * k * math.log(horizon) + 2 * k * log_log
    return total / _eta(eta)
