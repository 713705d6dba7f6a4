"""
Comparator sequences and exhaustive enumeration of the comparison classes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.special import comb

from config import get_settings
from core.errors import EmptyComparatorClassError, GuardExceededError, InvalidInputError
from core.schedule import EntrySchedule

logger = logging.getLogger(__name__)


class ComparatorClass(str, Enum):
    """Comparison classes a regret bound can refer to."""
    CONSTANT = "constant"
    FRESH = "fresh"
    ADMISSIBLE = "admissible"
    SPARSE = "sparse"


@dataclass(frozen=True)
class ComparatorSequence:
    """
    An admissible sequence of experts i_1, ..., i_T (1-based indices).

    Shift times sigma_j are rounds t > 1 with i_t != i_{t-1}; a shift is
    fresh when i_t entered exactly at round t and incumbent otherwise.
    """
    indices: Tuple[int, ...]
    shifts: Tuple[int, ...]
    fresh_shifts: Tuple[int, ...]
    incumbent_shifts: Tuple[int, ...]

    @classmethod
    def from_indices(cls, indices: Sequence[int], schedule: EntrySchedule) -> "ComparatorSequence":
        indices = tuple(int(i) for i in indices)
        if not indices:
            raise InvalidInputError("A comparator sequence needs at least one round")
        shifts, fresh, incumbent = [], [], []
        for t, i in enumerate(indices, start=1):
            if not 1 <= i <= schedule.entered(t):
                raise InvalidInputError(f"Expert {i} has not entered at round {t} (M_t = {schedule.entered(t)})")
            if t > 1 and i != indices[t - 2]:
                shifts.append(t)
                if i > schedule.entered(t - 1):
                    fresh.append(t)
                else:
                    incumbent.append(t)
        return cls(indices, tuple(shifts), tuple(fresh), tuple(incumbent))

    @property
    def horizon(self) -> int:
        return len(self.indices)

    @property
    def k(self) -> int:
        return len(self.shifts)

    @property
    def k0(self) -> int:
        return len(self.fresh_shifts)

    @property
    def k1(self) -> int:
        return len(self.incumbent_shifts)

    @property
    def pool(self) -> Tuple[int, ...]:
        """Distinct experts used, e_1 < ... < e_n."""
        return tuple(sorted(set(self.indices)))

    @property
    def n(self) -> int:
        return len(self.pool)

    @property
    def is_fresh(self) -> bool:
        return not self.incumbent_shifts

    def segment_starts(self) -> Tuple[int, ...]:
        """(sigma_0 = 1, sigma_1, ..., sigma_k)."""
        return (1,) + self.shifts

    def segment_ends(self) -> Tuple[int, ...]:
        """(sigma_1 - 1, ..., sigma_k - 1, T)."""
        return tuple(s - 1 for s in self.shifts) + (self.horizon,)

    def wake_bits(self) -> np.ndarray:
        """n x T matrix a_{p,t} = 1{i_t = e_p}."""
        idx = np.asarray(self.indices)
        return (idx[np.newaxis, :] == np.asarray(self.pool)[:, np.newaxis]).astype(np.int64)

    def loss(self, losses: np.ndarray) -> float:
        """L_T(i^T) for a T' x M loss matrix with T' >= T."""
        idx = np.asarray(self.indices) - 1
        return float(losses[np.arange(self.horizon), idx].sum())


@dataclass(frozen=True)
class ComparatorClassSpec:
    """A comparison class: fresh, admissible or sparse sequences with at most ``max_shifts`` shifts."""
    kind: ComparatorClass
    max_shifts: int = 0
    pool_size: Optional[int] = None

    def enumerate(self, schedule: EntrySchedule, horizon: int, limit: Optional[int] = None):
        return enumerate_comparators(self.kind, schedule, horizon, self.max_shifts,
                                     pool_size=self.pool_size, limit=limit)


def enumeration_size_bound(schedule: EntrySchedule, horizon: int, max_shifts: int) -> int:
    """M_T^{k+1} C(T-1, k), the combinatorial guard quantity."""
    k = min(max_shifts, horizon - 1)
    return schedule.entered(horizon) ** (k + 1) * int(comb(horizon - 1, k, exact=True))


def check_enumeration_guard(schedule: EntrySchedule, horizon: int, max_shifts: int,
                            limit: Optional[int] = None) -> int:
    limit = limit or get_settings().enumeration_limit
    size = enumeration_size_bound(schedule, horizon, max_shifts)
    if size > limit:
        raise GuardExceededError(
            f"Comparator enumeration refused: M_T^(k+1) C(T-1,k) = {size} exceeds {limit}"
        )
    return size


def iter_comparators(kind, schedule: EntrySchedule, horizon: int, max_shifts: int,
                     pool_size: Optional[int] = None,
                     limit: Optional[int] = None) -> Iterator[ComparatorSequence]:
    """
    Lazily enumerate a comparison class in lexicographic order.

    Args:
        kind: fresh, admissible or sparse (constant is admissible with no shift)
        schedule: entry schedule
        horizon: T
        max_shifts: k, the largest number of shifts
        pool_size: n, required for sparse sequences
        limit: guard override

    Yields:
        Every member of the class exactly once
    """
    kind = ComparatorClass(kind)
    if horizon < 1 or horizon > schedule.horizon:
        raise InvalidInputError(f"Horizon {horizon} outside schedule of length {schedule.horizon}")
    if max_shifts < 0:
        raise InvalidInputError(f"max_shifts must be non-negative, got {max_shifts}")
    if kind == ComparatorClass.SPARSE and (pool_size is None or pool_size < 1):
        raise InvalidInputError("Sparse sequences need a pool size n >= 1")
    if kind == ComparatorClass.CONSTANT:
        max_shifts = 0
    check_enumeration_guard(schedule, horizon, max_shifts, limit)

    entered = [schedule.entered(t) for t in range(horizon + 1)]

    def extend(prefix, shifts_left, pool):
        t = len(prefix) + 1
        if t > horizon:
            yield ComparatorSequence.from_indices(prefix, schedule)
            return
        prev = prefix[-1]
        for i in range(1, entered[t] + 1):
            if i == prev:
                yield from extend(prefix + [i], shifts_left, pool)
                continue
            if shifts_left == 0:
                continue
            if kind == ComparatorClass.FRESH and i <= entered[t - 1]:
                continue
            if kind == ComparatorClass.SPARSE and i not in pool and len(pool) >= pool_size:
                continue
            yield from extend(prefix + [i], shifts_left - 1, pool | {i})

    for first in range(1, entered[1] + 1):
        yield from extend([first], max_shifts, frozenset([first]))


def enumerate_comparators(kind, schedule: EntrySchedule, horizon: int, max_shifts: int,
                          pool_size: Optional[int] = None,
                          limit: Optional[int] = None) -> list:
    """Exhaustive, duplicate-free list of the comparison class."""
    comparators = list(iter_comparators(kind, schedule, horizon, max_shifts, pool_size, limit))
    logger.debug(f"Enumerated {len(comparators)} {ComparatorClass(kind).value} comparators (T={horizon})")
    return comparators


def best_comparator_loss(comparators: Iterable[ComparatorSequence],
                         losses: np.ndarray) -> Tuple[ComparatorSequence, float]:
    """
    Comparator with the smallest cumulative loss.

    Ties are broken towards the lexicographically smallest sequence.
    """
    best, best_loss = None, float("inf")
    for comparator in comparators:
        loss = comparator.loss(losses)
        if best is None or loss < best_loss or (loss == best_loss and comparator.indices < best.indices):
            best, best_loss = comparator, loss
    if best is None:
        raise EmptyComparatorClassError("The comparison class is empty")
    return best, best_loss


def sample_comparator(rng: np.random.Generator, schedule: EntrySchedule, horizon: int, max_shifts: int,
                      pool_size: Optional[int] = None) -> ComparatorSequence:
    """
    A random admissible sequence with at most ``max_shifts`` shifts, using
    at most ``pool_size`` distinct experts when given. For horizons too long
    to enumerate.
    """
    k = int(rng.integers(0, min(max_shifts, horizon - 1) + 1))
    shifts = set(int(s) for s in rng.choice(np.arange(2, horizon + 1), size=k, replace=False)) if k else set()
    indices, pool = [], []
    current = int(rng.integers(1, schedule.entered(1) + 1))
    pool.append(current)
    for t in range(1, horizon + 1):
        if t in shifts:
            candidates = [i for i in range(1, schedule.entered(t) + 1) if i != current]
            if pool_size is not None and len(pool) >= pool_size:
                candidates = [i for i in candidates if i in pool]
            if candidates:
                current = int(rng.choice(candidates))
                if current not in pool:
                    pool.append(current)
        indices.append(current)
    return ComparatorSequence.from_indices(indices, schedule)
