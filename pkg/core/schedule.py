"""
Entry schedules: how many new experts arrive at each round.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from core.errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class EntrySchedule:
    """
    Arrival process of the experts.

    ``counts[t-1]`` is m_t, the number of experts entering at round t.
    Experts are indexed 1, 2, ... in entry order; rounds start at 1.
    Rounds beyond the stored horizon have no entrants.
    """
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size == 0:
            raise InvalidInputError("An entry schedule needs at least one round")
        if np.any(counts < 0):
            raise InvalidInputError("Entry counts must be non-negative")
        if counts[0] < 1:
            raise InvalidInputError("At least one expert must enter at round 1")
        counts.setflags(write=False)
        cumulative = np.cumsum(counts)
        cumulative.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "_cumulative", cumulative)

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "EntrySchedule":
        return cls(np.asarray(list(counts), dtype=np.int64))

    @classmethod
    def from_entry_times(cls, entry_times: Sequence[int], horizon: int = None) -> "EntrySchedule":
        """Rebuild the counts from the (non-decreasing) entry times tau_1, tau_2, ..."""
        taus = np.asarray(entry_times, dtype=np.int64)
        if taus.size == 0 or taus[0] != 1 or np.any(np.diff(taus) < 0):
            raise InvalidInputError("Entry times must start at 1 and be non-decreasing")
        horizon = int(horizon or taus[-1])
        if horizon < taus[-1]:
            raise InvalidInputError(f"Horizon {horizon} precedes the last entry time {taus[-1]}")
        return cls(np.bincount(taus - 1, minlength=horizon))

    @classmethod
    def fixed(cls, experts: int, horizon: int) -> "EntrySchedule":
        """All experts present from round 1."""
        counts = np.zeros(horizon, dtype=np.int64)
        counts[0] = experts
        return cls(counts)

    @property
    def horizon(self) -> int:
        return int(self.counts.size)

    @property
    def cumulative(self) -> np.ndarray:
        return self._cumulative

    @property
    def total(self) -> int:
        return int(self._cumulative[-1])

    def count(self, t: int) -> int:
        """m_t (zero past the horizon)."""
        if t < 1:
            raise InvalidInputError(f"Rounds start at 1, got {t}")
        return int(self.counts[t - 1]) if t <= self.horizon else 0

    def entered(self, t: int) -> int:
        """M_t, the number of experts entered by round t (M_0 = 0)."""
        if t <= 0:
            return 0
        return int(self._cumulative[min(t, self.horizon) - 1])

    def entry_time(self, i: int) -> int:
        """tau_i = min{t : i <= M_t}."""
        if not 1 <= i <= self.total:
            raise InvalidInputError(f"Expert {i} never enters (M_T = {self.total})")
        return int(np.searchsorted(self._cumulative, i, side="left")) + 1

    def entry_times(self) -> np.ndarray:
        """Vector (tau_1, ..., tau_{M_T})."""
        return np.repeat(np.arange(1, self.horizon + 1), self.counts)

    def active_rounds(self, t: int) -> int:
        """s(t) = |{t' <= t : m_t' >= 1}|."""
        return int(np.count_nonzero(self.counts[:min(t, self.horizon)]))

    def entrants(self, t: int) -> range:
        """Indices of the experts entering at round t."""
        return range(self.entered(t - 1) + 1, self.entered(t) + 1)

    def truncated(self, horizon: int) -> "EntrySchedule":
        return EntrySchedule(self.counts[:horizon])

    def is_fixed(self) -> bool:
        return self.total == int(self.counts[0])
