"""
Prior weights on growing expert sets and the rate sequences they use.

Every prior weight pi_i is fixed when expert i enters and may only look at
i, tau_i and the entry counts up to round tau_i.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional
import math

import numpy as np

from core.errors import InvalidInputError
from core.schedule import EntrySchedule


class RateKind(str, Enum):
    """Named positive sequences indexed by round."""
    CONSTANT = "constant"
    INVERSE_TIME = "inverse_time"
    POWER = "power"
    INVERSE_T_LOG_SQUARED = "inverse_t_log_squared"
    INVERSE_T_LOG_T = "inverse_t_log_t"


@dataclass(frozen=True)
class RateSequence:
    """A positive sequence (r_t) such as nu_t, upsilon_t, alpha_t or beta_t."""
    kind: RateKind = RateKind.INVERSE_TIME
    value: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind == RateKind.CONSTANT and not self.value > 0:
            raise InvalidInputError(f"Constant rate must be positive, got {self.value}")

    @classmethod
    def constant(cls, value: float) -> "RateSequence":
        return cls(RateKind.CONSTANT, value=float(value))

    @classmethod
    def inverse_time(cls) -> "RateSequence":
        return cls(RateKind.INVERSE_TIME)

    @classmethod
    def power(cls, exponent: float) -> "RateSequence":
        return cls(RateKind.POWER, exponent=float(exponent))

    def __call__(self, t: int) -> float:
        if t < 1:
            raise InvalidInputError(f"Rates are indexed from round 1, got {t}")
        if self.kind == RateKind.CONSTANT:
            return self.value
        if self.kind == RateKind.INVERSE_TIME:
            return 1.0 / t
        if self.kind == RateKind.POWER:
            return float(t) ** (-self.exponent)
        if self.kind == RateKind.INVERSE_T_LOG_SQUARED:
            return 1.0 / (t * math.log(t + 1) ** 2)
        if t < 2:
            raise InvalidInputError("1/(t ln t) is only defined from round 2")
        return 1.0 / (t * math.log(t))

    def values(self, start: int, stop: int) -> np.ndarray:
        """r_start, ..., r_stop (inclusive)."""
        return np.array([self(t) for t in range(start, stop + 1)], dtype=float)

    def check_probability(self, t: int) -> float:
        """r_t, checked to lie in (0, 1) as a switching probability must."""
        r = self(t)
        if not 0.0 < r < 1.0:
            raise InvalidInputError(f"Switching rate at round {t} must lie in (0, 1), got {r}")
        return r


class PriorPreset(str, Enum):
    """Prior presets on growing expert sets."""
    UNIFORM = "uniform"
    INVERSE_INDEX = "inverse_index"
    ENTRY_UNIFORM = "entry_uniform"
    ENTRY_TIME_UNIFORM = "entry_time_uniform"
    NU_SEQUENCE = "nu_sequence"
    UPSILON_SEQUENCE = "upsilon_sequence"
    SPARSE_ROUNDS = "sparse_rounds"
    CUSTOM = "custom"


CustomPrior = Callable[[int, int, EntrySchedule], float]


@dataclass(frozen=True)
class PriorWeights:
    """
    A prior preset together with its parameters.

    ``sequence`` carries nu (``NU_SEQUENCE``) or upsilon (``UPSILON_SEQUENCE``);
    ``custom`` receives ``(i, tau_i, schedule truncated at tau_i)``.
    """
    preset: PriorPreset = PriorPreset.UNIFORM
    sequence: Optional[RateSequence] = None
    custom: Optional[CustomPrior] = None

    def __post_init__(self):
        needs_sequence = self.preset in (PriorPreset.NU_SEQUENCE, PriorPreset.UPSILON_SEQUENCE)
        if needs_sequence and self.sequence is None:
            object.__setattr__(self, "sequence", RateSequence.inverse_time())
        if self.preset == PriorPreset.CUSTOM and self.custom is None:
            raise InvalidInputError("Custom prior needs a weight function")

    def weight(self, schedule: EntrySchedule, i: int) -> float:
        return make_prior(self, schedule, i)

    def entrants(self, schedule: EntrySchedule, t: int) -> np.ndarray:
        """Realized weights of the experts entering at round t."""
        return np.array([make_prior(self, schedule, i) for i in schedule.entrants(t)], dtype=float)

    def realize(self, schedule: EntrySchedule) -> np.ndarray:
        """(pi_1, ..., pi_{M_T})."""
        return np.array([make_prior(self, schedule, i) for i in range(1, schedule.total + 1)], dtype=float)

    def scaled(self, factor: float) -> "PriorWeights":
        """The same prior multiplied by a positive constant."""
        if not factor > 0:
            raise InvalidInputError(f"Scale factor must be positive, got {factor}")
        base = self
        return PriorWeights(
            PriorPreset.CUSTOM,
            custom=lambda i, tau, schedule: factor * make_prior(base, schedule, i),
        )


def make_prior(preset, schedule: EntrySchedule, i: int) -> float:
    """
    Prior weight pi_i of expert i, computed at its entry time.

    Args:
        preset: a ``PriorWeights`` or a bare ``PriorPreset``/name
        schedule: entry schedule (only rounds up to tau_i are read)
        i: 1-based expert index

    Returns:
        The positive weight pi_i
    """
    prior = preset if isinstance(preset, PriorWeights) else PriorWeights(PriorPreset(preset))
    tau = schedule.entry_time(i)
    m_tau = schedule.count(tau)

    if prior.preset == PriorPreset.UNIFORM:
        weight = 1.0
    elif prior.preset == PriorPreset.INVERSE_INDEX:
        weight = 1.0 / i
    elif prior.preset == PriorPreset.ENTRY_UNIFORM:
        weight = 1.0 / m_tau
    elif prior.preset == PriorPreset.ENTRY_TIME_UNIFORM:
        weight = 1.0 / (tau * m_tau)
    elif prior.preset == PriorPreset.NU_SEQUENCE:
        weight = prior.sequence(tau) / m_tau
    elif prior.preset == PriorPreset.UPSILON_SEQUENCE:
        weight = prior.sequence(tau)
    elif prior.preset == PriorPreset.SPARSE_ROUNDS:
        weight = 1.0 / (schedule.active_rounds(tau) * m_tau)
    else:
        weight = float(prior.custom(i, tau, schedule.truncated(tau)))

    if not weight > 0 or not math.isfinite(weight):
        raise InvalidInputError(f"Prior weight of expert {i} must be positive and finite, got {weight}")
    return weight
