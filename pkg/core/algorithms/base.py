"""
Base aggregator interface and the algorithm registry.

Every algorithm is implemented twice over: as pure step functions on frozen
state values (the library surface), and as a ``BaseAggregator`` subclass
that drives those functions round by round for the experiment engine.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional
import logging

import numpy as np

from core.errors import InvalidInputError
from core.losses import LossModel, Prediction
from core.oracle.comparators import ComparatorClass
from core.priors import PriorWeights, RateSequence
from core.schedule import EntrySchedule

logger = logging.getLogger(__name__)


class AlgorithmStatus(str, Enum):
    """Aggregator lifecycle."""
    IDLE = "idle"
    RUNNING = "running"
    FINISHED = "finished"
    ERROR = "error"


@dataclass
class AlgorithmConfig:
    """Configuration of one aggregation algorithm."""
    algorithm_id: str
    name: str
    prior: PriorWeights = field(default_factory=PriorWeights)
    alpha: Optional[RateSequence] = None
    beta: Optional[RateSequence] = None
    eta: Optional[float] = None
    parameters: Dict[str, Any] = field(default_factory=dict)


class BaseAggregator(ABC):
    """
    Abstract base class for all aggregation algorithms.

    Subclasses hold a state value and replace it on every ``observe``; the
    engine calls ``predict`` then ``observe`` once per round, in order.
    """

    growing: bool = True
    supported_classes: tuple = ()

    def __init__(self, config: AlgorithmConfig, schedule: EntrySchedule, model: LossModel):
        self.config = config
        self.schedule = schedule
        self.model = model
        self.eta = float(config.eta) if config.eta is not None else model.eta
        self.eta_overridden = config.eta is not None and float(config.eta) != model.eta
        self.status = AlgorithmStatus.IDLE
        self.round = 1
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        if not self.growing and not schedule.is_fixed():
            raise InvalidInputError(f"{config.name} needs every expert to be present from round 1")
        self._priors: Optional[np.ndarray] = None

    @property
    def priors(self) -> np.ndarray:
        """Realized prior weights (pi_1, ..., pi_{M_T}) used by the bound calculators."""
        if self._priors is None:
            self._priors = self.config.prior.realize(self.schedule)
        return self._priors

    def entrant_priors(self, t: int) -> np.ndarray:
        return self.priors[self.schedule.entered(t - 1):self.schedule.entered(t)]

    def start(self):
        """Initialise the state before round 1."""
        self.status = AlgorithmStatus.RUNNING
        self.round = 1
        self.reset()
        self.logger.info(f"Algorithm {self.config.algorithm_id} started (eta={self.eta:.6g})")

    def finish(self):
        self.status = AlgorithmStatus.FINISHED
        self.logger.info(f"Algorithm {self.config.algorithm_id} finished after {self.round - 1} rounds")

    @abstractmethod
    def reset(self):
        """Build the round-1 state."""
        pass

    @abstractmethod
    def predict(self, xs: np.ndarray) -> Prediction:
        """
        Aggregate the predictions of the M_t entered experts.

        Args:
            xs: predictions of experts 1..M_t for the current round

        Returns:
            The learner's prediction
        """
        pass

    @abstractmethod
    def observe(self, xs: np.ndarray, y: Any):
        """Update the state with the outcome of the current round."""
        pass

    @property
    @abstractmethod
    def ops(self) -> int:
        """Cumulative number of weight entries touched."""
        pass

    @abstractmethod
    def weights(self) -> np.ndarray:
        """Normalized weights over the entered experts (awake mass for sleeping variants)."""
        pass

    def bound(self, comparator_class: ComparatorClass, comparator, horizon: int) -> Optional[float]:
        """
        Theoretical regret bound against a comparator, or None when the
        algorithm has no guarantee for that class.

        ``comparator`` is an expert index for ``CONSTANT`` and a
        ``ComparatorSequence`` otherwise.
        """
        return None

    def _advance(self):
        self.round += 1


class AlgorithmRegistry:
    """
    Registry for aggregation algorithms.

    Maps preset names to aggregator classes and builds instances.
    """

    def __init__(self):
        self._algorithm_classes: Dict[str, type] = {}
        self.logger = logging.getLogger(__name__)

    def register_algorithm_class(self, name: str, algorithm_class: type):
        """
        Register an aggregator class.

        Args:
            name: preset name
            algorithm_class: ``BaseAggregator`` subclass
        """
        if not issubclass(algorithm_class, BaseAggregator):
            raise ValueError("Algorithm class must inherit from BaseAggregator")
        self._algorithm_classes[name] = algorithm_class
        self.logger.debug(f"Registered algorithm class: {name}")

    def create_algorithm(self, config: AlgorithmConfig, schedule: EntrySchedule,
                         model: LossModel) -> BaseAggregator:
        """
        Create a new aggregator instance.

        Args:
            config: algorithm configuration (``config.name`` selects the class)
            schedule: entry schedule of the scenario
            model: loss model of the scenario

        Returns:
            Aggregator instance
        """
        if config.name not in self._algorithm_classes:
            raise InvalidInputError(f"Unknown algorithm: {config.name}")
        algorithm = self._algorithm_classes[config.name](config, schedule, model)
        self.logger.debug(f"Created algorithm: {config.algorithm_id} ({config.name})")
        return algorithm

    def get_algorithm_class(self, name: str) -> type:
        if name not in self._algorithm_classes:
            raise InvalidInputError(f"Unknown algorithm: {name}")
        return self._algorithm_classes[name]

    def get_available_algorithms(self) -> List[str]:
        """Get list of registered preset names."""
        return list(self._algorithm_classes.keys())


# Global algorithm registry instance
algorithm_registry = AlgorithmRegistry()
