"""
Aggregation algorithms for fixed and growing expert sets.
"""

from core.algorithms.base import (
    AlgorithmConfig,
    AlgorithmRegistry,
    AlgorithmStatus,
    BaseAggregator,
    ComparatorClass,
    algorithm_registry,
)
from core.algorithms.growing import GrowingHedgeAggregator
from core.algorithms.growing_markov import FreshMarkovHedgeAggregator, GrowingMarkovHedgeAggregator
from core.algorithms.hedge import HedgeAggregator, SpecialistAggregator
from core.algorithms.markov import DecreasingShareAggregator, FixedShareAggregator
from core.algorithms.sleeping import GrowingSleepingMarkovHedgeAggregator

algorithm_registry.register_algorithm_class("hedge", HedgeAggregator)
algorithm_registry.register_algorithm_class("specialist_hedge", SpecialistAggregator)
algorithm_registry.register_algorithm_class("growing_hedge", GrowingHedgeAggregator)
algorithm_registry.register_algorithm_class("fixed_share", FixedShareAggregator)
algorithm_registry.register_algorithm_class("decreasing_share", DecreasingShareAggregator)
algorithm_registry.register_algorithm_class("fresh_markov_hedge", FreshMarkovHedgeAggregator)
algorithm_registry.register_algorithm_class("growing_markov_hedge", GrowingMarkovHedgeAggregator)
algorithm_registry.register_algorithm_class("growing_sleeping_markov_hedge", GrowingSleepingMarkovHedgeAggregator)

__all__ = [
    "AlgorithmConfig",
    "AlgorithmRegistry",
    "AlgorithmStatus",
    "BaseAggregator",
    "ComparatorClass",
    "algorithm_registry",
]
