"""
Pytest configuration and shared fixtures for the growing-experts toolkit tests.
"""

import json
import os
import sys

import numpy as np
import pytest

# Add project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import get_settings
from core.algorithms import AlgorithmConfig
from core.harness.scenarios import fuzz_scenario, make_rng
from core.losses import LossModel
from core.priors import PriorPreset, PriorWeights
from core.schedule import EntrySchedule


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Rebuild cached settings around every test so env overrides never leak."""
    monkeypatch.delenv("GROWEXP_SUITE_SEED_OFFSET", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def settings_override(monkeypatch):
    """Set GROWEXP_* variables and return the reloaded settings."""
    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(f"GROWEXP_{key.upper()}", str(value))
        get_settings.cache_clear()
        return get_settings()
    return apply


@pytest.fixture
def rng():
    """Seeded PCG64 generator."""
    return make_rng(12345)


@pytest.fixture
def log_loss():
    """Binary log loss."""
    return LossModel.log_loss(2)


@pytest.fixture
def square_loss():
    """Square loss on [0, 1], eta = 1/2."""
    return LossModel.square_loss(0.0, 1.0)


@pytest.fixture
def fixed_schedule():
    """Four experts present from round 1, ten rounds."""
    return EntrySchedule.fixed(4, 10)


@pytest.fixture
def growing_schedule():
    """Two experts at round 1, one at rounds 3 and 4, two at round 7; T = 8."""
    return EntrySchedule.from_counts([2, 0, 1, 1, 0, 0, 2, 0])


@pytest.fixture
def sample_config():
    """Factory for algorithm configurations."""
    def build(name, prior=PriorPreset.UNIFORM, **kwargs):
        return AlgorithmConfig(algorithm_id=kwargs.pop("algorithm_id", name), name=name,
                               prior=PriorWeights(prior), **kwargs)
    return build


@pytest.fixture
def bernoulli_scenario():
    """Small log-loss scenario with a growing panel."""
    return fuzz_scenario(7, max_horizon=30, max_experts=6, family="bernoulli_forecasters", min_horizon=20)


@pytest.fixture
def drifting_scenario():
    """Small square-loss scenario with a growing panel."""
    return fuzz_scenario(11, max_horizon=30, max_experts=6, family="drifting_mean", min_horizon=20)


def play(scenario):
    """Recorded expert predictions and outcomes of a scenario (no adversary)."""
    scenario.panel.reset()
    xs, ys = [], []
    for t in range(1, scenario.horizon + 1):
        x = scenario.panel.predict(t)
        y = scenario.outcome(t, None)
        xs.append(x)
        ys.append(y)
        scenario.panel.observe(t, y)
    return xs, ys


@pytest.fixture
def recorded():
    """Expose ``play`` to tests."""
    return play


@pytest.fixture
def random_distributions(rng):
    """Factory for (T, M, K) arrays of random probability vectors."""
    def build(horizon, experts, alphabet=2):
        return rng.dirichlet(np.ones(alphabet), size=(horizon, experts))
    return build


@pytest.fixture
def run_config_dict():
    """A small valid run configuration."""
    return {
        "scenarios": [
            {
                "name": "bern",
                "family": "bernoulli_forecasters",
                "horizon": 12,
                "seed": 3,
                "entry": {"kind": "periodic", "experts": 1, "period": 4},
            },
            {
                "name": "drift",
                "family": "drifting_mean",
                "horizon": 10,
                "seed": 4,
                "entry": {"kind": "burst", "experts": 2, "rounds": [1, 5]},
            },
        ],
        "algorithms": [
            {"preset": "growing_hedge", "prior": {"preset": "entry_uniform"}},
            {"preset": "growing_markov_hedge", "id": "gmh"},
        ],
        "comparators": [
            {"kind": "constant"},
            {"kind": "fresh", "max_shifts": 1},
        ],
    }


@pytest.fixture
def config_file(tmp_path, run_config_dict):
    """Run configuration written to a JSON file."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps(run_config_dict))
    return path
