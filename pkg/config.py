"""
Configuration module for the growing-experts aggregation toolkit.
Handles environment variables, numerical guards and the preset catalogues.
"""

from typing import Optional
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="GROWEXP_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO")

    # Loss configuration
    loss_cap: float = Field(default=700.0, gt=0)

    # Oracle guards
    enumeration_limit: int = Field(default=1_000_000, gt=0)
    brute_force_limit: int = Field(default=1_000_000, gt=0)
    dense_kernel_max_experts: int = Field(default=64, gt=0)

    # Experiment output
    out_dir: str = Field(default="runs")
    max_workers: int = Field(default=1, ge=1)

    # Verification
    tolerance: float = Field(default=1e-9, ge=0)
    default_seeds: int = Field(default=20, ge=1)
    suite_seed_offset: Optional[int] = Field(default=None)


@lru_cache()
def get_settings() -> Settings:
    """Get cached application settings."""
    return Settings()


ALGORITHM_PRESETS = {
    "hedge": {
        "name": "Exponential weights (fixed expert set)",
        "guarantee": "ln(1/pi_i)/eta against each expert",
        "growing": False,
    },
    "specialist_hedge": {
        "name": "Specialist aggregation over the declared universe",
        "guarantee": "ln(sum of active priors / pi_i)/eta",
        "growing": True,
    },
    "growing_hedge": {
        "name": "GrowingHedge",
        "guarantee": "ln(Pi_{M_T}/pi_i)/eta, O(M_t) per round",
        "growing": True,
    },
    "fixed_share": {
        "name": "Fixed Share",
        "guarantee": "(k+1) ln M + k ln 1/alpha + (T-k-1) ln 1/(1-alpha)",
        "growing": False,
    },
    "decreasing_share": {
        "name": "Decreasing Share",
        "guarantee": "(k+1) ln M + sum ln sigma_j + ln T",
        "growing": False,
    },
    "fresh_markov_hedge": {
        "name": "FreshMarkovHedge",
        "guarantee": "fresh sequences, no ln T overhead",
        "growing": True,
    },
    "growing_markov_hedge": {
        "name": "GrowingMarkovHedge",
        "guarantee": "admissible sequences, ln 1/alpha per incumbent shift",
        "growing": True,
    },
    "growing_sleeping_markov_hedge": {
        "name": "GrowingSleepingMarkovHedge",
        "guarantee": "sparse sequences, cost per pool member",
        "growing": True,
    },
}

PRIOR_PRESETS = {
    "uniform": {"formula": "pi_i = 1"},
    "inverse_index": {"formula": "pi_i = 1/i"},
    "entry_uniform": {"formula": "pi_i = 1/m_{tau_i}"},
    "entry_time_uniform": {"formula": "pi_i = 1/(tau_i m_{tau_i})"},
    "nu_sequence": {"formula": "pi_i = nu_{tau_i}/m_{tau_i}"},
    "upsilon_sequence": {"formula": "pi_i = upsilon_{tau_i}"},
    "sparse_rounds": {"formula": "pi_i = 1/(s(tau_i) m_{tau_i})"},
    "custom": {"formula": "user supplied, fixed at entry"},
}

ENTRY_KINDS = [
    "fixed",
    "periodic",
    "burst",
    "exponential",
    "random",
    "explicit",
]

SCENARIO_FAMILIES = {
    "bernoulli_forecasters": {
        "loss": "log",
        "description": "Piecewise-stationary Bernoulli signal, probability forecasters",
    },
    "drifting_mean": {
        "loss": "square",
        "description": "Drifting-mean bounded signal, constant-point experts",
    },
    "adversarial_tightness": {
        "loss": "log",
        "description": "Adversarial instance forcing regret ln M_T on GrowingHedge",
    },
}
