"""
Run configuration documents for the command-line front end.
Every model rejects unknown keys and validates before any computation starts.
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional, Union
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import ALGORITHM_PRESETS, ENTRY_KINDS, SCENARIO_FAMILIES
from core.algorithms.base import AlgorithmConfig
from core.errors import ConfigError
from core.losses import LossModel
from core.oracle.comparators import ComparatorClass, ComparatorClassSpec
from core.priors import PriorPreset, PriorWeights, RateKind, RateSequence


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LossKindName(str, Enum):
    """Loss families selectable from a config file."""
    LOG = "log"
    SQUARE = "square"


class RateSpec(StrictModel):
    """A rate sequence nu_t, upsilon_t, alpha_t or beta_t."""
    kind: RateKind = Field(default=RateKind.INVERSE_TIME, description="Sequence family")
    value: float = Field(default=1.0, gt=0, description="Constant value for kind=constant")
    exponent: float = Field(default=1.0, gt=0, description="Exponent p of t^-p for kind=power")

    def build(self) -> RateSequence:
        return RateSequence(self.kind, value=self.value, exponent=self.exponent)


class PriorSpec(StrictModel):
    """Prior preset; custom priors are only available from Python."""
    preset: PriorPreset = Field(default=PriorPreset.UNIFORM, description="Prior preset name")
    sequence: Optional[RateSpec] = Field(None, description="nu or upsilon sequence")

    @field_validator("preset")
    @classmethod
    def no_custom(cls, value):
        if value == PriorPreset.CUSTOM:
            raise ValueError("custom priors cannot be declared in a config file")
        return value

    def build(self) -> PriorWeights:
        return PriorWeights(self.preset, sequence=self.sequence.build() if self.sequence else None)


class EntrySpec(StrictModel):
    """How experts arrive."""
    kind: str = Field(default="periodic", description=f"One of {', '.join(ENTRY_KINDS)}")
    experts: int = Field(default=1, ge=1, description="Experts per entry event (total for kind=fixed)")
    period: int = Field(default=5, ge=1, description="Rounds between entries for kind=periodic")
    rounds: List[int] = Field(default_factory=lambda: [1], description="Burst rounds for kind=burst")
    rate: float = Field(default=0.5, gt=0, description="Poisson mean per round for kind=random")
    counts: Optional[List[int]] = Field(None, description="Explicit m_1, m_2, ... for kind=explicit")

    @field_validator("kind")
    @classmethod
    def known_kind(cls, value):
        if value not in ENTRY_KINDS:
            raise ValueError(f"unknown entry kind '{value}', expected one of {ENTRY_KINDS}")
        return value


class LossSpec(StrictModel):
    kind: LossKindName = Field(..., description="log or square")
    alphabet_size: int = Field(default=2, ge=1, description="Outcome alphabet for log loss")
    a: float = Field(default=0.0, description="Lower end of the square-loss range")
    b: float = Field(default=1.0, description="Upper end of the square-loss range")
    cap: Optional[float] = Field(None, gt=0, description="Log-loss cap (defaults to settings.loss_cap)")

    @model_validator(mode="after")
    def ordered_range(self):
        if self.kind == LossKindName.SQUARE and not self.b > self.a:
            raise ValueError(f"square loss needs a < b, got [{self.a}, {self.b}]")
        return self

    def build(self, default_cap: float) -> LossModel:
        if self.kind == LossKindName.LOG:
            return LossModel.log_loss(self.alphabet_size, self.cap or default_cap)
        return LossModel.square_loss(self.a, self.b)


class ScenarioSpec(StrictModel):
    """One scenario: a signal, an expert panel and an entry schedule."""
    name: str = Field(..., min_length=1, description="Scenario name, used in file names")
    family: str = Field(..., description=f"One of {', '.join(SCENARIO_FAMILIES)}")
    horizon: int = Field(..., ge=1, description="Number of rounds T")
    seed: int = Field(default=0, ge=0, description="Seed of the scenario generator")
    entry: EntrySpec = Field(default_factory=EntrySpec)
    loss: Optional[LossSpec] = Field(None, description="Defaults to the family's loss")
    segment_length: int = Field(default=25, ge=1, description="Rounds per stationary segment")
    noise: float = Field(default=0.1, ge=0, description="Noise level of the drifting-mean signal")
    max_experts: Optional[int] = Field(None, ge=1, description="M_T of the adversarial instance")

    @field_validator("family")
    @classmethod
    def known_family(cls, value):
        if value not in SCENARIO_FAMILIES:
            raise ValueError(f"unknown scenario family '{value}', expected one of {list(SCENARIO_FAMILIES)}")
        return value

    @model_validator(mode="after")
    def consistent(self):
        expected = SCENARIO_FAMILIES[self.family]["loss"]
        if self.loss is not None and self.loss.kind.value != expected:
            raise ValueError(f"family {self.family} needs {expected} loss, got {self.loss.kind.value}")
        if self.entry.kind == "explicit":
            if not self.entry.counts or len(self.entry.counts) > self.horizon:
                raise ValueError("explicit entry needs 1..horizon counts")
            if self.entry.counts[0] < 1 or min(self.entry.counts) < 0:
                raise ValueError("explicit counts must be non-negative with m_1 >= 1")
        if any(r < 1 or r > self.horizon for r in self.entry.rounds):
            raise ValueError("burst rounds must lie in 1..horizon")
        return self


class AlgorithmSpec(StrictModel):
    """An algorithm preset with its parameters."""
    preset: str = Field(..., description=f"One of {', '.join(ALGORITHM_PRESETS)}")
    id: Optional[str] = Field(None, description="Label in reports (defaults to the preset)")
    prior: PriorSpec = Field(default_factory=PriorSpec)
    alpha: Optional[RateSpec] = Field(None, description="Switching / falling-asleep rate")
    beta: Optional[RateSpec] = Field(None, description="Waking rate of the sleeping variant")
    eta: Optional[float] = Field(None, gt=0, description="Learning-rate override (flagged in reports)")

    @field_validator("preset")
    @classmethod
    def known_preset(cls, value):
        if value not in ALGORITHM_PRESETS:
            raise ValueError(f"unknown algorithm preset '{value}', expected one of {list(ALGORITHM_PRESETS)}")
        return value

    @property
    def label(self) -> str:
        return self.id or self.preset

    def build(self) -> AlgorithmConfig:
        return AlgorithmConfig(
            algorithm_id=self.label,
            name=self.preset,
            prior=self.prior.build(),
            alpha=self.alpha.build() if self.alpha else None,
            beta=self.beta.build() if self.beta else None,
            eta=self.eta,
        )


class ComparatorSpec(StrictModel):
    kind: ComparatorClass = Field(default=ComparatorClass.CONSTANT)
    max_shifts: int = Field(default=0, ge=0, description="k")
    pool_size: Optional[int] = Field(None, ge=1, description="n, sparse class only")

    @model_validator(mode="after")
    def pool_for_sparse(self):
        if self.kind == ComparatorClass.SPARSE and self.pool_size is None:
            raise ValueError("sparse comparators need pool_size")
        return self

    def build(self) -> ComparatorClassSpec:
        return ComparatorClassSpec(self.kind, self.max_shifts, self.pool_size)


class RunConfig(StrictModel):
    """A full run: every algorithm on every scenario."""
    scenarios: List[ScenarioSpec] = Field(..., min_length=1)
    algorithms: List[AlgorithmSpec] = Field(..., min_length=1)
    comparators: List[ComparatorSpec] = Field(default_factory=lambda: [ComparatorSpec()])
    out_dir: Optional[str] = Field(None, description="Output directory (defaults to settings.out_dir)")
    seed: Optional[int] = Field(None, ge=0, description="Overrides every scenario seed")

    @model_validator(mode="after")
    def unique_labels(self):
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ValueError(f"algorithm labels must be unique, got {labels}")
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ValueError(f"scenario names must be unique, got {names}")
        return self


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_run_config(data: Union[dict, str]) -> RunConfig:
    """Validate a config mapping (or JSON text), raising ConfigError with field names."""
    try:
        if isinstance(data, str):
            return RunConfig.model_validate_json(data)
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration: {_format_validation_error(e)}") from e


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read a JSON or TOML run configuration."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ConfigError(f"Cannot parse config {path}: {e}") from e
    return parse_run_config(data)
