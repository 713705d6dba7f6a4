"""
Regret reports and their serialized forms.

Traces are CSV files with one row per round; reports are JSON documents.
Floats are written with 17 significant digits so a file read back gives the
same doubles, and identical runs give identical bytes.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import json
import math
import os
import tempfile

import numpy as np
import pandas as pd
from pydantic_core import PydanticSerializationError, to_jsonable_python

TRACE_COLUMNS = ["round", "algo", "loss", "cum_loss", "best_comp_loss", "regret", "bound", "slack"]
FLOAT_FORMAT = "%.17g"


@dataclass
class ComparatorResult:
    """Best comparator of one class at the final round, with its bound."""
    kind: str
    max_shifts: int = 0
    pool_size: Optional[int] = None
    count: Optional[int] = None
    best: Optional[List[int]] = None
    best_loss: Optional[float] = None
    regret: Optional[float] = None
    bound: Optional[float] = None
    slack: Optional[float] = None
    worst_slack: Optional[float] = None
    worst_comparator: Optional[List[int]] = None
    reference_bound: Optional[float] = None
    bound_only: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class RegretReport:
    """
    Per-round and final regret of one algorithm on one scenario.

    The per-round columns refer to the best constant expert so far, where an
    expert is charged the learner's loss before it enters.
    """
    scenario: str
    algorithm: str
    preset: str
    eta: float
    learner_losses: np.ndarray
    expert_losses: np.ndarray
    best_constant_losses: np.ndarray
    best_constant_experts: np.ndarray
    constant_bounds: np.ndarray
    comparators: List[ComparatorResult] = field(default_factory=list)
    flags: Dict[str, Any] = field(default_factory=dict)
    ops: int = 0
    scenario_info: Dict[str, Any] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return int(self.learner_losses.size)

    @property
    def cumulative_losses(self) -> np.ndarray:
        return np.cumsum(self.learner_losses)

    @property
    def total_loss(self) -> float:
        return float(self.cumulative_losses[-1])

    @property
    def constant_regrets(self) -> np.ndarray:
        return self.cumulative_losses - self.best_constant_losses

    @property
    def final_regret(self) -> float:
        return float(self.constant_regrets[-1])

    @property
    def worst_slack(self) -> float:
        """Smallest bound - regret over everything checked (constant class and enumerated classes)."""
        slacks = [float(np.nanmin(self.constant_bounds - self.constant_regrets))] \
            if np.any(np.isfinite(self.constant_bounds)) else []
        slacks += [c.worst_slack for c in self.comparators if c.worst_slack is not None]
        return min(slacks) if slacks else math.inf

    def to_frame(self) -> pd.DataFrame:
        regret = self.constant_regrets
        return pd.DataFrame({
            "round": np.arange(1, self.horizon + 1),
            "algo": self.algorithm,
            "loss": self.learner_losses,
            "cum_loss": self.cumulative_losses,
            "best_comp_loss": self.best_constant_losses,
            "regret": regret,
            "bound": self.constant_bounds,
            "slack": self.constant_bounds - regret,
        }, columns=TRACE_COLUMNS)

    def summary(self) -> Dict[str, Any]:
        return {
            "horizon": self.horizon,
            "total_loss": self.total_loss,
            "best_constant_expert": int(self.best_constant_experts[-1]),
            "best_constant_loss": float(self.best_constant_losses[-1]),
            "regret": self.final_regret,
            "bound": float(self.constant_bounds[-1]),
            "slack": float(self.constant_bounds[-1] - self.final_regret),
            "worst_slack": self.worst_slack,
            "ops": self.ops,
            "comparators": [c.to_dict() for c in self.comparators],
        }

    def to_dict(self) -> Dict[str, Any]:
        frame = self.to_frame()
        return {
            "scenario": self.scenario_info or {"name": self.scenario},
            "algorithm": {"id": self.algorithm, "preset": self.preset, "eta": self.eta},
            "per_round": {column: frame[column].tolist() for column in TRACE_COLUMNS},
            "summary": self.summary(),
            "flags": dict(self.flags),
        }

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def write(self, out_dir: Union[str, Path]) -> Dict[str, Path]:
        """Write ``<scenario>__<algorithm>.csv`` and ``.json`` atomically."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = f"{self.scenario}__{self.algorithm}"
        paths = {"trace": out_dir / f"{stem}.csv", "report": out_dir / f"{stem}.json"}
        write_atomic(paths["trace"], self.to_csv())
        write_atomic(paths["report"], self.to_json())
        return paths


def _numpy_fallback(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _emit(value: Any) -> str:
    # json.dumps writes shortest-repr floats; traces need a fixed 17 digits
    if isinstance(value, float):
        return format(value, ".17g") if math.isfinite(value) else "null"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_emit(v)}" for k, v in value.items()) + "}"
    if isinstance(value, list):
        return "[" + ", ".join(_emit(v) for v in value) + "]"
    return json.dumps(value)


def dumps(obj: Any) -> str:
    """
    JSON text with 17-significant-digit floats; non-finite floats become null.

    Dataclasses, enums and numpy values are reduced to plain JSON types by
    pydantic first.
    """
    try:
        plain = to_jsonable_python(obj, fallback=_numpy_fallback)
    except PydanticSerializationError as e:
        raise TypeError(str(e)) from e
    return _emit(plain) + "\n"


def write_atomic(path: Union[str, Path], text: str):
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
