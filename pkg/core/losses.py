"""
Loss models and predictions.

A loss model bundles an eta-exp-concave loss with its exp-concavity
parameter and the rule that mixes expert predictions in prediction space.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional, Sequence, Union
import logging

import numpy as np
from scipy.special import logsumexp

from core.errors import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_LOSS_CAP = 700.0
PROBABILITY_TOLERANCE = 1e-12


class LossKind(str, Enum):
    """Supported loss families."""
    LOG_LOSS = "log_loss"
    SQUARE_LOSS = "square_loss"
    CUSTOM = "custom"


class PredictionKind(str, Enum):
    """Shape of a prediction."""
    POINT = "point"
    DISTRIBUTION = "distribution"


@dataclass(frozen=True, eq=False)
class Prediction:
    """A point forecast or a probability vector over a finite outcome alphabet."""
    kind: PredictionKind
    value: np.ndarray

    def __post_init__(self):
        value = np.asarray(self.value, dtype=float)
        if self.kind == PredictionKind.POINT:
            if value.ndim != 0:
                raise InvalidInputError(f"Point prediction must be a scalar, got shape {value.shape}")
        else:
            if value.ndim != 1 or value.size == 0:
                raise InvalidInputError("Distribution prediction must be a non-empty vector")
            if np.any(value < 0) or abs(value.sum() - 1.0) > PROBABILITY_TOLERANCE * max(1, value.size):
                raise InvalidInputError(f"Not a probability vector: sum={value.sum()!r}")
        value.setflags(write=False)
        object.__setattr__(self, "value", value)

    @classmethod
    def point(cls, x: float) -> "Prediction":
        return cls(PredictionKind.POINT, np.asarray(float(x)))

    @classmethod
    def distribution(cls, p: Sequence[float]) -> "Prediction":
        return cls(PredictionKind.DISTRIBUTION, np.asarray(p, dtype=float))

    def as_float(self) -> float:
        if self.kind != PredictionKind.POINT:
            raise InvalidInputError("Distribution prediction has no point value")
        return float(self.value)

    def probability(self, y: int) -> float:
        if self.kind != PredictionKind.DISTRIBUTION:
            raise InvalidInputError("Point prediction assigns no probabilities")
        return float(self.value[int(y)])

    def allclose(self, other: "Prediction", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        return self.kind == other.kind and bool(np.allclose(self.value, other.value, rtol=rtol, atol=atol))

    def to_list(self) -> Union[float, list]:
        return float(self.value) if self.kind == PredictionKind.POINT else [float(p) for p in self.value]


PredictionsLike = Union[np.ndarray, Sequence[Prediction], Sequence[float]]


def _stack(xs: PredictionsLike) -> np.ndarray:
    """Turn a list of predictions into a 1-d (points) or 2-d (distributions) array."""
    if isinstance(xs, np.ndarray):
        return xs.astype(float, copy=False)
    items = list(xs)
    if not items:
        raise InvalidInputError("Empty list of predictions")
    if all(isinstance(x, Prediction) for x in items):
        kinds = {x.kind for x in items}
        if len(kinds) != 1:
            raise InvalidInputError("Predictions of mixed kinds cannot be combined")
        return np.stack([x.value for x in items])
    return np.asarray(items, dtype=float)


@dataclass(frozen=True, eq=False)
class LossModel:
    """
    An eta-exp-concave loss.

    Log loss lives on distributions over ``{0, ..., alphabet_size - 1}`` and
    is capped at ``loss_cap``; square loss lives on ``[lower, upper]``.
    """
    kind: LossKind
    eta: float
    prediction_kind: PredictionKind
    loss_cap: float = float("inf")
    alphabet_size: Optional[int] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    loss_fn: Optional[Callable[[np.ndarray, Any], np.ndarray]] = None
    _warned: dict = field(default_factory=dict, repr=False, init=False)

    def __post_init__(self):
        if not self.eta > 0:
            raise InvalidInputError(f"eta must be positive, got {self.eta}")
        if not self.loss_cap > 0:
            raise InvalidInputError(f"loss_cap must be positive, got {self.loss_cap}")
        if self.kind == LossKind.CUSTOM and self.loss_fn is None:
            raise InvalidInputError("Custom loss models need a loss function")

    @classmethod
    def log_loss(cls, alphabet_size: int = 2, loss_cap: float = DEFAULT_LOSS_CAP) -> "LossModel":
        if alphabet_size < 1:
            raise InvalidInputError(f"alphabet_size must be >= 1, got {alphabet_size}")
        return cls(
            kind=LossKind.LOG_LOSS,
            eta=1.0,
            prediction_kind=PredictionKind.DISTRIBUTION,
            loss_cap=loss_cap,
            alphabet_size=alphabet_size,
        )

    @classmethod
    def square_loss(cls, a: float = 0.0, b: float = 1.0) -> "LossModel":
        if not b > a:
            raise InvalidInputError(f"Square loss needs a < b, got [{a}, {b}]")
        return cls(
            kind=LossKind.SQUARE_LOSS,
            eta=1.0 / (2.0 * (b - a) ** 2),
            prediction_kind=PredictionKind.POINT,
            lower=float(a),
            upper=float(b),
        )

    @classmethod
    def custom(cls,
               loss_fn: Callable[[np.ndarray, Any], np.ndarray],
               eta: float,
               prediction_kind: PredictionKind = PredictionKind.POINT,
               loss_cap: float = float("inf")) -> "LossModel":
        return cls(
            kind=LossKind.CUSTOM,
            eta=float(eta),
            prediction_kind=prediction_kind,
            loss_cap=loss_cap,
            loss_fn=loss_fn,
        )

    def with_eta(self, eta: float) -> "LossModel":
        """Copy of the model with an overridden learning rate."""
        return LossModel(
            kind=self.kind,
            eta=float(eta),
            prediction_kind=self.prediction_kind,
            loss_cap=self.loss_cap,
            alphabet_size=self.alphabet_size,
            lower=self.lower,
            upper=self.upper,
            loss_fn=self.loss_fn,
        )

    def _warn_once(self, key: str, message: str):
        if key not in self._warned:
            self._warned[key] = True
            logger.warning(message)

    def _clamp(self, values: np.ndarray, what: str) -> np.ndarray:
        clipped = np.clip(values, self.lower, self.upper)
        if np.any(clipped != values):
            self._warn_once(what, f"Square loss {what} outside [{self.lower}, {self.upper}] clamped")
        return clipped

    def check_outcome(self, y: Any) -> Any:
        if self.kind == LossKind.LOG_LOSS:
            if int(y) != y or not 0 <= int(y) < self.alphabet_size:
                raise InvalidInputError(f"Outcome {y!r} outside alphabet of size {self.alphabet_size}")
            return int(y)
        if self.kind == LossKind.SQUARE_LOSS:
            return float(self._clamp(np.asarray(float(y)), "outcome"))
        return y

    def stack(self, xs: PredictionsLike) -> np.ndarray:
        """Validated array of expert predictions for this model."""
        arr = _stack(xs)
        if self.prediction_kind == PredictionKind.POINT:
            if arr.ndim != 1:
                raise InvalidInputError(f"Point predictions must form a vector, got shape {arr.shape}")
        else:
            if arr.ndim != 2:
                raise InvalidInputError(f"Distribution predictions must form a matrix, got shape {arr.shape}")
            if self.alphabet_size is not None and arr.shape[1] != self.alphabet_size:
                raise InvalidInputError(
                    f"Distributions over {arr.shape[1]} outcomes, model alphabet is {self.alphabet_size}"
                )
        return arr

    def losses(self, xs: PredictionsLike, y: Any) -> np.ndarray:
        """Vector of losses l(x_i, y), one per expert."""
        arr = self.stack(xs)
        y = self.check_outcome(y)
        if self.kind == LossKind.LOG_LOSS:
            with np.errstate(divide="ignore"):
                raw = -np.log(arr[:, y])
            capped = np.minimum(raw, self.loss_cap)
            if np.any(raw > self.loss_cap):
                self._warn_once("cap", f"Log loss capped at {self.loss_cap} (zero predicted mass)")
            return capped
        if self.kind == LossKind.SQUARE_LOSS:
            return (self._clamp(arr, "prediction") - y) ** 2
        return np.minimum(np.asarray(self.loss_fn(arr, y), dtype=float), self.loss_cap)

    def loss(self, x: Prediction, y: Any) -> float:
        return evaluate_loss(self, x, y)

    def mix(self, v: np.ndarray, xs: PredictionsLike) -> Prediction:
        """Convex combination of expert predictions with weights ``v``."""
        arr = self.stack(xs)
        v = np.asarray(v, dtype=float)
        if len(v) != len(arr):
            raise InvalidInputError(f"{len(v)} weights for {len(arr)} predictions")
        return _combine(v, arr, self.prediction_kind)

    def mixability_bound(self, v: np.ndarray, losses: np.ndarray) -> float:
        """Right-hand side -(1/eta) ln sum_i v_i exp(-eta l_i) of the exp-concavity inequality."""
        v = np.asarray(v, dtype=float)
        mask = v > 0
        return -float(logsumexp(-self.eta * np.asarray(losses)[mask], b=v[mask])) / self.eta


def _combine(v: np.ndarray, arr: np.ndarray, kind: PredictionKind) -> Prediction:
    # zero-weight experts never contribute, whatever they predict
    support = v > 0
    v, arr = v[support], arr[support]
    if kind == PredictionKind.POINT:
        return Prediction.point(float(v @ arr))
    mixed = v @ arr
    return Prediction.distribution(mixed / mixed.sum())


def evaluate_loss(model: LossModel, x: Prediction, y: Any) -> float:
    """Loss of a single prediction."""
    if x.kind != model.prediction_kind:
        raise InvalidInputError(f"{x.kind.value} prediction given to a {model.kind.value} model")
    return float(model.losses(x.value[np.newaxis], y)[0])


def mix_predictions(v: Sequence[float], xs: PredictionsLike) -> Prediction:
    """Convex combination of predictions of the same kind."""
    if isinstance(xs, np.ndarray):
        items = xs
        kind = PredictionKind.POINT if xs.ndim == 1 else PredictionKind.DISTRIBUTION
    else:
        items = list(xs)
        if not items:
            raise InvalidInputError("Cannot mix an empty list of predictions")
        kind = items[0].kind if isinstance(items[0], Prediction) else PredictionKind.POINT
    if len(items) == 0:
        raise InvalidInputError("Cannot mix an empty list of predictions")
    v = np.asarray(v, dtype=float)
    if len(v) != len(items):
        raise InvalidInputError(f"{len(v)} weights for {len(items)} predictions")
    if np.any(v < 0) or abs(v.sum() - 1.0) > PROBABILITY_TOLERANCE * max(1, v.size):
        raise InvalidInputError(f"Mixing weights are not a probability vector: sum={v.sum()!r}")
    return _combine(v, _stack(items), kind)
