"""Regularized logistic regression over aggregated feature vectors.

Deliberately minimal: full-batch gradient descent on the mean negative
log-likelihood with an L2 penalty on the weights (never the intercept),
starting from all zeros.  Training is deterministic given the data and
config, per-feature standardization is fitted on the training rows and
persisted with the model, and the analytic gradient is exposed so it can be
checked against finite differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateLabels, DimensionMismatch, InvalidConfig
from .transform import FeatureVector, TrainingSet


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    learning_rate: float
    l2_penalty: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.epochs, int) or self.epochs < 0:
            raise InvalidConfig("epochs must be a non-negative integer")
        if not self.learning_rate > 0.0:
            raise InvalidConfig("learning_rate must be positive")
        if self.l2_penalty < 0.0:
            raise InvalidConfig("l2_penalty must be non-negative")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must fit in an unsigned 64-bit integer")

    def to_json_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "l2_penalty": self.l2_penalty,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class LogisticModel:
    """Fitted weights plus the feature scaling they were trained under."""

    feature_names: tuple[str, ...]
    weights: tuple[float, ...]
    intercept: float
    means: tuple[float, ...]
    stds: tuple[float, ...]
    train_config: TrainConfig | None = None

    def __post_init__(self) -> None:
        m = len(self.feature_names)
        if not (len(self.weights) == len(self.means) == len(self.stds) == m):
            raise DimensionMismatch("model weight/scaling lengths disagree")
        if any(s <= 0.0 for s in self.stds):
            raise DimensionMismatch("stored standard deviations must be positive")

    def to_json_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "weights": list(self.weights),
            "intercept": self.intercept,
            "scaling": {"means": list(self.means), "stds": list(self.stds)},
            "train_config": None if self.train_config is None else self.train_config.to_json_dict(),
        }

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LogisticModel":
        config = doc.get("train_config")
        return cls(
            feature_names=tuple(doc["feature_names"]),
            weights=tuple(float(w) for w in doc["weights"]),
            intercept=float(doc["intercept"]),
            means=tuple(float(v) for v in doc["scaling"]["means"]),
            stds=tuple(float(v) for v in doc["scaling"]["stds"]),
            train_config=None if config is None else TrainConfig(**config),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LogisticModel":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _design_matrix(data: TrainingSet) -> tuple[np.ndarray, np.ndarray]:
    if not data.feature_names:
        raise DimensionMismatch("training data declares no features")
    m = len(data.feature_names)
    for vector, _ in data.rows:
        if len(vector.values) != m:
            raise DimensionMismatch(
                f"row for entity {vector.entity_id!r} has {len(vector.values)} "
                f"features, expected {m}"
            )
    X = np.array([v.values for v, _ in data.rows], dtype=np.float64).reshape(len(data.rows), m)
    y = np.array([label for _, label in data.rows], dtype=np.float64)
    return X, y


def _fit_scaling(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds == 0.0, 1.0, stds)  # constant columns scale to 0
    return means, stds


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_logistic(data: TrainingSet, config: TrainConfig) -> LogisticModel:
    """Fit scaling plus weights by full-batch gradient descent.

    Each of the ``epochs`` steps updates (intercept, weights) with the exact
    gradient of the penalized mean negative log-likelihood at learning_rate.
    Zero initialization makes the starting loss ln 2 and the run reproducible;
    the seed is carried along for provenance only.
    """
    X, y = _design_matrix(data)
    if X.shape[0] == 0 or set(y.tolist()) != {0.0, 1.0}:
        raise DegenerateLabels("training data must contain both labels")

    means, stds = _fit_scaling(X)
    Xs = (X - means) / stds
    n, m = Xs.shape

    w = np.zeros(m)
    b = 0.0
    for _ in range(config.epochs):
        p = _sigmoid(Xs @ w + b)
        residual = p - y
        grad_w = Xs.T @ residual / n + config.l2_penalty * w
        grad_b = residual.mean()
        w = w - config.learning_rate * grad_w
        b = b - config.learning_rate * grad_b

    return LogisticModel(
        feature_names=data.feature_names,
        weights=tuple(float(v) for v in w),
        intercept=float(b),
        means=tuple(float(v) for v in means),
        stds=tuple(float(v) for v in stds),
        train_config=config,
    )


_P_MIN = 1e-15
_P_MAX = math.nextafter(1.0, 0.0)


def predict_proba(model: LogisticModel, x: Union[FeatureVector, Sequence[float]]) -> float:
    """Event probability for one feature vector, strictly inside (0, 1)."""
    values = x.values if isinstance(x, FeatureVector) else tuple(x)
    if len(values) != len(model.weights):
        raise DimensionMismatch(
            f"feature vector has {len(values)} values, model expects {len(model.weights)}"
        )
    z = model.intercept
    for value, weight, mean, std in zip(values, model.weights, model.means, model.stds):
        z += weight * (value - mean) / std
    if z >= 0:
        p = 1.0 / (1.0 + math.exp(-z))
    else:
        ez = math.exp(z)
        p = ez / (1.0 + ez)
    return min(max(p, _P_MIN), _P_MAX)


def loss_and_gradient(model: LogisticModel, data: TrainingSet) -> tuple[float, list[float]]:
    """Penalized mean NLL and its exact gradient as [d/d intercept, d/d w...].

    The log-likelihood term is evaluated via logaddexp so the loss stays
    finite even for saturated decision values.
    """
    if data.feature_names != model.feature_names:
        raise DimensionMismatch(
            f"data features {data.feature_names!r} do not match model "
            f"features {model.feature_names!r}"
        )
    X, y = _design_matrix(data)
    n = X.shape[0]
    if n == 0:
        raise DimensionMismatch("loss is undefined on an empty training set")
    w = np.array(model.weights)
    Xs = (X - np.array(model.means)) / np.array(model.stds)
    z = Xs @ w + model.intercept
    l2 = model.train_config.l2_penalty if model.train_config is not None else 0.0
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w))
    residual = _sigmoid(z) - y
    grad_w = Xs.T @ residual / n + l2 * w
    gradient = [float(residual.mean())] + [float(g) for g in grad_w]
    return loss, gradient
