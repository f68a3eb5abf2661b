"""Minimal differentiable multi-class classifier.

One hidden tanh layer followed by a linear readout producing logits. The
model is deliberately small so that every gradient it exposes (parameter
gradients for cross-entropy descent, input gradients of the
temperature-scaled softmax score) can be checked against finite
differences. All operations are pure: they never mutate the model they
are given.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInputError,
    InputShapeError,
    InvalidParameterError,
    NumericOverflowError,
)


@dataclass
class ClassifierModel:
    """Parameters of a feedforward net: input -> tanh hidden -> logits.

    weights_hidden: [hidden x features], weights_out: [classes x hidden].
    """

    weights_hidden: np.ndarray
    bias_hidden: np.ndarray
    weights_out: np.ndarray
    bias_out: np.ndarray
    activation: str = "tanh"

    def __post_init__(self):
        self.weights_hidden = np.asarray(self.weights_hidden, dtype=np.float64)
        self.bias_hidden = np.asarray(self.bias_hidden, dtype=np.float64)
        self.weights_out = np.asarray(self.weights_out, dtype=np.float64)
        self.bias_out = np.asarray(self.bias_out, dtype=np.float64)
        if self.activation != "tanh":
            raise InvalidParameterError(
                f"unsupported activation {self.activation!r}; only 'tanh' is implemented"
            )
        h, d = self.weights_hidden.shape
        c = self.weights_out.shape[0]
        if self.bias_hidden.shape != (h,) or self.weights_out.shape != (c, h) or self.bias_out.shape != (c,):
            raise InputShapeError("inconsistent layer shapes")
        for arr in (self.weights_hidden, self.bias_hidden, self.weights_out, self.bias_out):
            if not np.all(np.isfinite(arr)):
                raise InvalidParameterError("model parameters must be finite")

    @property
    def num_features(self) -> int:
        return self.weights_hidden.shape[1]

    @property
    def num_hidden(self) -> int:
        return self.weights_hidden.shape[0]

    @property
    def num_classes(self) -> int:
        return self.weights_out.shape[0]

    def copy(self) -> "ClassifierModel":
        return ClassifierModel(
            weights_hidden=self.weights_hidden.copy(),
            bias_hidden=self.bias_hidden.copy(),
            weights_out=self.weights_out.copy(),
            bias_out=self.bias_out.copy(),
            activation=self.activation,
        )


@dataclass(frozen=True)
class ScoreTarget:
    """Tags the scalar being differentiated: the temperature-scaled softmax
    score of one class."""

    class_index: int
    temperature: float


def init_model(num_features: int, num_hidden: int, num_classes: int, seed: int) -> ClassifierModel:
    """Symmetric small-uniform initialization, reproducible per seed."""
    rng = np.random.default_rng(seed)
    s_h = 1.0 / math.sqrt(num_features)
    s_o = 1.0 / math.sqrt(num_hidden)
    return ClassifierModel(
        weights_hidden=rng.uniform(-s_h, s_h, size=(num_hidden, num_features)),
        bias_hidden=rng.uniform(-s_h, s_h, size=num_hidden),
        weights_out=rng.uniform(-s_o, s_o, size=(num_classes, num_hidden)),
        bias_out=rng.uniform(-s_o, s_o, size=num_classes),
    )


def _check_features(model: ClassifierModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.num_features,):
        raise InputShapeError(
            f"expected feature vector of length {model.num_features}, got shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise InputShapeError("input features must be finite")
    return x


def forward(model: ClassifierModel, x: np.ndarray) -> np.ndarray:
    """Logits for a single feature vector."""
    x = _check_features(model, x)
    hidden = np.tanh(model.weights_hidden @ x + model.bias_hidden)
    return model.weights_out @ hidden + model.bias_out


def forward_batch(model: ClassifierModel, features: np.ndarray) -> np.ndarray:
    """Logits for a [n x features] matrix, one row per sample."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != model.num_features:
        raise InputShapeError(
            f"expected [n x {model.num_features}] feature matrix, got shape {features.shape}"
        )
    hidden = np.tanh(features @ model.weights_hidden.T + model.bias_hidden)
    return hidden @ model.weights_out.T + model.bias_out


def hidden_activations(model: ClassifierModel, features: np.ndarray) -> np.ndarray:
    """Hidden-layer activations per sample, used for embedding export."""
    features = np.asarray(features, dtype=np.float64)
    return np.tanh(features @ model.weights_hidden.T + model.bias_hidden)


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def input_gradient(model: ClassifierModel, x: np.ndarray, target: ScoreTarget) -> np.ndarray:
    """Analytic gradient of the TS-softmax score of one class w.r.t. the input.

    With p = softmax(z / T) the chain is
      dS_c/dz = (p_c / T) * (e_c - p),   dz/dh = W_out,
      dh/da = 1 - h^2,                   da/dx = W_hidden.
    """
    x = _check_features(model, x)
    if not 0 <= target.class_index < model.num_classes:
        raise InvalidParameterError(f"target class {target.class_index} out of range")
    if target.temperature <= 0:
        raise InvalidParameterError("temperature must be positive")
    grads = input_gradient_batch(
        model, x[np.newaxis, :], np.array([target.class_index]), target.temperature
    )
    return grads[0]


def input_gradient_batch(
    model: ClassifierModel,
    features: np.ndarray,
    class_indices: np.ndarray,
    temperature: float,
) -> np.ndarray:
    """Score gradients for many samples at once; row i targets class_indices[i]."""
    features = np.asarray(features, dtype=np.float64)
    class_indices = np.asarray(class_indices, dtype=np.intp)
    hidden = np.tanh(features @ model.weights_hidden.T + model.bias_hidden)
    logits = hidden @ model.weights_out.T + model.bias_out
    probs = _softmax_rows(logits / temperature)

    n = features.shape[0]
    rows = np.arange(n)
    p_c = probs[rows, class_indices]
    # dS_c/dz, shape [n x classes]
    dscore_dlogit = -probs * (p_c / temperature)[:, np.newaxis]
    dscore_dlogit[rows, class_indices] += p_c / temperature
    grad_hidden = (dscore_dlogit @ model.weights_out) * (1.0 - hidden**2)
    grads = grad_hidden @ model.weights_hidden
    if not np.all(np.isfinite(grads)):
        raise NumericOverflowError("non-finite values in input gradient")
    return grads


def cross_entropy(model: ClassifierModel, features: np.ndarray, labels: np.ndarray) -> float:
    """Mean cross-entropy of the plain (T=1) softmax over a batch."""
    logits = forward_batch(model, features)
    labels = np.asarray(labels, dtype=np.intp)
    log_probs = logits - logits.max(axis=1, keepdims=True)
    log_probs = log_probs - np.log(np.exp(log_probs).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(len(labels)), labels].mean())


def parameter_gradients(
    model: ClassifierModel, features: np.ndarray, labels: np.ndarray
) -> dict[str, np.ndarray]:
    """Gradients of mean cross-entropy w.r.t. every parameter array."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    n = features.shape[0]
    hidden = np.tanh(features @ model.weights_hidden.T + model.bias_hidden)
    logits = hidden @ model.weights_out.T + model.bias_out
    delta_out = _softmax_rows(logits)
    delta_out[np.arange(n), labels] -= 1.0
    delta_out /= n
    delta_hidden = (delta_out @ model.weights_out) * (1.0 - hidden**2)
    return {
        "weights_out": delta_out.T @ hidden,
        "bias_out": delta_out.sum(axis=0),
        "weights_hidden": delta_hidden.T @ features,
        "bias_hidden": delta_hidden.sum(axis=0),
    }


def train_step(
    model: ClassifierModel,
    features: np.ndarray,
    labels: np.ndarray,
    learning_rate: float,
) -> tuple[ClassifierModel, float]:
    """One gradient-descent step on mean cross-entropy.

    Returns a new model; the input model is left untouched. The reported
    loss is evaluated before the update.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    if features.size == 0 or labels.size == 0:
        raise EmptyInputError("train_step requires a non-empty batch")
    if features.ndim != 2 or features.shape[0] != labels.shape[0]:
        raise InputShapeError("features and labels must align")
    if labels.min() < 0 or labels.max() >= model.num_classes:
        raise InvalidParameterError("labels out of range")
    if learning_rate < 0:
        raise InvalidParameterError("learning_rate must be non-negative")

    loss = cross_entropy(model, features, labels)
    grads = parameter_gradients(model, features, labels)
    updated = ClassifierModel(
        weights_hidden=model.weights_hidden - learning_rate * grads["weights_hidden"],
        bias_hidden=model.bias_hidden - learning_rate * grads["bias_hidden"],
        weights_out=model.weights_out - learning_rate * grads["weights_out"],
        bias_out=model.bias_out - learning_rate * grads["bias_out"],
        activation=model.activation,
    )
    return updated, loss


# --- checkpoint format: flat JSON, layer name -> row-major values ---------


def model_to_dict(model: ClassifierModel) -> dict:
    return {
        "dims": {
            "features": model.num_features,
            "hidden": model.num_hidden,
            "classes": model.num_classes,
        },
        "activation": model.activation,
        "weights_hidden": model.weights_hidden.ravel().tolist(),
        "bias_hidden": model.bias_hidden.tolist(),
        "weights_out": model.weights_out.ravel().tolist(),
        "bias_out": model.bias_out.tolist(),
    }


def model_from_dict(doc: dict) -> ClassifierModel:
    dims = doc["dims"]
    d, h, c = dims["features"], dims["hidden"], dims["classes"]
    return ClassifierModel(
        weights_hidden=np.asarray(doc["weights_hidden"], dtype=np.float64).reshape(h, d),
        bias_hidden=np.asarray(doc["bias_hidden"], dtype=np.float64),
        weights_out=np.asarray(doc["weights_out"], dtype=np.float64).reshape(c, h),
        bias_out=np.asarray(doc["bias_out"], dtype=np.float64),
        activation=doc.get("activation", "tanh"),
    )


def save_model(model: ClassifierModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path) -> ClassifierModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
