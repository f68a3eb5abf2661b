"""Confidence calibration: temperature-scaled softmax plus gradient-sign
input perturbation.

The (score, perturb, rescore) pipeline sharpens the gap between confident
and ambiguous samples. The perturbation direction follows the sign of the
score gradient scaled elementwise by the inverse per-feature standard
deviation of the training data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model as model_mod
from .errors import EmptyInputError, InputShapeError, InvalidParameterError
from .model import ClassifierModel

TEMPERATURE_MIN = 1.0
TEMPERATURE_MAX = 1000.0

PERTURBATION_SIGNS = ("as-written", "odin-classic")


@dataclass
class OdinConfig:
    """Knobs of the calibration step.

    grad_std is the per-feature standard deviation of the training split;
    when None, an all-ones vector is used as the last-resort fallback.
    "as-written" subtracts the epsilon term (first-order descent on the
    target score); "odin-classic" adds it instead.
    """

    temperature: float
    epsilon: float = 0.05
    grad_std: np.ndarray | None = None
    perturbation_sign: str = "as-written"

    def __post_init__(self):
        if not TEMPERATURE_MIN <= self.temperature <= TEMPERATURE_MAX:
            raise InvalidParameterError(
                f"temperature must lie in [{TEMPERATURE_MIN:g}, {TEMPERATURE_MAX:g}], "
                f"got {self.temperature}"
            )
        if self.epsilon < 0:
            raise InvalidParameterError("epsilon must be non-negative")
        if self.grad_std is not None:
            self.grad_std = np.asarray(self.grad_std, dtype=np.float64)
            if np.any(self.grad_std <= 0):
                raise InvalidParameterError("grad_std entries must be positive")
        if self.perturbation_sign not in PERTURBATION_SIGNS:
            raise InvalidParameterError(
                f"perturbation_sign must be one of {PERTURBATION_SIGNS}"
            )


@dataclass
class CalibratedScore:
    """Softmax profile of one sample after the perturb-and-rescore pass."""

    sample_id: int
    softmax_profile: np.ndarray = field(repr=False)
    max_class: int = 0
    max_score: float = 0.0


def ts_softmax(logits: np.ndarray, temperature: float) -> np.ndarray:
    """exp(z_c/T) / sum_j exp(z_j/T), computed with max-subtraction."""
    if temperature <= 0:
        raise InvalidParameterError("temperature must be positive")
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise InvalidParameterError("logits must be finite")
    scaled = logits / temperature
    scaled -= scaled.max()
    e = np.exp(scaled)
    return e / e.sum()


def _ts_softmax_rows(logits: np.ndarray, temperature: float) -> np.ndarray:
    scaled = logits / temperature
    scaled -= scaled.max(axis=1, keepdims=True)
    e = np.exp(scaled)
    return e / e.sum(axis=1, keepdims=True)


def perturb(x: np.ndarray, grad: np.ndarray, config: OdinConfig) -> np.ndarray:
    """Shift the input by epsilon along the std-scaled gradient sign.

    The sign is taken first, then divided by the per-feature std (taking
    the sign after division would make the division a no-op).
    """
    x = np.asarray(x, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if x.shape != grad.shape:
        raise InputShapeError(f"x {x.shape} and grad {grad.shape} must have equal shape")
    if not np.all(np.isfinite(grad)):
        raise InputShapeError("gradient must be finite")
    std = config.grad_std if config.grad_std is not None else np.ones(x.shape[-1])
    step = config.epsilon * np.sign(grad) / std
    if config.perturbation_sign == "odin-classic":
        return x + step
    return x - step


def calibrate_batch(
    model: ClassifierModel, features: np.ndarray, config: OdinConfig
) -> list[CalibratedScore]:
    """Run the full calibration pipeline over a batch of samples.

    Per sample: forward pass, TS-softmax, input gradient of the max-class
    score, perturbation, and a second forward + TS-softmax pass whose
    profile becomes the CalibratedScore. The model is never modified.
    """
    scores, _ = calibrate_batch_full(model, features, config)
    return scores


def calibrate_batch_full(
    model: ClassifierModel, features: np.ndarray, config: OdinConfig
) -> tuple[list[CalibratedScore], np.ndarray]:
    """As calibrate_batch, but also returns the perturbed-pass logits
    (needed by the sampler's weighting formula)."""
    features = np.asarray(features, dtype=np.float64)
    if features.size == 0:
        raise EmptyInputError("calibrate_batch requires at least one sample")
    if features.ndim != 2:
        raise InputShapeError("features must be a [n x d] matrix")

    first_logits = model_mod.forward_batch(model, features)
    first_probs = _ts_softmax_rows(first_logits, config.temperature)
    predicted = first_probs.argmax(axis=1)

    grads = model_mod.input_gradient_batch(model, features, predicted, config.temperature)
    std = config.grad_std if config.grad_std is not None else np.ones(features.shape[1])
    step = config.epsilon * np.sign(grads) / std
    perturbed = features + step if config.perturbation_sign == "odin-classic" else features - step

    second_logits = model_mod.forward_batch(model, perturbed)
    second_probs = _ts_softmax_rows(second_logits, config.temperature)
    max_classes = second_probs.argmax(axis=1)

    scores = [
        CalibratedScore(
            sample_id=i,
            softmax_profile=second_probs[i],
            max_class=int(max_classes[i]),
            max_score=float(second_probs[i, max_classes[i]]),
        )
        for i in range(features.shape[0])
    ]
    return scores, second_logits
