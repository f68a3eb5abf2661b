"""Adaptive batch sampling driven by calibrated confidence scores.

The boost strategy aggregates calibrated per-sample confidences by class,
forms inverted class-weighted sampling probabilities (the less mass the
model puts on a sample's class, the higher its weight), and draws batches
multinomially with replacement. Four
baseline strategies are provided for comparison: random and stratified,
each in a static variant (the epoch-0 selection is frozen) and a dynamic
variant (re-drawn every epoch).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .calibration import CalibratedScore, OdinConfig, calibrate_batch_full
from .data import Dataset
from .errors import EmptyInputError, InvalidParameterError
from .model import ClassifierModel

log = logging.getLogger(__name__)

STRATEGIES = ("boost", "random", "dynamic-random", "stratified", "dynamic-stratified")

# static variants replay the same RNG stream every epoch, freezing the
# epoch-0 selection; dynamic variants keep advancing it
STATIC_STRATEGIES = ("random", "stratified")

PROB_SUM_TOL = 1e-9


@dataclass
class ClassAggregateScores:
    """Mean calibrated max-score per class; classes with no samples carry
    the mean of the present classes."""

    per_class_mean: np.ndarray

    def __post_init__(self):
        self.per_class_mean = np.asarray(self.per_class_mean, dtype=np.float64)
        if np.any(self.per_class_mean <= 0) or np.any(self.per_class_mean > 1):
            raise InvalidParameterError("aggregate scores must lie in (0, 1]")


@dataclass
class EpochRecord:
    """Everything the sampler knew and did during one epoch."""

    epoch: int
    scores: np.ndarray  # calibrated max-score per sample (nan for baselines)
    predicted: np.ndarray  # predicted class per sample (-1 for baselines)
    probabilities: np.ndarray
    draw_counts: np.ndarray


@dataclass
class SamplerState:
    strategy: str
    rng_seed: int
    temperature: float = 1.0
    probabilities: np.ndarray | None = None
    history: list[EpochRecord] = field(default_factory=list)
    draw_count: int = 0
    # which class index enters the per-sample weight. With "true", a
    # confidently misclassified sample carries near-maximal weight, which is
    # what makes the sampler target misclassified rare-class data; the
    # "predicted" reading is kept switchable for sensitivity checks.
    weight_class_source: str = "true"
    # multiplier < 1 down-weights samples drawn in the previous epoch
    recency_penalty: float = 1.0
    degenerate_draws: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidParameterError(f"strategy must be one of {STRATEGIES}")
        if self.rng_seed < 0:
            raise InvalidParameterError("rng_seed must be non-negative")
        if self.weight_class_source not in ("predicted", "true"):
            raise InvalidParameterError("weight_class_source must be 'predicted' or 'true'")
        if not 0 < self.recency_penalty <= 1:
            raise InvalidParameterError("recency_penalty must lie in (0, 1]")


def aggregate_class_scores(
    scores: list[CalibratedScore], labels: np.ndarray, num_classes: int
) -> ClassAggregateScores:
    """Arithmetic mean of calibrated max-scores per true class."""
    if len(scores) == 0:
        raise EmptyInputError("no scores to aggregate")
    labels = np.asarray(labels, dtype=np.intp)
    if len(labels) != len(scores):
        raise InvalidParameterError("scores and labels must align")

    max_scores = np.array([s.max_score for s in scores])
    sums = np.bincount(labels, weights=max_scores, minlength=num_classes)
    counts = np.bincount(labels, minlength=num_classes)
    present = counts > 0
    means = np.zeros(num_classes)
    means[present] = sums[present] / counts[present]
    if not present.all():
        means[~present] = means[present].mean()
    return ClassAggregateScores(per_class_mean=means)


def boost_probabilities(
    logits: np.ndarray,
    predicted_class: np.ndarray,
    aggregates: ClassAggregateScores,
) -> np.ndarray:
    """Inverted class-weighted sampling distribution over samples.

    Per sample with class c, the raw confidence is
      exp(z_c) * S_c / sum_j exp(z_j) * S_j
    with S the class aggregates; the sampling weight is 1 - raw, then the
    batch is renormalized by its sum so the result is a distribution.
    """
    logits = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    predicted_class = np.asarray(predicted_class, dtype=np.intp)
    s = aggregates.per_class_mean
    if np.any(s <= 0):
        raise InvalidParameterError("aggregate scores must be positive")
    if logits.shape[0] != len(predicted_class):
        raise InvalidParameterError("logits and predicted_class must align")

    shifted = logits - logits.max(axis=1, keepdims=True)  # overflow guard
    weighted = np.exp(shifted) * s
    raw = weighted[np.arange(len(predicted_class)), predicted_class] / weighted.sum(axis=1)
    weights = np.clip(1.0 - raw, 0.0, None)
    total = weights.sum()
    if total <= 0:
        log.warning("all inverted weights collapsed to zero; falling back to uniform")
        return np.full(len(weights), 1.0 / len(weights))
    return weights / total


def draw_batch(state: SamplerState, batch_size: int) -> np.ndarray:
    """Draw batch_size sample indices i.i.d. with replacement.

    Each call is reproducible from (rng_seed, draw counter) alone, so a
    state replayed from the same seed yields the same index stream.
    """
    if batch_size < 1:
        raise InvalidParameterError("batch_size must be at least 1")
    if state.probabilities is None:
        raise InvalidParameterError("sampler has no probabilities; resample first")

    p = np.asarray(state.probabilities, dtype=np.float64)
    if not np.all(np.isfinite(p)) or np.any(p < 0) or p.sum() <= 0:
        log.warning("degenerate sampling distribution; falling back to uniform")
        state.degenerate_draws += 1
        p = np.full(len(p), 1.0 / len(p))
    else:
        p = p / p.sum()

    rng = np.random.default_rng([state.rng_seed, state.draw_count])
    indices = rng.choice(len(p), size=batch_size, replace=True, p=p)
    state.draw_count += 1
    if state.history:
        np.add.at(state.history[-1].draw_counts, indices, 1)
    return indices


def _baseline_probabilities(state: SamplerState, dataset: Dataset) -> np.ndarray:
    if state.strategy in ("random", "dynamic-random"):
        return np.full(dataset.n, 1.0 / dataset.n)
    # stratified: per-sample weight inversely proportional to class size
    weights = 1.0 / dataset.class_counts[dataset.labels]
    return weights / weights.sum()


def epoch_resample(
    state: SamplerState,
    model: ClassifierModel,
    dataset: Dataset,
    config: OdinConfig,
) -> SamplerState:
    """Recompute the sampling distribution for the coming epoch.

    The boost path calibrates the full split on a copy of the model, so
    the trainer's parameters are never touched. History is append-only:
    one record per completed resample.
    """
    if model.num_classes != dataset.num_classes:
        raise InvalidParameterError("model and dataset disagree on class count")

    state.temperature = config.temperature
    n = dataset.n

    if state.strategy == "boost":
        local = model.copy()
        scores, perturbed_logits = calibrate_batch_full(local, dataset.features, config)
        aggregates = aggregate_class_scores(scores, dataset.labels, dataset.num_classes)
        predicted = np.array([s.max_class for s in scores], dtype=np.intp)
        weight_classes = predicted if state.weight_class_source == "predicted" else dataset.labels
        probs = boost_probabilities(perturbed_logits, weight_classes, aggregates)

        if state.recency_penalty < 1.0 and state.history:
            drawn_before = state.history[-1].draw_counts > 0
            probs = probs.copy()
            probs[drawn_before] *= state.recency_penalty
            probs /= probs.sum()

        sample_scores = np.array([s.max_score for s in scores])
    else:
        probs = _baseline_probabilities(state, dataset)
        predicted = np.full(n, -1, dtype=np.intp)
        sample_scores = np.full(n, np.nan)
        if state.strategy in STATIC_STRATEGIES:
            state.draw_count = 0  # replay the epoch-0 stream

    state.probabilities = probs
    state.history.append(
        EpochRecord(
            epoch=len(state.history),
            scores=sample_scores,
            predicted=predicted,
            probabilities=probs.copy(),
            draw_counts=np.zeros(n, dtype=np.int64),
        )
    )
    return state


def write_history_csv(state: SamplerState, true_labels: np.ndarray, path) -> None:
    """One row per (epoch, sample): score, probability, and draw count."""
    true_labels = np.asarray(true_labels, dtype=np.intp)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "epoch",
                "sample_id",
                "true_class",
                "predicted_class",
                "calibrated_score",
                "sampling_probability",
                "times_drawn",
            ]
        )
        for record in state.history:
            for i in range(len(record.probabilities)):
                writer.writerow(
                    [
                        record.epoch,
                        i,
                        int(true_labels[i]),
                        int(record.predicted[i]),
                        "" if np.isnan(record.scores[i]) else repr(float(record.scores[i])),
                        repr(float(record.probabilities[i])),
                        int(record.draw_counts[i]),
                    ]
                )
