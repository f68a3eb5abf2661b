"""Experiment orchestration.

Wires the pieces into a training loop: a temperature schedule drives the
calibration, the sampler rebuilds its distribution before every epoch on
a copy of the model, and the trainer consumes multinomially drawn
batches. Evaluation and report export live here too. Runs are fully
deterministic per (config, seed); no timestamps are written, so repeated
runs produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import model as model_mod
from .calibration import OdinConfig, calibrate_batch_full
from .data import Dataset, ParetoTailSpec, load_csv, make_blobs, pareto_resample, train_test_split
from .errors import ConfigurationError, EmptyInputError, InvalidParameterError
from .metrics import MetricsReport, PredictionLog, build_metrics_report
from .model import ClassifierModel, hidden_activations, train_step
from .sampler import STRATEGIES, SamplerState, draw_batch, epoch_resample, write_history_csv
from .scheduler import TemperatureSchedule, temperature_at


@dataclass
class ExperimentConfig:
    dataset: str = "blobs"  # "blobs" or a path to a labeled CSV
    label_column: str = "label"
    blob_counts: tuple = (900, 100)
    blob_dim: int = 2
    blob_separation: float = 3.0
    test_counts: tuple | None = None  # blobs only; defaults to blob_counts
    test_fraction: float = 0.25  # csv only
    pareto_scale: float | None = None  # applied to the train split when set
    sampler: str = "boost"
    temp_kind: str = "multiplicative"
    temp_start: float = 1.0
    temp_scale: float = 5.0
    temp_interval: int = 5
    epsilon: float = 0.05
    epochs: int = 20
    batch_size: int = 32
    learning_rate: float = 0.2
    hidden_units: int = 16
    seeds: tuple = (0,)
    out_dir: str = "runs"

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise InvalidParameterError("epochs and batch_size must be at least 1")
        if len(self.seeds) == 0:
            raise InvalidParameterError("at least one seed is required")
        if self.sampler not in STRATEGIES:
            raise InvalidParameterError(f"sampler must be one of {STRATEGIES}")
        self.blob_counts = tuple(int(c) for c in self.blob_counts)
        self.seeds = tuple(int(s) for s in self.seeds)
        if self.test_counts is not None:
            self.test_counts = tuple(int(c) for c in self.test_counts)

    def schedule(self) -> TemperatureSchedule:
        return TemperatureSchedule(
            kind=self.temp_kind,
            start=self.temp_start,
            scale=self.temp_scale,
            interval_epochs=self.temp_interval,
            horizon_epochs=self.epochs,
        )

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["blob_counts"] = list(self.blob_counts)
        doc["seeds"] = list(self.seeds)
        doc["test_counts"] = list(self.test_counts) if self.test_counts else None
        return doc


@dataclass
class EpochStats:
    epoch: int
    loss: float
    temperature: float
    sampling_entropy: float


@dataclass
class RunRecord:
    config: ExperimentConfig
    seed: int
    per_epoch: list[EpochStats]
    metrics: MetricsReport
    sampler_state: SamplerState
    train_labels: np.ndarray
    test_labels: np.ndarray
    embeddings: np.ndarray  # hidden activations per test sample
    model: ClassifierModel


def build_datasets(config: ExperimentConfig, seed: int) -> tuple[Dataset, Dataset]:
    """Materialize the (train, test) pair a run will see."""
    if config.dataset == "blobs":
        train = make_blobs(config.blob_counts, config.blob_dim, config.blob_separation, seed)
        test_counts = config.test_counts or config.blob_counts
        test = make_blobs(
            test_counts, config.blob_dim, config.blob_separation, seed + 10_000, split="test"
        )
    else:
        full = load_csv(config.dataset, config.label_column)
        train, test = train_test_split(full, config.test_fraction, seed)

    if config.pareto_scale is not None:
        train = pareto_resample(train, ParetoTailSpec(scale=config.pareto_scale, rng_seed=seed))

    # the perturbation std always comes from the training split
    test = Dataset(
        features=test.features,
        labels=test.labels,
        num_classes=test.num_classes,
        feature_std=train.feature_std,
        split="test",
    )
    return train, test


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def run_training(config: ExperimentConfig, seed: int | None = None) -> RunRecord:
    """Train one model under the configured sampling strategy.

    Per epoch: the scheduler sets the temperature, the sampler rebuilds
    its distribution on a model copy, and the trainer consumes
    ceil(n / batch_size) drawn batches. Ends with an evaluation in boost
    mode for the boost strategy and control mode otherwise.
    """
    seed = config.seeds[0] if seed is None else seed
    model_seed, sampler_seed, eval_seed = (
        int(v) for v in np.random.SeedSequence(seed).generate_state(3)
    )

    train, test = build_datasets(config, seed)
    model = model_mod.init_model(
        train.num_features, config.hidden_units, train.num_classes, model_seed
    )
    schedule = config.schedule()
    state = SamplerState(strategy=config.sampler, rng_seed=sampler_seed)
    batches_per_epoch = math.ceil(train.n / config.batch_size)

    per_epoch = []
    for epoch in range(config.epochs):
        temp = temperature_at(schedule, epoch)
        odin = OdinConfig(temperature=temp, epsilon=config.epsilon, grad_std=train.feature_std)
        state = epoch_resample(state, model, train, odin)

        losses = []
        for _ in range(batches_per_epoch):
            idx = draw_batch(state, config.batch_size)
            model, loss = train_step(
                model, train.features[idx], train.labels[idx], config.learning_rate
            )
            losses.append(loss)
        per_epoch.append(
            EpochStats(
                epoch=epoch,
                loss=float(np.mean(losses)),
                temperature=temp,
                sampling_entropy=_entropy(state.probabilities),
            )
        )

    final_temp = temperature_at(schedule, config.epochs - 1)
    odin = OdinConfig(
        temperature=final_temp, epsilon=config.epsilon, grad_std=train.feature_std
    )
    mode = "boost" if config.sampler == "boost" else "control"
    metrics = run_evaluation(
        model,
        test,
        mode,
        odin=odin,
        batch_size=config.batch_size,
        learning_rate=config.learning_rate,
        sampler_seed=eval_seed,
    )

    return RunRecord(
        config=config,
        seed=seed,
        per_epoch=per_epoch,
        metrics=metrics,
        sampler_state=state,
        train_labels=train.labels,
        test_labels=test.labels,
        embeddings=hidden_activations(model, test.features),
        model=model,
    )


def _plain_log(model: ClassifierModel, test: Dataset) -> PredictionLog:
    logits = model_mod.forward_batch(model, test.features)
    shifted = logits - logits.max(axis=1, keepdims=True)
    profiles = np.exp(shifted)
    profiles /= profiles.sum(axis=1, keepdims=True)
    return PredictionLog(
        sample_ids=np.arange(test.n),
        true_labels=test.labels,
        predicted_labels=profiles.argmax(axis=1),
        profiles=profiles,
    )


def run_evaluation(
    model: ClassifierModel,
    test: Dataset,
    mode: str,
    odin: OdinConfig | None = None,
    batch_size: int = 32,
    learning_rate: float = 0.1,
    sampler_seed: int = 0,
) -> MetricsReport:
    """Score a trained model on a test split.

    boost mode: calibrated second-pass profiles feed the prediction log,
    so both the classification metrics and the OOD-mass scores see the
    perturb-and-rescore pipeline.

    control mode: classification metrics come from the model's plain
    softmax predictions; the OOD-mass scores use a copy fine-tuned for
    exactly one epoch under the boost sampler, which supplies the
    expected-misclassification profiles. The caller's model is never
    modified in either mode.
    """
    if test.n == 0:
        raise EmptyInputError("test split is empty")
    if model.num_classes != test.num_classes:
        raise ConfigurationError(
            f"model has {model.num_classes} classes but dataset has {test.num_classes}"
        )
    if odin is None:
        odin = OdinConfig(temperature=1.0, epsilon=0.05, grad_std=test.feature_std)

    if mode == "boost":
        scores, _ = calibrate_batch_full(model.copy(), test.features, odin)
        log = PredictionLog(
            sample_ids=np.arange(test.n),
            true_labels=test.labels,
            predicted_labels=np.array([s.max_class for s in scores]),
            profiles=np.array([s.softmax_profile for s in scores]),
        )
        return build_metrics_report(log)

    if mode != "control":
        raise InvalidParameterError("mode must be 'boost' or 'control'")

    plain = _plain_log(model, test)

    tuned = model.copy()
    state = SamplerState(strategy="boost", rng_seed=sampler_seed)
    state = epoch_resample(state, tuned, test, odin)
    for _ in range(math.ceil(test.n / batch_size)):
        idx = draw_batch(state, batch_size)
        tuned, _ = train_step(tuned, test.features[idx], test.labels[idx], learning_rate)

    return build_metrics_report(plain, sodc_log=_plain_log(tuned, test))


REPORT_FILES = ("report.json", "per_class_metrics.csv", "sampler_history.csv", "embeddings.csv")


def record_to_report(record: RunRecord) -> dict:
    return {
        "config": {**record.config.to_dict(), "seed": record.seed},
        "per_epoch": [
            {
                "epoch": s.epoch,
                "loss": s.loss,
                "temperature": s.temperature,
                "sampling_entropy": s.sampling_entropy,
            }
            for s in record.per_epoch
        ],
        "metrics": record.metrics.to_dict(percent=True),
    }


def _write_record(record: RunRecord, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(record_to_report(record), fh, indent=2)

    per_class_path = os.path.join(out_dir, "per_class_metrics.csv")
    with open(per_class_path, "w", encoding="utf-8") as fh:
        fh.write("class,metric,value_percent\n")
        for cls, values in record.metrics.per_class.items():
            for name, value in values.items():
                fh.write(f"{cls},{name},{repr(value * 100.0)}\n")

    history_path = os.path.join(out_dir, "sampler_history.csv")
    write_history_csv(record.sampler_state, record.train_labels, history_path)

    embeddings_path = os.path.join(out_dir, "embeddings.csv")
    hidden_dim = record.embeddings.shape[1]
    with open(embeddings_path, "w", encoding="utf-8") as fh:
        fh.write("sample_id,true_class," + ",".join(f"h_{j}" for j in range(hidden_dim)) + "\n")
        for i in range(record.embeddings.shape[0]):
            row = ",".join(repr(float(v)) for v in record.embeddings[i])
            fh.write(f"{i},{int(record.test_labels[i])},{row}\n")

    return [report_path, per_class_path, history_path, embeddings_path]


def export_reports(records: list[RunRecord], out_dir: str) -> list[str]:
    """Persist run artifacts.

    A single record writes four files directly into out_dir; multiple
    records each get a run_<index> subdirectory with the same file names.
    """
    if not records:
        raise EmptyInputError("no records to export")
    if len(records) == 1:
        return _write_record(records[0], out_dir)
    paths = []
    for i, record in enumerate(records):
        sub = os.path.join(out_dir, f"run_{i:02d}_{record.config.sampler}_seed{record.seed}")
        paths.extend(_write_record(record, sub))
    return paths


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    """One run per configured seed."""
    return [run_training(config, seed) for seed in config.seeds]


def run_comparison(config: ExperimentConfig, strategies=STRATEGIES) -> dict:
    """Train every strategy over the configured seeds; returns mean
    aggregate metrics per strategy, percent-scaled."""
    summary = {}
    for strategy in strategies:
        records = run_experiment(replace(config, sampler=strategy))
        keys = records[0].metrics.aggregate.keys()
        summary[strategy] = {
            k: float(np.mean([r.metrics.aggregate[k] for r in records])) * 100.0 for k in keys
        }
        summary[strategy]["mab_accuracy"] = (
            float(np.mean([r.metrics.bias["accuracy"]["mab"] for r in records])) * 100.0
        )
        summary[strategy]["sdb_accuracy"] = (
            float(np.mean([r.metrics.bias["accuracy"]["sdb"] for r in records])) * 100.0
        )
    return summary
