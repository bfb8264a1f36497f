"""End-to-end orchestration: corpus -> features -> (LDA) -> SVM.

Cross-validation refits the discriminant inside every training fold by
default, so held-out vectors never touch the scatter matrices. The
`paper_protocol` switch instead projects the whole corpus once up front,
which leaks fold information but matches the classic pre-projected setup.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import lda as lda_mod
from .audio_io import load_wav, scan_corpus
from .dataset import LabeledDataset
from .exceptions import DimensionMismatch, SpeechToolkitError
from .mfcc import FrontendConfig, extract_features
from .model_io import PipelineModel, load_model, save_model  # noqa: F401 (re-export)
from .svm import (
    KernelSpec,
    predict_batch,
    stratified_folds,
    train_multiclass,
    vote_counts,
)

DEFAULT_GAMMA = 2.0
DEFAULT_COST = 10.0
DEFAULT_FOLDS = 10
DEFAULT_SEED = 42


@dataclass
class PredictionEntry:
    path: str
    predicted_label: int
    predicted_name: str
    votes_won: int
    true_label: int | None = None


@dataclass
class RunReport:
    """Per-file predictions plus accuracy whenever the truth is known."""

    entries: list[PredictionEntry]
    correct: int | None  # None when truth unknown

    @property
    def total(self) -> int:
        return len(self.entries)

    @property
    def accuracy(self) -> float | None:
        if self.correct is None:
            return None
        return 100.0 * self.correct / self.total


def format_accuracy_line(correct: int, total: int) -> str:
    percent = 100.0 * correct / total
    return f"Accuracy = {percent:g}% ({correct}/{total}) (classification)"


def format_cv_line(percent: float) -> str:
    return f"Cross Validation Accuracy = {percent:g}%"


def corpus_features(root, cfg: FrontendConfig):
    """Extract one feature row per corpus file.

    Returns (features, labels, class_names, paths) in deterministic scan
    order.
    """
    index = scan_corpus(root)
    rows = []
    for entry in index.entries:
        try:
            rows.append(extract_features(load_wav(entry.path), cfg))
        except SpeechToolkitError as exc:
            raise type(exc)(f"{entry.path}: {exc}") from exc
    features = np.vstack(rows)
    labels = np.array([entry.label for entry in index.entries])
    paths = [str(entry.path) for entry in index.entries]
    return features, labels, index.class_names, paths


def train_pipeline(root, cfg: FrontendConfig | None = None,
                   kernel: KernelSpec | None = None,
                   cost_c: float = DEFAULT_COST,
                   use_lda: bool = True, lda_dim: int | None = None,
                   ridge: float | None = None):
    """Train on a labeled corpus; returns (model, training-set report)."""
    cfg = cfg or FrontendConfig()
    kernel = kernel or KernelSpec()
    features, labels, class_names, paths = corpus_features(root, cfg)
    ds = LabeledDataset(features, labels)

    if use_lda:
        rank = lda_dim if lda_dim is not None else min(ds.n_classes - 1, ds.dim)
        lda_model = lda_mod.fit_lda(ds, target_dim=rank, ridge=ridge)
        train_vectors = lda_mod.project(lda_model, features)
    else:
        lda_model = None
        train_vectors = features

    svm_model = train_multiclass(
        LabeledDataset(train_vectors, labels), cost_c, kernel
    )
    model = PipelineModel(
        frontend=cfg, lda=lda_model, svm=svm_model, class_names=class_names
    )
    report = _report(model, train_vectors, paths, labels, projected=True)
    return model, report


def _project_for(model: PipelineModel, features: np.ndarray) -> np.ndarray:
    if model.lda is not None:
        return lda_mod.project(model.lda, features)
    if features.shape[-1] != model.feature_dim:
        raise DimensionMismatch(
            f"feature dim {features.shape[-1]} != model dim {model.feature_dim}"
        )
    return features


def _report(model: PipelineModel, vectors, paths, true_labels, projected=False):
    space = vectors if projected else _project_for(model, vectors)
    votes = vote_counts(model.svm, space)
    label_arr = np.array(model.svm.labels)
    winners = np.argmax(votes, axis=1)
    entries = []
    for row, win in enumerate(winners):
        label = int(label_arr[win])
        entries.append(
            PredictionEntry(
                path=paths[row],
                predicted_label=label,
                predicted_name=model.class_names[label - 1],
                votes_won=int(votes[row, win]),
                true_label=None if true_labels is None else int(true_labels[row]),
            )
        )
    correct = None
    if true_labels is not None:
        correct = int(sum(e.predicted_label == e.true_label for e in entries))
    return RunReport(entries=entries, correct=correct)


def predict_files(model: PipelineModel, paths) -> RunReport:
    """Predict loose WAV files; no truth, so no accuracy."""
    features = np.vstack(
        [extract_features(load_wav(p), model.frontend) for p in paths]
    )
    return _report(model, features, [str(p) for p in paths], None)


def predict_labeled_corpus(model: PipelineModel, root) -> RunReport:
    """Predict a class-per-subdirectory tree; truth comes from the layout.

    Directory names must match the model's class table.
    """
    index = scan_corpus(root)
    name_to_label = {name: k + 1 for k, name in enumerate(model.class_names)}
    unknown = [n for n in index.class_names if n not in name_to_label]
    if unknown:
        raise SpeechToolkitError(
            f"corpus classes {unknown} not in model classes {model.class_names}"
        )
    features = np.vstack(
        [extract_features(load_wav(e.path), model.frontend) for e in index.entries]
    )
    paths = [str(e.path) for e in index.entries]
    truth = np.array([name_to_label[e.class_name] for e in index.entries])
    return _report(model, features, paths, truth)


def crossval_features(features, labels, folds: int = DEFAULT_FOLDS,
                      cost_c: float = DEFAULT_COST,
                      kernel: KernelSpec | None = None,
                      seed: int = DEFAULT_SEED, use_lda: bool = True,
                      lda_dim: int | None = None, ridge: float | None = None,
                      paper_protocol: bool = False,
                      fold_assignment=None):
    """Stratified k-fold accuracy on extracted features.

    With use_lda, the projection is refit on each fold's training part
    unless paper_protocol pre-projects everything once. Returns
    (accuracy percent, fold assignment).
    """
    kernel = kernel or KernelSpec()
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    if not 2 <= folds <= n:
        raise ValueError(f"folds={folds} must lie in [2, {n}]")

    if fold_assignment is None:
        fold_assignment = stratified_folds(labels, folds, seed)
    else:
        fold_assignment = np.asarray(fold_assignment, dtype=np.int64)

    working = features
    if use_lda and paper_protocol:
        full_model = lda_mod.fit_lda(
            LabeledDataset(features, labels), target_dim=lda_dim, ridge=ridge
        )
        working = lda_mod.project(full_model, features)

    refit_lda = use_lda and not paper_protocol
    correct = 0
    for fold in range(folds):
        held = fold_assignment == fold
        if not held.any():
            continue
        train_labels = np.unique(labels[~held])
        if train_labels.size < 2:
            predictions = np.full(int(held.sum()), train_labels[0])
        else:
            train_x, test_x = working[~held], working[held]
            if refit_lda:
                fold_ds = LabeledDataset(features[~held], labels[~held])
                rank = min(
                    train_labels.size - 1,
                    fold_ds.dim,
                    lda_dim if lda_dim is not None else fold_ds.dim,
                )
                fold_lda = lda_mod.fit_lda(fold_ds, target_dim=rank, ridge=ridge)
                train_x = lda_mod.project(fold_lda, features[~held])
                test_x = lda_mod.project(fold_lda, features[held])
            fold_model = train_multiclass(
                LabeledDataset(train_x, labels[~held]), cost_c, kernel
            )
            predictions = predict_batch(fold_model, test_x)
        correct += int((predictions == labels[held]).sum())
    return 100.0 * correct / n, fold_assignment


def crossval_corpus(root, cfg: FrontendConfig | None = None, **kwargs):
    """crossval_features on a corpus directory."""
    cfg = cfg or FrontendConfig()
    features, labels, _names, _paths = corpus_features(root, cfg)
    return crossval_features(features, labels, **kwargs)


@dataclass
class CompareResult:
    raw_accuracy: float
    lda_accuracy: float
    fold_assignment: np.ndarray

    @property
    def delta(self) -> float:
        return self.lda_accuracy - self.raw_accuracy


def compare_protocols(root, cfg: FrontendConfig | None = None,
                      folds: int = DEFAULT_FOLDS, cost_c: float = DEFAULT_COST,
                      kernel: KernelSpec | None = None, seed: int = DEFAULT_SEED,
                      lda_dim: int | None = None, ridge: float | None = None,
                      paper_protocol: bool = False) -> CompareResult:
    """Cross-validate the raw and LDA pipelines on identical folds."""
    cfg = cfg or FrontendConfig()
    features, labels, _names, _paths = corpus_features(root, cfg)
    assignment = stratified_folds(labels, folds, seed)
    raw_acc, _ = crossval_features(
        features, labels, folds=folds, cost_c=cost_c, kernel=kernel, seed=seed,
        use_lda=False, fold_assignment=assignment,
    )
    lda_acc, _ = crossval_features(
        features, labels, folds=folds, cost_c=cost_c, kernel=kernel, seed=seed,
        use_lda=True, lda_dim=lda_dim, ridge=ridge,
        paper_protocol=paper_protocol, fold_assignment=assignment,
    )
    return CompareResult(
        raw_accuracy=raw_acc, lda_accuracy=lda_acc, fold_assignment=assignment
    )
