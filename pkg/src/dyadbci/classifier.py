"""Motor-imagery baseline: log band-power features + softmax regression.

Features are the natural-log task-window powers of the alpha and beta
bands on C3, C4 and Cz (six values).  The model is multinomial logistic
regression trained by minibatch gradient descent on cross-entropy with the
fixed schedule: 100 epochs, batch 128, initial learning rate 0.001
decaying by 20 % every 10 epochs.  Features are standardized with
statistics from the training split only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import signal_core as sc
from . import stats
from .errors import (
    DegenerateFeatureError,
    DegenerateLabelError,
    FoldError,
    IncompleteMontageError,
    SampleSizeError,
)

FEATURE_BANDS = ("alpha", "beta")
FEATURE_CHANNELS = ("C3", "C4", "Cz")
N_FEATURES = len(FEATURE_BANDS) * len(FEATURE_CHANNELS)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 128
    initial_lr: float = 0.001
    lr_decay: float = 0.8
    decay_every: int = 10
    seed: int = 0

    def __post_init__(self):
        if min(self.epochs, self.batch_size, self.decay_every) < 1:
            raise ValueError("epochs, batch_size and decay_every must be positive")
        if self.initial_lr <= 0 or not 0 < self.lr_decay <= 1:
            raise ValueError("learning rate must be positive and decay in (0, 1]")

    def learning_rate(self, epoch: int) -> float:
        return self.initial_lr * self.lr_decay ** (epoch // self.decay_every)


def task_window_features(window: np.ndarray, channels, fs: float) -> np.ndarray:
    """Log band powers of an already-cut task window.

    ``window`` is (n_channels, n_samples) at rate ``fs``; ``channels``
    names its rows.  Used directly by the hub on streamed windows.
    """
    window = np.asarray(window, dtype=float)
    channels = tuple(channels)
    missing = [c for c in FEATURE_CHANNELS if c not in channels]
    if missing:
        raise IncompleteMontageError(f"feature channels missing: {missing}")
    out = np.empty(N_FEATURES)
    pos = 0
    for band_name in FEATURE_BANDS:
        coeffs = sc.design_bandpass(sc.band(band_name), fs)
        for ch in FEATURE_CHANNELS:
            x = window[channels.index(ch)]
            filtered = sc.apply_filter_zero_phase(coeffs, x)
            power = float(np.mean(filtered**2))
            if power <= 0:
                raise DegenerateFeatureError(
                    f"zero {band_name} power on {ch}; log feature undefined"
                )
            out[pos] = np.log(power)
            pos += 1
    return out


def extract_features(epoch: sc.Epoch) -> np.ndarray:
    """Six-element feature vector for one epoch (task window only)."""
    _, task = sc.split_states(epoch)
    return task_window_features(task, epoch.channels, epoch.sample_rate)


def features_from_epochs(epochs) -> tuple[np.ndarray, list[str]]:
    """Feature matrix and label list for a collection of epochs."""
    X = np.stack([extract_features(e) for e in epochs])
    y = [e.condition for e in epochs]
    return X, y


@dataclass
class Model:
    """Trained softmax regression; immutable after training."""

    weights: np.ndarray  # (k_classes, n_features + 1), last column is bias
    feature_means: np.ndarray
    feature_stds: np.ndarray
    classes: tuple[str, ...]
    config: TrainConfig
    loss_history: list[float] = field(default_factory=list, repr=False)


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _with_bias(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def loss_and_gradient(weights: np.ndarray, X: np.ndarray, y_idx: np.ndarray):
    """Mean cross-entropy and its gradient for standardized features.

    ``weights`` is (k, d+1), ``X`` is (n, d) without the bias column and
    ``y_idx`` holds class indices.  Exposed so the analytic gradient can be
    checked against finite differences.
    """
    Xb = _with_bias(np.asarray(X, dtype=float))
    n = Xb.shape[0]
    probs = _softmax(Xb @ weights.T)
    loss = -float(np.mean(np.log(probs[np.arange(n), y_idx] + 1e-300)))
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), y_idx] = 1.0
    grad = (probs - onehot).T @ Xb / n
    return loss, grad


def _standardize_stats(X: np.ndarray):
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds == 0, 1.0, stds)
    return means, stds


def train(X: np.ndarray, y, cfg: TrainConfig = TrainConfig()) -> Model:
    """Fit the softmax baseline on a feature matrix.

    Deterministic for a given config seed.  Requires at least two classes
    and at least ``2 * k_classes`` samples.
    """
    X = np.asarray(X, dtype=float)
    y = list(y)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise ValueError(f"feature matrix {X.shape} does not match {len(y)} labels")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    classes = tuple(sorted(set(y)))
    k = len(classes)
    if k < 2:
        raise DegenerateLabelError(f"training needs at least 2 classes, got {classes}")
    if X.shape[0] < 2 * k:
        raise SampleSizeError(
            f"training needs at least {2 * k} samples for {k} classes, got {X.shape[0]}"
        )
    index_of = {c: i for i, c in enumerate(classes)}
    y_idx = np.array([index_of[label] for label in y])
    means, stds = _standardize_stats(X)
    Xs = (X - means) / stds
    n = Xs.shape[0]
    weights = np.zeros((k, X.shape[1] + 1))
    rng = np.random.default_rng(cfg.seed)
    history = [loss_and_gradient(weights, Xs, y_idx)[0]]
    for epoch in range(cfg.epochs):
        lr = cfg.learning_rate(epoch)
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            _, grad = loss_and_gradient(weights, Xs[batch], y_idx[batch])
            weights -= lr * grad
        history.append(loss_and_gradient(weights, Xs, y_idx)[0])
    return Model(
        weights=weights,
        feature_means=means,
        feature_stds=stds,
        classes=classes,
        config=cfg,
        loss_history=history,
    )


def predict(model: Model, features) -> tuple[str, np.ndarray]:
    """Class label and softmax probabilities for one feature vector."""
    f = np.asarray(features, dtype=float).reshape(1, -1)
    probs = predict_proba(model, f)[0]
    return model.classes[int(np.argmax(probs))], probs


def predict_proba(model: Model, X: np.ndarray) -> np.ndarray:
    """Softmax probabilities for a feature matrix, rows summing to 1."""
    X = np.asarray(X, dtype=float)
    Xs = (X - model.feature_means) / model.feature_stds
    return _softmax(_with_bias(Xs) @ model.weights.T)


@dataclass
class FoldResult:
    fold: int
    accuracy: float
    macro_f1: float
    n_validation: int


@dataclass
class CVResult:
    mean_accuracy: float
    macro_f1: float
    folds: list[FoldResult]


def stratified_folds(y, k: int, seed: int) -> list[np.ndarray]:
    """Seeded stratified partition into ``k`` validation folds.

    Every class is spread across the folds (round-robin after a seeded
    shuffle, continuing the rotation between classes), so fold sizes
    differ by at most one and each fold sees every class.
    """
    y = list(y)
    if k < 2:
        raise FoldError(f"need at least 2 folds, got {k}")
    classes = sorted(set(y))
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for c in classes:
        idx = np.array([i for i, label in enumerate(y) if label == c])
        if idx.size < k:
            raise FoldError(
                f"class {c!r} has {idx.size} samples; stratified {k}-fold needs {k}"
            )
        rng.shuffle(idx)
        for i in idx:
            folds[cursor % k].append(int(i))
            cursor += 1
    return [np.array(sorted(f)) for f in folds]


def cross_validate(X: np.ndarray, y, k: int = 10, cfg: TrainConfig = TrainConfig()) -> CVResult:
    """Stratified k-fold cross-validation of the softmax baseline.

    Standardization statistics are recomputed inside every training fold;
    per-fold metrics come from the confusion matrix via
    :func:`dyadbci.stats.f1_scores`.
    """
    X = np.asarray(X, dtype=float)
    y = list(y)
    folds = stratified_folds(y, k, cfg.seed)
    classes = tuple(sorted(set(y)))
    index_of = {c: i for i, c in enumerate(classes)}
    results = []
    for f, val_idx in enumerate(folds):
        val_mask = np.zeros(len(y), dtype=bool)
        val_mask[val_idx] = True
        model = train(X[~val_mask], [y[i] for i in np.nonzero(~val_mask)[0]], cfg)
        probs = predict_proba(model, X[val_mask])
        pred_labels = [model.classes[int(np.argmax(p))] for p in probs]
        confusion = np.zeros((len(classes), len(classes)))
        for i, pred in zip(val_idx, pred_labels):
            confusion[index_of[y[i]], index_of[pred]] += 1
        accuracy = float(np.trace(confusion) / confusion.sum())
        _, macro = stats.f1_scores(confusion)
        results.append(FoldResult(f, accuracy, macro, int(val_idx.size)))
    return CVResult(
        mean_accuracy=float(np.mean([r.accuracy for r in results])),
        macro_f1=float(np.mean([r.macro_f1 for r in results])),
        folds=results,
    )


def save_model(path, model: Model):
    """Write a model as JSON (weights, scaler, classes, config)."""
    payload = {
        "weights": model.weights.tolist(),
        "feature_means": model.feature_means.tolist(),
        "feature_stds": model.feature_stds.tolist(),
        "classes": list(model.classes),
        "config": {
            "epochs": model.config.epochs,
            "batch_size": model.config.batch_size,
            "initial_lr": model.config.initial_lr,
            "lr_decay": model.config.lr_decay,
            "decay_every": model.config.decay_every,
            "seed": model.config.seed,
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2))


def load_model(path) -> Model:
    payload = json.loads(Path(path).read_text())
    return Model(
        weights=np.asarray(payload["weights"], dtype=float),
        feature_means=np.asarray(payload["feature_means"], dtype=float),
        feature_stds=np.asarray(payload["feature_stds"], dtype=float),
        classes=tuple(payload["classes"]),
        config=TrainConfig(**payload["config"]),
    )
