"""Training loop, batched inference and the window-size grid search."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..windows import normalize_windows, sliding_windows, weights_from_labels
from .losses import weighted_cross_entropy
from .network import ConvNet, ModelConfig
from .optim import Adam

WINDOW_CANDIDATES = (50, 60, 70, 80, 90, 100, 110, 120)


@dataclass
class TrainReport:
    epoch_losses: list[float]
    epochs: int
    seed: int
    config: ModelConfig

    def to_dict(self) -> dict:
        return {
            "epoch_losses": self.epoch_losses,
            "epochs": self.epochs,
            "seed": self.seed,
            "config": self.config.to_dict(),
        }


def train_model(config: ModelConfig, windows: np.ndarray, labels: np.ndarray, *,
                epochs: int, batch_size: int = 64, lr: float = 1e-5,
                beta1: float = 0.9, beta2: float = 0.999, seed: int = 0,
                class_weights: np.ndarray | None = None,
                ) -> tuple[ConvNet, TrainReport]:
    """Fit the network on pre-normalized windows.

    Initialization is fixed by config.seed, the per-epoch shuffle by `seed`,
    and class weights come from the training labels only, so identical
    arguments give bit-identical parameters.
    """
    windows = np.asarray(windows)
    labels = np.asarray(labels, dtype=np.int64)
    n = len(windows)
    if n == 0:
        raise ValueError("empty training set")
    if class_weights is None:
        class_weights = weights_from_labels(labels)

    model = ConvNet(config)
    optimizer = Adam(model.parameters(), lr=lr, beta1=beta1, beta2=beta2)
    rng = np.random.default_rng(seed)
    windows = windows.astype(model.dtype, copy=False)
    sample_w = np.asarray(class_weights)[labels]

    epoch_losses: list[float] = []
    for _ in range(epochs):
        perm = rng.permutation(n)
        loss_sum = 0.0
        weight_sum = 0.0
        for start in range(0, n, batch_size):
            idx = perm[start:start + batch_size]
            x = windows[idx].astype(model.dtype, copy=False)
            y = labels[idx]
            logits = model.forward(x)
            loss, grad_logits = weighted_cross_entropy(logits, y, class_weights)
            model.zero_grads()
            model.backward(grad_logits)
            optimizer.step(model.gradients())
            batch_w = float(sample_w[idx].sum())
            loss_sum += loss * batch_w
            weight_sum += batch_w
        epoch_losses.append(loss_sum / weight_sum)

    return model, TrainReport(epoch_losses=epoch_losses, epochs=epochs,
                              seed=seed, config=config)


def predict_logits(model: ConvNet, windows: np.ndarray,
                   batch_size: int = 1024) -> np.ndarray:
    windows = np.asarray(windows)
    chunks = [model.forward(windows[i:i + batch_size].astype(model.dtype, copy=False))
              for i in range(0, len(windows), batch_size)]
    return np.concatenate(chunks, axis=0)


def predict_classes(model: ConvNet, windows: np.ndarray,
                    batch_size: int = 1024) -> np.ndarray:
    return predict_logits(model, windows, batch_size).argmax(axis=1)


def grid_search_window(streams, candidates=WINDOW_CANDIDATES, *,
                       config: ModelConfig | None = None, epochs: int = 40,
                       batch_size: int = 64, lr: float = 1e-5, seed: int = 0,
                       train_step: int = 1, val_step: int = 30,
                       val_index: int = -1) -> tuple[int, dict[int, float]]:
    """Pick the window size by held-out-session validation.

    The session at val_index is never trained on: for each candidate W a
    model is trained on the remaining sessions (train_step windows) and
    scored by macro F1 on the validation session (val_step windows). Best W
    is the argmax; ties go to the smaller W. Test sessions stay outside this
    function entirely.
    """
    from ..evaluate import InsufficientSessionsError, confusion_matrix, macro_f1

    streams = list(streams)
    if len(streams) < 2:
        raise InsufficientSessionsError(
            f"grid search needs >= 2 sessions, got {len(streams)}")
    val_stream = streams[val_index]
    train_streams = [s for i, s in enumerate(streams)
                     if i != (val_index % len(streams))]
    base = config or ModelConfig()

    scores: dict[int, float] = {}
    for w in candidates:
        cfg = replace(base, window_size=w)
        batches = [sliding_windows(s, w, train_step) for s in train_streams]
        x_train = normalize_windows(np.concatenate([b.windows for b in batches]))
        y_train = np.concatenate([b.labels for b in batches])
        model, _ = train_model(cfg, x_train, y_train, epochs=epochs,
                               batch_size=batch_size, lr=lr, seed=seed)
        val_batch = sliding_windows(val_stream, w, val_step)
        preds = predict_classes(model, normalize_windows(val_batch.windows))
        scores[w] = macro_f1(confusion_matrix(val_batch.labels, preds))

    best = min(scores, key=lambda w: (-scores[w], w))
    return best, scores
