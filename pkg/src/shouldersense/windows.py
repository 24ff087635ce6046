"""Sliding-window front end: extraction, labeling, normalization, weights.

Windows are (2, W) slices of the magnitude/phase stream. Each window is
labeled by the ground-truth class of its center sample, and each channel is
z-scored within the window so the classifier sees shape, not absolute level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .impedance import GestureClass
from .simulate import LabeledStream

N_CLASSES = len(GestureClass)
NORM_EPS = 1e-8


class StreamTooShortError(ValueError):
    pass


class EmptyDatasetError(ValueError):
    pass


@dataclass
class WindowBatch:
    """N windows of shape (2, W) with one class code each."""

    windows: np.ndarray  # (N, 2, W)
    labels: np.ndarray   # (N,) int64 in 0..6
    window_size: int
    step: int

    def __len__(self) -> int:
        return len(self.windows)


def window_count(n_samples: int, window_size: int, step: int) -> int:
    if n_samples < window_size:
        return 0
    return (n_samples - window_size) // step + 1


def sliding_windows(stream: LabeledStream, window_size: int, step: int) -> WindowBatch:
    """Extract unnormalized windows; window i covers samples
    [i*step, i*step + window_size) and is labeled by its center sample."""
    if not 50 <= window_size <= 120:
        raise ValueError("window_size must be in [50, 120]")
    if step < 1:
        raise ValueError("step must be >= 1")
    n = len(stream)
    if n < window_size:
        raise StreamTooShortError(f"stream has {n} samples, window needs {window_size}")

    count = window_count(n, window_size, step)
    data = np.stack([stream.magnitude, stream.phase])  # (2, n)
    starts = np.arange(count) * step
    # strided view over window starts, then copy into a dense batch
    s0, s1 = data.strides
    view = np.lib.stride_tricks.as_strided(
        data, shape=(2, n - window_size + 1, window_size), strides=(s0, s1, s1),
        writeable=False)
    windows = np.ascontiguousarray(view[:, starts].transpose(1, 0, 2))

    sample_labels = stream.sample_labels()
    centers = starts + window_size // 2
    labels = sample_labels[centers].astype(np.int64)
    return WindowBatch(windows=windows, labels=labels,
                       window_size=window_size, step=step)


def normalize_windows(windows: np.ndarray) -> np.ndarray:
    """Per-window, per-channel z-score with population std; a constant
    channel maps to all zeros. Accepts (2, W) or (N, 2, W)."""
    x = np.asarray(windows, dtype=np.float64)
    single = x.ndim == 2
    if single:
        x = x[None]
    mean = x.mean(axis=2, keepdims=True)
    std = x.std(axis=2, keepdims=True)
    out = (x - mean) / np.maximum(std, NORM_EPS)
    return out[0] if single else out


def class_weights(label_counts: dict[int, int] | np.ndarray) -> np.ndarray:
    """Inverse-frequency weights total/(K_present * count) over the classes
    that occur; absent classes get weight 0. The count-weighted mean of the
    returned weights is 1."""
    counts = np.zeros(N_CLASSES, dtype=np.float64)
    if isinstance(label_counts, dict):
        for cls, cnt in label_counts.items():
            counts[int(cls)] = cnt
    else:
        arr = np.asarray(label_counts, dtype=np.float64)
        counts[: len(arr)] = arr
    present = counts > 0
    if not present.any():
        raise EmptyDatasetError("no class has a positive count")
    total = counts.sum()
    k_present = int(present.sum())
    weights = np.zeros(N_CLASSES, dtype=np.float64)
    weights[present] = total / (k_present * counts[present])
    return weights


def weights_from_labels(labels: np.ndarray) -> np.ndarray:
    counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=N_CLASSES)
    return class_weights(counts)


class WindowNormalizer(TransformerMixin, BaseEstimator):
    """Stateless sklearn-style transformer applying per-window channel-wise
    z-scoring to a (N, 2, W) batch. fit() is a no-op; kept so the step
    composes inside sklearn pipelines."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        X = np.asarray(X)
        if X.ndim != 3 or X.shape[1] != 2:
            raise ValueError(f"expected (N, 2, W) windows, got shape {X.shape}")
        if not np.isfinite(X).all():
            raise ValueError("windows must be finite")
        return normalize_windows(X)
