"""sklearn-style estimator around the window classifier.

GestureWindowClassifier exposes the usual fit/predict/predict_proba surface
(get_params/set_params come from BaseEstimator) so the network slots into
sklearn pipelines and model-selection tooling. Inputs are (N, 2, W) window
batches; flattened (N, 2*W) arrays are accepted and reshaped.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .nn.losses import softmax
from .nn.network import ModelConfig, N_CLASSES
from .nn.training import predict_logits, train_model
from .windows import normalize_windows, weights_from_labels


def validate_windows(X, window_size: int) -> np.ndarray:
    """Coerce to a finite float64 (N, 2, window_size) batch."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 2 * window_size:
            raise ValueError(
                f"flat input must have {2 * window_size} columns, got {X.shape[1]}")
        X = X.reshape(len(X), 2, window_size)
    if X.ndim != 3 or X.shape[1] != 2 or X.shape[2] != window_size:
        raise ValueError(f"expected (N, 2, {window_size}) windows, got {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("windows must be finite")
    return X


def validate_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    y = y.astype(np.int64)
    if y.min() < 0 or y.max() >= N_CLASSES:
        raise ValueError(f"labels must be class codes in 0..{N_CLASSES - 1}")
    return y


class GestureWindowClassifier(ClassifierMixin, BaseEstimator):
    """Three-conv/two-dense window classifier with weighted cross-entropy.

    Fully deterministic for a given seed: initialization, shuffling and
    therefore the fitted parameters are reproducible.
    """

    def __init__(self, window_size: int = 80,
                 conv_channels: tuple[int, int, int] = (16, 32, 64),
                 kernel_size: int = 5, hidden_units: int = 32,
                 learning_rate: float = 1e-5, beta1: float = 0.9,
                 beta2: float = 0.999, epochs: int = 200, batch_size: int = 64,
                 seed: int = 0, normalize: bool = True, dtype: str = "float64"):
        self.window_size = window_size
        self.conv_channels = conv_channels
        self.kernel_size = kernel_size
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.normalize = normalize
        self.dtype = dtype

    def _config(self) -> ModelConfig:
        return ModelConfig(
            window_size=self.window_size,
            conv_channels=tuple(self.conv_channels),
            kernel_size=self.kernel_size,
            hidden_units=self.hidden_units,
            seed=self.seed,
            dtype=self.dtype,
        )

    def fit(self, X, y):
        X = validate_windows(X, self.window_size)
        y = validate_labels(y)
        if len(X) != len(y):
            raise ValueError(f"{len(X)} windows vs {len(y)} labels")
        if self.normalize:
            X = normalize_windows(X)
        self.class_weights_ = weights_from_labels(y)
        self.model_, self.train_report_ = train_model(
            self._config(), X, y, epochs=self.epochs, batch_size=self.batch_size,
            lr=self.learning_rate, beta1=self.beta1, beta2=self.beta2,
            seed=self.seed, class_weights=self.class_weights_)
        self.classes_ = np.arange(N_CLASSES)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("fit() has not been called")

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted()
        X = validate_windows(X, self.window_size)
        if self.normalize:
            X = normalize_windows(X)
        return predict_logits(self.model_, X)

    def predict(self, X) -> np.ndarray:
        return self.decision_function(X).argmax(axis=1)

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_function(X))
