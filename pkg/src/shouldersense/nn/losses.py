"""Class-weighted softmax cross-entropy with its logit gradient."""

from __future__ import annotations

import numpy as np


def weighted_cross_entropy(logits: np.ndarray, labels: np.ndarray,
                           class_weights: np.ndarray,
                           ) -> tuple[float, np.ndarray]:
    """Per-sample loss w_label * (logsumexp(logits) - logit_label), averaged
    with the sample weights as the denominator. Softmax uses max subtraction
    so large logits stay finite. Returns (loss, dloss/dlogits)."""
    logits = np.asarray(logits)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or len(labels) != len(logits):
        raise ValueError(f"logits {logits.shape} vs labels {labels.shape}")
    n = len(logits)
    w = np.asarray(class_weights, dtype=logits.dtype)[labels]
    w_sum = w.sum()
    if w_sum <= 0:
        raise ValueError("sample weights sum to zero; no present class has weight")

    z = logits - logits.max(axis=1, keepdims=True)
    exp_z = np.exp(z)
    log_probs = z - np.log(exp_z.sum(axis=1, keepdims=True))
    idx = np.arange(n)
    loss = float(-(w * log_probs[idx, labels]).sum() / w_sum)

    grad = exp_z / exp_z.sum(axis=1, keepdims=True)
    grad *= w[:, None]
    grad[idx, labels] -= w
    grad /= w_sum
    return loss, grad


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)
