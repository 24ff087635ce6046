"""Neural-net layers with explicit forward/backward passes.

Layers operate channels-last, on (N, W, C) batches: with that layout the
im2col matrix of a stride-1 convolution is built from contiguous k*C runs,
so the expensive part of every conv is three dense matrix products plus
streaming copies. All convolutions use zero padding that preserves W.
"""

from __future__ import annotations

import numpy as np


class ShapeMismatchError(ValueError):
    pass


class Layer:
    """Forward caches whatever backward needs; backward accumulates parameter
    gradients and returns the gradient w.r.t. its input."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> list[np.ndarray]:
        return []

    def grads(self) -> list[np.ndarray]:
        return []


class Conv1d(Layer):
    """Stride-1 same-length convolution on (N, W, C_in) -> (N, W, C_out).

    weight has shape (C_out, K, C_in): row o flattens to the column order of
    the im2col matrix, whose row (n, t) is the padded input run
    x[n, t : t + K, :].
    """

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 rng: np.random.Generator, dtype=np.float64):
        if kernel_size % 2 != 1:
            raise ValueError("kernel_size must be odd to preserve length")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.pad = (kernel_size - 1) // 2
        # rectifier-preserving fan-in scaling keeps activation variance O(1)
        # through the stack, which the tiny-lr optimizer depends on
        bound = np.sqrt(6.0 / (in_channels * kernel_size))
        self.weight = rng.uniform(-bound, bound,
                                  (out_channels, kernel_size, in_channels)).astype(dtype)
        self.bias = rng.uniform(-bound, bound, out_channels).astype(dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._cols = None
        self._in_shape = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 3 or x.shape[2] != self.in_channels:
            raise ShapeMismatchError(
                f"expected (N, W, {self.in_channels}), got {x.shape}")
        n, w, c = x.shape
        k, p = self.kernel_size, self.pad
        xp = np.zeros((n, w + 2 * p, c), dtype=x.dtype)
        xp[:, p:p + w, :] = x
        s0, s1, s2 = xp.strides
        view = np.lib.stride_tricks.as_strided(
            xp, shape=(n, w, k, c), strides=(s0, s1, s1, s2), writeable=False)
        self._cols = np.ascontiguousarray(view).reshape(n * w, k * c)
        self._in_shape = (n, w, c)
        w2 = self.weight.reshape(self.out_channels, k * c)
        out = (self._cols @ w2.T).reshape(n, w, self.out_channels)
        out += self.bias
        return out

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        n, w, c = self._in_shape
        k, p = self.kernel_size, self.pad
        g2 = grad_out.reshape(n * w, self.out_channels)
        w2 = self.weight.reshape(self.out_channels, k * c)
        self.grad_weight += (g2.T @ self._cols).reshape(self.weight.shape)
        self.grad_bias += g2.sum(axis=0)
        gcols = (g2 @ w2).reshape(n, w, k, c)
        gxp = np.zeros((n, w + 2 * p, c), dtype=grad_out.dtype)
        for tap in range(k):  # fold column tap back onto xp[:, t + tap, :]
            gxp[:, tap:tap + w, :] += gcols[:, :, tap, :]
        return gxp[:, p:p + w, :]

    def params(self):
        return [self.weight, self.bias]

    def grads(self):
        return [self.grad_weight, self.grad_bias]


class ReLU(Layer):
    """Clamps in place: inputs are always freshly produced by the preceding
    layer inside ConvNet. Pass a copy when driving the layer directly."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.multiply(x, self._mask, out=x)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        return np.multiply(grad_out, self._mask, out=grad_out)


class GlobalAvgPool1d(Layer):
    """(N, W, C) -> (N, C) by averaging over time."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._width = x.shape[1]
        return x.mean(axis=1)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        g = (grad_out / self._width)[:, None, :]
        return np.broadcast_to(
            g, (grad_out.shape[0], self._width, grad_out.shape[1])).copy()


class Dense(Layer):
    """gain sqrt(6) matches the conv layers' rectifier-preserving scaling;
    the output layer passes gain=1 to keep initial logits small."""

    def __init__(self, in_features: int, out_features: int,
                 rng: np.random.Generator, dtype=np.float64,
                 gain: float = np.sqrt(6.0)):
        self.in_features = in_features
        self.out_features = out_features
        bound = gain / np.sqrt(in_features)
        self.weight = rng.uniform(-bound, bound, (out_features, in_features)).astype(dtype)
        self.bias = rng.uniform(-bound, bound, out_features).astype(dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatchError(
                f"expected (N, {self.in_features}), got {x.shape}")
        self._input = x
        return x @ self.weight.T + self.bias

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        self.grad_weight += grad_out.T @ self._input
        self.grad_bias += grad_out.sum(axis=0)
        return grad_out @ self.weight

    def params(self):
        return [self.weight, self.bias]

    def grads(self):
        return [self.grad_weight, self.grad_bias]
