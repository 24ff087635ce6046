"""The window classifier network: three conv blocks, pooled, two dense.

Architecture: Conv1d(2->c1) / ReLU / Conv1d(c1->c2) / ReLU / Conv1d(c2->c3)
/ ReLU / global average pool / Dense(c3->hidden) / ReLU / Dense(hidden->7).
Everything is seeded through ModelConfig so two constructions are
bit-identical.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .layers import Conv1d, Dense, GlobalAvgPool1d, Layer, ReLU, ShapeMismatchError

CHECKPOINT_MAGIC = b"SSCKPT\n"
CHECKPOINT_SCHEMA = 1

N_CLASSES = 7


@dataclass(frozen=True)
class ModelConfig:
    window_size: int = 80
    in_channels: int = 2
    conv_channels: tuple[int, int, int] = (16, 32, 64)
    kernel_size: int = 5
    hidden_units: int = 32
    n_classes: int = N_CLASSES
    seed: int = 0
    dtype: str = "float64"

    def __post_init__(self) -> None:
        if not 50 <= self.window_size <= 120:
            raise ValueError("window_size must be in [50, 120]")
        if self.n_classes != N_CLASSES:
            raise ValueError(f"n_classes is fixed at {N_CLASSES}")
        if len(self.conv_channels) != 3:
            raise ValueError("exactly three conv layers")
        np.dtype(self.dtype)  # must name a real dtype

    def to_dict(self) -> dict:
        d = asdict(self)
        d["conv_channels"] = list(self.conv_channels)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        d["conv_channels"] = tuple(d["conv_channels"])
        return cls(**d)


class ConvNet:
    """Parameters are initialized fan-in-scaled uniform from config.seed;
    construction order fixes the checkpoint buffer order."""

    def __init__(self, config: ModelConfig):
        self.config = config
        dtype = np.dtype(config.dtype)
        rng = np.random.default_rng(config.seed)
        c1, c2, c3 = config.conv_channels
        k = config.kernel_size
        self.layers: list[Layer] = [
            Conv1d(config.in_channels, c1, k, rng, dtype),
            ReLU(),
            Conv1d(c1, c2, k, rng, dtype),
            ReLU(),
            Conv1d(c2, c3, k, rng, dtype),
            ReLU(),
            GlobalAvgPool1d(),
            Dense(c3, config.hidden_units, rng, dtype),
            ReLU(),
            Dense(config.hidden_units, config.n_classes, rng, dtype, gain=1.0),
        ]
        self.dtype = dtype

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim != 3 or x.shape[1:] != (self.config.in_channels, self.config.window_size):
            raise ShapeMismatchError(
                f"expected (N, {self.config.in_channels}, {self.config.window_size}), "
                f"got {x.shape}")
        # layers run channels-last internally
        out = np.ascontiguousarray(x.transpose(0, 2, 1)).astype(self.dtype, copy=False)
        for layer in self.layers:
            out = layer.forward(out)
        return out

    def backward(self, grad_logits: np.ndarray) -> np.ndarray:
        """Gradient w.r.t. the (N, C, W) input batch."""
        grad = grad_logits.astype(self.dtype, copy=True)
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return np.ascontiguousarray(grad.transpose(0, 2, 1))

    def parameters(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params()]

    def gradients(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads()]

    def zero_grads(self) -> None:
        for g in self.gradients():
            g[...] = 0


def save_checkpoint(model: ConvNet, path, extra: dict | None = None) -> None:
    """Magic + one JSON header line (config incl. seed, schema version) +
    raw little-endian float64 buffers in declaration order. `extra` lets a
    caller embed run-level provenance in the header."""
    header = {
        "schema_version": CHECKPOINT_SCHEMA,
        "config": model.config.to_dict(),
    }
    if extra:
        header.update(extra)
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("utf-8"))
        for p in model.parameters():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_checkpoint(path) -> ConvNet:
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ValueError("not a checkpoint file")
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("schema_version") != CHECKPOINT_SCHEMA:
            raise ValueError(f"unsupported checkpoint schema {header.get('schema_version')}")
        model = ConvNet(ModelConfig.from_dict(header["config"]))
        for p in model.parameters():
            raw = fh.read(p.size * 8)
            if len(raw) != p.size * 8:
                raise ValueError("checkpoint truncated")
            p[...] = np.frombuffer(raw, dtype="<f8").reshape(p.shape).astype(p.dtype)
        trailing = fh.read(1)
        if trailing:
            raise ValueError("trailing bytes after parameter buffers")
    return model
