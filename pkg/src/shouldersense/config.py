"""Run configuration: declarative JSON file + command-line overrides.

Every command serializes its full RunConfig into the artifacts it writes
(manifests, checkpoints, reports, session metadata), so any output can be
traced back to the exact parameters and seed that produced it.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .nn.network import ModelConfig


@dataclass(frozen=True)
class SimulateConfig:
    subjects: int = 8
    sessions: int = 4
    reps_per_gesture: int = 20
    hold_s: float = 2.0
    gap_s: float = 3.0
    sample_rate: float = 20.0
    noise_overrides: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 64
    learning_rate: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    train_step: int = 1


@dataclass(frozen=True)
class EvaluateConfig:
    test_step: int = 30
    oracle: bool = False
    n_jobs: int = 1  # folds are independent; >1 runs them in processes


@dataclass(frozen=True)
class ServeConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    source: str = "replay"  # replay | live
    session_path: str | None = None
    speed: float = 1.0
    await_start: bool = False
    out_dir: str = "live-sessions"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    evaluate: EvaluateConfig = field(default_factory=EvaluateConfig)
    serve: ServeConfig = field(default_factory=ServeConfig)
    model: ModelConfig = field(default_factory=ModelConfig)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = self.model.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {"seed": d.get("seed", 0)}
        for name, sub_cls in (("simulate", SimulateConfig), ("train", TrainConfig),
                              ("evaluate", EvaluateConfig), ("serve", ServeConfig)):
            if name in d:
                kwargs[name] = sub_cls(**d[name])
        if "model" in d:
            kwargs["model"] = ModelConfig.from_dict(d["model"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed, model=replace(self.model, seed=seed))


def derive_seed(*parts: int) -> int:
    """Stable sub-seed from an integer path, e.g. (run_seed, subject, session)."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])
