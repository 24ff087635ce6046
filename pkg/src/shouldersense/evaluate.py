"""Confusion matrices, macro F1 and the leave-one-session-out protocol."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .impedance import GestureClass
from .nn.network import ConvNet, ModelConfig
from .nn.training import predict_classes, train_model
from .simulate import LabeledStream
from .windows import N_CLASSES, normalize_windows, sliding_windows


class LengthMismatchError(ValueError):
    pass


class EmptyMatrixError(ValueError):
    pass


class InsufficientSessionsError(ValueError):
    pass


def confusion_matrix(y_true, y_pred, n_classes: int = N_CLASSES) -> np.ndarray:
    """counts[t][p] = number of windows of true class t predicted as p."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise LengthMismatchError(f"{y_true.shape} vs {y_pred.shape}")
    flat = y_true * n_classes + y_pred
    return np.bincount(flat, minlength=n_classes * n_classes).reshape(n_classes, n_classes)


def per_class_metrics(cm: np.ndarray) -> dict[str, np.ndarray]:
    """Precision, recall and F1 per class; 0/0 terms are defined as 0, so a
    class that never occurs and is never predicted scores 0."""
    cm = np.asarray(cm, dtype=np.float64)
    tp = np.diag(cm)
    fp = cm.sum(axis=0) - tp
    fn = cm.sum(axis=1) - tp
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2 * precision * recall / pr, 0.0)
    return {"precision": precision, "recall": recall, "f1": f1}


def macro_f1(cm: np.ndarray) -> float:
    """Unweighted mean of the per-class F1 scores over all classes."""
    cm = np.asarray(cm)
    if cm.sum() == 0:
        raise EmptyMatrixError("confusion matrix has no entries")
    return float(per_class_metrics(cm)["f1"].mean())


@dataclass
class EvalReport:
    fold_scores: list[float]
    mean_macro_f1: float
    joint_confusion: np.ndarray
    per_class: dict[str, np.ndarray]
    window_size: int
    subject_id: int | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "window_size": self.window_size,
            "fold_macro_f1": self.fold_scores,
            "mean_macro_f1": self.mean_macro_f1,
            "per_class": {k: v.tolist() for k, v in self.per_class.items()},
            "confusion": self.joint_confusion.tolist(),
            "meta": self.meta,
        }

    def to_text(self) -> str:
        lines = []
        if self.subject_id is not None:
            lines.append(f"subject: {self.subject_id}")
        lines.append(f"window_size: {self.window_size}")
        lines.append("fold macro F1: "
                     + ", ".join(f"{s:.4f}" for s in self.fold_scores))
        lines.append(f"mean macro F1: {self.mean_macro_f1:.4f}")
        lines.append("per-class precision/recall/F1:")
        for cls in GestureClass:
            p = self.per_class["precision"][cls]
            r = self.per_class["recall"][cls]
            f = self.per_class["f1"][cls]
            lines.append(f"  {cls.name:<18} {p:.4f} {r:.4f} {f:.4f}")
        lines.append("confusion (rows true, cols predicted):")
        lines.append(confusion_csv(self.joint_confusion))
        return "\n".join(lines) + "\n"


def confusion_csv(cm: np.ndarray) -> str:
    names = [cls.name for cls in GestureClass]
    lines = ["true\\pred," + ",".join(names)]
    for i, name in enumerate(names):
        lines.append(name + "," + ",".join(str(int(v)) for v in cm[i]))
    return "\n".join(lines)


def _canonical_order(streams: list[LabeledStream]) -> list[LabeledStream]:
    """Content-digest order, so the training set is identical no matter how
    the caller happened to order the sessions."""
    def digest(s: LabeledStream) -> str:
        h = hashlib.sha256()
        h.update(s.timestamps_ms.tobytes())
        h.update(s.magnitude.tobytes())
        h.update(s.phase.tobytes())
        return h.hexdigest()

    return sorted(streams, key=digest)


def _run_fold(streams: list[LabeledStream], held_out: int, cfg: ModelConfig,
              epochs: int, batch_size: int, lr: float, seed: int,
              train_step: int, test_step: int, oracle: bool) -> np.ndarray:
    test_batch = sliding_windows(streams[held_out], cfg.window_size, test_step)
    if oracle:
        preds = test_batch.labels.copy()
    else:
        train_streams = _canonical_order(
            [s for i, s in enumerate(streams) if i != held_out])
        batches = [sliding_windows(s, cfg.window_size, train_step)
                   for s in train_streams]
        x_train = normalize_windows(np.concatenate([b.windows for b in batches]))
        y_train = np.concatenate([b.labels for b in batches])
        model, _ = train_model(cfg, x_train, y_train, epochs=epochs,
                               batch_size=batch_size, lr=lr, seed=seed)
        preds = predict_classes(model, normalize_windows(test_batch.windows))
    return confusion_matrix(test_batch.labels, preds)


def leave_one_session_out(streams: list[LabeledStream], *,
                          config: ModelConfig | None = None,
                          epochs: int = 200, batch_size: int = 16,
                          lr: float = 1e-5, seed: int = 0,
                          train_step: int = 1, test_step: int = 30,
                          oracle: bool = False, n_jobs: int = 1,
                          subject_id: int | None = None) -> EvalReport:
    """Hold out each session once: train on the rest (dense train_step
    windows), predict the held-out session (sparse test_step windows),
    average the fold macro F1 scores and sum the confusions.

    Folds are independent; n_jobs > 1 runs them in worker processes with
    single-threaded math so results stay bit-identical to the serial path.
    """
    streams = list(streams)
    if len(streams) < 2:
        raise InsufficientSessionsError(
            f"leave-one-session-out needs >= 2 sessions, got {len(streams)}")
    cfg = config or ModelConfig()

    args = [(streams, held_out, cfg, epochs, batch_size, lr, seed,
             train_step, test_step, oracle) for held_out in range(len(streams))]
    if n_jobs > 1 and len(streams) > 1 and not oracle:
        from joblib import Parallel, delayed, parallel_config

        with parallel_config(backend="loky", inner_max_num_threads=1):
            matrices = Parallel(n_jobs=n_jobs)(
                delayed(_run_fold)(*a) for a in args)
    else:
        matrices = [_run_fold(*a) for a in args]

    fold_scores = [macro_f1(cm) for cm in matrices]
    joint = np.sum(matrices, axis=0)

    return EvalReport(
        fold_scores=fold_scores,
        mean_macro_f1=float(np.mean(fold_scores)),
        joint_confusion=joint,
        per_class=per_class_metrics(joint),
        window_size=cfg.window_size,
        subject_id=subject_id,
    )
