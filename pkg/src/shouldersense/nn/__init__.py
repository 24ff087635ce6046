from .layers import Conv1d, Dense, GlobalAvgPool1d, ReLU, ShapeMismatchError
from .losses import weighted_cross_entropy
from .network import ConvNet, ModelConfig, load_checkpoint, save_checkpoint
from .optim import Adam
from .training import TrainReport, grid_search_window, predict_logits, train_model

__all__ = [
    "Adam",
    "Conv1d",
    "ConvNet",
    "Dense",
    "GlobalAvgPool1d",
    "ModelConfig",
    "ReLU",
    "ShapeMismatchError",
    "TrainReport",
    "grid_search_window",
    "load_checkpoint",
    "predict_logits",
    "save_checkpoint",
    "train_model",
    "weighted_cross_entropy",
]
