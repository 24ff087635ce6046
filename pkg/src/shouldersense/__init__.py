"""Shoulder-to-shoulder bio-impedance simulation, ingestion and
hand-over-face gesture classification."""

from .classifier import GestureWindowClassifier
from .evaluate import EvalReport, confusion_matrix, leave_one_session_out, macro_f1
from .impedance import (
    OPEN,
    BodyNetwork,
    ComplexImpedance,
    GestureClass,
    GestureState,
    parallel,
    series,
    shoulder_impedance,
    to_polar,
)
from .nn import ConvNet, ModelConfig, load_checkpoint, save_checkpoint, train_model
from .simulate import (
    LabeledStream,
    LabelInterval,
    NoiseModel,
    SessionScript,
    SubjectProfile,
    build_script,
    generate_subject,
    synthesize,
)
from .windows import WindowBatch, WindowNormalizer, class_weights, normalize_windows, sliding_windows
from .wire import (
    SampleFrame,
    SessionRecord,
    decode_frame,
    decode_stream,
    encode_frame,
    load_session,
    save_session,
    synchronize_stream,
)

__version__ = "0.1.0"
