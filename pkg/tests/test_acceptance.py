"""Acceptance suite: each criterion runs at its stated tolerance and prints
one PASS/FAIL line. The synthetic LOSO benchmark (the expensive criterion)
drives the real CLI pipeline on the default corpus for five seeds; run
`pytest -m "not benchmark"` to skip it during development.
"""

import hashlib
import json
import os
from pathlib import Path

import numpy as np
import pytest

from shouldersense.cli import main as cli_main
from shouldersense.evaluate import confusion_matrix, macro_f1, per_class_metrics
from shouldersense.impedance import (
    OPEN,
    BodyNetwork,
    ComplexImpedance,
    GestureClass,
    GestureState,
    parallel,
    series,
    shoulder_impedance,
)
from shouldersense.nn import ConvNet, ModelConfig
from shouldersense.nn.losses import weighted_cross_entropy
from shouldersense.simulate import generate_subject
from shouldersense.windows import normalize_windows, window_count
from shouldersense.wire import (
    SampleFrame,
    crc16_ccitt_false,
    decode_frame,
    encode_frame,
    load_session,
    save_session,
)

BENCHMARK_SEEDS = (1, 2, 3, 4, 5)
CANONICAL_SEED = 1


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}"
          + (f" [{detail}]" if detail else ""), flush=True)
    assert ok, f"{name}: {detail}"


# --- gradient fidelity -----------------------------------------------------

def test_gradient_fidelity():
    config = ModelConfig(window_size=50, conv_channels=(3, 3, 3),
                         hidden_units=4, seed=5, dtype="float64")
    model = ConvNet(config)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(2, 2, 50))
    labels = np.array([2, 6])
    weights = np.linspace(0.5, 2.0, 7)

    def loss():
        return weighted_cross_entropy(model.forward(x), labels, weights)[0]

    _, grad_logits = weighted_cross_entropy(model.forward(x), labels, weights)
    model.zero_grads()
    model.backward(grad_logits)

    h = 1e-5
    worst = 0.0
    for p, g in zip(model.parameters(), model.gradients()):
        flat_p, flat_g = p.ravel(), g.ravel()
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + h
            up = loss()
            flat_p[i] = orig - h
            down = loss()
            flat_p[i] = orig
            numeric = (up - down) / (2 * h)
            err = abs(flat_g[i] - numeric) / max(1.0, abs(flat_g[i]))
            worst = max(worst, err)
    report("gradient fidelity (all parameters, rel err < 1e-4)",
           worst < 1e-4, f"worst rel err {worst:.2e}")


# --- impedance oracle ------------------------------------------------------

def test_impedance_oracle_equivalence():
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(1000):
        trunk = complex(rng.uniform(100, 1000), rng.uniform(-60, -1))
        arm_l = complex(rng.uniform(100, 600), rng.uniform(-30, -1))
        arm_r = complex(rng.uniform(100, 600), rng.uniform(-30, -1))
        c_l = complex(rng.uniform(100, 60000), rng.uniform(-5000, -1))
        c_r = complex(rng.uniform(100, 60000), rng.uniform(-5000, -1))
        net = BodyNetwork(ComplexImpedance(trunk.real, trunk.imag),
                          ComplexImpedance(arm_l.real, arm_l.imag),
                          ComplexImpedance(arm_r.real, arm_r.imag))

        # series/parallel against plain complex arithmetic
        s = series(net.z_arm_left, ComplexImpedance(c_l.real, c_l.imag))
        want_s = arm_l + c_l
        err = abs(s.as_complex() - want_s) / abs(want_s)
        worst = max(worst, err)

        p = parallel(net.z_trunk_head, s)
        want_p = 1 / (1 / trunk + 1 / want_s)
        worst = max(worst, abs(p.as_complex() - want_p) / abs(want_p))

        state = GestureState(GestureClass.BOREDOM,
                             ComplexImpedance(c_l.real, c_l.imag),
                             ComplexImpedance(c_r.real, c_r.imag))
        z = shoulder_impedance(net, state)
        want = 1 / (1 / trunk + 1 / (arm_l + c_l) + 1 / (arm_r + c_r))
        worst = max(worst, abs(z.as_complex() - want) / abs(want))
    report("impedance oracle equivalence (1000 networks, 1e-12 rel)",
           worst <= 1e-12, f"worst rel err {worst:.2e}")


# --- physics ordering ------------------------------------------------------

def test_physics_ordering_over_seeds():
    ok = True
    for seed in range(1, 101):
        profile = generate_subject(seed)
        deltas = {g: profile.magnitude_delta(g) for g in GestureClass if g}
        ranked = sorted(deltas, key=deltas.get)
        if ranked[-1] != GestureClass.BOREDOM or ranked[0] != GestureClass.PINCH_NOSE_BRIDGE:
            ok = False
            break
    report("physics ordering (Boredom max / Pinch min, seeds 1-100)", ok)


# --- codec and persistence -------------------------------------------------

def crc16_bitwise(data: bytes) -> int:
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) & 0xFFFF if crc & 0x8000 else (crc << 1) & 0xFFFF
    return crc


def test_codec_and_persistence(tmp_path):
    ok_crc = (crc16_ccitt_false(b"123456789") == 0x29B1
              == crc16_bitwise(b"123456789"))

    rng = np.random.default_rng(7)
    ok_rt = True
    for _ in range(10_000):
        frame = SampleFrame(
            counter=int(rng.integers(0, 2**32)),
            timestamp_ms=int(rng.integers(0, 2**32)),
            magnitude=float(np.float32(rng.normal(scale=1e3))),
            phase=float(np.float32(rng.normal(scale=90))),
        )
        if decode_frame(encode_frame(frame)) != frame:
            ok_rt = False
            break

    from shouldersense.simulate import LabelInterval
    from shouldersense.wire import SessionRecord

    rec = SessionRecord(
        subject_id=4, session_id=2, sample_rate=20.0,
        frames=[SampleFrame(i, 50 * i, 500.0 + rng.normal(), rng.normal())
                for i in range(500)],
        labels=[LabelInterval(GestureClass.INTERESTED, 1000, 3000)],
        meta={"config": {"seed": 9}})
    path = tmp_path / "acc.ssn"
    save_session(rec, path)
    ok_sess = load_session(path) == rec

    report("codec and persistence (CRC check value, 10k round-trips, session)",
           ok_crc and ok_rt and ok_sess)


# --- metric oracle ---------------------------------------------------------

def test_metric_oracle():
    def from_definition(cm):
        k = cm.shape[0]
        f1s = []
        for c in range(k):
            tp = cm[c, c]
            fp = cm[:, c].sum() - tp
            fn = cm[c, :].sum() - tp
            p = tp / (tp + fp) if tp + fp else 0.0
            r = tp / (tp + fn) if tp + fn else 0.0
            f1s.append(2 * p * r / (p + r) if p + r else 0.0)
        return sum(f1s) / k

    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(2, 8))
        cm = rng.integers(0, 25, size=(k, k))
        if cm.sum() == 0:
            cm[0, 0] = 1
        worst = max(worst, abs(macro_f1(cm) - from_definition(cm)))

    binary = np.array([[8, 2], [1, 9]])
    ok_binary = abs(macro_f1(binary) - 0.84962) < 1e-5
    report("metric oracle (100 random matrices 1e-12, binary hand example)",
           worst <= 1e-12 and ok_binary, f"worst abs err {worst:.2e}")


# --- windowing / normalization properties ----------------------------------

def test_windowing_and_normalization_properties():
    ok_counts = True
    for n in range(1, 301):
        for w in range(50, 121):
            for step in (1, 30):
                brute = (sum(1 for s in range(0, n - w + 1, step))
                         if n >= w else 0)
                if window_count(n, w, step) != brute:
                    ok_counts = False

    rng = np.random.default_rng(3)
    ok_norm = True
    for _ in range(50):
        win = rng.normal(rng.uniform(-50, 50), rng.uniform(0.1, 30), size=(2, 80))
        once = normalize_windows(win)
        if np.max(np.abs(normalize_windows(once) - once)) > 1e-9:
            ok_norm = False
        a, b = rng.uniform(0.2, 12), rng.uniform(-40, 40)
        if np.max(np.abs(normalize_windows(a * win + b) - once)) > 1e-9:
            ok_norm = False
    report("windowing count formula + normalization idempotence/affine (1e-9)",
           ok_counts and ok_norm)


# --- pipeline determinism --------------------------------------------------

def _digest_tree(root: Path) -> dict[str, str]:
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(
                path.read_bytes()).hexdigest()
    return out


def test_pipeline_determinism(tmp_path):
    config = {
        "seed": 17,
        "simulate": {"subjects": 1, "sessions": 2, "reps_per_gesture": 2},
        "train": {"epochs": 1, "batch_size": 64},
        "model": {"window_size": 80, "in_channels": 2,
                  "conv_channels": [4, 4, 4], "kernel_size": 5,
                  "hidden_units": 4, "n_classes": 7, "seed": 17,
                  "dtype": "float32"},
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))

    digests = []
    for run in ("a", "b"):
        root = tmp_path / run
        sessions_dir = root / "sessions"
        assert cli_main(["simulate", "--config", str(cfg_path),
                         "--out", str(sessions_dir)]) == 0
        session_files = sorted(str(p) for p in sessions_dir.glob("*.ssn"))
        assert cli_main(["train", "--config", str(cfg_path),
                         "--out", str(root / "train"), *session_files]) == 0
        assert cli_main(["evaluate", "--config", str(cfg_path),
                         "--out", str(root / "eval"), *session_files]) == 0
        digests.append(_digest_tree(root))

    report("pipeline determinism (simulate/train/evaluate byte-identical)",
           digests[0] == digests[1])


# --- synthetic LOSO benchmark ----------------------------------------------

def _run_benchmark(seed: int, tmp_root: Path) -> dict:
    config = {
        "seed": seed,
        "train": {"epochs": 40, "batch_size": 64},
        "evaluate": {"n_jobs": 2},
        "model": {"window_size": 80, "in_channels": 2,
                  "conv_channels": [16, 32, 64], "kernel_size": 5,
                  "hidden_units": 32, "n_classes": 7, "seed": seed,
                  "dtype": "float32"},
    }
    cfg_path = tmp_root / f"bench{seed}.json"
    cfg_path.write_text(json.dumps(config))
    sessions_dir = tmp_root / f"sessions{seed}"
    eval_dir = tmp_root / f"eval{seed}"
    assert cli_main(["simulate", "--config", str(cfg_path),
                     "--out", str(sessions_dir)]) == 0
    session_files = sorted(str(p) for p in sessions_dir.glob("*.ssn"))
    assert len(session_files) == 32
    assert cli_main(["evaluate", "--config", str(cfg_path),
                     "--out", str(eval_dir), *session_files]) == 0
    summary = json.loads((eval_dir / "summary.json").read_text())
    return summary


def _pair_masses(cm: np.ndarray) -> dict[tuple[int, int], int]:
    masses = {}
    for a in range(7):
        for b in range(a + 1, 7):
            masses[(a, b)] = int(cm[a, b] + cm[b, a])
    return masses


@pytest.fixture(scope="module")
def benchmark_summaries(tmp_path_factory):
    root = tmp_path_factory.mktemp("benchmark")
    summaries = {}
    for seed in BENCHMARK_SEEDS:
        summaries[seed] = _run_benchmark(seed, root)
        cm = np.asarray(summaries[seed]["joint_confusion"])
        masses = _pair_masses(cm)
        top_pair = max(masses, key=masses.get)
        print(f"benchmark seed {seed}: mean macro F1 "
              f"{summaries[seed]['mean_macro_f1']:.4f}, "
              f"boredom recall {summaries[seed]['per_class']['recall'][3]:.4f}, "
              f"top confusion pair {top_pair} mass {masses[top_pair]}",
              flush=True)
    return summaries


@pytest.mark.benchmark
def test_benchmark_mean_macro_f1(benchmark_summaries):
    score = benchmark_summaries[CANONICAL_SEED]["mean_macro_f1"]
    report("LOSO benchmark mean macro F1 >= 0.80", score >= 0.80, f"{score:.4f}")


@pytest.mark.benchmark
def test_benchmark_boredom_recall(benchmark_summaries):
    recall = benchmark_summaries[CANONICAL_SEED]["per_class"]["recall"][
        int(GestureClass.BOREDOM)]
    report("LOSO benchmark Boredom recall >= 0.90", recall >= 0.90, f"{recall:.4f}")


@pytest.mark.benchmark
def test_benchmark_null_pinch_confusion(benchmark_summaries):
    target = (int(GestureClass.NULL), int(GestureClass.PINCH_NOSE_BRIDGE))
    hits = 0
    for seed in BENCHMARK_SEEDS:
        cm = np.asarray(benchmark_summaries[seed]["joint_confusion"])
        masses = _pair_masses(cm)
        if max(masses, key=masses.get) == target:
            hits += 1
    report("LOSO benchmark Null/Pinch top confusion pair (>= 3 of 5 seeds)",
           hits >= 3, f"{hits}/5 seeds")
