"""Command-line entry points: simulate | train | evaluate | serve.

Exit code 0 on success; on failure a machine-readable JSON error line goes
to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .config import RunConfig, derive_seed
from .evaluate import EvalReport, confusion_csv, leave_one_session_out, per_class_metrics
from .nn.network import ConvNet, ModelConfig, save_checkpoint
from .nn.training import train_model
from .simulate import NoiseModel, build_script, generate_subject, synthesize
from .windows import N_CLASSES, normalize_windows, sliding_windows, weights_from_labels
from .wire import SessionRecord, load_session, save_session


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _load_config(args) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def cmd_simulate(args) -> int:
    config = _load_config(args)
    sim = config.simulate
    os.makedirs(args.out, exist_ok=True)
    manifest = {"schema_version": 1, "config": config.to_dict(), "files": []}
    for subject in range(1, sim.subjects + 1):
        subject_seed = derive_seed(config.seed, subject)
        profile = generate_subject(subject_seed, subject_id=subject)
        noise = NoiseModel.defaults_for(profile, **sim.noise_overrides)
        for session in range(1, sim.sessions + 1):
            script_seed = derive_seed(config.seed, subject, session, 0)
            synth_seed = derive_seed(config.seed, subject, session, 1)
            script = build_script(sim.reps_per_gesture, hold_s=sim.hold_s,
                                  gap_s=sim.gap_s, seed=script_seed)
            stream = synthesize(profile, script, noise, rate=sim.sample_rate,
                                seed=synth_seed)
            record = SessionRecord.from_stream(
                stream, subject_id=subject, session_id=session,
                provenance="simulated",
                meta={"config": config.to_dict(),
                      "seeds": {"subject": subject_seed, "script": script_seed,
                                "synthesize": synth_seed}})
            path = os.path.join(args.out, f"subject{subject:02d}_session{session}.ssn")
            save_session(record, path)
            manifest["files"].append({
                "path": os.path.basename(path),
                "subject": subject, "session": session,
                "seeds": record.meta["seeds"],
                "sha256": _sha256(path),
            })
    manifest_path = os.path.join(args.out, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(manifest['files'])} sessions + manifest to {args.out}")
    return 0


def _load_streams(paths):
    records = [load_session(p) for p in paths]
    return records, [r.to_stream() for r in records]


def cmd_train(args) -> int:
    config = _load_config(args)
    model_cfg = replace(config.model, seed=config.seed)
    epochs = config.train.epochs if args.epochs is None else args.epochs
    _, streams = _load_streams(args.sessions)
    batches = [sliding_windows(s, model_cfg.window_size, config.train.train_step)
               for s in streams]
    x = normalize_windows(np.concatenate([b.windows for b in batches]))
    y = np.concatenate([b.labels for b in batches])
    model, report = train_model(
        model_cfg, x, y, epochs=epochs, batch_size=config.train.batch_size,
        lr=config.train.learning_rate, beta1=config.train.beta1,
        beta2=config.train.beta2, seed=config.seed)
    os.makedirs(args.out, exist_ok=True)
    ckpt_path = os.path.join(args.out, "model.ckpt")
    save_checkpoint(model, ckpt_path, extra={"run_config": config.to_dict()})
    report_path = os.path.join(args.out, "train_report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump({"config": config.to_dict(), "train": report.to_dict(),
                   "sessions": [os.path.basename(p) for p in args.sessions]},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {ckpt_path} and {report_path}")
    return 0


def cmd_evaluate(args) -> int:
    config = _load_config(args)
    model_cfg = replace(config.model, seed=config.seed)
    oracle = config.evaluate.oracle or args.oracle
    records, streams = _load_streams(args.sessions)

    by_subject: dict[int, list] = {}
    for record, stream in zip(records, streams):
        by_subject.setdefault(record.subject_id, []).append(stream)

    os.makedirs(args.out, exist_ok=True)
    reports: list[EvalReport] = []
    for subject in sorted(by_subject):
        report = leave_one_session_out(
            by_subject[subject], config=model_cfg,
            epochs=config.train.epochs, batch_size=config.train.batch_size,
            lr=config.train.learning_rate, seed=config.seed,
            train_step=config.train.train_step, test_step=config.evaluate.test_step,
            oracle=oracle, n_jobs=config.evaluate.n_jobs, subject_id=subject)
        reports.append(report)
        base = os.path.join(args.out, f"subject{subject:02d}_report")
        with open(base + ".json", "w", encoding="utf-8") as fh:
            json.dump({"config": config.to_dict(), **report.to_dict()},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(base + ".txt", "w", encoding="utf-8") as fh:
            fh.write(report.to_text())

    from .evaluate import macro_f1

    joint = np.sum([r.joint_confusion for r in reports], axis=0)
    summary = {
        "config": config.to_dict(),
        "subjects": {r.subject_id: r.mean_macro_f1 for r in reports},
        # headline: per-subject fold means averaged over subjects; the pooled
        # window-level figure is reported alongside
        "mean_macro_f1": float(np.mean([r.mean_macro_f1 for r in reports])),
        "pooled_macro_f1": macro_f1(joint),
        "per_class": {k: v.tolist() for k, v in per_class_metrics(joint).items()},
        "joint_confusion": joint.tolist(),
    }
    with open(os.path.join(args.out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(args.out, "confusion.csv"), "w", encoding="utf-8") as fh:
        fh.write(confusion_csv(joint) + "\n")
    print(f"mean macro F1 over {len(reports)} subjects: {summary['mean_macro_f1']:.4f}")
    return 0


def cmd_serve(args) -> int:
    config = _load_config(args)
    serve_cfg = config.serve
    if args.port is not None:
        serve_cfg = replace(serve_cfg, port=args.port)
    if args.source is not None:
        serve_cfg = replace(serve_cfg, source=args.source)
    if args.session is not None:
        serve_cfg = replace(serve_cfg, session_path=args.session)
    if args.speed is not None:
        serve_cfg = replace(serve_cfg, speed=args.speed)
    if args.await_start:
        serve_cfg = replace(serve_cfg, await_start=True)
    if args.out is not None:
        serve_cfg = replace(serve_cfg, out_dir=args.out)
    config = replace(config, serve=serve_cfg)

    from .serve import run_server

    print(f"serving {serve_cfg.source} on ws://{serve_cfg.host}:{serve_cfg.port}",
          flush=True)
    run_server(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shouldersense",
        description="Simulate, train on and evaluate shoulder-impedance gesture streams.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run-config file")
        p.add_argument("--seed", type=int, default=None, help="override run seed")

    p_sim = sub.add_parser("simulate", help="generate a synthetic session corpus")
    common(p_sim)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_simulate)

    p_train = sub.add_parser("train", help="train a classifier on session files")
    common(p_train)
    p_train.add_argument("sessions", nargs="+", help="session files")
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.add_argument("--epochs", type=int, default=None)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="leave-one-session-out evaluation per subject")
    common(p_eval)
    p_eval.add_argument("sessions", nargs="+", help="session files (>=2 per subject)")
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.add_argument("--oracle", action="store_true",
                        help="debug: score ground truth against itself")
    p_eval.set_defaults(func=cmd_evaluate)

    p_serve = sub.add_parser("serve", help="stream frames over a WebSocket endpoint")
    common(p_serve)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--source", choices=("replay", "live"), default=None)
    p_serve.add_argument("--session", help="session file for replay source")
    p_serve.add_argument("--speed", type=float, default=None,
                         help="replay speed multiplier")
    p_serve.add_argument("--await-start", action="store_true",
                         help="hold the stream until a client starts a session")
    p_serve.add_argument("--out", default=None, help="directory for recorded sessions")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        raise
    except KeyboardInterrupt:
        return 130
    except OSError as exc:
        print(json.dumps({"type": "error", "kind": "io",
                          "msg": f"{exc.strerror or exc}: {getattr(exc, 'filename', '')}"}),
              file=sys.stderr)
        return 2
    except Exception as exc:
        print(json.dumps({"type": "error", "kind": type(exc).__name__, "msg": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
