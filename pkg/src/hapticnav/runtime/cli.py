"""Command-line interface.

Subcommands: train, eval, run, bench, experiment, serve, gen-data.
Every subcommand accepts --config (JSON pipeline config) and --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..sim.dataset import gen_training_set
from ..vit import (
    TrainConfig,
    ViTConfig,
    fit,
    init_params,
    load_checkpoint,
    predict_proba,
    save_checkpoint,
)
from .config import PipelineConfig, load_config, save_config
from .bench import benchmark
from .experiment import run_experiment, write_experiment
from .pipeline import run_pipeline


def _load(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    if getattr(args, "checkpoint", None):
        from dataclasses import replace

        config = replace(config, checkpoint=args.checkpoint)
    return config


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="pipeline config JSON file")
    p.add_argument("--seed", type=int, default=0, help="seed controlling all randomness")


def cmd_train(args) -> int:
    frames, labels = gen_training_set(args.samples, seed=args.data_seed)
    model_config = ViTConfig()
    params = init_params(model_config, seed=args.seed)
    train_config = TrainConfig(
        learning_rate=args.learning_rate,
        steps=args.steps,
        batch_size=args.batch_size,
        momentum=args.momentum,
        seed=args.seed,
    )
    params, trace = fit(frames, labels, params, train_config)
    save_checkpoint(args.out, params)
    if args.loss_trace:
        Path(args.loss_trace).write_text(json.dumps(trace))
    print(f"trained {train_config.steps} steps on {args.samples} samples; "
          f"loss {trace[0]:.4f} -> {trace[-1]:.6f}; checkpoint: {args.out}")
    return 0


def cmd_eval(args) -> int:
    params = load_checkpoint(args.checkpoint)
    frames, labels = gen_training_set(args.samples, seed=args.seed)
    predictions = predict_proba(frames, params).argmax(axis=1)
    accuracy = float((predictions == labels).mean())
    per_class = {
        int(k): float((predictions[labels == k] == k).mean())
        for k in np.unique(labels)
    }
    report = {"samples": args.samples, "accuracy": accuracy, "per_class_accuracy": per_class,
              "parameters": params.n_parameters()}
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if accuracy >= args.min_accuracy else 1


def cmd_gen_data(args) -> int:
    frames, labels = gen_training_set(args.n, seed=args.seed)
    np.savez_compressed(args.out, frames=frames.astype(np.float32), labels=labels)
    print(f"wrote {args.n} samples to {args.out}")
    return 0


def cmd_run(args) -> int:
    config = _load(args).with_overrides(course=args.course, policy=args.policy, seed=args.seed)
    metrics = run_pipeline(config, trace_path=args.trace, metrics_path=args.metrics)
    print(json.dumps(metrics.to_dict(), sort_keys=True))
    return 0 if metrics.completed else 2


def cmd_bench(args) -> int:
    config = _load(args).with_overrides(seed=args.seed)
    report = benchmark(config, frames=args.frames)
    print(report.format())
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    budget = report.percentiles["total"]["p95"]
    print(f"end-to-end p95: {budget:.2f} ms")
    return 0


def cmd_experiment(args) -> int:
    config = _load(args)
    courses = [int(c) for c in args.courses.split(",")]
    policies = args.policies.split(",")
    seeds = list(range(args.seed, args.seed + args.seeds))
    rows, aggregates, notes = run_experiment(config, courses, policies, seeds, jobs=args.jobs)
    paths = write_experiment(args.out_dir, rows, aggregates, notes)
    print(f"wrote {paths['runs']}, {paths['summary']}, {paths['notes']}")
    for cell in aggregates:
        print(f"  course {cell['course']} {cell['policy']:16s} "
              f"time {cell['mean_seconds']}s collisions {cell['mean_collisions']} "
              f"({cell['completed']}/{cell['runs']} completed)")
    print(notes)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .serve import create_app

    config = _load(args).with_overrides(seed=args.seed)
    config.check(require_checkpoint=True)
    app = create_app(config, trace_dir=args.trace_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hapticnav",
                                     description="perception stack and navigation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the frame classifier on synthetic data")
    _add_common(p)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=600)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--out", default="model.json")
    p.add_argument("--loss-trace", help="optional JSON file for the loss trace")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="measure held-out accuracy of a checkpoint")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--min-accuracy", type=float, default=0.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-data", help="generate a labelled synthetic dataset (npz)")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default="dataset.npz")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("run", help="run one course with one policy")
    _add_common(p)
    p.add_argument("--checkpoint")
    p.add_argument("--course", type=int, default=1)
    p.add_argument("--policy", default="haptic_reactive")
    p.add_argument("--trace", help="trace output file (line JSON)")
    p.add_argument("--metrics", help="metrics CSV output file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="per-stage latency percentiles")
    _add_common(p)
    p.add_argument("--checkpoint")
    p.add_argument("--frames", type=int, default=300)
    p.add_argument("--out", help="JSON report file")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("experiment", help="courses x policies x seeds sweep")
    _add_common(p)
    p.add_argument("--checkpoint")
    p.add_argument("--courses", default="1,2,3,4,5")
    p.add_argument("--policies", default="haptic_reactive,delayed_haptic,oracle")
    p.add_argument("--seeds", type=int, default=20, help="number of seeds starting at --seed")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out-dir", default="experiment_out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("serve", help="interactive WebSocket session server")
    _add_common(p)
    p.add_argument("--checkpoint")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--trace-dir", help="directory for per-session trace files")
    p.add_argument("--ui-dir", help="static single-page app to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
