"""Wiring from a validated config to an executed run."""

from __future__ import annotations

from pathlib import Path

from ..pipeline import DelayedPerception, PerceptionPipeline
from ..sim.course import Course, make_course
from ..sim.policies import Policy, make_policy
from ..sim.run import RunMetrics, run_course
from ..trace import build_header, metrics_row, write_metrics_csv, write_trace
from ..vit import load_checkpoint
from ..vit.params import ViTParams
from .config import PipelineConfig

_MODEL_CACHE: dict[str, ViTParams] = {}


def load_model(checkpoint: str) -> ViTParams:
    """Checkpoint loader with a per-process cache (experiment workers
    reuse the same parameters across hundreds of runs)."""
    params = _MODEL_CACHE.get(checkpoint)
    if params is None:
        params = load_checkpoint(checkpoint)
        _MODEL_CACHE[checkpoint] = params
    return params


def build_perception(config: PipelineConfig, policy_name: str):
    """Perception stack for one run, or None for policies that do not
    consume haptics (their traces carry empty perception fields)."""
    if policy_name not in ("haptic_reactive", "delayed_haptic", "interactive"):
        return None
    model = load_model(config.checkpoint)
    inner = PerceptionPipeline(
        config.build_detector(model),
        tracker_config=config.tracking,
        haptics_config=config.haptics,
    )
    if policy_name == "delayed_haptic":
        return DelayedPerception(inner, config.delay)
    return inner


def execute_run(
    config: PipelineConfig,
    course: Course | None = None,
    policy: Policy | None = None,
    controller=None,
    collect_trace: bool = True,
) -> tuple[RunMetrics, list[dict], Course]:
    """Run one course end to end per the config; everything is derived
    from (config, seed), so identical inputs give identical outputs."""
    run = config.run
    if course is None:
        course = make_course(run.course, seed=run.seed, width=run.course_width)
    if policy is None:
        policy = make_policy(run.policy, controller=controller)
    perception = build_perception(config, run.policy)
    metrics, records = run_course(
        course,
        policy,
        perception,
        config.camera,
        config.sim,
        tick_limit=run.tick_limit,
        collect_trace=collect_trace,
    )
    return metrics, records, course


def run_pipeline(
    config: PipelineConfig,
    trace_path: str | Path | None = None,
    metrics_path: str | Path | None = None,
) -> RunMetrics:
    """Validate, run, and persist one course run."""
    config.check()
    metrics, records, course = execute_run(config)
    if trace_path is not None:
        header = build_header(course.to_dict(), config.run.policy, config.run.seed, config.to_dict())
        write_trace(trace_path, header, records, metrics.to_dict())
    if metrics_path is not None:
        row = metrics_row(config.run.course, config.run.policy, config.run.seed, metrics.to_dict())
        write_metrics_csv(metrics_path, [row])
    return metrics
