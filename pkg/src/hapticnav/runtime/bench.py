"""Per-stage latency measurement of the perception pipeline.

The benchmark drives the real stages (render, detect, track + flag,
haptic command) over a deterministic sweep of camera poses along a
course, so the load mix includes empty, far-obstacle, and near-obstacle
frames. Timing values vary by machine; the report's shape does not.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..haptics import command
from ..pipeline import PerceptionPipeline
from ..sim.agent import AgentState
from ..sim.course import make_course
from ..sim.render import render
from ..tracking import is_approaching
from .config import PipelineConfig
from .pipeline import load_model

STAGES = ("render", "detect", "track", "haptic")


@dataclass(frozen=True)
class LatencyReport:
    frames: int
    percentiles: dict  # stage -> {"p50": ms, "p95": ms, "p99": ms}

    def __post_init__(self):
        for stage, p in self.percentiles.items():
            if not p["p50"] <= p["p95"] <= p["p99"]:
                raise ValueError(f"percentiles out of order for {stage}")

    def to_dict(self) -> dict:
        return {"frames": self.frames, "percentiles": self.percentiles}

    def format(self) -> str:
        lines = [f"latency over {self.frames} frames (ms):"]
        for stage in (*STAGES, "total"):
            p = self.percentiles[stage]
            lines.append(
                f"  {stage:7s} p50 {p['p50']:8.3f}   p95 {p['p95']:8.3f}   p99 {p['p99']:8.3f}"
            )
        return "\n".join(lines)


def _sweep_pose(k: int, course_length: float, speed: float, tick_dt: float) -> AgentState:
    # march down the corridor with a gentle heading weave; wraps around
    # so any frame count sees the full obstacle mix
    x = (k * speed * tick_dt) % max(course_length - 8.0, 1.0)
    heading = 0.35 * math.sin(k / 9.0)
    y = 2.0 + 0.6 * math.sin(k / 23.0)
    return AgentState(x=x, y=y, heading=heading)


def benchmark(config: PipelineConfig, frames: int = 300) -> LatencyReport:
    if frames < 100:
        raise ValueError("benchmark needs at least 100 frames")
    config.check(require_checkpoint=True)
    model = load_model(config.checkpoint)
    course = make_course(config.run.course, seed=config.run.seed, width=config.run.course_width)
    pipe = PerceptionPipeline(config.build_detector(model), config.tracking, config.haptics)

    samples = {stage: np.empty(frames) for stage in STAGES}
    for k in range(frames):
        agent = _sweep_pose(k, course.length, config.sim.speed, config.sim.tick_dt)

        t0 = time.perf_counter()
        frame, _ = render(course, agent, config.camera)
        t1 = time.perf_counter()
        detections = pipe.detector.detect(frame)
        t2 = time.perf_counter()
        pipe.tracker.step(detections)
        for track in pipe.tracker.tracks:
            is_approaching(track, pipe.tracker.config)
        t3 = time.perf_counter()
        command(pipe.tracker.tracks, k, config.haptics)
        t4 = time.perf_counter()

        samples["render"][k] = t1 - t0
        samples["detect"][k] = t2 - t1
        samples["track"][k] = t3 - t2
        samples["haptic"][k] = t4 - t3

    total = sum(samples.values())
    percentiles = {}
    for stage, values in {**samples, "total": total}.items():
        ms = values * 1000.0
        percentiles[stage] = {
            "p50": float(np.percentile(ms, 50)),
            "p95": float(np.percentile(ms, 95)),
            "p99": float(np.percentile(ms, 99)),
        }
    return LatencyReport(frames=frames, percentiles=percentiles)
