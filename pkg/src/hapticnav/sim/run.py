"""Closed-loop course runs.

Per tick: render -> detect -> track -> flag -> haptic command -> policy
action -> kinematic step. Scripted haptic policies consume only the
command; the oracle policy reads the true world instead and skips
perception entirely (its trace carries empty detection lists), and the
blind probe consumes a 1 m contact probe. Runs terminate on completion
or at the tick limit and are bit-deterministic for a fixed
(course, policy, configuration, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..haptics import HapticCommand
from .agent import AgentState, SimConfig, probe_contact, start_state, step
from .camera import CameraModel
from .course import Course
from .policies import Observation, Policy
from .render import render


@dataclass(frozen=True)
class RunMetrics:
    elapsed_ticks: int
    elapsed_seconds: float
    collisions: int
    completed: bool

    def to_dict(self) -> dict:
        return {
            "ticks": self.elapsed_ticks,
            "seconds": round(self.elapsed_seconds, 6),
            "collisions": self.collisions,
            "completed": self.completed,
        }


def _tick_record(tick, action, agent, events, output, cmd) -> dict:
    record = {
        "tick": tick,
        "action": action,
        "agent": {
            "x": agent.x,
            "y": agent.y,
            "heading": agent.heading,
            "speed": agent.speed,
        },
        "events": events,
        "collisions": agent.collision_count,
        "haptic": {
            "left": round(cmd.left, 4),
            "front": round(cmd.front, 4),
            "right": round(cmd.right, 4),
        },
        "detections": [],
        "tracks": [],
    }
    if output is not None:
        record["detections"] = [
            {
                "cx": d.bbox.cx, "cy": d.bbox.cy, "w": d.bbox.w, "h": d.bbox.h,
                "class_id": d.class_id, "score": d.score,
            }
            for d in output.detections
        ]
        record["tracks"] = [
            {
                "id": t.id, "class_id": t.class_id,
                "cx": t.bbox.cx, "cy": t.bbox.cy, "w": t.bbox.w, "h": t.bbox.h,
                "misses": t.misses, "obstacle": t.obstacle,
            }
            for t in output.tracks
        ]
        if output.skipped:
            record["detect_skipped"] = True
    return record


def run_course(
    course: Course,
    policy: Policy,
    perception,
    camera: CameraModel,
    sim_config: SimConfig | None = None,
    tick_limit: int | None = None,
    collect_trace: bool = True,
) -> tuple[RunMetrics, list[dict]]:
    """Run one closed loop to completion or the tick limit.

    ``perception`` is a PerceptionPipeline / DelayedPerception instance,
    or None for policies that do not consume haptics (oracle,
    blind_probe); it must be freshly built per run since it owns tracker
    state.
    """
    sim_config = sim_config or SimConfig()
    if tick_limit is None:
        tick_limit = sim_config.tick_limit(course.length)
    policy.reset(course.length, course.width, sim_config)

    agent = start_state(course)
    records: list[dict] = []
    completed = False
    ticks = 0

    for tick in range(tick_limit):
        output = None
        if perception is not None:
            frame, _ = render(course, agent, camera)
            output = perception.process(frame, tick)
            cmd = output.command
        else:
            cmd = HapticCommand(left=0.0, front=0.0, right=0.0, tick=tick)

        obs = Observation(
            tick=tick,
            haptic=cmd,
            probe_contact=probe_contact(course, agent, sim_config) if policy.needs_probe else None,
            state=agent if policy.needs_state else None,
            course=course if policy.needs_state else None,
        )
        action = policy.act(obs)
        agent, events = step(course, agent, action, sim_config)
        ticks = tick + 1
        if collect_trace:
            records.append(_tick_record(tick, action, agent, events, output, cmd))
        if any(e["type"] == "completed" for e in events):
            completed = True
            break

    metrics = RunMetrics(
        elapsed_ticks=ticks,
        elapsed_seconds=ticks * sim_config.tick_dt,
        collisions=agent.collision_count,
        completed=completed,
    )
    return metrics, records
