"""Camera-view rendering of the corridor world.

Obstacles inside the field of view project to class-colored rectangles:
horizontal position comes from the bearing, on-screen size from
2*atan(extent/distance)/fov, and nearer obstacles over-draw farther
ones. The background is a gray luminance texture fixed per course seed,
exactly unsaturated so obstacle pixels are the only colored ones.

``render`` also returns the ground-truth boxes (pixel-snapped, clipped
to the frame) used for evaluation and for training-crop generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..detection import BBox
from .agent import AgentState
from .camera import CameraModel
from .course import CLASS_HEIGHT_FACTOR, Course

MIN_FORWARD = 0.05  # meters in front of the camera plane


@dataclass(frozen=True)
class GroundTruth:
    bbox: BBox
    class_id: int
    distance: float
    obstacle_index: int


@lru_cache(maxsize=64)
def _background(seed: int, side: int) -> np.ndarray:
    rng = np.random.default_rng([seed, 0xBA5E])
    tex = rng.uniform(0.35, 0.65, size=(side, side))
    tex = np.repeat(tex[:, :, None], 3, axis=2)
    tex.flags.writeable = False
    return tex


def render(course: Course, agent: AgentState, camera: CameraModel) -> tuple[np.ndarray, list[GroundTruth]]:
    side = camera.frame_side
    frame = _background(course.seed, side).copy()

    fx, fy = math.cos(agent.heading), math.sin(agent.heading)
    lx, ly = -fy, fx  # unit left vector

    visible: list[tuple[float, int, tuple[int, int, int, int]]] = []
    for idx, obs in enumerate(course.obstacles):
        rx, ry = obs.x - agent.x, obs.y - agent.y
        forward = rx * fx + ry * fy
        if forward <= MIN_FORWARD:
            continue
        lateral = rx * lx + ry * ly
        dist = math.hypot(rx, ry)
        bearing = math.atan2(lateral, forward)
        u = 0.5 - bearing / camera.fov
        w = camera.angular_width(obs.radius, dist)
        h = camera.angular_width(CLASS_HEIGHT_FACTOR[obs.class_id] * obs.radius, dist)

        x0 = int(np.clip(round((u - w / 2) * side), 0, side))
        x1 = int(np.clip(round((u + w / 2) * side), 0, side))
        y0 = int(np.clip(round((0.5 - h / 2) * side), 0, side))
        y1 = int(np.clip(round((0.5 + h / 2) * side), 0, side))
        if x1 <= x0 or y1 <= y0:
            continue
        visible.append((dist, idx, (y0, x0, y1, x1)))

    visible.sort(key=lambda v: (-v[0], v[1]))  # paint far to near
    truths = []
    for dist, idx, (y0, x0, y1, x1) in visible:
        obs = course.obstacles[idx]
        frame[y0:y1, x0:x1] = obs.color
        truths.append(
            GroundTruth(
                bbox=BBox.from_pixel_box(y0, x0, y1, x1, side),
                class_id=obs.class_id,
                distance=dist,
                obstacle_index=idx,
            )
        )
    truths.sort(key=lambda t: (t.distance, t.obstacle_index))
    return frame, truths
