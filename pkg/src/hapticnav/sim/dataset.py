"""Synthetic training data for the frame classifier.

Each positive sample is a single obstacle rendered at a random
pose/scale with a jittered class color, cropped by a window roughly
centered on it and resampled to the model geometry with the same
nearest-neighbor path the detector uses. Negatives are obstacle-free
background windows. Classes are balanced to within one sample and the
whole set is bit-identical for a fixed seed.
"""

from __future__ import annotations

import math

import numpy as np

from ..detection import crop_resample
from .agent import AgentState
from .camera import CameraModel
from .course import CLASS_COLORS, Course, Obstacle
from .render import render

DISTANCE_RANGE = (0.8, 3.4)
RADIUS_RANGE = (0.25, 0.5)


def _balanced_labels(n: int, n_classes: int, rng: np.random.Generator) -> np.ndarray:
    counts = [n // n_classes + (1 if k < n % n_classes else 0) for k in range(n_classes)]
    labels = np.repeat(np.arange(n_classes), counts)
    rng.shuffle(labels)
    return labels


def _scene(obstacles: list[Obstacle], seed: int) -> Course:
    # unbounded stage: only the obstacle list and texture seed matter here
    return Course(course_id=1, length=1000.0, width=1000.0, obstacles=tuple(obstacles), seed=seed)


def gen_training_set(
    n: int,
    seed: int,
    camera: CameraModel | None = None,
    n_classes: int = 5,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (frames, labels): n frames of the camera geometry with
    integer labels in [0, n_classes), balanced across classes."""
    if n <= 0:
        raise ValueError("n must be positive")
    camera = camera or CameraModel()
    rng = np.random.default_rng(seed)
    side = camera.frame_side
    labels = _balanced_labels(n, n_classes, rng)
    frames = np.empty((n, side, side, 3), dtype=np.float64)
    agent = AgentState(x=0.0, y=0.0, heading=0.0)

    for i, label in enumerate(labels):
        texture_seed = int(rng.integers(0, 2**31 - 1))
        if label == 0:
            scene = _scene([], texture_seed)
            frame, _ = render(scene, agent, camera)
            w = int(rng.integers(12, side + 1))
            y0 = int(rng.integers(0, side - w + 1))
            x0 = int(rng.integers(0, side - w + 1))
            frames[i] = crop_resample(frame, y0, x0, w, side)
            continue

        radius = rng.uniform(*RADIUS_RANGE)
        dist = rng.uniform(*DISTANCE_RANGE)
        half_ang = math.atan(radius / dist)
        max_bearing = max(camera.fov / 2 - half_ang - 0.02, 0.0)
        bearing = rng.uniform(-max_bearing, max_bearing)
        base = CLASS_COLORS[int(label)]
        color = tuple(float(np.clip(c + rng.uniform(-0.08, 0.08), 0.0, 1.0)) for c in base)
        obstacle = Obstacle(
            x=dist * math.cos(bearing),
            y=dist * math.sin(bearing),
            radius=radius,
            class_id=int(label),
            color=color,
        )
        frame, truths = render(_scene([obstacle], texture_seed), agent, camera)
        gt = truths[0].bbox
        gx0, gy0, gx1, gy1 = (v * side for v in gt.corners())
        extent = max(gx1 - gx0, gy1 - gy0)
        w = int(np.clip(round(extent * rng.uniform(1.15, 2.6)), 10, side))
        cx = (gx0 + gx1) / 2 + rng.uniform(-0.12, 0.12) * w
        cy = (gy0 + gy1) / 2 + rng.uniform(-0.12, 0.12) * w
        x0 = int(np.clip(round(cx - w / 2), 0, side - w))
        y0 = int(np.clip(round(cy - w / 2), 0, side - w))
        frames[i] = crop_resample(frame, y0, x0, w, side)

    return frames, labels.astype(np.int64)
