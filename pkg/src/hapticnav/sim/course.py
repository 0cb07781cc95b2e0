"""Obstacle-course worlds: a straight corridor with seeded obstacles.

The five standard courses are 50..250 m long with 6..14 obstacles drawn
from four obstacle kinds (trashcan, street sign, bicycle, traffic
cone). Placement is seeded: obstacles are spread over evenly sized
slots along the corridor with bounded jitter and kept away from the
walls, which guarantees a feasible path and an obstacle-free start and
goal region.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

CLASS_NAMES = ("background", "trashcan", "street_sign", "bicycle", "traffic_cone")

# saturated base colors on the gray corridor background; per-class
# height factor gives each kind a distinct aspect ratio
CLASS_COLORS = {
    1: (0.10, 0.60, 0.15),
    2: (0.15, 0.35, 0.85),
    3: (0.80, 0.12, 0.12),
    4: (0.95, 0.50, 0.05),
}
CLASS_HEIGHT_FACTOR = {1: 1.25, 2: 1.75, 3: 0.9, 4: 1.1}

COURSE_LENGTHS = {1: 50.0, 2: 100.0, 3: 150.0, 4: 200.0, 5: 250.0}
COURSE_OBSTACLE_COUNTS = {1: 6, 2: 8, 3: 10, 4: 12, 5: 14}

OBSTACLE_RADIUS_RANGE = (0.28, 0.5)
WALL_MARGIN = 1.2  # obstacle centers stay this far from either wall
START_CLEARANCE = 6.0  # first possible obstacle x
GOAL_CLEARANCE = 4.0  # last possible obstacle x, measured from the goal


@dataclass(frozen=True)
class Obstacle:
    x: float
    y: float
    radius: float
    class_id: int
    color: tuple[float, float, float]


@dataclass(frozen=True)
class Course:
    course_id: int
    length: float
    width: float
    obstacles: tuple[Obstacle, ...]
    seed: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["obstacles"] = [asdict(o) for o in self.obstacles]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Course":
        obstacles = tuple(
            Obstacle(x=o["x"], y=o["y"], radius=o["radius"], class_id=o["class_id"],
                     color=tuple(o["color"]))
            for o in d["obstacles"]
        )
        return cls(course_id=d["course_id"], length=d["length"], width=d["width"],
                   obstacles=obstacles, seed=d["seed"])


def make_course(course_id: int, seed: int, width: float = 4.0) -> Course:
    if course_id not in COURSE_LENGTHS:
        raise ValueError(f"course_id must be 1..5, got {course_id}")
    length = COURSE_LENGTHS[course_id]
    count = COURSE_OBSTACLE_COUNTS[course_id]
    rng = np.random.default_rng([seed, course_id])

    x_lo, x_hi = START_CLEARANCE, length - GOAL_CLEARANCE
    slot = (x_hi - x_lo) / count
    obstacles = []
    for i in range(count):
        x = x_lo + (i + 0.5) * slot + rng.uniform(-0.3, 0.3) * slot
        y = rng.uniform(WALL_MARGIN, width - WALL_MARGIN)
        radius = rng.uniform(*OBSTACLE_RADIUS_RANGE)
        class_id = int(rng.integers(1, 5))
        base = CLASS_COLORS[class_id]
        color = tuple(float(np.clip(c + rng.uniform(-0.08, 0.08), 0.0, 1.0)) for c in base)
        obstacles.append(Obstacle(x=float(x), y=float(y), radius=float(radius),
                                  class_id=class_id, color=color))

    course = Course(course_id=course_id, length=length, width=width,
                    obstacles=tuple(obstacles), seed=seed)
    _check_course(course)
    return course


def _check_course(course: Course) -> None:
    assert len(course.obstacles) == COURSE_OBSTACLE_COUNTS[course.course_id]
    for o in course.obstacles:
        assert 0 < o.x < course.length, "obstacle outside corridor"
        assert 0 < o.y < course.width, "obstacle outside corridor"
        assert o.x >= START_CLEARANCE and o.x <= course.length - GOAL_CLEARANCE


def save_course(path: str | Path, course: Course) -> None:
    Path(path).write_text(json.dumps(course.to_dict()))


def load_course(path: str | Path) -> Course:
    return Course.from_dict(json.loads(Path(path).read_text()))
