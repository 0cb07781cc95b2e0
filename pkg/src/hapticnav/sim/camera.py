"""Pinhole-style camera model for the corridor world."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class CameraModel:
    fov: float = math.pi / 2  # horizontal field of view, radians
    mount_height: float = 1.0  # meters; informational in the 2-D world
    frame_side: int = 48  # must match the classifier geometry

    def __post_init__(self):
        if not 0.0 < self.fov < math.pi:
            raise ValueError("fov must lie in (0, pi)")
        if self.frame_side <= 0:
            raise ValueError("frame_side must be positive")

    def angular_width(self, radius: float, distance: float) -> float:
        """Normalized on-screen width of a disc of the given radius."""
        return 2.0 * math.atan(radius / distance) / self.fov
