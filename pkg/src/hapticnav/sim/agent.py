"""Agent kinematics and collision handling.

Turn actions rotate in place at the fixed turn rate; ``forward`` moves
at the fixed speed along the current heading. A collision (agent disc
overlapping an obstacle disc) raises an event, increments the counter,
and nudges the agent back to the contact boundary instead of
teleporting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .course import Course

ACTIONS = ("forward", "turn_left", "turn_right", "stop")


@dataclass(frozen=True)
class SimConfig:
    tick_dt: float = 0.1  # seconds per tick
    speed: float = 1.5  # m/s while moving forward
    turn_rate: float = math.pi / 2  # rad/s (90 degrees per second)
    agent_radius: float = 0.3  # meters
    tick_limit_factor: float = 3.0  # tick limit = factor * straight-line ticks

    def __post_init__(self):
        if self.tick_dt <= 0:
            raise ValueError("tick_dt must be positive")
        if self.speed <= 0 or self.turn_rate <= 0 or self.agent_radius <= 0:
            raise ValueError("speed, turn_rate and agent_radius must be positive")

    @property
    def turn_step(self) -> float:
        return self.turn_rate * self.tick_dt

    @property
    def move_step(self) -> float:
        return self.speed * self.tick_dt

    def tick_limit(self, course_length: float) -> int:
        return math.ceil(self.tick_limit_factor * course_length / self.move_step)


@dataclass(frozen=True)
class AgentState:
    x: float
    y: float
    heading: float  # radians, 0 points down the corridor (+x), +y is left
    speed: float = 0.0
    collision_count: int = 0


def start_state(course: Course) -> AgentState:
    return AgentState(x=0.0, y=course.width / 2.0, heading=0.0)


def wrap_angle(a: float) -> float:
    return math.atan2(math.sin(a), math.cos(a))


def step(course: Course, state: AgentState, action: str, config: SimConfig) -> tuple[AgentState, list[dict]]:
    if action not in ACTIONS:
        raise ValueError(f"unknown action {action!r}")
    x, y, heading = state.x, state.y, state.heading
    speed = 0.0
    if action == "turn_left":
        heading = wrap_angle(heading + config.turn_step)
    elif action == "turn_right":
        heading = wrap_angle(heading - config.turn_step)
    elif action == "forward":
        speed = config.speed
        x += config.move_step * math.cos(heading)
        y += config.move_step * math.sin(heading)

    x = max(x, 0.0)
    y = min(max(y, config.agent_radius), course.width - config.agent_radius)

    events: list[dict] = []
    collisions = state.collision_count
    for idx, obs in enumerate(course.obstacles):
        dx, dy = x - obs.x, y - obs.y
        dist = math.hypot(dx, dy)
        limit = config.agent_radius + obs.radius
        if dist < limit:
            events.append({"type": "collision", "obstacle": idx})
            collisions += 1
            if dist <= 1e-9:
                dx, dy, dist = -math.cos(heading), -math.sin(heading), 1.0
            x = obs.x + dx / dist * limit
            y = obs.y + dy / dist * limit
            y = min(max(y, config.agent_radius), course.width - config.agent_radius)

    if x >= course.length:
        events.append({"type": "completed"})

    new_state = AgentState(x=x, y=y, heading=heading, speed=speed, collision_count=collisions)
    return new_state, events


def probe_contact(course: Course, state: AgentState, config: SimConfig, reach: float = 1.0) -> bool:
    """White-cane stand-in: does a forward probe of the given reach,
    swept about as wide as the agent's body, touch any obstacle?"""
    fx, fy = math.cos(state.heading), math.sin(state.heading)
    for obs in course.obstacles:
        rx, ry = obs.x - state.x, obs.y - state.y
        along = rx * fx + ry * fy
        t = min(max(along, 0.0), reach)
        px, py = state.x + t * fx, state.y + t * fy
        if math.hypot(obs.x - px, obs.y - py) <= obs.radius + config.agent_radius + 0.05:
            if along > 0.0:
                return True
    return False
