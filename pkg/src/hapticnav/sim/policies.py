"""Navigation policies for the simulated courses.

All scripted policies are deterministic. The haptic-driven policies see
only the per-tick haptic command (plus their own action history, which
they integrate into a dead-reckoned pose estimate); the oracle sees the
true obstacle map; the blind probe sees a 1 m forward contact probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..haptics import HapticCommand
from .agent import AgentState, SimConfig, wrap_angle
from .course import Course

POLICY_NAMES = ("oracle", "haptic_reactive", "delayed_haptic", "blind_probe", "interactive")


@dataclass
class Observation:
    tick: int
    haptic: HapticCommand
    probe_contact: bool | None = None  # blind_probe only
    state: AgentState | None = None  # oracle only
    course: Course | None = None  # oracle only


class Policy:
    needs_state = False
    needs_probe = False

    def reset(self, course_length: float, corridor_width: float, sim: SimConfig) -> None:  # noqa: ARG002
        pass

    def act(self, obs: Observation) -> str:
        raise NotImplementedError


class _DeadReckoner:
    """Exact pose integration from the policy's own past actions: the
    kinematics are deterministic, so a blindfolded agent can still keep
    track of heading and lateral drift."""

    def __init__(self):
        self.heading = 0.0
        self.y_offset = 0.0
        self.x = 0.0

    def reset(self, sim: SimConfig):
        self.heading = 0.0
        self.y_offset = 0.0
        self.x = 0.0
        self._sim = sim

    def apply(self, action: str) -> str:
        if action == "turn_left":
            self.heading = wrap_angle(self.heading + self._sim.turn_step)
        elif action == "turn_right":
            self.heading = wrap_angle(self.heading - self._sim.turn_step)
        elif action == "forward":
            self.x += self._sim.move_step * math.cos(self.heading)
            self.y_offset += self._sim.move_step * math.sin(self.heading)
        return action


class OraclePolicy(Policy):
    """Plans on the true obstacle map: picks a passing side for every
    obstacle ahead and steers toward the resulting lane, a perception-free
    upper bound that never collides on feasible courses."""

    needs_state = True

    LOOKAHEAD = 7.0  # meters: start shifting lanes this far out
    PASS_MARGIN = 0.35

    def reset(self, course_length: float, corridor_width: float, sim: SimConfig) -> None:
        self._sim = sim
        self._width = corridor_width
        self._pass_y: dict[int, float] = {}

    def _target_lane(self, course: Course, idx: int, sim: SimConfig) -> float:
        if idx not in self._pass_y:
            obs = course.obstacles[idx]
            room_low = obs.y - obs.radius
            room_high = (course.width - obs.y) - obs.radius
            offset = obs.radius + sim.agent_radius + self.PASS_MARGIN
            y = obs.y + offset if room_high >= room_low else obs.y - offset
            lo = sim.agent_radius + 0.15
            self._pass_y[idx] = min(max(y, lo), course.width - lo)
        return self._pass_y[idx]

    def act(self, obs: Observation) -> str:
        state, course, sim = obs.state, obs.course, self._sim
        target_y = course.width / 2.0
        best = None
        for idx, o in enumerate(course.obstacles):
            ahead = o.x + o.radius + 0.6 - state.x
            if ahead > 0 and o.x - state.x < self.LOOKAHEAD:
                if best is None or o.x < course.obstacles[best].x:
                    best = idx
        if best is not None:
            target_y = self._target_lane(course, best, sim)
        desired = math.atan2(target_y - state.y, 2.0)
        err = wrap_angle(desired - state.heading)
        if err > 0.6 * sim.turn_step:
            return "turn_left"
        if err < -0.6 * sim.turn_step:
            return "turn_right"
        return "forward"


class ReactivePolicy(Policy):
    """Consumes only the haptic command. Front-channel pressure turns the
    agent away until the front clears, a short forward commitment then
    carries it past the threat before any re-centering; loud side
    channels push it further off; otherwise it re-centers its
    dead-reckoned heading and lateral drift and walks."""

    FRONT_THRESHOLD = 0.02
    SIDE_THRESHOLD = 0.35
    COMMIT_TICKS = 10
    SIDE_COMMIT_TICKS = 4
    EXTRA_TURN_BASE = 2  # berth widening past front-clear...
    EXTRA_TURN_GAIN = 5.0  # ...grows with peak front intensity (louder = closer)
    MAX_AVOID_TURNS = 14  # one avoidance episode turns at most ~126 degrees
    MAX_HEADING = 2.1  # radians off the corridor axis before sanity wins
    PIN_TURNS = 24  # this many turns without a step means the rules are deadlocked
    PIN_TURNS_HARD = 44  # past this, squeeze out through side pressure too
    ESCAPE_TICKS = 8
    DRIFT_GAIN = 6.0  # meters of forward travel to shed one meter of drift

    def __init__(self):
        self._reckon = _DeadReckoner()

    UNWIND_EXIT = 1.0  # radians: unwinding latches until realigned this far

    def reset(self, course_length: float, corridor_width: float, sim: SimConfig) -> None:
        self._sim = sim
        self._reckon.reset(sim)
        self._avoid_dir: str | None = None
        self._peak_front = 0.0
        self._avoid_ticks = 0
        self._extra_turns = 0
        self._pending_dir = "turn_left"
        self._commit = 0
        self._unwinding = False
        self._turn_streak = 0
        self._escape = 0

    def act(self, obs: Observation) -> str:
        action = self._reckon.apply(self._decide(obs.haptic))
        self._turn_streak = 0 if action == "forward" else self._turn_streak + 1
        return action

    def _decide(self, h: HapticCommand) -> str:
        reckon = self._reckon
        # deadlock escape: when the avoid/unwind/side rules have had the
        # agent pivoting in place for a long time, squeeze out through the
        # first heading that is quiet on every channel; if even that never
        # comes, settle for any front-quiet heading
        front_quiet = h.front <= self.FRONT_THRESHOLD
        quiet = front_quiet and max(h.left, h.right) < 0.7
        if (self._turn_streak >= self.PIN_TURNS and quiet) or (
            self._turn_streak >= self.PIN_TURNS_HARD and front_quiet
        ):
            self._escape = self.ESCAPE_TICKS
            self._unwinding = False
            self._avoid_dir = None
            self._extra_turns = 0
        if self._escape > 0 and front_quiet:
            self._escape -= 1
            return "forward"
        self._escape = 0
        # never spiral: with stale or conflicting signals the heading can
        # wind up pointing back down the corridor; unwinding overrides
        # every other rule until the agent faces roughly forward again,
        # otherwise guard and threat rules can two-cycle forever
        if abs(reckon.heading) > self.MAX_HEADING:
            self._unwinding = True
            self._avoid_dir = None
            self._extra_turns = 0
        if self._unwinding:
            if abs(reckon.heading) > self.UNWIND_EXIT:
                return "turn_right" if reckon.heading > 0 else "turn_left"
            self._unwinding = False
            self._commit = max(self._commit, self.SIDE_COMMIT_TICKS)
        if h.front > self.FRONT_THRESHOLD:
            if self._avoid_dir is None:
                self._peak_front = 0.0
                self._avoid_ticks = 0
                if h.left > h.right:
                    self._avoid_dir = "turn_right"
                elif h.right > h.left:
                    self._avoid_dir = "turn_left"
                else:  # pure front threat: dodge toward the corridor center
                    self._avoid_dir = "turn_right" if reckon.y_offset > 0 else "turn_left"
            self._peak_front = max(self._peak_front, h.front)
            self._avoid_ticks += 1
            if self._avoid_ticks <= self.MAX_AVOID_TURNS:
                return self._avoid_dir
            # persistent front signal despite a long turn: walk out of it
            self._avoid_dir = None
            self._commit = self.COMMIT_TICKS
        if self._avoid_dir is not None:
            # front cleared: keep turning a bit longer the closer the
            # threat was, then commit forward so it actually passes
            self._extra_turns = self.EXTRA_TURN_BASE + round(self.EXTRA_TURN_GAIN * min(self._peak_front, 1.0))
            self._commit = self.COMMIT_TICKS
            self._pending_dir = self._avoid_dir
            self._avoid_dir = None
        if self._extra_turns > 0:
            self._extra_turns -= 1
            return self._pending_dir
        if h.left > self.SIDE_THRESHOLD or h.right > self.SIDE_THRESHOLD:
            self._commit = max(self._commit, self.SIDE_COMMIT_TICKS)
            return "turn_right" if h.left > h.right else "turn_left"
        if self._commit > 0:
            self._commit -= 1
            return "forward"
        # quiet: walk, steering gently back to the center line
        desired = math.atan2(-reckon.y_offset, self.DRIFT_GAIN)
        err = wrap_angle(desired - reckon.heading)
        if err > 0.75 * self._sim.turn_step:
            return "turn_left"
        if err < -0.75 * self._sim.turn_step:
            return "turn_right"
        return "forward"


class BlindProbePolicy(Policy):
    """White-cane analog: walks until the 1 m probe touches something,
    pivots toward the corridor center until the probe has been clear for
    a couple of ticks, commits forward, then re-centers."""

    needs_probe = True
    CLEAR_TICKS = 2
    COMMIT_TICKS = 10
    SAME_SIDE_WINDOW = 40  # re-contacts this soon keep detouring the same way

    def __init__(self):
        self._reckon = _DeadReckoner()

    def reset(self, course_length: float, corridor_width: float, sim: SimConfig) -> None:
        self._sim = sim
        self._reckon.reset(sim)
        self._turning = 0  # +1 turning left, -1 turning right, 0 not avoiding
        self._last_dir = 0
        self._clear = 0
        self._commit = 0
        self._tick = 0
        self._last_contact_tick = -10_000

    def act(self, obs: Observation) -> str:
        self._tick += 1
        return self._reckon.apply(self._decide(bool(obs.probe_contact)))

    def _decide(self, contact: bool) -> str:
        reckon = self._reckon
        if contact:
            if self._turning == 0:
                # flip-flopping sides around the same obstacle orbits it
                # forever, so recent encounters keep their detour side
                if self._tick - self._last_contact_tick <= self.SAME_SIDE_WINDOW and self._last_dir:
                    self._turning = self._last_dir
                else:
                    self._turning = -1 if reckon.y_offset > 0 else 1
                self._last_dir = self._turning
            self._last_contact_tick = self._tick
            self._clear = 0
            return "turn_left" if self._turning > 0 else "turn_right"
        if self._turning != 0:
            self._clear += 1
            if self._clear < self.CLEAR_TICKS:
                return "turn_left" if self._turning > 0 else "turn_right"
            self._turning = 0
            self._commit = self.COMMIT_TICKS
        if self._commit > 0:
            self._commit -= 1
            return "forward"
        desired = math.atan2(-reckon.y_offset, 4.0)
        err = wrap_angle(desired - reckon.heading)
        if err > 0.6 * self._sim.turn_step:
            return "turn_left"
        if err < -0.6 * self._sim.turn_step:
            return "turn_right"
        return "forward"


class ScriptedPolicy(Policy):
    """Replays a fixed action sequence; holds ``stop`` once exhausted."""

    def __init__(self, actions: list[str]):
        self._actions = list(actions)

    def act(self, obs: Observation) -> str:
        if obs.tick < len(self._actions):
            return self._actions[obs.tick]
        return "stop"


class InteractivePolicy(Policy):
    """Pulls one action per tick from an external controller callable
    (the serve mode's session loop)."""

    def __init__(self, controller):
        self._controller = controller

    def act(self, obs: Observation) -> str:
        return self._controller(obs)


def make_policy(name: str, controller=None) -> Policy:
    if name == "oracle":
        return OraclePolicy()
    if name in ("haptic_reactive", "delayed_haptic"):
        return ReactivePolicy()  # the delay lives in the perception wrapper
    if name == "blind_probe":
        return BlindProbePolicy()
    if name == "interactive":
        if controller is None:
            raise ValueError("interactive policy requires a connected controller")
        return InteractivePolicy(controller)
    raise ValueError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
