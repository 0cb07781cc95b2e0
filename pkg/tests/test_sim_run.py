import math

import pytest

from hapticnav.detection import BBox
from hapticnav.haptics import HapticsConfig, command
from hapticnav.sim import (
    CameraModel,
    Course,
    ScriptedPolicy,
    SimConfig,
    make_course,
    make_policy,
    render,
    run_course,
    start_state,
    step,
)
from hapticnav.sim.policies import Observation
from hapticnav.tracking import Track

CAMERA = CameraModel()
SIM = SimConfig()


class TestRunCourse:
    @pytest.mark.parametrize("course_id", [1, 2, 3, 4, 5])
    def test_oracle_never_collides(self, course_id):
        for seed in range(4):
            course = make_course(course_id, seed=seed)
            metrics, _ = run_course(course, make_policy("oracle"), None, CAMERA, SIM, collect_trace=False)
            assert metrics.completed, f"course {course_id} seed {seed} did not finish"
            assert metrics.collisions == 0, f"course {course_id} seed {seed} collided"

    def test_obstacle_free_course_timing(self):
        course = Course(course_id=1, length=50.0, width=4.0, obstacles=(), seed=0)
        metrics, _ = run_course(course, make_policy("oracle"), None, CAMERA, SIM, collect_trace=False)
        # 50 m at 1.5 m/s is 33.33 s; allow one tick of discretization
        assert metrics.completed
        assert metrics.elapsed_seconds == pytest.approx(50.0 / 1.5, abs=SIM.tick_dt + 1e-9)

    def test_tick_limit_marks_incomplete(self):
        course = make_course(1, seed=0)
        policy = ScriptedPolicy(["stop"] * 100)
        metrics, records = run_course(course, policy, None, CAMERA, SIM, tick_limit=50)
        assert not metrics.completed
        assert metrics.elapsed_ticks == 50
        assert len(records) == 50

    def test_metrics_seconds_consistent_with_ticks(self):
        course = make_course(2, seed=1)
        metrics, _ = run_course(course, make_policy("oracle"), None, CAMERA, SIM, collect_trace=False)
        assert metrics.elapsed_seconds == pytest.approx(metrics.elapsed_ticks * SIM.tick_dt)

    def test_scripted_policy_holds_stop_after_exhaustion(self):
        course = Course(course_id=1, length=50.0, width=4.0, obstacles=(), seed=0)
        policy = ScriptedPolicy(["forward"] * 5)
        metrics, records = run_course(course, policy, None, CAMERA, SIM, tick_limit=12)
        assert [r["action"] for r in records] == ["forward"] * 5 + ["stop"] * 7
        agent = records[-1]["agent"]
        assert agent["x"] == pytest.approx(5 * SIM.move_step)

    def test_trace_records_are_dense_and_ordered(self):
        course = make_course(1, seed=3)
        metrics, records = run_course(course, make_policy("oracle"), None, CAMERA, SIM)
        assert [r["tick"] for r in records] == list(range(metrics.elapsed_ticks))

    @pytest.mark.parametrize("course_id", [1, 3])
    def test_blind_probe_completes_without_collisions(self, course_id):
        for seed in range(3):
            course = make_course(course_id, seed=seed)
            metrics, _ = run_course(course, make_policy("blind_probe"), None, CAMERA, SIM, collect_trace=False)
            assert metrics.completed
            assert metrics.collisions == 0


class TestPerfectCommandInvariant:
    """The reactive brain, fed commands computed from ground truth,
    must clear every generated course with zero collisions: this
    separates policy failures from perception failures."""

    @staticmethod
    def perfect_command(course, agent, tick):
        _, truths = render(course, agent, CAMERA)
        tracks = []
        for i, gt in enumerate(truths):
            if gt.bbox.area < 0.004:  # too far to matter
                continue
            t = Track(id=i, class_id=gt.class_id, bbox=gt.bbox)
            t.area_history.append(gt.bbox.area)
            t.obstacle = True
            tracks.append(t)
        return command(tracks, tick, HapticsConfig())

    @pytest.mark.parametrize("course_id", [1, 2, 3, 4, 5])
    def test_zero_collisions_with_ground_truth_commands(self, course_id):
        for seed in range(3):
            course = make_course(course_id, seed=seed)
            policy = make_policy("haptic_reactive")
            policy.reset(course.length, course.width, SIM)
            agent = start_state(course)
            for tick in range(SIM.tick_limit(course.length)):
                cmd = self.perfect_command(course, agent, tick)
                action = policy.act(Observation(tick=tick, haptic=cmd))
                agent, events = step(course, agent, action, SIM)
                if any(e["type"] == "completed" for e in events):
                    break
            assert agent.collision_count == 0, f"course {course_id} seed {seed}"
            assert agent.x >= course.length


class TestObservationGating:
    def test_oracle_sees_ground_truth_others_do_not(self):
        assert make_policy("oracle").needs_state
        assert not make_policy("haptic_reactive").needs_state
        assert not make_policy("blind_probe").needs_state
        assert make_policy("blind_probe").needs_probe
        assert not make_policy("haptic_reactive").needs_probe

    def test_interactive_requires_controller(self):
        with pytest.raises(ValueError, match="controller"):
            make_policy("interactive")

    def test_unknown_policy_rejected(self):
        with pytest.raises(ValueError, match="unknown policy"):
            make_policy("teleport")
