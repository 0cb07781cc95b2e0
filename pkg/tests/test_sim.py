import math

import numpy as np
import pytest

from hapticnav.sim import (
    AgentState,
    CameraModel,
    Course,
    SimConfig,
    gen_training_set,
    load_course,
    make_course,
    probe_contact,
    render,
    save_course,
    start_state,
    step,
)
from hapticnav.sim.course import CLASS_HEIGHT_FACTOR, Obstacle


def single_obstacle_scene(dist, radius=0.35, bearing=0.0, class_id=4, seed=1):
    obs = Obstacle(
        x=dist * math.cos(bearing),
        y=dist * math.sin(bearing),
        radius=radius,
        class_id=class_id,
        color=(0.95, 0.5, 0.05),
    )
    course = Course(course_id=1, length=1000.0, width=1000.0, obstacles=(obs,), seed=seed)
    return course, AgentState(x=0.0, y=0.0, heading=0.0)


class TestMakeCourse:
    @pytest.mark.parametrize(
        "course_id,length,count",
        [(1, 50.0, 6), (2, 100.0, 8), (3, 150.0, 10), (4, 200.0, 12), (5, 250.0, 14)],
    )
    def test_lengths_and_obstacle_counts(self, course_id, length, count):
        course = make_course(course_id, seed=0)
        assert course.length == length
        assert len(course.obstacles) == count

    def test_same_id_and_seed_is_identical(self):
        assert make_course(3, seed=42) == make_course(3, seed=42)

    def test_different_seeds_differ(self):
        assert make_course(3, seed=1) != make_course(3, seed=2)

    def test_invalid_id_rejected(self):
        with pytest.raises(ValueError):
            make_course(6, seed=0)

    def test_obstacles_respect_margins(self):
        for seed in range(5):
            course = make_course(5, seed=seed)
            for o in course.obstacles:
                assert 6.0 <= o.x <= course.length - 4.0
                assert 1.2 <= o.y <= course.width - 1.2
                assert o.class_id in (1, 2, 3, 4)

    def test_course_file_roundtrip(self, tmp_path):
        course = make_course(2, seed=7)
        path = tmp_path / "course.json"
        save_course(path, course)
        assert load_course(path) == course


class TestRender:
    def test_empty_scene_is_backgroundonly(self):
        course = Course(course_id=1, length=50.0, width=4.0, obstacles=(), seed=3)
        camera = CameraModel()
        frame, truths = render(course, AgentState(1.0, 2.0, 0.0), camera)
        assert truths == []
        assert frame.shape == (48, 48, 3)
        # gray texture: zero saturation everywhere
        assert np.allclose(frame.max(axis=2), frame.min(axis=2))
        assert frame.min() >= 0.0 and frame.max() <= 1.0

    @pytest.mark.parametrize("dist,radius", [(2.0, 0.35), (1.2, 0.3), (3.0, 0.5)])
    def test_dead_ahead_projection_formula(self, dist, radius):
        camera = CameraModel()
        course, agent = single_obstacle_scene(dist, radius)
        frame, truths = render(course, agent, camera)
        assert len(truths) == 1
        gt = truths[0]
        expected_w = 2.0 * math.atan(radius / dist) / camera.fov
        one_px = 1.0 / camera.frame_side
        assert gt.bbox.cx == pytest.approx(0.5, abs=one_px)
        assert gt.bbox.w == pytest.approx(expected_w, abs=one_px)
        assert gt.class_id == 4

    def test_halving_distance_doubles_width_in_linear_regime(self):
        camera = CameraModel()
        radius = 0.3
        for dist in (6.0, 8.0, 12.0):  # d >= 10 r keeps atan near-linear
            w_far = camera.angular_width(radius, dist)
            w_near = camera.angular_width(radius, dist / 2)
            assert w_near / w_far == pytest.approx(2.0, rel=0.05)

    def test_ground_truth_contains_rendered_pixels(self):
        camera = CameraModel()
        course, agent = single_obstacle_scene(1.5, 0.4)
        frame, truths = render(course, agent, camera)
        gt = truths[0]
        sat = frame.max(axis=2) - frame.min(axis=2)
        ys, xs = np.nonzero(sat > 0.05)
        x0, y0, x1, y1 = (v * camera.frame_side for v in gt.bbox.corners())
        assert ys.size > 0
        assert ys.min() >= y0 - 1e-9 and ys.max() < y1
        assert xs.min() >= x0 - 1e-9 and xs.max() < x1

    def test_every_colored_pixel_lies_in_some_ground_truth_box(self):
        # renderer self-consistency on cluttered frames: obstacle pixels
        # never leak outside the union of the reported boxes
        camera = CameraModel()
        gen = np.random.default_rng(31)
        for _ in range(25):
            from hapticnav.sim import make_course

            course = make_course(int(gen.integers(1, 6)), seed=int(gen.integers(0, 50)))
            agent = AgentState(
                x=gen.uniform(0, course.length - 5),
                y=gen.uniform(0.5, course.width - 0.5),
                heading=gen.uniform(-0.6, 0.6),
            )
            frame, truths = render(course, agent, camera)
            sat = frame.max(axis=2) - frame.min(axis=2)
            ys, xs = np.nonzero(sat > 0.05)
            side = camera.frame_side
            for py, px in zip(ys, xs):
                inside = any(
                    gt.bbox.corners()[0] * side - 1e-9 <= px < gt.bbox.corners()[2] * side
                    and gt.bbox.corners()[1] * side - 1e-9 <= py < gt.bbox.corners()[3] * side
                    for gt in truths
                )
                assert inside, f"pixel ({py},{px}) outside all ground-truth boxes"

    def test_nearer_obstacle_overdraws_farther(self):
        near = Obstacle(x=1.5, y=0.0, radius=0.3, class_id=3, color=(0.8, 0.1, 0.1))
        far = Obstacle(x=3.0, y=0.0, radius=0.3, class_id=1, color=(0.1, 0.6, 0.15))
        course = Course(course_id=1, length=100.0, width=100.0, obstacles=(near, far), seed=0)
        frame, truths = render(course, AgentState(0.0, 0.0, 0.0), CameraModel())
        # the frame center belongs to the near (red) obstacle
        center = frame[24, 24]
        assert center[0] > center[1]
        assert truths[0].obstacle_index == 0  # sorted near to far

    def test_behind_camera_is_invisible(self):
        course, _ = single_obstacle_scene(2.0)
        agent = AgentState(x=5.0, y=0.0, heading=0.0)  # obstacle behind agent
        _, truths = render(course, agent, CameraModel())
        assert truths == []

    def test_render_is_deterministic(self):
        course, agent = single_obstacle_scene(2.0)
        camera = CameraModel()
        f1, _ = render(course, agent, camera)
        f2, _ = render(course, agent, camera)
        assert np.array_equal(f1, f2)

    def test_height_uses_class_height_factor(self):
        camera = CameraModel()
        course, agent = single_obstacle_scene(2.0, radius=0.4, class_id=2)
        _, truths = render(course, agent, camera)
        expected_h = 2 * math.atan(CLASS_HEIGHT_FACTOR[2] * 0.4 / 2.0) / camera.fov
        assert truths[0].bbox.h == pytest.approx(expected_h, abs=1 / 48)


class TestStep:
    COURSE = Course(
        course_id=1, length=50.0, width=4.0,
        obstacles=(Obstacle(x=10.0, y=2.0, radius=0.4, class_id=1, color=(0.1, 0.6, 0.15)),),
        seed=0,
    )

    def test_forward_displacement(self):
        cfg = SimConfig()
        state = AgentState(x=1.0, y=2.0, heading=0.0)
        new, events = step(self.COURSE, state, "forward", cfg)
        assert new.x == pytest.approx(1.15)
        assert new.y == pytest.approx(2.0)
        assert events == []

    def test_stop_keeps_position(self):
        state = AgentState(x=1.0, y=2.0, heading=0.3)
        new, _ = step(self.COURSE, state, "stop", SimConfig())
        assert (new.x, new.y, new.heading) == (1.0, 2.0, 0.3)

    def test_turns_rotate_in_place(self):
        cfg = SimConfig()
        state = AgentState(x=1.0, y=2.0, heading=0.0)
        left, _ = step(self.COURSE, state, "turn_left", cfg)
        right, _ = step(self.COURSE, state, "turn_right", cfg)
        assert left.heading == pytest.approx(cfg.turn_step)
        assert right.heading == pytest.approx(-cfg.turn_step)
        assert (left.x, left.y) == (1.0, 2.0)

    def test_agent_at_obstacle_center_collides_and_is_nudged(self):
        state = AgentState(x=10.0, y=2.0, heading=0.0)
        new, events = step(self.COURSE, state, "stop", SimConfig())
        assert any(e["type"] == "collision" for e in events)
        assert new.collision_count == 1
        dist = math.hypot(new.x - 10.0, new.y - 2.0)
        assert dist == pytest.approx(0.7)  # pushed to the contact boundary

    def test_collision_is_radius_monotone(self):
        # growing the obstacle radius never removes a collision
        cfg = SimConfig()
        state = AgentState(x=10.0, y=2.65, heading=0.0)
        for r_small, r_big in [(0.2, 0.4), (0.3, 0.6)]:
            def course_with(r):
                obs = Obstacle(x=10.0, y=2.0, radius=r, class_id=1, color=(0.1, 0.6, 0.15))
                return Course(course_id=1, length=50.0, width=4.0, obstacles=(obs,), seed=0)

            _, ev_small = step(course_with(r_small), state, "stop", cfg)
            _, ev_big = step(course_with(r_big), state, "stop", cfg)
            if any(e["type"] == "collision" for e in ev_small):
                assert any(e["type"] == "collision" for e in ev_big)

    def test_per_tick_displacement_bounded(self):
        cfg = SimConfig()
        state = AgentState(x=5.0, y=2.0, heading=0.7)
        for action in ("forward", "turn_left", "turn_right", "stop"):
            new, _ = step(self.COURSE, state, action, cfg)
            assert math.hypot(new.x - state.x, new.y - state.y) <= cfg.move_step + 1e-12

    def test_completion_event(self):
        state = AgentState(x=49.9, y=2.0, heading=0.0)
        new, events = step(self.COURSE, state, "forward", SimConfig())
        assert any(e["type"] == "completed" for e in events)

    def test_walls_clamp_lateral_position(self):
        state = AgentState(x=5.0, y=3.65, heading=math.pi / 2)
        new, _ = step(self.COURSE, state, "forward", SimConfig())
        assert new.y == pytest.approx(3.7)

    def test_unknown_action_rejected(self):
        with pytest.raises(ValueError):
            step(self.COURSE, AgentState(1, 2, 0), "sprint", SimConfig())


class TestProbe:
    def test_contact_straight_ahead(self):
        course = TestStep.COURSE
        cfg = SimConfig()
        assert probe_contact(course, AgentState(9.0, 2.0, 0.0), cfg)
        assert not probe_contact(course, AgentState(8.0, 2.0, 0.0), cfg)
        # facing away: no contact even right next to it
        assert not probe_contact(course, AgentState(9.0, 2.0, math.pi), cfg)


class TestTrainingSet:
    def test_balance_rule(self):
        frames, labels = gen_training_set(1000, seed=0)
        counts = np.bincount(labels, minlength=5)
        assert counts.sum() == 1000
        assert all(abs(c - 200) <= 1 for c in counts)

    def test_bit_identical_per_seed(self):
        f1, l1 = gen_training_set(60, seed=5)
        f2, l2 = gen_training_set(60, seed=5)
        assert np.array_equal(f1, f2)
        assert np.array_equal(l1, l2)

    def test_label_consistency_with_rendered_class(self):
        # class k frames contain class k's color family; background frames
        # contain no saturated pixels at all
        from hapticnav.sim.course import CLASS_COLORS

        frames, labels = gen_training_set(100, seed=3)
        for frame, label in zip(frames, labels):
            sat = frame.max(axis=2) - frame.min(axis=2)
            if label == 0:
                assert sat.max() < 0.05
            else:
                ys, xs = np.nonzero(sat > 0.2)
                assert ys.size > 0
                mean_color = frame[ys, xs].mean(axis=0)
                base = np.array(CLASS_COLORS[int(label)])
                assert np.abs(mean_color - base).max() < 0.15

    def test_frames_match_camera_geometry(self):
        frames, labels = gen_training_set(10, seed=1)
        assert frames.shape == (10, 48, 48, 3)
        assert frames.min() >= 0.0 and frames.max() <= 1.0

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            gen_training_set(0, seed=0)
