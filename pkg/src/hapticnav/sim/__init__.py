from .agent import ACTIONS, AgentState, SimConfig, probe_contact, start_state, step
from .camera import CameraModel
from .course import (
    CLASS_NAMES,
    Course,
    Obstacle,
    load_course,
    make_course,
    save_course,
)
from .dataset import gen_training_set
from .policies import (
    Observation,
    Policy,
    POLICY_NAMES,
    ScriptedPolicy,
    make_policy,
)
from .render import GroundTruth, render
from .run import RunMetrics, run_course

__all__ = [
    "ACTIONS",
    "AgentState",
    "CLASS_NAMES",
    "CameraModel",
    "Course",
    "GroundTruth",
    "Observation",
    "Obstacle",
    "POLICY_NAMES",
    "Policy",
    "RunMetrics",
    "ScriptedPolicy",
    "SimConfig",
    "gen_training_set",
    "load_course",
    "make_course",
    "make_policy",
    "probe_contact",
    "render",
    "run_course",
    "save_course",
    "start_state",
    "step",
]
