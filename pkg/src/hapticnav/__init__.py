"""hapticnav: a toy vision-transformer perception stack wired to a
looming-cue obstacle tracker, a three-channel haptic mapper, and a 2-D
corridor navigation simulator."""

from .detection import BBox, Detection, SlidingWindowDetector, iou, nms
from .errors import ConfigValidationError, DivergenceError, PipelineError
from .haptics import HapticCommand, HapticsConfig, command, emit, zone
from .pipeline import DelayConfig, DelayedPerception, PerceptionPipeline
from .tracking import Association, Track, Tracker, TrackerConfig, associate, is_approaching
from .vit import ViTClassifier, ViTConfig, ViTParams

__version__ = "0.1.0"

__all__ = [
    "Association",
    "BBox",
    "ConfigValidationError",
    "DelayConfig",
    "DelayedPerception",
    "Detection",
    "DivergenceError",
    "HapticCommand",
    "HapticsConfig",
    "PerceptionPipeline",
    "PipelineError",
    "SlidingWindowDetector",
    "Track",
    "Tracker",
    "TrackerConfig",
    "ViTClassifier",
    "ViTConfig",
    "ViTParams",
    "associate",
    "command",
    "emit",
    "iou",
    "is_approaching",
    "nms",
    "zone",
]
