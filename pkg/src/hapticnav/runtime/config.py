"""Single-document JSON configuration for reproducible runs.

One file captures everything needed to reproduce a run: model
checkpoint, detector, tracker and haptics settings, camera and world
parameters, the degraded-baseline delay model, and the run selection
(course, policy, seed). ``validate`` collects every violated field
instead of stopping at the first; ``from_dict(to_dict(cfg))`` is the
identity.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from ..detection import SlidingWindowDetector
from ..errors import ConfigValidationError
from ..haptics import HapticsConfig
from ..pipeline import DelayConfig
from ..sim.agent import SimConfig
from ..sim.camera import CameraModel
from ..sim.policies import POLICY_NAMES
from ..tracking import TrackerConfig

CONFIG_VERSION = 1


@dataclass(frozen=True)
class DetectionSettings:
    scales: tuple[float, ...] = (1.0, 0.5, 1.0 / 3.0)
    stride_frac: float = 0.25
    score_threshold: float = 0.6
    nms_iou: float = 0.5
    prescreen: bool = True
    refine_boxes: bool = True
    min_blob_px: int = 8
    min_saturation: float = 0.15
    dtype: str = "float32"


@dataclass(frozen=True)
class RunSettings:
    course: int = 1
    policy: str = "haptic_reactive"
    seed: int = 0
    course_width: float = 4.0
    tick_limit: int | None = None  # defaults to the sim tick-limit rule


@dataclass(frozen=True)
class PipelineConfig:
    checkpoint: str | None = None
    detection: DetectionSettings = field(default_factory=DetectionSettings)
    tracking: TrackerConfig = field(default_factory=TrackerConfig)
    haptics: HapticsConfig = field(default_factory=HapticsConfig)
    camera: CameraModel = field(default_factory=CameraModel)
    sim: SimConfig = field(default_factory=SimConfig)
    delay: DelayConfig = field(default_factory=DelayConfig)
    run: RunSettings = field(default_factory=RunSettings)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": CONFIG_VERSION,
            "checkpoint": self.checkpoint,
            "detection": asdict(self.detection) | {"scales": list(self.detection.scales)},
            "tracking": asdict(self.tracking),
            "haptics": asdict(self.haptics),
            "camera": asdict(self.camera),
            "sim": asdict(self.sim),
            "delay": asdict(self.delay),
            "run": asdict(self.run),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        version = d.get("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigValidationError([f"version: unsupported config version {version}"])
        det = dict(d.get("detection", {}))
        if "scales" in det:
            det["scales"] = tuple(det["scales"])
        return cls(
            checkpoint=d.get("checkpoint"),
            detection=DetectionSettings(**det),
            tracking=TrackerConfig(**d.get("tracking", {})),
            haptics=HapticsConfig(**d.get("haptics", {})),
            camera=CameraModel(**d.get("camera", {})),
            sim=SimConfig(**d.get("sim", {})),
            delay=DelayConfig(**d.get("delay", {})),
            run=RunSettings(**d.get("run", {})),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    # -- validation ----------------------------------------------------

    def validate(self, require_checkpoint: bool | None = None) -> list[str]:
        """Return a list of violated fields; empty when the config is usable.

        ``require_checkpoint`` defaults to whether the selected policy
        consumes haptic perception.
        """
        errors: list[str] = []
        det, run = self.detection, self.run

        if require_checkpoint is None:
            require_checkpoint = run.policy in ("haptic_reactive", "delayed_haptic", "interactive")
        if require_checkpoint and self.checkpoint is None:
            errors.append("checkpoint: required for haptic policies but missing")
        if self.checkpoint is not None and not Path(self.checkpoint).is_file():
            errors.append(f"checkpoint: file not found: {self.checkpoint}")

        if not det.scales or any(not 0.0 < s <= 1.0 for s in det.scales):
            errors.append("detection.scales: every scale must lie in (0, 1]")
        if not 0.0 < det.stride_frac <= 1.0:
            errors.append("detection.stride_frac: must lie in (0, 1]")
        if not 0.0 <= det.score_threshold <= 1.0:
            errors.append("detection.score_threshold: must lie in [0, 1]")
        if not 0.0 <= det.nms_iou <= 1.0:
            errors.append("detection.nms_iou: must lie in [0, 1]")
        if det.min_blob_px < 1:
            errors.append("detection.min_blob_px: must be >= 1")
        if not 0.0 < det.min_saturation < 1.0:
            errors.append("detection.min_saturation: must lie in (0, 1)")
        if det.dtype not in ("float32", "float64"):
            errors.append("detection.dtype: must be float32 or float64")

        if run.course not in (1, 2, 3, 4, 5):
            errors.append(f"run.course: must be 1..5, got {run.course}")
        if run.policy not in POLICY_NAMES:
            errors.append(f"run.policy: must be one of {POLICY_NAMES}, got {run.policy!r}")
        if run.course_width < 2.0:
            errors.append("run.course_width: corridor narrower than 2 m is infeasible")
        if run.tick_limit is not None and run.tick_limit <= 0:
            errors.append("run.tick_limit: must be positive when set")
        if not 0.0 < self.camera.fov < math.pi:
            errors.append("camera.fov: must lie in (0, pi)")
        return errors

    def check(self, require_checkpoint: bool | None = None) -> "PipelineConfig":
        errors = self.validate(require_checkpoint)
        if errors:
            raise ConfigValidationError(errors)
        return self

    def with_overrides(self, **run_fields) -> "PipelineConfig":
        return replace(self, run=replace(self.run, **run_fields))

    def build_detector(self, model) -> SlidingWindowDetector:
        d = self.detection
        return SlidingWindowDetector(
            model=model,
            scales=d.scales,
            stride_frac=d.stride_frac,
            score_threshold=d.score_threshold,
            nms_iou=d.nms_iou,
            prescreen=d.prescreen,
            refine_boxes=d.refine_boxes,
            min_blob_px=d.min_blob_px,
            min_saturation=d.min_saturation,
            dtype=d.dtype,
        )


def load_config(path: str | Path) -> PipelineConfig:
    return PipelineConfig.from_dict(json.loads(Path(path).read_text()))


def save_config(path: str | Path, config: PipelineConfig) -> None:
    Path(path).write_text(config.dumps())
