"""Per-tick perception: detect -> track -> flag -> haptic command.

``PerceptionPipeline`` owns one tracker's state and is the unit of
isolation: every simulated run (and every serve-mode session) builds
its own instance. ``DelayedPerception`` wraps a pipeline with the
degraded-baseline behavior: detection runs only every ``detect_every``
ticks and commands are delivered ``delay_ticks`` late, emulating a
slower detector pipeline that warns users too late.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detection import Detection, SlidingWindowDetector
from .haptics import HapticCommand, HapticsConfig, command
from .tracking import Track, Tracker, TrackerConfig


@dataclass
class PerceptionOutput:
    detections: list[Detection]
    tracks: list[Track]
    command: HapticCommand
    skipped: bool = False  # True when this tick's detection pass was skipped


class PerceptionPipeline:
    def __init__(
        self,
        detector: SlidingWindowDetector,
        tracker_config: TrackerConfig | None = None,
        haptics_config: HapticsConfig | None = None,
    ):
        self.detector = detector
        self.tracker = Tracker(tracker_config or TrackerConfig())
        self.haptics_config = haptics_config or HapticsConfig()

    def process(self, frame: np.ndarray, tick: int) -> PerceptionOutput:
        detections = self.detector.detect(frame)
        self.tracker.step(detections)
        self.tracker.flag_approaching()
        cmd = command(self.tracker.tracks, tick, self.haptics_config)
        return PerceptionOutput(detections=detections, tracks=list(self.tracker.tracks), command=cmd)


@dataclass(frozen=True)
class DelayConfig:
    delay_ticks: int = 6
    detect_every: int = 2

    def __post_init__(self):
        if self.delay_ticks < 0 or self.detect_every < 1:
            raise ValueError("delay_ticks must be >= 0 and detect_every >= 1")


class DelayedPerception:
    """Stale, half-rate variant of a pipeline.

    The inner pipeline runs on every ``detect_every``-th tick; the
    command actually delivered at tick t is the newest one computed at
    or before t - delay_ticks (a zero command until one exists).
    """

    def __init__(self, inner: PerceptionPipeline, config: DelayConfig | None = None):
        self.inner = inner
        self.config = config or DelayConfig()
        self._queue: list[tuple[int, HapticCommand]] = []

    def process(self, frame: np.ndarray, tick: int) -> PerceptionOutput:
        if tick % self.config.detect_every == 0:
            fresh = self.inner.process(frame, tick)
            self._queue.append((tick, fresh.command))
            detections, tracks, skipped = fresh.detections, fresh.tracks, False
        else:
            detections, tracks, skipped = [], list(self.inner.tracker.tracks), True

        delivered: HapticCommand | None = None
        cutoff = tick - self.config.delay_ticks
        while self._queue and self._queue[0][0] <= cutoff:
            delivered = self._queue.pop(0)[1]
            self._last = delivered
        delivered = getattr(self, "_last", None)
        if delivered is None:
            delivered = HapticCommand(left=0.0, front=0.0, right=0.0, tick=tick)
        else:
            delivered = HapticCommand(
                left=delivered.left, front=delivered.front, right=delivered.right,
                tick=tick, extra=delivered.extra,
            )
        return PerceptionOutput(detections=detections, tracks=tracks, command=delivered, skipped=skipped)
