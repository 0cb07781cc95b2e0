"""Mapping from flagged obstacle tracks to motor-channel intensities.

The frame is split into left/front/right thirds; each zone's channel
buzzes at the largest normalized box area among the obstacle-flagged
tracks whose center falls in that zone, scaled by ``a_max`` and clamped
to [0, 1]. An optional fourth channel exists for hardware variants that
carry one; the zone mapping never drives it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .errors import PipelineError
from .tracking import Track
from .validation import check_unit_interval

ZONE_LEFT = "left"
ZONE_FRONT = "front"
ZONE_RIGHT = "right"


@dataclass(frozen=True)
class HapticsConfig:
    a_max: float = 0.2  # normalized box area mapped to full intensity
    channels: int = 3  # 3 per the handle design; 4 reserved for variants

    def __post_init__(self):
        if self.a_max <= 0:
            raise ValueError("a_max must be positive")
        if self.channels not in (3, 4):
            raise ValueError("channels must be 3 or 4")


@dataclass(frozen=True)
class HapticCommand:
    left: float
    front: float
    right: float
    tick: int
    extra: float | None = None  # fourth channel, if configured; never driven by zones

    def __post_init__(self):
        for name in ("left", "front", "right"):
            check_unit_interval(getattr(self, name), name)

    def intensities(self) -> tuple[float, ...]:
        if self.extra is None:
            return (self.left, self.front, self.right)
        return (self.left, self.front, self.right, self.extra)


def zone(cx: float) -> str:
    """Viewer-centric third of the frame holding a normalized center x.

    Half-open boundaries: [0, 1/3) left, [1/3, 2/3) front, [2/3, 1] right.
    """
    check_unit_interval(cx, "cx")
    if cx < 1.0 / 3.0:
        return ZONE_LEFT
    if cx < 2.0 / 3.0:
        return ZONE_FRONT
    return ZONE_RIGHT


def command(tracks: list[Track], tick: int, config: HapticsConfig | None = None) -> HapticCommand:
    """Per-zone intensity: max area among obstacle-flagged tracks in the
    zone, divided by a_max, clamped to [0, 1]; empty zones stay at 0.

    Only tracks confirmed by a detection this frame (misses == 0) drive
    the motors: a coasting track's stale position would buzz the wrong
    channel exactly when the camera is turning fastest.
    """
    config = config or HapticsConfig()
    levels = {ZONE_LEFT: 0.0, ZONE_FRONT: 0.0, ZONE_RIGHT: 0.0}
    for track in tracks:
        if not track.obstacle or track.misses > 0:
            continue
        area = track.bbox.area
        if track.area_history:
            # the history carries the clip-corrected size, which beats the
            # raw box when the object pokes past the frame edge
            area = max(area, track.area_history[-1])
        z = zone(track.bbox.cx)
        levels[z] = max(levels[z], min(area / config.a_max, 1.0))
    return HapticCommand(
        left=levels[ZONE_LEFT],
        front=levels[ZONE_FRONT],
        right=levels[ZONE_RIGHT],
        tick=tick,
        extra=0.0 if config.channels == 4 else None,
    )


class HapticSink(Protocol):
    def write(self, record: dict) -> None: ...


class ListSink:
    """In-memory sink for tests and offline runs."""

    def __init__(self):
        self.records: list[dict] = []

    def write(self, record: dict) -> None:
        self.records.append(record)


class FileSink:
    """Writes one line per tick: ``tick,left,front,right`` with four
    decimal places."""

    def __init__(self, fileobj):
        self._file = fileobj

    def write(self, record: dict) -> None:
        values = [f"{record[k]:.4f}" for k in ("left", "front", "right")]
        self._file.write(f"{record['tick']}," + ",".join(values) + "\n")


def trace_record(cmd: HapticCommand) -> dict:
    return {
        "tick": cmd.tick,
        "left": round(cmd.left, 4),
        "front": round(cmd.front, 4),
        "right": round(cmd.right, 4),
    }


def emit(cmd: HapticCommand, sink: HapticSink) -> dict:
    """Write one per-tick record to the sink, preserving call order.
    Sink failures surface as PipelineError carrying the failing tick."""
    record = trace_record(cmd)
    try:
        sink.write(record)
    except OSError as exc:
        raise PipelineError(f"haptic sink write failed: {exc}", tick=cmd.tick) from exc
    return record
