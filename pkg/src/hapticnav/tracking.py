"""Frame-to-frame box association and the looming-obstacle flag.

Boxes are matched across consecutive frames by greedy nearest-center
pairing gated on class and distance. A track whose normalized box area
shows a sufficiently positive relative regression slope over its recent
history is flagged as an approaching obstacle: relative slope is robust
to single-frame detector jitter, unlike strict monotonicity, and is
invariant under uniform area rescaling.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .detection import BBox, Detection


@dataclass(frozen=True)
class TrackerConfig:
    gate: float = 0.25  # max center distance for a match, normalized units
    k_hist: int = 16  # ring-buffer length of stored areas
    k_max: int = 3  # consecutive misses a track survives
    tau: float = 0.03  # relative growth per frame that counts as looming
    k_win: int = 5  # regression window over the newest areas
    min_frames: int = 2  # history needed before the flag may fire

    def __post_init__(self):
        if self.gate <= 0:
            raise ValueError("gate must be positive")
        if min(self.k_hist, self.k_max, self.k_win, self.min_frames) <= 0:
            raise ValueError("tracker windows must be positive")


@dataclass
class Track:
    id: int
    class_id: int
    bbox: BBox
    area_history: deque = field(default_factory=lambda: deque(maxlen=16))
    misses: int = 0
    obstacle: bool = False

    @property
    def area(self) -> float:
        return self.bbox.area


@dataclass(frozen=True)
class Association:
    pairs: tuple[tuple[int, int], ...]  # (track id, detection index)
    unmatched_tracks: tuple[int, ...]
    unmatched_detections: tuple[int, ...]


def _center_distance(track: Track, det: Detection) -> float:
    return math.hypot(track.bbox.cx - det.bbox.cx, track.bbox.cy - det.bbox.cy)


def associate(tracks: list[Track], detections: list[Detection], gate: float) -> Association:
    """Greedy matching: among same-class pairs within the gate, repeatedly
    take the globally closest pair; exact ties break by (track id,
    detection index)."""
    if gate <= 0:
        raise ValueError("gate must be positive")
    feasible = []
    for ti, track in enumerate(tracks):
        for di, det in enumerate(detections):
            if track.class_id != det.class_id:
                continue
            dist = _center_distance(track, det)
            if dist <= gate:
                feasible.append((dist, track.id, di, ti))
    feasible.sort(key=lambda e: (e[0], e[1], e[2]))

    used_tracks: set[int] = set()
    used_dets: set[int] = set()
    pairs = []
    for _, track_id, di, ti in feasible:
        if ti in used_tracks or di in used_dets:
            continue
        used_tracks.add(ti)
        used_dets.add(di)
        pairs.append((track_id, di))
    return Association(
        pairs=tuple(pairs),
        unmatched_tracks=tuple(t.id for i, t in enumerate(tracks) if i not in used_tracks),
        unmatched_detections=tuple(i for i in range(len(detections)) if i not in used_dets),
    )


def is_approaching(track: Track, config: TrackerConfig) -> bool:
    """Flag a track whose recent areas grow fast enough.

    Least-squares slope s of the last k_win areas against frame index,
    tested as s / mean(areas) >= tau. The relative slope sits in a dead
    band (-tau, tau) while a box's pixel size plateaus between discrete
    growth steps, so inside the band the previous flag is held: the flag
    rises on clear growth, falls on clear shrinkage, and never flickers
    through quantization plateaus of a steady approach. Stores the
    result on ``track.obstacle`` and returns it.
    """
    areas = list(track.area_history)
    if len(areas) < config.min_frames:
        track.obstacle = False
        return False
    window = areas[-config.k_win:]
    m = len(window)
    xs = range(m)
    mean_x = (m - 1) / 2.0
    mean_y = sum(window) / m
    cov = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, window))
    var = sum((x - mean_x) ** 2 for x in xs)
    slope = cov / var
    if mean_y <= 0:
        track.obstacle = False
    else:
        ratio = slope / mean_y
        if ratio >= config.tau:
            track.obstacle = True
        elif ratio <= -config.tau:
            track.obstacle = False
        # otherwise: hold the previous flag
    return track.obstacle


class Tracker:
    """Owns the track list for one pipeline instance.

    ``step`` consumes one frame's detections: matched tracks adopt the
    detection's box and push its area, unmatched tracks age (and drop
    once misses exceed k_max), and unmatched detections spawn tracks
    with fresh never-reused ids.
    """

    def __init__(self, config: TrackerConfig | None = None):
        self.config = config or TrackerConfig()
        self.tracks: list[Track] = []
        self._next_id = 0

    def step(self, detections: list[Detection]) -> list[Track]:
        assoc = associate(self.tracks, detections, self.config.gate)
        by_id = {t.id: t for t in self.tracks}

        for track_id, di in assoc.pairs:
            track = by_id[track_id]
            det = detections[di]
            track.bbox = det.bbox
            area = det.bbox.area
            if det.truncated and track.area_history:
                # a frame-clipped box underestimates the object: floor the
                # pushed area near its running level so clipping cannot
                # fake a sharp shrink, but let the floor decay so a box
                # parked at the frame edge goes quiet instead of ratcheting
                area = max(area, 0.9 * track.area_history[-1])
            track.area_history.append(area)
            track.misses = 0

        survivors = []
        unmatched = set(assoc.unmatched_tracks)
        for track in self.tracks:
            if track.id in unmatched:
                track.misses += 1
                if track.misses > self.config.k_max:
                    continue
            survivors.append(track)

        for di in assoc.unmatched_detections:
            det = detections[di]
            track = Track(
                id=self._next_id,
                class_id=det.class_id,
                bbox=det.bbox,
                area_history=deque(maxlen=self.config.k_hist),
            )
            track.area_history.append(det.bbox.area)
            self._next_id += 1
            survivors.append(track)

        self.tracks = survivors
        return self.tracks

    def flag_approaching(self) -> list[Track]:
        """Apply the looming test to every track; returns flagged tracks."""
        return [t for t in self.tracks if is_approaching(t, self.config)]
