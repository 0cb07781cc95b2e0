"""Input validation helpers.

Frames are numpy arrays of shape (side, side, 3) with values in [0, 1],
row-major and channel-interleaved. Boxes use normalized center/size
coordinates. Validators raise ``ValueError`` with a message naming the
offending property.
"""

from __future__ import annotations

import numpy as np


def check_frame(frame: np.ndarray, side: int | None = None, patch_side: int | None = None) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ValueError(f"frame must have shape (H, W, 3), got {frame.shape}")
    h, w = frame.shape[:2]
    if h <= 0 or w <= 0:
        raise ValueError("frame dimensions must be positive")
    if side is not None and (h != side or w != side):
        raise ValueError(f"frame must be {side}x{side}, got {h}x{w}")
    if patch_side is not None and (h % patch_side or w % patch_side):
        raise ValueError(f"frame dimensions {h}x{w} not divisible by patch side {patch_side}")
    if not np.isfinite(frame).all():
        raise ValueError("frame contains non-finite values")
    if frame.min() < 0.0 or frame.max() > 1.0:
        raise ValueError("frame values must lie in [0, 1]")
    return frame


def check_frames_batch(frames: np.ndarray, side: int, patch_side: int | None = None) -> np.ndarray:
    frames = np.asarray(frames)
    if frames.ndim != 4 or frames.shape[1:] != (side, side, 3):
        raise ValueError(f"frame batch must have shape (n, {side}, {side}, 3), got {frames.shape}")
    if frames.shape[0] == 0:
        raise ValueError("frame batch is empty")
    if patch_side is not None and side % patch_side:
        raise ValueError(f"frame side {side} not divisible by patch side {patch_side}")
    return frames


def check_labels(labels: np.ndarray, n: int, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"labels must have shape ({n},), got {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        labels = labels.astype(np.int64)
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError(f"labels must lie in [0, {n_classes})")
    return labels


def check_unit_interval(value: float, name: str) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return float(value)
