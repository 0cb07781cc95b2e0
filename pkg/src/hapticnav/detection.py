"""Bounding-box detection on top of the frame classifier.

Multi-scale sliding windows are cropped, resampled to the model
geometry with nearest-neighbor interpolation (bit-stable across
platforms), and classified in one batch. Windows whose best
non-background probability clears the score threshold become candidate
detections; greedy same-class non-maximum suppression produces the
final list, sorted by descending score.

Two toy-world shortcuts are configurable and on by default:

* ``prescreen``: windows with almost no color-saturated pixels are
  skipped before classification. The synthetic renderer draws obstacles
  in saturated colors on a gray textured background, so this prunes the
  (large) background share of the window grid without changing what can
  be detected.
* ``refine_boxes``: a candidate's box is tightened to the extent of the
  saturated blob it covers instead of the window rectangle, which keeps
  box areas smooth as objects loom instead of quantized to window sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator

from .validation import check_frame, check_unit_interval
from .vit.functional import softmax, forward_logits
from .vit.params import ViTParams


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in normalized frame coordinates: center (cx, cy)
    in [0, 1], positive width/height up to 1."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        check_unit_interval(self.cx, "cx")
        check_unit_interval(self.cy, "cy")
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ValueError(f"box size must lie in (0, 1], got w={self.w} h={self.h}")
        x0, y0, x1, y1 = self.corners()
        if x1 <= 0.0 or x0 >= 1.0 or y1 <= 0.0 or y0 >= 1.0:
            raise ValueError("box does not intersect the frame")

    def corners(self) -> tuple[float, float, float, float]:
        return (self.cx - self.w / 2, self.cy - self.h / 2,
                self.cx + self.w / 2, self.cy + self.h / 2)

    @property
    def area(self) -> float:
        return self.w * self.h

    @staticmethod
    def from_corners(x0: float, y0: float, x1: float, y1: float) -> "BBox":
        return BBox((x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0)

    @staticmethod
    def from_pixel_box(y0: int, x0: int, y1: int, x1: int, side: int) -> "BBox":
        return BBox.from_corners(x0 / side, y0 / side, x1 / side, y1 / side)


@dataclass(frozen=True)
class Detection:
    bbox: BBox
    class_id: int
    score: float
    truncated: bool = False  # box touches the frame border, so its area underestimates the object

    def __post_init__(self):
        if self.class_id <= 0:
            raise ValueError("detections never carry the background class")
        check_unit_interval(self.score, "score")


def iou(a: BBox, b: BBox) -> float:
    """Intersection area over union area; symmetric, in [0, 1]."""
    ax0, ay0, ax1, ay1 = a.corners()
    bx0, by0, bx1, by1 = b.corners()
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def nms(detections: list[Detection], iou_threshold: float) -> list[Detection]:
    """Greedy same-class suppression: keep by descending score (ties by
    smaller cx, then cy), drop anything overlapping a kept box of the
    same class beyond the threshold."""
    ordered = sorted(detections, key=lambda d: (-d.score, d.bbox.cx, d.bbox.cy))
    kept: list[Detection] = []
    for det in ordered:
        if all(k.class_id != det.class_id or iou(k.bbox, det.bbox) <= iou_threshold for k in kept):
            kept.append(det)
    return kept


def resample_indices(src_side: int, dst_side: int) -> np.ndarray:
    """Nearest-neighbor source index for each destination pixel."""
    idx = np.floor((np.arange(dst_side) + 0.5) * src_side / dst_side).astype(np.intp)
    return np.clip(idx, 0, src_side - 1)


def crop_resample(frame: np.ndarray, y0: int, x0: int, side: int, dst_side: int) -> np.ndarray:
    """Crop a square window and nearest-neighbor resample it to dst_side."""
    idx = resample_indices(side, dst_side)
    return frame[y0 + idx[:, None], x0 + idx[None, :], :]


def window_offsets(frame_side: int, window_side: int, stride: int) -> list[int]:
    offs = list(range(0, frame_side - window_side + 1, stride))
    if offs[-1] != frame_side - window_side:
        offs.append(frame_side - window_side)
    return offs


class SlidingWindowDetector(BaseEstimator):
    """Turns a trained frame classifier into a bounding-box detector.

    ``model`` is the trained ``ViTParams``. ``detect`` is deterministic
    for fixed inputs; untrained or degenerate parameters simply yield an
    empty list.
    """

    def __init__(
        self,
        model: ViTParams | None = None,
        scales: tuple[float, ...] = (1.0, 0.5, 1.0 / 3.0),
        stride_frac: float = 0.25,
        score_threshold: float = 0.6,
        nms_iou: float = 0.5,
        prescreen: bool = True,
        refine_boxes: bool = True,
        min_blob_px: int = 8,
        min_saturation: float = 0.15,
        dtype: str = "float32",
    ):
        self.model = model
        self.scales = scales
        self.stride_frac = stride_frac
        self.score_threshold = score_threshold
        self.nms_iou = nms_iou
        self.prescreen = prescreen
        self.refine_boxes = refine_boxes
        self.min_blob_px = min_blob_px
        self.min_saturation = min_saturation
        self.dtype = dtype

    # -- window grid -------------------------------------------------------

    def _grid(self, frame_side: int) -> list[tuple[int, int, int]]:
        """All (window_side, y0, x0) triples of the multi-scale grid."""
        windows = []
        for scale in self.scales:
            side = int(round(scale * frame_side))
            side = max(4, min(side, frame_side))
            stride = max(1, int(round(side * self.stride_frac)))
            offs = window_offsets(frame_side, side, stride)
            for y0 in offs:
                for x0 in offs:
                    windows.append((side, y0, x0))
        return windows

    # -- detection ---------------------------------------------------------

    def _runtime_model(self) -> ViTParams:
        """Model cast to the runtime dtype (cached); float32 halves the
        per-window cost with no practical effect on scores."""
        wanted = np.dtype(self.dtype)
        cached = getattr(self, "_cast_model", None)
        if cached is None or cached.dtype != wanted or getattr(self, "_cast_source", None) is not self.model:
            cached = self.model if self.model.dtype == wanted else self.model.astype(wanted)
            self._cast_model = cached
            self._cast_source = self.model
        return cached

    def detect(self, frame: np.ndarray) -> list[Detection]:
        if self.model is None:
            raise ValueError("detector has no model parameters")
        model = self._runtime_model()
        cfg = model.config
        frame = check_frame(frame, side=None, patch_side=None)
        s = frame.shape[0]
        if frame.shape[0] != frame.shape[1]:
            raise ValueError("detector expects square frames")

        saturation = frame.max(axis=2) - frame.min(axis=2)
        mask = saturation >= self.min_saturation
        labels, n_blobs = ndimage.label(mask)
        blob_boxes = ndimage.find_objects(labels)

        windows = self._grid(s)
        if self.prescreen:
            windows = self._prescreened(windows, blob_boxes)
        if not windows:
            return []

        crops, rects = self._gather(frame.astype(model.dtype, copy=False), windows, cfg.frame_side)
        probs = softmax(forward_logits(crops, model), axis=-1)

        candidates: list[Detection] = []
        obj_probs = probs[:, 1:]
        best_class = obj_probs.argmax(axis=1) + 1
        best_score = obj_probs.max(axis=1)
        for i in range(len(windows)):
            score = float(best_score[i])
            if score < self.score_threshold:
                continue
            boxed = self._candidate_box(rects[i], labels, blob_boxes, s)
            if boxed is None:
                continue
            bbox, truncated = boxed
            candidates.append(
                Detection(bbox=bbox, class_id=int(best_class[i]), score=score, truncated=truncated)
            )

        return nms(candidates, self.nms_iou)

    # coverage prescreen: a window is worth classifying only if it holds
    # most of some saturated blob and is not grossly over- or undersized
    # for it (training crops span the same size ratios)
    COVERAGE = 0.55
    SIZE_RATIO = (0.9, 4.0)

    def _prescreened(self, windows, blob_boxes) -> list[tuple[int, int, int]]:
        blobs = []
        for sl_y, sl_x in blob_boxes:
            ext = max(sl_y.stop - sl_y.start, sl_x.stop - sl_x.start)
            if ext >= self.min_blob_px:
                blobs.append((sl_y.start, sl_x.start, sl_y.stop, sl_x.stop, ext))
        if not blobs:
            return []
        kept = []
        for side, y0, x0 in windows:
            for by0, bx0, by1, bx1, ext in blobs:
                if not self.SIZE_RATIO[0] * ext <= side <= self.SIZE_RATIO[1] * ext:
                    continue
                iw = min(x0 + side, bx1) - max(x0, bx0)
                ih = min(y0 + side, by1) - max(y0, by0)
                if iw <= 0 or ih <= 0:
                    continue
                if iw * ih >= self.COVERAGE * (by1 - by0) * (bx1 - bx0):
                    kept.append((side, y0, x0))
                    break
        return kept

    def _gather(self, frame, windows, model_side):
        """Crop + resample every window in one flat gather per side."""
        by_side: dict[int, list[int]] = {}
        for i, (side, _, _) in enumerate(windows):
            by_side.setdefault(side, []).append(i)
        s = frame.shape[0]
        flat = frame.reshape(s * s, 3)
        crops = np.empty((len(windows), model_side, model_side, 3), dtype=frame.dtype)
        rects = [None] * len(windows)
        for side, idxs in by_side.items():
            base = resample_indices(side, model_side)
            template = base[:, None] * s + base[None, :]  # linear indices at origin
            offsets = np.array([windows[i][1] * s + windows[i][2] for i in idxs], dtype=np.intp)
            crops[idxs] = flat[offsets[:, None, None] + template[None, :, :]]
            for i in idxs:
                rects[i] = (windows[i][1], windows[i][2], side)
        return crops, rects

    def _candidate_box(self, rect, labels, blob_boxes, frame_side) -> tuple[BBox, bool] | None:
        y0, x0, side = rect
        if not self.refine_boxes:
            box = BBox.from_pixel_box(y0, x0, y0 + side, x0 + side, frame_side)
            return box, False
        window_labels = labels[y0 : y0 + side, x0 : x0 + side]
        counts = np.bincount(window_labels.ravel(), minlength=1)
        counts[0] = 0
        if counts.max() == 0:
            return None  # classifier fired on pure background: no blob to anchor
        blob = int(counts.argmax())
        sl_y, sl_x = blob_boxes[blob - 1]
        by0, by1 = sl_y.start, sl_y.stop
        bx0, bx1 = sl_x.start, sl_x.stop
        if max(by1 - by0, bx1 - bx0) < self.min_blob_px:
            return None
        truncated = by0 == 0 or bx0 == 0 or by1 == frame_side or bx1 == frame_side
        return BBox.from_pixel_box(by0, bx0, by1, bx1, frame_side), truncated
