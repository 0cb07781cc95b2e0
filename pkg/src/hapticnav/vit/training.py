"""Minibatch gradient descent with momentum for the classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DivergenceError
from ..validation import check_frames_batch, check_labels
from .gradients import loss_and_gradients
from .params import ViTParams


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    steps: int = 600
    batch_size: int = 32
    momentum: float = 0.9  # plain gradient descent when 0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.steps < 0 or self.batch_size <= 0:
            raise ValueError("steps must be >= 0 and batch_size positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")


def fit(
    frames: np.ndarray,
    labels: np.ndarray,
    params: ViTParams,
    config: TrainConfig,
) -> tuple[ViTParams, list[float]]:
    """Train and return (final params, per-step loss trace).

    Deterministic for a fixed seed: batches are drawn from a dedicated
    generator and updates are plain SGD with momentum. Raises
    ``DivergenceError`` as soon as the loss stops being finite.
    """
    cfg = params.config
    frames = check_frames_batch(frames, cfg.frame_side, cfg.patch_side)
    labels = check_labels(labels, frames.shape[0], cfg.n_classes)

    rng = np.random.default_rng(config.seed)
    n = frames.shape[0]
    arrays = {k: v.copy() for k, v in params.named_arrays()}
    velocity = {k: np.zeros_like(v) for k, v in arrays.items()}
    trace: list[float] = []

    current = params
    for step in range(config.steps):
        idx = rng.choice(n, size=min(config.batch_size, n), replace=False)
        try:
            loss, grads = loss_and_gradients(frames[idx], labels[idx], current)
        except FloatingPointError as exc:
            raise DivergenceError(f"loss diverged at step {step}") from exc
        if not np.isfinite(loss):
            raise DivergenceError(f"loss diverged at step {step}: {loss}")
        trace.append(loss)
        if config.learning_rate == 0.0:
            continue  # zero step size: params stay bit-identical to the input
        for k in arrays:
            velocity[k] = config.momentum * velocity[k] - config.learning_rate * grads[k]
            arrays[k] = arrays[k] + velocity[k]
        current = ViTParams.from_dict(cfg, arrays)
    return current, trace
