"""scikit-learn style front end for the transformer classifier."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from ..validation import check_frames_batch
from .config import ViTConfig
from .functional import predict_proba
from .params import ViTParams, init_params
from .training import TrainConfig, fit


class ViTClassifier(ClassifierMixin, BaseEstimator):
    """Classifier over fixed-size RGB frames.

    ``fit(X, y)`` expects X of shape (n, frame_side, frame_side, 3) with
    values in [0, 1] and integer labels in [0, n_classes). Fitted state
    lives in ``params_`` and ``loss_trace_``; everything is deterministic
    for a fixed ``seed``.
    """

    def __init__(
        self,
        frame_side: int = 48,
        patch_side: int = 16,
        embed_dim: int = 64,
        heads: int = 4,
        layers: int = 2,
        ffn_dim: int = 128,
        n_classes: int = 5,
        learning_rate: float = 0.01,
        steps: int = 600,
        batch_size: int = 32,
        momentum: float = 0.9,
        seed: int = 0,
    ):
        self.frame_side = frame_side
        self.patch_side = patch_side
        self.embed_dim = embed_dim
        self.heads = heads
        self.layers = layers
        self.ffn_dim = ffn_dim
        self.n_classes = n_classes
        self.learning_rate = learning_rate
        self.steps = steps
        self.batch_size = batch_size
        self.momentum = momentum
        self.seed = seed

    def _model_config(self) -> ViTConfig:
        return ViTConfig(
            frame_side=self.frame_side,
            patch_side=self.patch_side,
            embed_dim=self.embed_dim,
            heads=self.heads,
            layers=self.layers,
            ffn_dim=self.ffn_dim,
            n_classes=self.n_classes,
        )

    def fit(self, X, y):
        cfg = self._model_config()
        X = check_frames_batch(np.asarray(X, dtype=np.float64), cfg.frame_side, cfg.patch_side)
        initial = init_params(cfg, seed=self.seed)
        train_cfg = TrainConfig(
            learning_rate=self.learning_rate,
            steps=self.steps,
            batch_size=self.batch_size,
            momentum=self.momentum,
            seed=self.seed,
        )
        self.params_, self.loss_trace_ = fit(X, np.asarray(y), initial, train_cfg)
        self.classes_ = np.arange(cfg.n_classes)
        return self

    def _check_fitted(self) -> ViTParams:
        params = getattr(self, "params_", None)
        if params is None:
            raise NotFittedError("ViTClassifier is not fitted; call fit or set params_")
        return params

    def predict_proba(self, X) -> np.ndarray:
        params = self._check_fitted()
        X = np.asarray(X, dtype=params.dtype)
        return predict_proba(X, params)

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)
