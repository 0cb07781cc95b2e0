from .checkpoint import load_checkpoint, save_checkpoint
from .config import ViTConfig
from .estimator import ViTClassifier
from .functional import (
    attention_head,
    classify,
    encode,
    encoder_block,
    embed,
    forward_logits,
    patchify,
    predict_proba,
    softmax,
    unpatchify,
)
from .gradients import finite_difference_gradients, loss_and_gradients
from .params import EncoderLayerParams, ViTParams, init_params
from .training import TrainConfig, fit

__all__ = [
    "ViTConfig",
    "ViTParams",
    "EncoderLayerParams",
    "ViTClassifier",
    "TrainConfig",
    "attention_head",
    "classify",
    "embed",
    "encode",
    "encoder_block",
    "finite_difference_gradients",
    "fit",
    "forward_logits",
    "init_params",
    "load_checkpoint",
    "loss_and_gradients",
    "patchify",
    "predict_proba",
    "save_checkpoint",
    "softmax",
    "unpatchify",
]
