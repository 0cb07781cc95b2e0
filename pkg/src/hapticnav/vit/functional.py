"""Forward operations: patch extraction through softmax classification.

Single-frame operations mirror the conceptual pipeline (patchify, embed,
attention, encoder block, classify); the batched entry points used by the
detector and the trainer run the same math vectorized over a leading
batch axis. Tokens are rows of an (N+1, D) array with index 0 the CLS
token.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..validation import check_frame, check_frames_batch
from .config import ViTConfig
from .params import EncoderLayerParams, ViTParams

LN_EPS = 1e-5

_GELU_C = np.sqrt(2.0 / np.pi)
_GELU_A = 0.044715


def gelu(x: np.ndarray) -> np.ndarray:
    """tanh-approximation GELU; smooth everywhere, which keeps the
    finite-difference gradient check clean at kink-free points."""
    return 0.5 * x * (1.0 + np.tanh(_GELU_C * (x + _GELU_A * x * x * x)))


def gelu_grad(x: np.ndarray) -> np.ndarray:
    t = np.tanh(_GELU_C * (x + _GELU_A * x * x * x))
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * _GELU_C * (1.0 + 3.0 * _GELU_A * x * x)


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def layer_norm(x: np.ndarray, scale: np.ndarray, offset: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return scale * (x - mu) / np.sqrt(var + LN_EPS) + offset


# ---------------------------------------------------------------------------
# patch extraction

def patchify(frame: np.ndarray, patch_side: int) -> list[np.ndarray]:
    """Split a frame into non-overlapping square patches, row-major grid
    order, each flattened to a vector of length patch_side**2 * 3.

    Concatenating the patches back (see ``unpatchify``) reproduces the
    frame exactly.
    """
    frame = check_frame(frame, patch_side=patch_side)
    return list(patchify_batch(frame[None], patch_side)[0])


def patchify_batch(frames: np.ndarray, patch_side: int) -> np.ndarray:
    b, h, w = frames.shape[0], frames.shape[1], frames.shape[2]
    gh, gw = h // patch_side, w // patch_side
    x = frames.reshape(b, gh, patch_side, gw, patch_side, 3)
    x = x.transpose(0, 1, 3, 2, 4, 5)
    return x.reshape(b, gh * gw, patch_side * patch_side * 3)


def unpatchify(patches: list[np.ndarray] | np.ndarray, patch_side: int, height: int, width: int) -> np.ndarray:
    """Inverse of ``patchify``: reassemble a frame from its patch vectors."""
    arr = np.asarray(patches)
    gh, gw = height // patch_side, width // patch_side
    if arr.shape != (gh * gw, patch_side * patch_side * 3):
        raise ValueError(f"expected {gh * gw} patches of length {patch_side * patch_side * 3}")
    x = arr.reshape(gh, gw, patch_side, patch_side, 3)
    x = x.transpose(0, 2, 1, 3, 4)
    return x.reshape(height, width, 3)


# ---------------------------------------------------------------------------
# embedding

def embed(patches: list[np.ndarray] | np.ndarray, params: ViTParams) -> np.ndarray:
    """Project patch vectors into embedding space, prepend the embedded
    CLS token, and add positional embeddings. Returns (N+1, D)."""
    arr = np.asarray(patches, dtype=params.dtype)
    n = params.config.n_patches
    if arr.ndim != 2 or arr.shape[0] != n:
        raise ValueError(f"expected {n} patches, got {arr.shape[0] if arr.ndim == 2 else 'malformed input'}")
    if arr.shape[1] != params.config.patch_dim:
        raise ValueError(f"patch vectors must have length {params.config.patch_dim}, got {arr.shape[1]}")
    return embed_batch(arr[None], params)[0]


def embed_batch(patches: np.ndarray, params: ViTParams) -> np.ndarray:
    b = patches.shape[0]
    z = patches @ params.patch_w.T + params.patch_b
    tokens = np.empty((b, params.config.seq_len, params.config.embed_dim), dtype=params.dtype)
    tokens[:, 0, :] = params.cls
    tokens[:, 1:, :] = z
    tokens += params.pos
    return tokens


# ---------------------------------------------------------------------------
# attention

class AttentionResult(NamedTuple):
    output: np.ndarray  # (T, d_k)
    weights: np.ndarray  # (T, T), rows are probability vectors


def attention_head(tokens: np.ndarray, wq: np.ndarray, wk: np.ndarray, wv: np.ndarray) -> AttentionResult:
    """Scaled dot-product attention for a single head.

    softmax(q k^T / sqrt(d_k)) v with per-query rows summing to 1; each
    output token is a convex combination of the value vectors.
    """
    tokens = np.asarray(tokens)
    if tokens.ndim != 2 or wq.shape[1] != tokens.shape[1]:
        raise ValueError("token/projection dimensions are inconsistent")
    d_k = wq.shape[0]
    q = tokens @ wq.T
    k = tokens @ wk.T
    v = tokens @ wv.T
    weights = softmax(q @ k.T / np.sqrt(d_k), axis=-1)
    return AttentionResult(weights @ v, weights)


def multi_head_attention(tokens: np.ndarray, layer: EncoderLayerParams) -> np.ndarray:
    heads = [attention_head(tokens, layer.wq[h], layer.wk[h], layer.wv[h]).output
             for h in range(layer.wq.shape[0])]
    return np.concatenate(heads, axis=-1) @ layer.wo.T


def encoder_block(tokens: np.ndarray, layer: EncoderLayerParams) -> np.ndarray:
    """Pre-norm residual block: x + MSA(norm(x)), then + FFN(norm(.))."""
    x = np.asarray(tokens)
    x = x + multi_head_attention(layer_norm(x, layer.ln1_scale, layer.ln1_offset), layer)
    h = layer_norm(x, layer.ln2_scale, layer.ln2_offset)
    f = gelu(h @ layer.ffn_w1.T + layer.ffn_b1) @ layer.ffn_w2.T + layer.ffn_b2
    return x + f


def _mha_batch(x: np.ndarray, layer: EncoderLayerParams) -> np.ndarray:
    b, t, d = x.shape
    h, dk, _ = layer.wq.shape
    flat = x.reshape(b * t, d)
    # (B,T,D) x (H,dk,D) -> (B,H,T,dk) via one GEMM per projection
    q = (flat @ layer.wq.reshape(h * dk, d).T).reshape(b, t, h, dk).transpose(0, 2, 1, 3)
    k = (flat @ layer.wk.reshape(h * dk, d).T).reshape(b, t, h, dk).transpose(0, 2, 1, 3)
    v = (flat @ layer.wv.reshape(h * dk, d).T).reshape(b, t, h, dk).transpose(0, 2, 1, 3)
    weights = softmax(q @ k.swapaxes(-1, -2) / np.sqrt(dk), axis=-1)
    out = (weights @ v).transpose(0, 2, 1, 3).reshape(b * t, h * dk)
    return (out @ layer.wo.T).reshape(b, t, d)


def encoder_block_batch(x: np.ndarray, layer: EncoderLayerParams) -> np.ndarray:
    x = x + _mha_batch(layer_norm(x, layer.ln1_scale, layer.ln1_offset), layer)
    hpre = layer_norm(x, layer.ln2_scale, layer.ln2_offset)
    b, t, d = x.shape
    u = hpre.reshape(b * t, d) @ layer.ffn_w1.T + layer.ffn_b1
    f = (gelu(u) @ layer.ffn_w2.T).reshape(b, t, d) + layer.ffn_b2
    return x + f


# ---------------------------------------------------------------------------
# full forward

def encode(tokens: np.ndarray, params: ViTParams) -> np.ndarray:
    """Run the full encoder stack on one token sequence."""
    x = tokens
    for layer in params.layers:
        x = encoder_block(x, layer)
    return x


def forward_logits(frames: np.ndarray, params: ViTParams) -> np.ndarray:
    """Batched logits for frames of shape (B, S, S, 3)."""
    cfg = params.config
    frames = np.asarray(frames, dtype=params.dtype)
    x = embed_batch(patchify_batch(frames, cfg.patch_side), params)
    for layer in params.layers:
        x = encoder_block_batch(x, layer)
    return x[:, 0, :] @ params.head_w.T + params.head_b


def predict_proba(frames: np.ndarray, params: ViTParams) -> np.ndarray:
    cfg = params.config
    frames = check_frames_batch(frames, cfg.frame_side, cfg.patch_side)
    return softmax(forward_logits(frames, params), axis=-1)


def classify(frame: np.ndarray, params: ViTParams) -> np.ndarray:
    """Class distribution for one frame: patchify -> embed -> encoder
    stack -> classifier head on the final CLS token -> softmax."""
    cfg = params.config
    frame = check_frame(frame, side=cfg.frame_side, patch_side=cfg.patch_side)
    return predict_proba(frame[None], params)[0]
