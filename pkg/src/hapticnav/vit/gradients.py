"""Loss and analytic gradients for every parameter of the classifier.

The backward pass is hand-written (reverse-mode over the exact forward
graph) and is validated against central finite differences in the test
suite; see ``finite_difference_gradients`` for the independent oracle.
"""

from __future__ import annotations

import numpy as np

from ..validation import check_frames_batch, check_labels
from .config import ViTConfig
from .functional import LN_EPS, gelu, gelu_grad, patchify_batch, softmax
from .params import ViTParams


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over the batch and its gradient w.r.t. logits."""
    b = logits.shape[0]
    p = softmax(logits, axis=-1)
    eps = np.finfo(p.dtype).tiny
    loss = float(-np.mean(np.log(p[np.arange(b), labels] + eps)))
    dlogits = p
    dlogits[np.arange(b), labels] -= 1.0
    dlogits /= b
    return loss, dlogits


def _layer_norm_cached(x, scale, offset):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (x - mu) * inv_std
    return scale * xhat + offset, xhat, inv_std


def _layer_norm_backward(dout, xhat, inv_std, scale):
    dxhat = dout * scale
    g_scale = (dout * xhat).sum(axis=tuple(range(dout.ndim - 1)))
    g_offset = dout.sum(axis=tuple(range(dout.ndim - 1)))
    dx = (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    ) * inv_std
    return dx, g_scale, g_offset


def _forward_with_cache(frames: np.ndarray, params: ViTParams):
    cfg = params.config
    patches = patchify_batch(np.asarray(frames, dtype=params.dtype), cfg.patch_side)
    b = patches.shape[0]
    tokens = np.empty((b, cfg.seq_len, cfg.embed_dim), dtype=params.dtype)
    tokens[:, 0, :] = params.cls
    tokens[:, 1:, :] = patches @ params.patch_w.T + params.patch_b
    tokens += params.pos

    x = tokens
    layer_caches = []
    for layer in params.layers:
        x_in = x
        h1, xhat1, inv1 = _layer_norm_cached(x_in, layer.ln1_scale, layer.ln1_offset)
        hh, dk, d = layer.wq.shape
        t = x.shape[1]
        flat = h1.reshape(b * t, d)
        q = (flat @ layer.wq.reshape(hh * dk, d).T).reshape(b, t, hh, dk).transpose(0, 2, 1, 3)
        k = (flat @ layer.wk.reshape(hh * dk, d).T).reshape(b, t, hh, dk).transpose(0, 2, 1, 3)
        v = (flat @ layer.wv.reshape(hh * dk, d).T).reshape(b, t, hh, dk).transpose(0, 2, 1, 3)
        attn = softmax(q @ k.swapaxes(-1, -2) / np.sqrt(dk), axis=-1)
        o_cat = (attn @ v).transpose(0, 2, 1, 3).reshape(b, t, hh * dk)
        x_mid = x_in + (o_cat.reshape(b * t, hh * dk) @ layer.wo.T).reshape(b, t, d)

        h2, xhat2, inv2 = _layer_norm_cached(x_mid, layer.ln2_scale, layer.ln2_offset)
        u = h2.reshape(b * t, d) @ layer.ffn_w1.T + layer.ffn_b1
        act = gelu(u)
        x = x_mid + (act @ layer.ffn_w2.T).reshape(b, t, d) + layer.ffn_b2

        layer_caches.append(
            dict(h1=h1, xhat1=xhat1, inv1=inv1, q=q, k=k, v=v, attn=attn, o_cat=o_cat,
                 xhat2=xhat2, inv2=inv2, h2=h2, u=u, act=act)
        )

    cls_out = x[:, 0, :]
    logits = cls_out @ params.head_w.T + params.head_b
    return logits, dict(patches=patches, cls_out=cls_out, layer_caches=layer_caches)


def loss_and_gradients(
    frames: np.ndarray, labels: np.ndarray, params: ViTParams
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over (frames, labels) plus d(loss)/d(parameter)
    for every parameter, keyed by the canonical names of
    ``ViTParams.named_arrays``.
    """
    cfg = params.config
    frames = check_frames_batch(frames, cfg.frame_side, cfg.patch_side)
    labels = check_labels(labels, frames.shape[0], cfg.n_classes)

    logits, cache = _forward_with_cache(frames, params)
    loss, dlogits = cross_entropy(logits, labels)
    if not np.isfinite(loss):
        raise FloatingPointError("loss is non-finite")

    grads: dict[str, np.ndarray] = {}
    b, t, d = frames.shape[0], cfg.seq_len, cfg.embed_dim

    grads["head_w"] = dlogits.T @ cache["cls_out"]
    grads["head_b"] = dlogits.sum(axis=0)

    dx = np.zeros((b, t, d), dtype=params.dtype)
    dx[:, 0, :] = dlogits @ params.head_w

    for i in reversed(range(cfg.layers)):
        layer = params.layers[i]
        c = cache["layer_caches"][i]
        hh, dk = layer.wq.shape[0], layer.wq.shape[1]

        # FFN branch
        df = dx
        grads[f"layer{i}.ffn_b2"] = df.sum(axis=(0, 1))
        df_flat = df.reshape(b * t, d)
        grads[f"layer{i}.ffn_w2"] = df_flat.T @ c["act"]
        da = df_flat @ layer.ffn_w2
        du = da * gelu_grad(c["u"])
        grads[f"layer{i}.ffn_b1"] = du.sum(axis=0)
        h2_flat = c["h2"].reshape(b * t, d)
        grads[f"layer{i}.ffn_w1"] = du.T @ h2_flat
        dh2 = (du @ layer.ffn_w1).reshape(b, t, d)

        dx_mid_ln, g_s2, g_o2 = _layer_norm_backward(dh2, c["xhat2"], c["inv2"], layer.ln2_scale)
        grads[f"layer{i}.ln2_scale"] = g_s2
        grads[f"layer{i}.ln2_offset"] = g_o2
        dx_mid = dx + dx_mid_ln

        # attention branch
        dm_flat = dx_mid.reshape(b * t, d)
        grads[f"layer{i}.wo"] = dm_flat.T @ c["o_cat"].reshape(b * t, hh * dk)
        do_cat = (dm_flat @ layer.wo).reshape(b, t, hh, dk).transpose(0, 2, 1, 3)
        dattn = do_cat @ c["v"].swapaxes(-1, -2)
        dv = c["attn"].swapaxes(-1, -2) @ do_cat
        dscores = c["attn"] * (dattn - (dattn * c["attn"]).sum(axis=-1, keepdims=True))
        dscores /= np.sqrt(dk)
        dq = dscores @ c["k"]
        dk_grad = dscores.swapaxes(-1, -2) @ c["q"]

        h1 = c["h1"]
        grads[f"layer{i}.wq"] = np.einsum("bhtk,btd->hkd", dq, h1)
        grads[f"layer{i}.wk"] = np.einsum("bhtk,btd->hkd", dk_grad, h1)
        grads[f"layer{i}.wv"] = np.einsum("bhtk,btd->hkd", dv, h1)
        dh1 = (
            np.einsum("bhtk,hkd->btd", dq, layer.wq)
            + np.einsum("bhtk,hkd->btd", dk_grad, layer.wk)
            + np.einsum("bhtk,hkd->btd", dv, layer.wv)
        )

        dx_in_ln, g_s1, g_o1 = _layer_norm_backward(dh1, c["xhat1"], c["inv1"], layer.ln1_scale)
        grads[f"layer{i}.ln1_scale"] = g_s1
        grads[f"layer{i}.ln1_offset"] = g_o1
        dx = dx_mid + dx_in_ln

    # embedding
    grads["pos"] = dx.sum(axis=0)
    grads["cls"] = dx[:, 0, :].sum(axis=0)
    dz = dx[:, 1:, :]
    patches = cache["patches"]
    n = cfg.n_patches
    grads["patch_w"] = dz.reshape(b * n, d).T @ patches.reshape(b * n, cfg.patch_dim)
    grads["patch_b"] = dz.sum(axis=(0, 1))

    return loss, grads


def batch_loss(frames: np.ndarray, labels: np.ndarray, params: ViTParams) -> float:
    """Forward-only mean cross-entropy (used by the finite-difference oracle)."""
    from .functional import forward_logits

    logits = forward_logits(frames, params)
    loss, _ = cross_entropy(logits, np.asarray(labels))
    return loss


def finite_difference_gradients(
    frames: np.ndarray,
    labels: np.ndarray,
    params: ViTParams,
    step: float = 1e-3,
) -> dict[str, np.ndarray]:
    """Central finite differences of the batch loss w.r.t. every
    parameter component. Independent of the analytic backward pass: it
    only re-evaluates the forward loss at perturbed parameter values.
    """
    arrays = {k: v.copy() for k, v in params.named_arrays()}

    def rebuild() -> ViTParams:
        return ViTParams.from_dict(params.config, {k: v.copy() for k, v in arrays.items()})

    grads = {}
    for name in arrays:
        flat = arrays[name].reshape(-1)
        g = np.zeros_like(flat)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + step
            up = batch_loss(frames, labels, rebuild())
            flat[j] = orig - step
            down = batch_loss(frames, labels, rebuild())
            flat[j] = orig
            g[j] = (up - down) / (2.0 * step)
        grads[name] = g.reshape(arrays[name].shape)
    return grads
