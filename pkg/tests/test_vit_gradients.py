import math

import numpy as np
import pytest

from hapticnav.vit import ViTParams, finite_difference_gradients, init_params, loss_and_gradients
from hapticnav.vit.params import expected_shapes

FD_STEP = 1e-3
REL_TOL = 1e-4
# components smaller than this are compared with the absolute tolerance
# implied by the same ratio (the finite-difference oracle's own noise
# floor sits around 1e-7 for this loss scale)
SCALE_FLOOR = 1e-3


def relative_errors(analytic, numeric):
    errs = {}
    for name in analytic:
        a, n = analytic[name].ravel(), numeric[name].ravel()
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), SCALE_FLOOR)
        errs[name] = float((np.abs(a - n) / denom).max())
    return errs


def test_every_parameter_group_matches_finite_differences(tiny_config):
    params = init_params(tiny_config, seed=7)
    r = np.random.default_rng(21)
    frames = r.uniform(0, 1, size=(3, 8, 8, 3))
    labels = np.array([0, 1, 2])

    _, analytic = loss_and_gradients(frames, labels, params)
    numeric = finite_difference_gradients(frames, labels, params, step=FD_STEP)

    assert set(analytic) == set(numeric) == set(expected_shapes(tiny_config))
    errs = relative_errors(analytic, numeric)
    worst = max(errs.values())
    assert worst <= REL_TOL, f"worst relative error {worst:.3e} in {max(errs, key=errs.get)}"


def test_gradients_are_shape_congruent_with_params(tiny_config):
    params = init_params(tiny_config, seed=3)
    frames = np.random.default_rng(4).uniform(0, 1, size=(2, 8, 8, 3))
    loss, grads = loss_and_gradients(frames, np.array([1, 2]), params)
    assert math.isfinite(loss)
    shapes = expected_shapes(tiny_config)
    assert set(grads) == set(shapes)
    for name, g in grads.items():
        assert g.shape == shapes[name]
        assert np.isfinite(g).all()


def test_perfect_prediction_has_negligible_loss(tiny_config):
    params = init_params(tiny_config, seed=0)
    arrays = dict(params.named_arrays())
    arrays["head_w"] = np.zeros_like(arrays["head_w"])
    arrays["head_b"] = np.array([50.0, 0.0, 0.0])  # class 0 probability 1 - ~2e-22
    params = ViTParams.from_dict(tiny_config, arrays)
    frame = np.random.default_rng(1).uniform(0, 1, size=(1, 8, 8, 3))
    loss, _ = loss_and_gradients(frame, np.array([0]), params)
    assert loss <= 1e-8


def test_uniform_prediction_loss_is_log_c():
    from hapticnav.vit import ViTConfig

    cfg = ViTConfig(frame_side=8, patch_side=4, embed_dim=8, heads=2, layers=1, ffn_dim=16, n_classes=4)
    params = init_params(cfg, seed=0)
    arrays = dict(params.named_arrays())
    arrays["head_w"] = np.zeros_like(arrays["head_w"])
    arrays["head_b"] = np.zeros_like(arrays["head_b"])
    params = ViTParams.from_dict(cfg, arrays)
    frames = np.random.default_rng(2).uniform(0, 1, size=(3, 8, 8, 3))
    loss, _ = loss_and_gradients(frames, np.array([0, 1, 3]), params)
    assert loss == pytest.approx(math.log(4.0), abs=1e-6)


def test_empty_batch_is_rejected(tiny_params):
    with pytest.raises(ValueError, match="empty"):
        loss_and_gradients(np.zeros((0, 8, 8, 3)), np.zeros(0, dtype=int), tiny_params)
