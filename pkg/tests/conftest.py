import numpy as np
import pytest

from hapticnav.vit import TrainConfig, ViTConfig, fit, init_params, save_checkpoint


@pytest.fixture(scope="session")
def tiny_config():
    # 2x2 grid of 4x4 patches: N=4, D=8, H=2, L=1, C=3
    return ViTConfig(frame_side=8, patch_side=4, embed_dim=8, heads=2, layers=1, ffn_dim=16, n_classes=3)


@pytest.fixture(scope="session")
def tiny_params(tiny_config):
    return init_params(tiny_config, seed=7)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def trained_model():
    """A quickly trained default-geometry model, good enough for the
    detector and pipeline tests (the acceptance suite trains the full
    configuration itself)."""
    from hapticnav.sim import gen_training_set

    frames, labels = gen_training_set(800, seed=0)
    params = init_params(ViTConfig(), seed=0)
    params, _ = fit(frames, labels, params, TrainConfig(steps=300, seed=0))
    return params


@pytest.fixture(scope="session")
def checkpoint_path(trained_model, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.json"
    save_checkpoint(path, trained_model)
    return str(path)
