"""Parameter containers for the transformer classifier.

Parameters live in plain numpy arrays grouped in frozen dataclasses.
Arrays are marked read-only on construction; training code builds new
containers instead of mutating them in place. ``named_arrays`` defines
the canonical flat ordering used by checkpoints, gradient containers,
and the finite-difference checker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .config import ViTConfig


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class EncoderLayerParams:
    ln1_scale: np.ndarray  # (D,)
    ln1_offset: np.ndarray  # (D,)
    wq: np.ndarray  # (H, d_k, D)
    wk: np.ndarray  # (H, d_k, D)
    wv: np.ndarray  # (H, d_k, D)
    wo: np.ndarray  # (D, H*d_k)
    ln2_scale: np.ndarray  # (D,)
    ln2_offset: np.ndarray  # (D,)
    ffn_w1: np.ndarray  # (D_ff, D)
    ffn_b1: np.ndarray  # (D_ff,)
    ffn_w2: np.ndarray  # (D, D_ff)
    ffn_b2: np.ndarray  # (D,)

    def __post_init__(self):
        for f in LAYER_FIELDS:
            object.__setattr__(self, f, _freeze(getattr(self, f)))


@dataclass(frozen=True)
class ViTParams:
    config: ViTConfig
    patch_w: np.ndarray  # (D, patch_dim)
    patch_b: np.ndarray  # (D,)
    pos: np.ndarray  # (N+1, D)
    cls: np.ndarray  # (D,)
    layers: tuple[EncoderLayerParams, ...]
    head_w: np.ndarray  # (C, D)
    head_b: np.ndarray  # (C,)

    def __post_init__(self):
        for f in ("patch_w", "patch_b", "pos", "cls", "head_w", "head_b"):
            object.__setattr__(self, f, _freeze(getattr(self, f)))
        object.__setattr__(self, "layers", tuple(self.layers))
        _check_shapes(self)

    @property
    def dtype(self) -> np.dtype:
        return self.patch_w.dtype

    def named_arrays(self) -> Iterator[tuple[str, np.ndarray]]:
        """Yield (name, array) pairs in the canonical serialization order."""
        yield "patch_w", self.patch_w
        yield "patch_b", self.patch_b
        yield "pos", self.pos
        yield "cls", self.cls
        for i, layer in enumerate(self.layers):
            for f in LAYER_FIELDS:
                yield f"layer{i}.{f}", getattr(layer, f)
        yield "head_w", self.head_w
        yield "head_b", self.head_b

    def to_dict(self) -> dict[str, np.ndarray]:
        return dict(self.named_arrays())

    @classmethod
    def from_dict(cls, config: ViTConfig, arrays: dict[str, np.ndarray]) -> "ViTParams":
        layers = []
        for i in range(config.layers):
            layers.append(
                EncoderLayerParams(**{f: arrays[f"layer{i}.{f}"] for f in LAYER_FIELDS})
            )
        return cls(
            config=config,
            patch_w=arrays["patch_w"],
            patch_b=arrays["patch_b"],
            pos=arrays["pos"],
            cls=arrays["cls"],
            layers=tuple(layers),
            head_w=arrays["head_w"],
            head_b=arrays["head_b"],
        )

    def astype(self, dtype) -> "ViTParams":
        return ViTParams.from_dict(
            self.config, {k: v.astype(dtype) for k, v in self.named_arrays()}
        )

    def n_parameters(self) -> int:
        return sum(int(v.size) for _, v in self.named_arrays())


LAYER_FIELDS = (
    "ln1_scale",
    "ln1_offset",
    "wq",
    "wk",
    "wv",
    "wo",
    "ln2_scale",
    "ln2_offset",
    "ffn_w1",
    "ffn_b1",
    "ffn_w2",
    "ffn_b2",
)


def expected_shapes(config: ViTConfig) -> dict[str, tuple[int, ...]]:
    d, dk, h = config.embed_dim, config.head_dim, config.heads
    shapes: dict[str, tuple[int, ...]] = {
        "patch_w": (d, config.patch_dim),
        "patch_b": (d,),
        "pos": (config.seq_len, d),
        "cls": (d,),
        "head_w": (config.n_classes, d),
        "head_b": (config.n_classes,),
    }
    per_layer = {
        "ln1_scale": (d,),
        "ln1_offset": (d,),
        "wq": (h, dk, d),
        "wk": (h, dk, d),
        "wv": (h, dk, d),
        "wo": (d, h * dk),
        "ln2_scale": (d,),
        "ln2_offset": (d,),
        "ffn_w1": (config.ffn_dim, d),
        "ffn_b1": (config.ffn_dim,),
        "ffn_w2": (d, config.ffn_dim),
        "ffn_b2": (d,),
    }
    for i in range(config.layers):
        for f, s in per_layer.items():
            shapes[f"layer{i}.{f}"] = s
    return shapes


def _check_shapes(params: ViTParams) -> None:
    shapes = expected_shapes(params.config)
    for name, arr in params.named_arrays():
        if arr.shape != shapes[name]:
            raise ValueError(f"parameter {name} has shape {arr.shape}, expected {shapes[name]}")
        if not np.isfinite(arr).all():
            raise ValueError(f"parameter {name} contains non-finite values")


def _glorot(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int, dtype) -> np.ndarray:
    a = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-a, a, size=shape).astype(dtype)


def init_params(config: ViTConfig, seed: int = 0, dtype=np.float64) -> ViTParams:
    """Seed-controlled uniform(-a, a) init with a = sqrt(6 / (fan_in + fan_out)).

    Layer-norm scales start at 1, offsets and biases at 0.
    """
    rng = np.random.default_rng(seed)
    d, dk, h = config.embed_dim, config.head_dim, config.heads
    layers = []
    for _ in range(config.layers):
        layers.append(
            EncoderLayerParams(
                ln1_scale=np.ones(d, dtype=dtype),
                ln1_offset=np.zeros(d, dtype=dtype),
                wq=_glorot(rng, (h, dk, d), d, dk, dtype),
                wk=_glorot(rng, (h, dk, d), d, dk, dtype),
                wv=_glorot(rng, (h, dk, d), d, dk, dtype),
                wo=_glorot(rng, (d, h * dk), h * dk, d, dtype),
                ln2_scale=np.ones(d, dtype=dtype),
                ln2_offset=np.zeros(d, dtype=dtype),
                ffn_w1=_glorot(rng, (config.ffn_dim, d), d, config.ffn_dim, dtype),
                ffn_b1=np.zeros(config.ffn_dim, dtype=dtype),
                ffn_w2=_glorot(rng, (d, config.ffn_dim), config.ffn_dim, d, dtype),
                ffn_b2=np.zeros(d, dtype=dtype),
            )
        )
    return ViTParams(
        config=config,
        patch_w=_glorot(rng, (d, config.patch_dim), config.patch_dim, d, dtype),
        patch_b=np.zeros(d, dtype=dtype),
        pos=_glorot(rng, (config.seq_len, d), d, d, dtype),
        cls=_glorot(rng, (d,), d, d, dtype),
        layers=tuple(layers),
        head_w=_glorot(rng, (config.n_classes, d), d, config.n_classes, dtype),
        head_b=np.zeros(config.n_classes, dtype=dtype),
    )


def zero_gradients(config: ViTConfig, dtype=np.float64) -> dict[str, np.ndarray]:
    """A gradient container: one zero array per parameter, same names/shapes."""
    return {name: np.zeros(shape, dtype=dtype) for name, shape in expected_shapes(config).items()}
