"""Model geometry and hyperparameters for the toy vision transformer."""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class ViTConfig:
    """Geometry of the classifier.

    The default is a 48x48 RGB frame split into a 3x3 grid of 16x16
    patches, a 64-dim embedding with 4 attention heads, 2 encoder
    layers, and 5 output classes (background + 4 obstacle kinds).
    """

    frame_side: int = 48
    patch_side: int = 16
    embed_dim: int = 64
    heads: int = 4
    layers: int = 2
    ffn_dim: int = 128
    n_classes: int = 5

    def __post_init__(self):
        if self.frame_side <= 0 or self.patch_side <= 0:
            raise ValueError("frame_side and patch_side must be positive")
        if self.frame_side % self.patch_side:
            raise ValueError(
                f"frame_side {self.frame_side} not divisible by patch_side {self.patch_side}"
            )
        if self.embed_dim % self.heads:
            raise ValueError(f"embed_dim {self.embed_dim} not divisible by heads {self.heads}")
        if min(self.embed_dim, self.heads, self.layers, self.ffn_dim, self.n_classes) <= 0:
            raise ValueError("all model dimensions must be positive")

    @property
    def grid(self) -> int:
        return self.frame_side // self.patch_side

    @property
    def n_patches(self) -> int:
        return self.grid * self.grid

    @property
    def seq_len(self) -> int:
        """Patches plus the CLS token."""
        return self.n_patches + 1

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.heads

    @property
    def patch_dim(self) -> int:
        return self.patch_side * self.patch_side * 3

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ViTConfig":
        return cls(**d)
