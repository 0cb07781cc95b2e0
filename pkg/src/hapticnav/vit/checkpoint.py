"""Model checkpoint file format.

A checkpoint is a single JSON document:

    {
      "format": "hapticnav-vit-checkpoint",
      "version": 1,
      "config": {frame_side, patch_side, embed_dim, heads, layers, ffn_dim, n_classes},
      "arrays": [
        {"name": ..., "dtype": "<f8", "shape": [...], "data": "<base64>"},
        ...
      ]
    }

Array payloads are raw little-endian bytes, base64-encoded, listed in
the canonical ``ViTParams.named_arrays`` order. The version field gates
forward compatibility: loaders reject versions they do not know.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from .config import ViTConfig
from .params import ViTParams, expected_shapes

FORMAT_NAME = "hapticnav-vit-checkpoint"
FORMAT_VERSION = 1


def save_checkpoint(path: str | Path, params: ViTParams) -> None:
    arrays = []
    for name, arr in params.named_arrays():
        le = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        arrays.append(
            {
                "name": name,
                "dtype": le.dtype.str,
                "shape": list(arr.shape),
                "data": base64.b64encode(np.ascontiguousarray(le).tobytes()).decode("ascii"),
            }
        )
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "config": params.config.to_dict(),
        "arrays": arrays,
    }
    Path(path).write_text(json.dumps(doc))


def load_checkpoint(path: str | Path) -> ViTParams:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a model checkpoint: {path}")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    config = ViTConfig.from_dict(doc["config"])
    shapes = expected_shapes(config)
    arrays: dict[str, np.ndarray] = {}
    for entry in doc["arrays"]:
        name = entry["name"]
        if name not in shapes:
            raise ValueError(f"unexpected array {name!r} in checkpoint")
        arr = np.frombuffer(base64.b64decode(entry["data"]), dtype=np.dtype(entry["dtype"]))
        arr = arr.reshape(entry["shape"]).astype(np.dtype(entry["dtype"]).newbyteorder("="))
        if arr.shape != shapes[name]:
            raise ValueError(f"array {name!r} has shape {arr.shape}, expected {shapes[name]}")
        arrays[name] = arr
    missing = set(shapes) - set(arrays)
    if missing:
        raise ValueError(f"checkpoint is missing arrays: {sorted(missing)}")
    return ViTParams.from_dict(config, arrays)
