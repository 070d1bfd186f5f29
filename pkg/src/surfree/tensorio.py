"""Tensor file format: raw little-endian float32, row-major, with a JSON
sidecar ``<path>.json`` holding {"shape": [...]}."""
from __future__ import annotations

import json
import os

import numpy as np


def sidecar_path(path: str) -> str:
    return str(path) + ".json"


def save_tensor(path: str, array: np.ndarray) -> None:
    array = np.asarray(array)
    data = array.astype("<f4").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(data)
    with open(sidecar_path(path), "w") as fh:
        json.dump({"shape": list(array.shape)}, fh)
        fh.write("\n")


def load_tensor(path: str) -> np.ndarray:
    with open(sidecar_path(path)) as fh:
        shape = tuple(int(s) for s in json.load(fh)["shape"])
    raw = np.fromfile(path, dtype="<f4")
    expected = int(np.prod(shape)) if shape else 1
    if raw.size != expected:
        raise ValueError(f"{os.path.basename(path)}: {raw.size} values, "
                         f"sidecar shape {shape} needs {expected}")
    return raw.reshape(shape).astype(np.float64)
