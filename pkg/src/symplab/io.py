"""JSON encodings for matrices, points, generators and reports."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .cocycle import CocycleGenerator
from .linalg import SympMatrix
from .shift import SymbolicPoint


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_json(obj, path=None, indent: int = 2) -> str:
    text = json.dumps(obj, indent=indent, default=_default)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, SympMatrix):
        return matrix_to_json(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot encode {type(o).__name__}")


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=float)
    return {"ell": M.shape[0] // 2, "rows": M.tolist()}


def matrix_from_json(d: dict) -> np.ndarray:
    M = np.asarray(d["rows"], dtype=float)
    if M.ndim != 2 or M.shape != (2 * int(d["ell"]), 2 * int(d["ell"])):
        raise ValueError(f"matrix rows of shape {M.shape} do not match ell={d['ell']}")
    return M


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(read_json(path))


def load_point(path) -> SymbolicPoint:
    return SymbolicPoint.from_json(read_json(path))


def load_generator(path) -> CocycleGenerator:
    return CocycleGenerator.from_json(read_json(path))
