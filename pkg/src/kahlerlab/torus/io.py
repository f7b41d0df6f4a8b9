"""Binary grid dumps of solutions.

Layout (little-endian): magic ``b"KLMA"``, uint32 version, uint32 n,
uint32 grid, float64 eps, then ``grid ** (2 n)`` float64 values of ``u``
in C order with axes ``x_1, y_1, ..., x_n, y_n``.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"KLMA"
VERSION = 1
_HEADER = struct.Struct("<4sIIId")


def dump_solution(path, u: np.ndarray, n: int, eps: float) -> Path:
    u = np.ascontiguousarray(u, dtype="<f8")
    grid = u.shape[0]
    if u.shape != (grid,) * (2 * n):
        raise ValueError(f"grid array of shape {u.shape} does not match n={n}")
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, grid, float(eps)))
        fh.write(u.tobytes())
    return path


def load_solution(path) -> tuple[np.ndarray, int, float]:
    """Return ``(u, n, eps)``."""
    data = Path(path).read_bytes()
    magic, version, n, grid, eps = _HEADER.unpack_from(data)
    if magic != MAGIC or version != VERSION:
        raise ValueError(f"{path}: not a solution dump")
    u = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if u.size != grid ** (2 * n):
        raise ValueError(f"{path}: truncated dump")
    return u.reshape((grid,) * (2 * n)).copy(), n, eps
