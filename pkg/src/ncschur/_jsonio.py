"""Complex matrices to and from nested ``[re, im]`` lists."""
from __future__ import annotations

import numpy as np


def encode_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def decode_matrix(data, shape=None) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        if shape is None:
            raise ValueError("cannot infer the shape of an empty matrix")
        return np.zeros(shape, dtype=complex)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("matrix entries must be [re, im] pairs")
    M = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None and M.shape != tuple(shape):
        raise ValueError(f"expected shape {tuple(shape)}, got {M.shape}")
    return M


def encode_tuple(T) -> list:
    return [encode_matrix(M) for M in T]


def decode_tuple(data, d, shape) -> np.ndarray:
    if len(data) != d:
        raise ValueError(f"expected {d} matrices, got {len(data)}")
    out = np.zeros((d,) + tuple(shape), dtype=complex)
    for j, M in enumerate(data):
        out[j] = decode_matrix(M, shape)
    return out
