"""Conversions between planar 2-vectors and complex numbers.

Throughout the package (x1, x2) is identified with x1 + i x2 and
x^perp = (-x2, x1), i.e. multiplication by i.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray


def to_complex(x: ArrayLike) -> NDArray[np.complex128] | complex:
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128)
    arr = arr.astype(np.float64)
    if arr.shape[-1:] != (2,):
        raise ValueError(f"expected trailing dimension 2, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def to_vec(z: ArrayLike) -> NDArray[np.float64]:
    z = np.asarray(z, dtype=np.complex128)
    return np.stack([z.real, z.imag], axis=-1)


def perp(v: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=np.float64)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def dot(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    return np.sum(np.asarray(a, float) * np.asarray(b, float), axis=-1)
