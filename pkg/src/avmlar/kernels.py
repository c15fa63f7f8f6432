"""Kernel functions for the Nadaraya-Watson estimator.

Two kernels are supported: the naive (unit-ball indicator) kernel and the
Gaussian kernel ``exp(-||u||^2)``. Both depend on the input only through
its Euclidean norm.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


class KernelKind(Enum):
    NAIVE = "naive"
    GAUSSIAN = "gaussian"


def kernel_profile(kind: KernelKind, norms: np.ndarray) -> np.ndarray:
    """Evaluate the kernel on precomputed Euclidean norms.

    Vectorized workhorse shared by the weight and prediction code. The
    naive kernel uses the closed unit ball (norm == 1 counts as inside).
    """
    s = np.asarray(norms, dtype=np.float64)
    if kind is KernelKind.NAIVE:
        return (s <= 1.0).astype(np.float64)
    if kind is KernelKind.GAUSSIAN:
        return np.exp(-(s**2))
    raise ValueError(f"unknown kernel kind: {kind!r}")


def kernel_eval(kind: KernelKind, u: np.ndarray) -> float:
    """Kernel value at the vector ``u``.

    Returns ``1`` iff ``||u|| <= 1`` for the naive kernel and
    ``exp(-||u||^2)`` for the Gaussian one.
    """
    vec = np.asarray(u, dtype=np.float64).reshape(-1)
    if vec.size < 1:
        raise ValueError("kernel input must have dimension >= 1")
    if not np.all(np.isfinite(vec)):
        raise ValueError("kernel input must be finite")
    return float(kernel_profile(kind, np.linalg.norm(vec)))
