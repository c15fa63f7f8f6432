"""Single-block local average regression: NWK and k-NN predictions.

The NWK weight of sample ``i`` at query ``x`` is ``K((x - X_i)/h)``
normalized by the sum over the block; when every raw weight vanishes the
query is *degenerate* and the prediction is 0 (the 0/0 convention).
k-NN averages the responses of the ``k`` nearest samples, with exact
distance ties broken toward the lower original sample index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset
from .kernels import KernelKind, kernel_profile


@dataclass(frozen=True)
class WeightVector:
    """Normalized localization weights aligned with a block's samples.

    ``degenerate`` is True when all raw kernel weights were zero; the
    weights are then all zero instead of summing to one.
    """

    weights: np.ndarray
    degenerate: bool


def _check_query(block: Dataset, x: np.ndarray) -> np.ndarray:
    q = np.asarray(x, dtype=np.float64).reshape(-1)
    if q.shape[0] != block.d:
        raise ValueError(f"query has dimension {q.shape[0]}, block has {block.d}")
    if not np.all(np.isfinite(q)):
        raise ValueError("query point must be finite")
    return q


def nwk_weights(
    block: Dataset, kind: KernelKind, h: float, x: np.ndarray
) -> WeightVector:
    """NWK weights of every block sample at the query point ``x``."""
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    q = _check_query(block, x)
    dists = np.linalg.norm(block.x - q, axis=1)
    raw = kernel_profile(kind, dists / h)
    total = raw.sum()
    if total == 0.0:
        return WeightVector(np.zeros_like(raw), degenerate=True)
    return WeightVector(raw / total, degenerate=False)


def nwk_predict(block: Dataset, kind: KernelKind, h: float, x: np.ndarray) -> float:
    """NWK prediction at ``x``; 0 for degenerate queries (0/0 convention)."""
    wv = nwk_weights(block, kind, h, x)
    if wv.degenerate:
        return 0.0
    return float(wv.weights @ block.y)


def _knn_order(block: Dataset, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dists = np.linalg.norm(block.x - x, axis=1)
    # stable sort: equal distances keep original index order
    order = np.argsort(dists, kind="stable")
    return order, dists


def _check_k(block: Dataset, k: int) -> int:
    k = int(k)
    if not 1 <= k <= block.n:
        raise ValueError(f"k must satisfy 1 <= k <= {block.n}, got {k}")
    return k


def knn_predict(block: Dataset, k: int, x: np.ndarray) -> float:
    """Mean response of the ``k`` samples nearest to ``x``."""
    k = _check_k(block, k)
    q = _check_query(block, x)
    order, _ = _knn_order(block, q)
    return float(block.y[order[:k]].mean())


def knn_effective_radius(block: Dataset, k: int, x: np.ndarray) -> float:
    """Distance from ``x`` to its ``k``-th nearest block sample."""
    k = _check_k(block, k)
    q = _check_query(block, x)
    order, dists = _knn_order(block, q)
    return float(dists[order[k - 1]])
