"""Divide-and-conquer block-averaged estimators and their parameter rules.

Three ways to combine per-block local estimates at a query point:

* plain averaging (``A1``): unweighted mean of the ``m`` block estimates,
  degenerate blocks contributing 0;
* data-dependent bandwidth (``A2``): plain averaging, but every block uses
  a common bandwidth derived from the block covering radii;
* qualified averaging (``A3``): the mean over *active* blocks only — those
  with at least one sample within distance ``h`` of the query.

For the k-NN family the localization radius adapts per block, so every
block is always active and all three variants coincide with A1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from .core import Dataset, EstimatorConfig, EstimatorFamily
from .kernels import KernelKind, kernel_profile
from .partition import (
    MeshNormReport,
    PartitionedDataset,
    default_candidates,
    mesh_norm_report,
    random_partition,
)

_FAMILY_KERNEL = {
    EstimatorFamily.NWK_NAIVE: KernelKind.NAIVE,
    EstimatorFamily.NWK_GAUSSIAN: KernelKind.GAUSSIAN,
}


class Variant(Enum):
    A1_PLAIN = "a1"
    A2_DATA_DEPENDENT = "a2"
    A3_QUALIFIED = "a3"


class KnnRule(NamedTuple):
    k: int
    clamped: bool


def nwk_bandwidth_rule(N: int, r: float, d: int, c: float) -> float:
    """Bandwidth ``c * N^(-1/(2r+d))``."""
    if N < 1 or r <= 0 or d < 1 or c <= 0:
        raise ValueError("nwk_bandwidth_rule arguments must be positive")
    return c * float(N) ** (-1.0 / (2.0 * r + d))


def knn_k_rule(N: int, m: int, r: float, d: int, c: float) -> KnnRule:
    """Neighbor count ``round(c * N^(2r/(2r+d)) / m)``, clamped below at 1.

    The ``clamped`` flag records whether the floor was hit.
    """
    if N < 1 or m < 1 or r <= 0 or d < 1 or c <= 0:
        raise ValueError("knn_k_rule arguments must be positive")
    raw = c * float(N) ** (2.0 * r / (2.0 * r + d)) / m
    k = int(round(raw))
    if k < 1:
        return KnnRule(1, True)
    return KnnRule(k, False)


def data_dependent_bandwidth(
    mesh: MeshNormReport, m: int, r: float, d: int
) -> float:
    """Common bandwidth from block covering radii.

    Returns ``max(m^(-1/(2r+d)) * H^(d/(2r+d)), H)`` with ``H`` the largest
    block covering radius, so the result dominates every block's radius.
    Raises when all radii are zero (the rule degenerates to a zero
    bandwidth).
    """
    if m < 1 or r <= 0 or d < 1:
        raise ValueError("data_dependent_bandwidth arguments must be positive")
    h_max = max(mesh.per_block)
    if h_max <= 0.0:
        raise ValueError("all block covering radii are zero; no usable bandwidth")
    exponent = 1.0 / (2.0 * r + d)
    return max(float(m) ** (-exponent) * h_max ** (d * exponent), h_max)


@dataclass(frozen=True)
class AvmModel:
    """A partition, an estimator configuration, and localization parameters.

    ``h_or_k`` is the bandwidth (NWK) or neighbor count (k-NN); ``tilde_h``
    is the data-dependent bandwidth and is set only for the A2 variant.
    """

    partition: PartitionedDataset
    config: EstimatorConfig
    variant: Variant
    h_or_k: float
    tilde_h: float | None = None

    def __post_init__(self) -> None:
        if self.config.family is EstimatorFamily.KNN:
            k = int(self.h_or_k)
            if not 1 <= k <= self.partition.min_block_size:
                raise ValueError(
                    f"k={k} out of range [1, {self.partition.min_block_size}]"
                )
        elif self.h_or_k <= 0:
            raise ValueError(f"bandwidth must be positive, got {self.h_or_k}")
        if self.variant is Variant.A2_DATA_DEPENDENT:
            if self.config.family is not EstimatorFamily.KNN and self.tilde_h is None:
                raise ValueError("A2 models require tilde_h")
        elif self.tilde_h is not None:
            raise ValueError("tilde_h is only meaningful for the A2 variant")

    @property
    def m(self) -> int:
        return self.partition.m


@dataclass(frozen=True)
class PredictionReport:
    """Combined prediction plus per-query block diagnostics."""

    value: float
    active_blocks: int
    degenerate_blocks: int


@dataclass(frozen=True)
class BatchPrediction:
    """Vectorized prediction results for a batch of query points."""

    values: np.ndarray
    active_blocks: np.ndarray
    degenerate_blocks: np.ndarray


def fit_avm(
    dataset: Dataset,
    config: EstimatorConfig,
    m: int,
    seed: int,
    variant: Variant = Variant.A1_PLAIN,
    *,
    h: float | None = None,
    k: int | None = None,
    candidates: np.ndarray | None = None,
) -> AvmModel:
    """Partition the data and resolve localization parameters.

    When ``h``/``k`` are omitted they come from the parameter rules at the
    full sample size ``N`` with the configured constant. For A2 the
    covering radii are computed over ``candidates`` (default:
    ``default_candidates(dataset)``) to set the common bandwidth.
    """
    part = random_partition(dataset, m, seed)
    if config.family is EstimatorFamily.KNN:
        k_val = k if k is not None else knn_k_rule(
            dataset.n, m, config.r, config.d, config.constant_c
        ).k
        return AvmModel(part, config, variant, float(k_val))
    h_val = h if h is not None else nwk_bandwidth_rule(
        dataset.n, config.r, config.d, config.constant_c
    )
    tilde_h = None
    if variant is Variant.A2_DATA_DEPENDENT:
        cand = candidates if candidates is not None else default_candidates(dataset)
        mesh = mesh_norm_report(part, cand)
        tilde_h = data_dependent_bandwidth(mesh, m, config.r, config.d)
    return AvmModel(part, config, variant, float(h_val), tilde_h)


def _query_matrix(model: AvmModel, X: np.ndarray) -> np.ndarray:
    Q = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if Q.shape[1] != model.config.d:
        raise ValueError(
            f"queries have dimension {Q.shape[1]}, model has {model.config.d}"
        )
    return Q


def _nwk_block_estimates(
    partition: PartitionedDataset, kind: KernelKind, h: float, Q: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-block NWK estimates at each query.

    Returns ``(estimates, active, degenerate)``, each of shape (m, Q):
    estimates are 0 where a block is degenerate; ``active`` marks blocks
    with a sample within ``h`` of the query.
    """
    m = partition.m
    nq = Q.shape[0]
    estimates = np.zeros((m, nq))
    active = np.zeros((m, nq), dtype=bool)
    degenerate = np.zeros((m, nq), dtype=bool)
    for j, block in enumerate(partition.blocks):
        dist = cdist(Q, block.x)
        raw = kernel_profile(kind, dist / h)
        den = raw.sum(axis=1)
        num = raw @ block.y
        ok = den > 0.0
        np.divide(num, den, out=estimates[j], where=ok)
        active[j] = dist.min(axis=1) <= h
        degenerate[j] = ~ok
    return estimates, active, degenerate


def _knn_block_estimates(
    partition: PartitionedDataset, k: int, Q: np.ndarray
) -> np.ndarray:
    m = partition.m
    estimates = np.zeros((m, Q.shape[0]))
    for j, block in enumerate(partition.blocks):
        dist = cdist(Q, block.x)
        if k < block.n:
            nearest = np.argpartition(dist, k - 1, axis=1)[:, :k]
        else:
            nearest = np.broadcast_to(np.arange(block.n), (Q.shape[0], block.n))
        estimates[j] = block.y[nearest].mean(axis=1)
    return estimates


def predict_batch(model: AvmModel, X: np.ndarray) -> BatchPrediction:
    """Evaluate the model at many query points.

    Per-block estimates are combined in block-index order so that repeated
    runs are bit-for-bit reproducible.
    """
    Q = _query_matrix(model, X)
    m = model.m

    if model.config.family is EstimatorFamily.KNN:
        estimates = _knn_block_estimates(model.partition, int(model.h_or_k), Q)
        values = estimates.mean(axis=0)
        full = np.full(Q.shape[0], m, dtype=np.int64)
        return BatchPrediction(values, full, np.zeros(Q.shape[0], dtype=np.int64))

    kind = _FAMILY_KERNEL[model.config.family]
    h = model.tilde_h if model.variant is Variant.A2_DATA_DEPENDENT else model.h_or_k
    estimates, active, degenerate = _nwk_block_estimates(
        model.partition, kind, float(h), Q
    )
    active_counts = active.sum(axis=0)
    degenerate_counts = degenerate.sum(axis=0)
    if model.variant is Variant.A3_QUALIFIED:
        m0 = active_counts
        qualified = np.where(active, estimates, 0.0).sum(axis=0)
        values = np.divide(
            qualified, m0, out=np.zeros(Q.shape[0]), where=m0 > 0
        )
    else:
        values = estimates.mean(axis=0)
    return BatchPrediction(values, active_counts, degenerate_counts)


def _predict_one(model: AvmModel, x: np.ndarray, variant: Variant) -> PredictionReport:
    if model.variant is not variant:
        raise ValueError(f"model variant is {model.variant}, expected {variant}")
    batch = predict_batch(model, np.asarray(x, dtype=np.float64).reshape(1, -1))
    return PredictionReport(
        float(batch.values[0]),
        int(batch.active_blocks[0]),
        int(batch.degenerate_blocks[0]),
    )


def avm_predict_a1(model: AvmModel, x: np.ndarray) -> PredictionReport:
    """Plain block average at ``x``; degenerate blocks contribute 0."""
    return _predict_one(model, x, Variant.A1_PLAIN)


def avm_predict_a2(model: AvmModel, x: np.ndarray) -> PredictionReport:
    """Block average with the data-dependent common bandwidth."""
    return _predict_one(model, x, Variant.A2_DATA_DEPENDENT)


def avm_predict_a3(model: AvmModel, x: np.ndarray) -> PredictionReport:
    """Average over active blocks only; 0 when no block qualifies."""
    return _predict_one(model, x, Variant.A3_QUALIFIED)
