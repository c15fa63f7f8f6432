"""Random division of a dataset into blocks, and block covering radii.

The covering radius (mesh norm) of a block is the largest distance from
any domain point to its nearest block sample. The continuous supremum is
approximated on a finite candidate set; ``default_candidates`` supplies
the standard choice and callers may override it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import Dataset

# above this many pairwise distances, nearest-sample queries go through a k-d tree
_BRUTE_FORCE_PAIR_LIMIT = 1 << 25


@dataclass(frozen=True)
class PartitionedDataset:
    """Disjoint blocks of a parent dataset plus the partition seed.

    ``indices[j]`` holds block ``j``'s row numbers in the parent; ``blocks``
    are the corresponding datasets (parent domain bounds retained).
    """

    blocks: tuple[Dataset, ...]
    indices: tuple[np.ndarray, ...]
    seed: int
    parent_size: int

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def min_block_size(self) -> int:
        return min(b.n for b in self.blocks)


@dataclass(frozen=True)
class MeshNormReport:
    """Per-block covering radii over a shared candidate set."""

    per_block: tuple[float, ...]
    candidate_count: int

    @property
    def max(self) -> float:
        return max(self.per_block)


def random_partition(dataset: Dataset, m: int, seed: int) -> PartitionedDataset:
    """Split ``dataset`` into ``m`` random blocks of near-equal size.

    A seeded uniform permutation (PCG64) of the sample indices is sliced
    contiguously; when ``m`` does not divide ``N`` the first ``N mod m``
    blocks receive one extra sample. The same (dataset, m, seed) always
    produces the identical partition.
    """
    m = int(m)
    n_total = dataset.n
    if not 1 <= m <= n_total:
        raise ValueError(f"m must satisfy 1 <= m <= {n_total}, got {m}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_total)
    base, extra = divmod(n_total, m)
    sizes = [base + 1 if j < extra else base for j in range(m)]
    bounds = np.cumsum([0] + sizes)
    indices = tuple(perm[bounds[j] : bounds[j + 1]] for j in range(m))
    blocks = tuple(dataset.subset(idx) for idx in indices)
    return PartitionedDataset(blocks, indices, int(seed), n_total)


def _nearest_sample_distances(points: np.ndarray, samples: np.ndarray) -> np.ndarray:
    """Distance from each point to its nearest sample."""
    n_pairs = points.shape[0] * samples.shape[0]
    if n_pairs <= _BRUTE_FORCE_PAIR_LIMIT:
        diff = points[:, None, :] - samples[None, :, :]
        return np.sqrt((diff**2).sum(axis=2)).min(axis=1)
    tree = cKDTree(samples)
    dist, _ = tree.query(points, k=1)
    return np.asarray(dist, dtype=np.float64).reshape(-1)


def mesh_norm(block: Dataset, candidates: np.ndarray) -> float:
    """Covering radius of the block over a finite candidate set.

    Returns ``max`` over candidates of the minimum Euclidean distance to
    any block sample; this lower-bounds the continuous covering radius.
    """
    cand = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if cand.shape[0] < 1:
        raise ValueError("candidate set must be nonempty")
    if cand.shape[1] != block.d:
        raise ValueError(
            f"candidates have dimension {cand.shape[1]}, block has {block.d}"
        )
    if block.n < 1:
        raise ValueError("block must be nonempty")
    return float(_nearest_sample_distances(cand, block.x).max())


def default_candidates(dataset: Dataset) -> np.ndarray:
    """Standard candidate set for covering-radius computations.

    For d=1, a uniform 1001-point grid over the domain bounds. For d>1,
    the union of all parent sample inputs and the corners of the bounding
    box; corners are omitted beyond d=10 to cap their count at 2^10.
    """
    if dataset.n < 1:
        raise ValueError("dataset must be nonempty")
    bounds = dataset.domain_bounds
    if dataset.d == 1:
        return np.linspace(bounds[0, 0], bounds[0, 1], 1001)[:, None]
    if dataset.d <= 10:
        corners = np.array(
            list(itertools.product(*(tuple(b) for b in bounds))), dtype=np.float64
        )
        return np.vstack([dataset.x, corners])
    return np.array(dataset.x)


def mesh_norm_report(
    partition: PartitionedDataset, candidates: np.ndarray
) -> MeshNormReport:
    """Covering radius of every block over one shared candidate set."""
    cand = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    per_block = tuple(mesh_norm(block, cand) for block in partition.blocks)
    return MeshNormReport(per_block, cand.shape[0])
