"""Numeric primitives: distances, brute-force neighbour search, min-max
scaling and seeded random streams.

Every distance in the package goes through :func:`pairwise_distances`, so
a neighbour query answered here and the same query answered inside a
classifier produce bit-identical numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, ParameterError

# upper bound on float64 temporaries allocated per block in pairwise_distances
_BLOCK_ELEMENTS = 1 << 22


def as_matrix(data, name: str = "data") -> np.ndarray:
    """Validate and return ``data`` as a finite 2-D float64 array."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise DimensionError(f"{name} has no columns")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains NaN or infinite values")
    return arr


def as_vector(x, d: Optional[int] = None, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {v.shape}")
    if d is not None and v.shape[0] != d:
        raise DimensionError(f"{name} has length {v.shape[0]}, expected {d}")
    if not np.all(np.isfinite(v)):
        raise ParameterError(f"{name} contains NaN or infinite values")
    return v


def euclidean_distance(a, b) -> float:
    """Euclidean distance between two equal-length vectors."""
    a = as_vector(a, name="a")
    b = as_vector(b, a.shape[0], name="b")
    return float(pairwise_distances(a[None, :], b[None, :])[0, 0])


def pairwise_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Dense ``len(A) x len(B)`` matrix of euclidean distances.

    Computed as ``sqrt(sum((a - b)**2))`` per pair rather than through the
    ``|a|^2 + |b|^2 - 2ab`` expansion, which loses exactness for identical
    rows (a duplicate must be at distance exactly zero).
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[1]:
        raise DimensionError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    out = np.empty((A.shape[0], B.shape[0]), dtype=np.float64)
    step = max(1, _BLOCK_ELEMENTS // max(1, B.shape[0] * B.shape[1]))
    for start in range(0, A.shape[0], step):
        diff = A[start:start + step, None, :] - B[None, :, :]
        out[start:start + step] = np.sqrt(np.square(diff).sum(axis=-1))
    return out


@dataclass(frozen=True)
class NeighbourResult:
    indices: np.ndarray
    distances: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


def neighbour_order(distances: np.ndarray) -> np.ndarray:
    """Row indices sorted by distance, ties resolved by smaller index."""
    return np.argsort(distances, kind="stable")


def knn_query(data, query, k: int, exclude: Optional[int] = None) -> NeighbourResult:
    """Brute-force ``k`` nearest rows of ``data`` to ``query``.

    Linear scan over every row; equal distances are ordered by ascending
    row index. ``exclude`` removes one row index from the candidate set.
    """
    data = as_matrix(data)
    q = as_vector(query, data.shape[1], name="query")
    n = data.shape[0]
    available = n - 1 if exclude is not None else n
    if exclude is not None and not 0 <= exclude < n:
        raise ParameterError(f"exclude index {exclude} out of range for {n} rows")
    if not 1 <= k <= available:
        raise ParameterError(f"k={k} outside [1, {available}]")
    dist = pairwise_distances(q[None, :], data)[0]
    order = neighbour_order(dist)
    if exclude is not None:
        order = order[order != exclude]
    idx = order[:k]
    return NeighbourResult(indices=idx, distances=dist[idx])


@dataclass(frozen=True)
class NormalizationParams:
    minimum: np.ndarray
    maximum: np.ndarray

    @property
    def d(self) -> int:
        return self.minimum.shape[0]


def fit_minmax(train) -> NormalizationParams:
    """Column-wise minima and maxima over the training rows."""
    X = as_matrix(train, "train")
    return NormalizationParams(minimum=X.min(axis=0), maximum=X.max(axis=0))


def apply_minmax(params: NormalizationParams, data) -> np.ndarray:
    """Scale ``data`` into [0, 1] with fitted params.

    Constant training columns map to 0 and unseen extremes are clamped.
    """
    X = as_matrix(data)
    if X.shape[1] != params.d:
        raise DimensionError(f"data has {X.shape[1]} columns, params fitted on {params.d}")
    span = params.maximum - params.minimum
    constant = span == 0
    safe = np.where(constant, 1.0, span)
    out = (X - params.minimum) / safe
    out[:, constant] = 0.0
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True)
class RandomStream:
    """A reproducible random source identified by ``(seed, path)``.

    ``path`` is a tuple of integer stream ids; :meth:`child` extends it, so
    a fold or ensemble member gets its own independent stream derived from
    the master seed. Draws come from PCG64 seeded through ``SeedSequence``,
    which is platform independent.
    """

    seed: int
    path: tuple = ()

    def __post_init__(self):
        if self.seed < 0 or self.seed >= 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def stream_id(self) -> tuple:
        return self.path

    def child(self, *ids: int) -> "RandomStream":
        return RandomStream(self.seed, self.path + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(seq))
