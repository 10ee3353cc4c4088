"""One-class J-K nearest neighbour scoring.

A query ``z`` is scored against a target training matrix ``T``:

* ``dbar_j``: mean distance from ``z`` to its ``J`` nearest rows of ``T``;
* ``dbar_k``: mean distance from each of those ``J`` rows to its own ``K``
  nearest rows of ``T`` (the row itself excluded, duplicates allowed);
* the query is accepted as a target iff ``dbar_j / dbar_k < theta``.

11NN, 1KNN, J1NN and JKNN are the same model with ``J`` and/or ``K`` pinned
to one. Decisions are booleans, ``True`` meaning *accept as target*.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    NormalizationParams,
    apply_minmax,
    as_matrix,
    as_vector,
    neighbour_order,
    pairwise_distances,
)
from .errors import DimensionError, ParameterError

ACCEPT = True
REJECT = False


@dataclass(frozen=True)
class OcnnParams:
    J: int = 1
    K: int = 1
    theta: float = 1.0

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 1:
            raise ParameterError(f"J must be a positive integer, got {self.J}")
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        if not self.theta > 0:
            raise ParameterError(f"theta must be positive, got {self.theta}")


@dataclass(frozen=True)
class OcnnScore:
    dbar_j: float
    dbar_k: float
    ratio: float


def self_neighbour_distances(train: np.ndarray, k: int) -> np.ndarray:
    """Sorted distances from every row to its ``k`` nearest other rows.

    Row ``i`` is excluded from its own candidate set by index, so an exact
    duplicate of row ``i`` still counts (at distance zero).
    """
    n = train.shape[0]
    if not 1 <= k <= n - 1:
        raise ParameterError(f"K={k} outside [1, {n - 1}] for {n} training rows")
    out = np.empty((n, k), dtype=np.float64)
    step = max(1, (1 << 22) // max(1, n))
    for start in range(0, n, step):
        stop = min(n, start + step)
        D = pairwise_distances(train[start:stop], train)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        if k < n - 1:
            D = np.partition(D, k - 1, axis=1)[:, :k]
        out[start:stop] = np.sort(D, axis=1)[:, :k]
    return out


def ratio_of(dbar_j, dbar_k):
    """Elementwise ``dbar_j / dbar_k`` with the zero-denominator conventions:
    0/0 is 0 and x/0 for x > 0 is ``+inf``."""
    dbar_j = np.asarray(dbar_j, dtype=np.float64)
    dbar_k = np.asarray(dbar_k, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = dbar_j / dbar_k
    zero_k = dbar_k == 0
    r = np.where(zero_k & (dbar_j == 0), 0.0, r)
    r = np.where(zero_k & (dbar_j > 0), np.inf, r)
    return r


def ratio_grid(query_dist: np.ndarray, neigh_idx: np.ndarray, kdist: np.ndarray):
    """Scores for every ``(j, k)`` prefix at once.

    ``query_dist`` and ``neigh_idx`` hold, per query, the distances and row
    indices of its nearest training rows in neighbour order (``m x J``).
    ``kdist`` is :func:`self_neighbour_distances` output (``n x K``).

    Returns ``(dbar_j, dbar_k, ratio)`` shaped ``m x J``, ``m x J x K`` and
    ``m x J x K``; entry ``[:, j-1, k-1]`` is the score of model ``(j, k)``.
    Prefix sums are sequential, so the value for a given ``(j, k)`` does not
    depend on how large a grid was requested.
    """
    J = query_dist.shape[1]
    K = kdist.shape[1]
    jn = np.arange(1, J + 1, dtype=np.float64)
    kn = np.arange(1, K + 1, dtype=np.float64)
    dbar_j = np.cumsum(query_dist, axis=1) / jn
    row_sums = np.cumsum(kdist, axis=1)
    dbar_k = np.cumsum(row_sums[neigh_idx], axis=1) / (jn[:, None] * kn[None, :])
    return dbar_j, dbar_k, ratio_of(dbar_j[:, :, None], dbar_k)


def nearest_rows(train: np.ndarray, queries: np.ndarray, j: int):
    """Distances and indices of the ``j`` nearest training rows per query,
    ties broken by ascending row index."""
    D = pairwise_distances(queries, train)
    order = np.stack([neighbour_order(row)[:j] for row in D]) if len(D) else np.empty((0, j), int)
    return np.take_along_axis(D, order, axis=1), order


class OcnnModel:
    """Frozen training matrix plus ``(J, K, theta)``.

    ``train`` is expected to be already normalized; ``norm`` records the
    scaling that produced it so callers can map raw queries with
    :meth:`prepare`.
    """

    def __init__(self, train, params: OcnnParams = OcnnParams(), norm: Optional[NormalizationParams] = None):
        X = np.array(as_matrix(train, "train"), copy=True)
        n = X.shape[0]
        if params.J > n:
            raise ParameterError(f"J={params.J} exceeds {n} training rows")
        if params.K > n - 1:
            raise ParameterError(f"K={params.K} exceeds {n - 1} candidate neighbours")
        X.setflags(write=False)
        self.train = X
        self.params = params
        self.norm = norm
        self._kdist = self_neighbour_distances(X, params.K)
        self._kdist.setflags(write=False)

    @property
    def d(self) -> int:
        return self.train.shape[1]

    def __repr__(self):
        p = self.params
        return f"OcnnModel(n={self.train.shape[0]}, d={self.d}, J={p.J}, K={p.K}, theta={p.theta:g})"

    def with_theta(self, theta: float) -> "OcnnModel":
        """Same training data and neighbours, different threshold."""
        clone = object.__new__(OcnnModel)
        clone.train = self.train
        clone.params = OcnnParams(self.params.J, self.params.K, theta)
        clone.norm = self.norm
        clone._kdist = self._kdist
        return clone

    def prepare(self, raw) -> np.ndarray:
        return apply_minmax(self.norm, raw) if self.norm is not None else as_matrix(raw)

    def score_batch(self, queries):
        """``(dbar_j, dbar_k, ratio)`` arrays for each query row."""
        Q = _queries(queries, self.d)
        J, K = self.params.J, self.params.K
        qd, idx = nearest_rows(self.train, Q, J)
        dj, dk, r = ratio_grid(qd, idx, self._kdist[:, :K])
        return dj[:, J - 1], dk[:, J - 1, K - 1], r[:, J - 1, K - 1]

    def score(self, z) -> OcnnScore:
        z = as_vector(z, self.d, name="z")
        dj, dk, r = self.score_batch(z[None, :])
        return OcnnScore(float(dj[0]), float(dk[0]), float(r[0]))

    def classify_batch(self, queries) -> np.ndarray:
        return decide(self.score_batch(queries)[2], self.params.theta)

    def classify(self, z) -> bool:
        return bool(decide(self.score(z).ratio, self.params.theta))


def _queries(queries, d: int) -> np.ndarray:
    Q = np.asarray(queries, dtype=np.float64)
    if Q.size == 0:
        return np.empty((0, d))
    Q = as_matrix(Q, "queries")
    if Q.shape[1] != d:
        raise DimensionError(f"queries have {Q.shape[1]} columns, model expects {d}")
    return Q


def decide(ratio, theta: float):
    """Accept iff ``ratio < theta`` (strict); ``+inf`` always rejects."""
    return np.asarray(ratio) < theta


# module-level operations over a model


def score(model: OcnnModel, z) -> OcnnScore:
    return model.score(z)


def classify(model: OcnnModel, z) -> bool:
    return model.classify(z)


def classify_batch(model: OcnnModel, queries) -> np.ndarray:
    return model.classify_batch(queries)


# named variants, all one code path


def nn11(train, theta: float = 1.0, norm=None) -> OcnnModel:
    return OcnnModel(train, OcnnParams(1, 1, theta), norm)


def nn1k(train, K: int, theta: float = 1.0, norm=None) -> OcnnModel:
    return OcnnModel(train, OcnnParams(1, K, theta), norm)


def nnj1(train, J: int, theta: float = 1.0, norm=None) -> OcnnModel:
    return OcnnModel(train, OcnnParams(J, 1, theta), norm)


def jknn(train, J: int, K: int, theta: float = 1.0, norm=None) -> OcnnModel:
    return OcnnModel(train, OcnnParams(J, K, theta), norm)
