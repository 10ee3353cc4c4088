"""Random-subspace and random-projection ensembles of OCNN models.

Each of the ``L`` members sees its own view of the data (a column subset or
a sparse random projection), runs noise filtering and inner-CV tuning on
that view, and votes; a query is accepted when a strict majority accepts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classifier import OcnnModel
from .core import NormalizationParams, RandomStream, apply_minmax, as_matrix, fit_minmax
from .errors import DimensionError, OcnnError, ParameterError
from .noise_filter import IqrConfig, NoiseSplit
from .tuning import METHODS, AuditHook, JkGrid, TunedParams, fit_tuned_model

SQRT3 = math.sqrt(3.0)
MODES = {"rs50": 0.5, "rs75": 0.75, "rp": None, "identity": None}


@dataclass(frozen=True)
class FeatureTransform:
    kind: str  # "subspace", "projection" or "identity"
    d: int
    columns: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "subspace":
            cols = self.columns
            if cols is None or len(cols) < 1 or len(cols) > self.d:
                raise ParameterError("subspace needs between 1 and d columns")
            if len(np.unique(cols)) != len(cols) or cols.min() < 0 or cols.max() >= self.d:
                raise ParameterError("subspace columns must be distinct and in range")
        elif self.kind == "projection":
            if self.matrix is None or self.matrix.ndim != 2 or self.matrix.shape[1] != self.d:
                raise ParameterError("projection matrix must be p x d")
        elif self.kind != "identity":
            raise ParameterError(f"unknown transform kind {self.kind!r}")

    @property
    def out_dim(self) -> int:
        if self.kind == "subspace":
            return len(self.columns)
        if self.kind == "projection":
            return self.matrix.shape[0]
        return self.d


def identity_transform(d: int) -> FeatureTransform:
    return FeatureTransform("identity", d)


def subspace_size(d: int, fraction: float) -> int:
    # round half up, never below one column
    return max(1, int(math.floor(fraction * d + 0.5)))


def sample_subspace(d: int, fraction: float, stream: RandomStream) -> FeatureTransform:
    """Uniformly chosen column subset of size ``round(fraction * d)``."""
    if d < 1:
        raise ParameterError("d must be at least 1")
    if not 0 < fraction <= 1:
        raise ParameterError(f"fraction must lie in (0, 1], got {fraction}")
    size = subspace_size(d, fraction)
    cols = np.sort(stream.generator().choice(d, size=size, replace=False))
    return FeatureTransform("subspace", d, columns=cols)


def generate_rp_matrix(p: int, d: int, stream: RandomStream,
                       normalize_rows: bool = False) -> FeatureTransform:
    """Sparse random projection matrix.

    Entries are ``sqrt(3) * {+1, 0, -1}`` with probabilities 1/6, 2/3, 1/6
    (zero mean, unit variance). ``normalize_rows`` rescales every non-zero
    row to unit length.
    """
    if p < 1 or d < 1:
        raise ParameterError("p and d must be at least 1")
    u = stream.generator().random((p, d))
    R = np.zeros((p, d))
    R[u < 1 / 6] = SQRT3
    R[(u >= 1 / 6) & (u < 1 / 3)] = -SQRT3
    if normalize_rows:
        norms = np.linalg.norm(R, axis=1, keepdims=True)
        R = np.divide(R, norms, out=R, where=norms > 0)
    return FeatureTransform("projection", d, matrix=R)


def apply_transform(t: FeatureTransform, data) -> np.ndarray:
    X = as_matrix(data)
    if X.shape[1] != t.d:
        raise DimensionError(f"data has {X.shape[1]} columns, transform expects {t.d}")
    if t.kind == "subspace":
        return X[:, t.columns]
    if t.kind == "projection":
        return X @ t.matrix.T
    return X


@dataclass(frozen=True)
class EnsembleConfig:
    L: int = 25
    mode: str = "rp"
    method: str = "11nn-theta"
    p: Optional[int] = None  # projected dimension; None keeps d
    G: int = 2
    normalize_rp_rows: bool = False
    renormalize: bool = True
    include_noise: bool = False
    final_train: str = "retained"

    def __post_init__(self):
        if self.L < 1:
            raise ParameterError("L must be at least 1")
        if self.mode not in MODES:
            raise ParameterError(f"unknown ensemble mode {self.mode!r}; expected one of {sorted(MODES)}")
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.p is not None and self.p < 1:
            raise ParameterError("p must be at least 1")


@dataclass
class Member:
    transform: FeatureTransform
    model: OcnnModel
    tuned: Optional[TunedParams] = None
    split: Optional[NoiseSplit] = None
    renorm: Optional[NormalizationParams] = None

    def view(self, data) -> np.ndarray:
        Z = apply_transform(self.transform, data)
        return apply_minmax(self.renorm, Z) if self.renorm is not None else Z

    def classify_batch(self, queries) -> np.ndarray:
        return self.model.classify_batch(self.view(queries))


@dataclass
class EnsembleModel:
    members: list
    config: EnsembleConfig = field(default_factory=EnsembleConfig)

    @property
    def L(self) -> int:
        return len(self.members)


def draw_transform(cfg: EnsembleConfig, d: int, stream: RandomStream) -> FeatureTransform:
    if cfg.mode == "identity":
        return identity_transform(d)
    if cfg.mode == "rp":
        return generate_rp_matrix(cfg.p or d, d, stream, cfg.normalize_rp_rows)
    return sample_subspace(d, MODES[cfg.mode], stream)


def _train_member(i, X, cfg, iqr, grid, stream, audit) -> Member:
    s = stream.child(i)
    try:
        t = draw_transform(cfg, X.shape[1], s.child(0))
        Z = apply_transform(t, X)
        renorm = None
        if cfg.renormalize and t.kind == "projection":
            renorm = fit_minmax(Z)
            Z = apply_minmax(renorm, Z)
        res = fit_tuned_model(Z, cfg.method, iqr, cfg.G, grid, s.child(1),
                              cfg.include_noise, cfg.final_train, audit)
    except OcnnError as e:
        e.args = (f"ensemble member {i}: {e}",) + e.args[1:]
        e.member = i
        raise
    return Member(t, res.model, res.tuned, res.split, renorm)


def train_ensemble(train, cfg: EnsembleConfig = EnsembleConfig(), iqr: IqrConfig = IqrConfig(),
                   grid: JkGrid = JkGrid(), stream: RandomStream = RandomStream(0),
                   jobs: int = 1, audit: AuditHook = None) -> EnsembleModel:
    """Train ``cfg.L`` members, member ``i`` drawing from ``stream.child(i)``."""
    X = as_matrix(train, "train")
    if jobs > 1 and cfg.L > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            members = list(pool.map(lambda i: _train_member(i, X, cfg, iqr, grid, stream, audit),
                                    range(cfg.L)))
    else:
        members = [_train_member(i, X, cfg, iqr, grid, stream, audit) for i in range(cfg.L)]
    return EnsembleModel(members, cfg)


def vote_counts(model: EnsembleModel, queries, jobs: int = 1) -> np.ndarray:
    """Number of members accepting each query."""
    Q = np.asarray(queries, dtype=np.float64)
    if jobs > 1 and model.L > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            votes = list(pool.map(lambda m: m.classify_batch(Q), model.members))
    else:
        votes = [m.classify_batch(Q) for m in model.members]
    return np.sum(votes, axis=0, dtype=np.int64) if votes else np.zeros(len(Q), np.int64)


def majority(votes, L: int) -> np.ndarray:
    """Accept iff strictly more than half of ``L`` members accept."""
    return 2 * np.asarray(votes) > L


def predict_majority(model: EnsembleModel, queries, jobs: int = 1) -> np.ndarray:
    return majority(vote_counts(model, queries, jobs), model.L)
