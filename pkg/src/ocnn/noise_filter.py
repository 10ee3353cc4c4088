"""Proxy-negative generation by IQR fencing of centre distances.

Target rows whose distance to the class mean falls outside
``[Q1 - omega * IQR, Q3 + omega * IQR]`` are set aside as stand-in
outliers. When too few rows are fenced, ``omega`` is shrunk geometrically
until enough are, or until it would drop below a floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_matrix, pairwise_distances
from .errors import NoiseBudgetError, ParameterError


@dataclass(frozen=True)
class IqrConfig:
    omega: float = 1.5
    min_rejected: int = 5
    omega_decay: float = 0.9
    omega_floor: float = 0.05
    lower_fence: bool = True

    def __post_init__(self):
        if not self.omega_floor > 0:
            raise ParameterError("omega_floor must be positive")
        if not self.omega >= self.omega_floor:
            raise ParameterError(f"omega={self.omega} is below omega_floor={self.omega_floor}")
        if not 0 < self.omega_decay < 1:
            raise ParameterError("omega_decay must lie in (0, 1)")
        if self.min_rejected < 1:
            raise ParameterError("min_rejected must be at least 1")


@dataclass(frozen=True)
class NoiseSplit:
    """Indices into the training rows: ``retained`` targets and ``rejected``
    proxy negatives, plus the fence multiplier that produced them."""

    retained: np.ndarray
    rejected: np.ndarray
    omega_used: float

    @property
    def n(self) -> int:
        return len(self.retained) + len(self.rejected)


def class_center(train) -> np.ndarray:
    return as_matrix(train, "train").mean(axis=0)


def quartiles(values, q: float) -> float:
    """Quantile by linear interpolation between order statistics.

    Position ``q * (m - 1)`` in the sorted values, interpolated between
    neighbours (the "linear" / type 7 convention).
    """
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise ParameterError("quartiles of an empty sequence")
    if not 0 <= q <= 1:
        raise ParameterError(f"q={q} outside [0, 1]")
    p = q * (v.size - 1)
    lo = math.floor(p)
    if lo + 1 >= v.size:
        return float(v[lo])
    return float(v[lo] + (p - lo) * (v[lo + 1] - v[lo]))


def fence_mask(distances, omega: float, lower_fence: bool = True) -> np.ndarray:
    """Boolean mask of distances outside the IQR fences at ``omega``."""
    dist = np.asarray(distances, dtype=np.float64)
    q1 = quartiles(dist, 0.25)
    q3 = quartiles(dist, 0.75)
    iqr = q3 - q1
    mask = dist > q3 + omega * iqr
    if lower_fence:
        mask |= dist < q1 - omega * iqr
    return mask


def split_distances(distances, cfg: IqrConfig = IqrConfig()) -> NoiseSplit:
    """Fence precomputed centre distances, shrinking omega as needed."""
    dist = np.asarray(distances, dtype=np.float64)
    if dist.size < cfg.min_rejected + 1:
        raise NoiseBudgetError(
            f"{dist.size} rows cannot yield {cfg.min_rejected} rejections and keep a target"
        )
    omega = cfg.omega
    while True:
        mask = fence_mask(dist, omega, cfg.lower_fence)
        if mask.sum() >= cfg.min_rejected:
            break
        nxt = omega * cfg.omega_decay
        if nxt < cfg.omega_floor:
            raise NoiseBudgetError(
                f"only {int(mask.sum())} of {dist.size} rows fenced at omega={omega:.4g}; "
                f"need {cfg.min_rejected} (floor {cfg.omega_floor})"
            )
        omega = nxt
    return NoiseSplit(
        retained=np.flatnonzero(~mask),
        rejected=np.flatnonzero(mask),
        omega_used=float(omega),
    )


def centre_distances(train) -> np.ndarray:
    X = as_matrix(train, "train")
    return pairwise_distances(X, class_center(X)[None, :])[:, 0]


def iqr_reject(train, cfg: IqrConfig = IqrConfig()) -> NoiseSplit:
    """Split training targets into retained rows and proxy negatives."""
    return split_distances(centre_distances(train), cfg)
