"""Per-class accuracies and their geometric mean; target is the positive class."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MetricError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fn: int
    tn: int
    fp: int

    @classmethod
    def from_decisions(cls, accepted, is_target) -> "ConfusionCounts":
        accepted = np.asarray(accepted, dtype=bool)
        is_target = np.asarray(is_target, dtype=bool)
        if accepted.shape != is_target.shape:
            raise MetricError("decision and label sequences differ in length")
        return cls(
            tp=int(np.sum(accepted & is_target)),
            fn=int(np.sum(~accepted & is_target)),
            tn=int(np.sum(~accepted & ~is_target)),
            fp=int(np.sum(accepted & ~is_target)),
        )

    @property
    def tpr(self) -> float:
        if self.tp + self.fn == 0:
            raise MetricError("no positive (target) rows: TPR undefined")
        return self.tp / (self.tp + self.fn)

    @property
    def tnr(self) -> float:
        if self.tn + self.fp == 0:
            raise MetricError("no negative (outlier) rows: TNR undefined")
        return self.tn / (self.tn + self.fp)


def gmean(c: ConfusionCounts) -> float:
    """``sqrt(TPR * TNR)``."""
    return math.sqrt(c.tpr * c.tnr)


def gmean_from_rates(tpr, tnr):
    return np.sqrt(np.asarray(tpr) * np.asarray(tnr))
