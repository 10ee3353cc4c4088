"""Outer F-fold one-class evaluation.

Rows of both classes are dealt into F stratified folds. For each fold the
*target* rows of the other F-1 folds form the training set (their outliers
are dropped) and every row of the held-out fold is classified. Metrics are
reported per fold and as mean / sample standard deviation across folds.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import RandomStream, apply_minmax, as_matrix, fit_minmax
from .ensemble import EnsembleConfig, predict_majority, train_ensemble
from .errors import MetricError, OcnnError, ParameterError, PlanError
from .metrics import ConfusionCounts, gmean
from .noise_filter import IqrConfig
from .tuning import METHODS, JkGrid, fit_tuned_model

ENSEMBLE_MODES = ("single", "rs50", "rs75", "rp")
METRICS = ("tpr", "tnr", "gmean")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that determines a run except the data and the seed."""

    method: str = "11nn-theta"
    ensemble: str = "single"
    F: int = 5
    G: int = 2
    L: int = 25
    J_max: int = 10
    K_max: int = 10
    omega: float = 1.5
    min_rejected: int = 5
    omega_decay: float = 0.9
    omega_floor: float = 0.05
    lower_fence: bool = True
    p: Optional[int] = None
    normalize_rp_rows: bool = False
    renormalize: bool = True
    include_noise: bool = False
    final_train: str = "retained"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.ensemble not in ENSEMBLE_MODES:
            raise ParameterError(f"unknown ensemble {self.ensemble!r}; expected one of {ENSEMBLE_MODES}")
        if self.F < 2:
            raise ParameterError(f"F must be at least 2, got {self.F}")

    @property
    def iqr(self) -> IqrConfig:
        return IqrConfig(self.omega, self.min_rejected, self.omega_decay, self.omega_floor, self.lower_fence)

    @property
    def grid(self) -> JkGrid:
        return JkGrid(self.J_max, self.K_max)

    @property
    def label(self) -> str:
        return f"{self.method}/{self.ensemble}"

    def ensemble_config(self) -> EnsembleConfig:
        return EnsembleConfig(
            L=self.L, mode=self.ensemble, method=self.method, p=self.p, G=self.G,
            normalize_rp_rows=self.normalize_rp_rows, renormalize=self.renormalize,
            include_noise=self.include_noise, final_train=self.final_train,
        )


@dataclass(frozen=True)
class FoldPlan:
    F: int
    fold: np.ndarray  # fold id of every dataset row

    def test_rows(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold == f)

    def train_rows(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold != f)


def make_fold_plan(is_target, F: int, stream: RandomStream) -> FoldPlan:
    """Stratified round-robin folds: each class shuffled and dealt separately."""
    if F < 2:
        raise ParameterError(f"F must be at least 2, got {F}")
    labels = np.asarray(is_target, dtype=bool)
    rng = stream.generator()
    fold = np.empty(len(labels), dtype=np.int64)
    for cls in (True, False):
        rows = np.flatnonzero(labels == cls)
        if len(rows) < F:
            name = "target" if cls else "outlier"
            raise PlanError(f"{len(rows)} {name} rows cannot fill {F} folds")
        fold[rows[rng.permutation(len(rows))]] = np.arange(len(rows)) % F
    return FoldPlan(F, fold)


@dataclass
class FoldResult:
    fold: int
    counts: ConfusionCounts
    omega_used: list = field(default_factory=list)
    params: list = field(default_factory=list)  # (J, K, theta) per model

    @property
    def tpr(self) -> float:
        return self.counts.tpr

    @property
    def tnr(self) -> float:
        return self.counts.tnr

    @property
    def gmean(self) -> float:
        return gmean(self.counts)


def _params_of(model):
    p = model.params
    return [p.J, p.K, p.theta]


def run_fold(train_targets, test, test_is_target, spec: ExperimentSpec,
             stream: RandomStream, fold: int = 0, jobs: int = 1,
             audit: Optional[Callable[[str, np.ndarray], None]] = None) -> FoldResult:
    """Train on target rows only, then classify the mixed test fold.

    ``audit`` receives ``(stage, positions)`` with positions indexing
    ``train_targets`` whenever rows enter a training-side code path.
    """
    labels = np.asarray(test_is_target, dtype=bool)
    if labels.all() or not labels.any():
        raise MetricError(f"fold {fold}: test fold must contain both classes")
    X = as_matrix(train_targets, "train_targets")
    if audit:
        audit("normalization", np.arange(len(X)))
    norm = fit_minmax(X)
    Xn = apply_minmax(norm, X)
    Tn = apply_minmax(norm, test)
    try:
        if spec.ensemble == "single":
            res = fit_tuned_model(Xn, spec.method, spec.iqr, spec.G, spec.grid, stream,
                                  spec.include_noise, spec.final_train, audit, norm)
            accepted = res.model.classify_batch(Tn)
            omegas = [res.split.omega_used] if res.split is not None else []
            params = [_params_of(res.model)]
        else:
            ens = train_ensemble(Xn, spec.ensemble_config(), spec.iqr, spec.grid, stream,
                                 jobs=jobs, audit=audit)
            accepted = predict_majority(ens, Tn, jobs=jobs)
            omegas = [m.split.omega_used for m in ens.members if m.split is not None]
            params = [_params_of(m.model) for m in ens.members]
    except OcnnError as e:
        e.args = (f"outer fold {fold}: {e}",) + e.args[1:]
        e.fold = fold
        raise
    return FoldResult(fold, ConfusionCounts.from_decisions(accepted, labels), omegas, params)


@dataclass
class EvalReport:
    dataset: str
    spec: ExperimentSpec
    seed: int
    folds: list
    fingerprint: dict = field(default_factory=dict)

    def values(self, metric: str) -> np.ndarray:
        return np.array([getattr(f, metric) for f in self.folds], dtype=np.float64)

    def mean(self, metric: str) -> float:
        return float(np.mean(self.values(metric)))

    def std(self, metric: str) -> float:
        """Sample standard deviation (n - 1) across folds."""
        v = self.values(metric)
        return float(np.std(v, ddof=1)) if len(v) > 1 else 0.0

    def summary(self) -> dict:
        return {m: (self.mean(m), self.std(m)) for m in METRICS}


def spec_fingerprint(spec: ExperimentSpec) -> str:
    blob = json.dumps(asdict(spec), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run_experiment(dataset, spec: ExperimentSpec, seed: int, jobs: int = 1,
                   audit: Optional[Callable[[str, np.ndarray], None]] = None) -> EvalReport:
    """Full outer cross-validation of one pipeline on a labelled dataset.

    Randomness: the fold plan draws from ``(seed, 0)`` and fold ``f`` from
    ``(seed, 1, f)``, so results do not depend on ``jobs``. ``audit``, if
    given, receives dataset row ids (not positions) per training stage.
    """
    X = as_matrix(dataset.features, "features")
    is_target = np.asarray(dataset.is_target, dtype=bool)
    master = RandomStream(seed)
    plan = make_fold_plan(is_target, spec.F, master.child(0))

    def one(f):
        tr = plan.train_rows(f)
        tr = tr[is_target[tr]]  # outliers of the training folds are ignored
        te = plan.test_rows(f)
        hook = None
        if audit:
            def hook(stage, pos, _ids=tr):
                audit(stage, _ids[np.asarray(pos)])
        return run_fold(X[tr], X[te], is_target[te], spec, master.child(1, f), f,
                        jobs=1, audit=hook)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(one, range(spec.F)))
    else:
        folds = [one(f) for f in range(spec.F)]

    fp = {
        "dataset": dataset.name,
        "provenance": getattr(dataset, "provenance", ""),
        "target_label": getattr(dataset, "target_label", "target"),
        "method": spec.method,
        "ensemble": spec.ensemble,
        "seed": seed,
        "spec_hash": spec_fingerprint(spec),
        "spec": asdict(spec),
    }
    return EvalReport(dataset.name, spec, seed, folds, fp)


def format_cell(mean: float, std: float, digits: int = 3) -> str:
    """``mean(std)`` as printed in result tables, e.g. ``0.894(0.042)``."""
    if math.isnan(mean):
        return "nan"
    return f"{mean:.{digits}f}({std:.{digits}f})"
