"""Parameter selection without real negatives.

Rows fenced off by :mod:`ocnn.noise_filter` act as proxy negatives in a
G-fold inner cross-validation. Two searches are offered:

* :func:`optimise_jk` picks ``(J, K)`` for JKNN at ``theta = 1``;
* :func:`optimise_theta` picks an empirical threshold for 11NN.

Both maximise gmean with targets as the positive class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .classifier import OcnnModel, OcnnParams, nearest_rows, ratio_grid, self_neighbour_distances
from .core import RandomStream, as_matrix
from .errors import ParameterError, PlanError
from .metrics import gmean_from_rates
from .noise_filter import IqrConfig, NoiseSplit, iqr_reject

METHODS = ("11nn", "11nn-theta", "jknn")

# audit(stage, row positions into the training matrix)
AuditHook = Optional[Callable[[str, np.ndarray], None]]


@dataclass(frozen=True)
class InnerCvPlan:
    G: int
    retained_fold: np.ndarray  # aligned with NoiseSplit.retained
    rejected_fold: np.ndarray  # aligned with NoiseSplit.rejected


@dataclass(frozen=True)
class JkGrid:
    J_max: int = 10
    K_max: int = 10

    def __post_init__(self):
        if self.J_max < 1 or self.K_max < 1:
            raise ParameterError("J_max and K_max must be at least 1")


@dataclass(frozen=True)
class TunedParams:
    """Outcome of a search: either ``(J_opt, K_opt)`` or ``theta_emp``."""

    J_opt: Optional[int] = None
    K_opt: Optional[int] = None
    theta_emp: Optional[float] = None
    achieved_gmean: float = math.nan

    def __post_init__(self):
        has_jk = self.J_opt is not None and self.K_opt is not None
        has_theta = self.theta_emp is not None
        if has_jk == has_theta:
            raise ParameterError("TunedParams needs exactly one of (J_opt, K_opt) or theta_emp")

    def ocnn_params(self) -> OcnnParams:
        if self.theta_emp is not None:
            return OcnnParams(1, 1, self.theta_emp)
        return OcnnParams(self.J_opt, self.K_opt, 1.0)


def _deal(m: int, G: int, rng: np.random.Generator) -> np.ndarray:
    folds = np.empty(m, dtype=np.int64)
    folds[rng.permutation(m)] = np.arange(m) % G
    return folds


def make_inner_plan(split: NoiseSplit, G: int, stream: RandomStream) -> InnerCvPlan:
    """Shuffle retained and rejected rows separately and deal each into G folds."""
    if G < 2:
        raise ParameterError(f"G must be at least 2, got {G}")
    if len(split.rejected) < G or len(split.retained) < G:
        raise PlanError(
            f"inner {G}-fold plan needs >= {G} rows per class; "
            f"have {len(split.retained)} targets and {len(split.rejected)} proxy negatives"
        )
    rng = stream.generator()
    return InnerCvPlan(
        G=G,
        retained_fold=_deal(len(split.retained), G, rng),
        rejected_fold=_deal(len(split.rejected), G, rng),
    )


def inner_folds(split: NoiseSplit, plan: InnerCvPlan, include_noise: bool = False):
    """Yield ``(train_rows, val_rows, val_is_target)`` for each inner fold."""
    for g in range(plan.G):
        tr = split.retained[plan.retained_fold != g]
        if include_noise:
            tr = np.concatenate([tr, split.rejected[plan.rejected_fold != g]])
        v_pos = split.retained[plan.retained_fold == g]
        v_neg = split.rejected[plan.rejected_fold == g]
        val = np.concatenate([v_pos, v_neg])
        labels = np.concatenate([np.ones(len(v_pos), bool), np.zeros(len(v_neg), bool)])
        yield tr, val, labels


def _rates(pred: np.ndarray, labels: np.ndarray):
    """TPR and TNR along the first axis of ``pred``."""
    tpr = pred[labels].mean(axis=0)
    tnr = (~pred[~labels]).mean(axis=0)
    return tpr, tnr


def optimise_jk(train, split: NoiseSplit, plan: InnerCvPlan, grid: JkGrid = JkGrid(),
                include_noise: bool = False, audit: AuditHook = None) -> TunedParams:
    """Grid search over ``1..J_max x 1..K_max`` at ``theta = 1``.

    Each cell's score is the gmean averaged over the inner folds; the best
    cell wins, ties going to the smaller ``J`` and then the smaller ``K``.
    """
    X = as_matrix(train, "train")
    total = np.zeros((grid.J_max, grid.K_max))
    for tr, val, labels in inner_folds(split, plan, include_noise):
        if audit:
            audit("inner_train", tr)
            audit("validation", val)
        if grid.J_max > len(tr) or grid.K_max > len(tr) - 1:
            raise ParameterError(
                f"grid {grid.J_max}x{grid.K_max} too large for an inner training set of {len(tr)} rows"
            )
        T = X[tr]
        qd, idx = nearest_rows(T, X[val], grid.J_max)
        _, _, ratio = ratio_grid(qd, idx, self_neighbour_distances(T, grid.K_max))
        tpr, tnr = _rates(ratio < 1.0, labels)
        total += gmean_from_rates(tpr, tnr)
    avg = total / plan.G
    best = int(np.argmax(avg))  # first maximum in row-major order
    j, k = divmod(best, grid.K_max)
    return TunedParams(J_opt=j + 1, K_opt=k + 1, achieved_gmean=float(avg[j, k]))


def pooled_ratios(train, split: NoiseSplit, plan: InnerCvPlan, include_noise: bool = False,
                  audit: AuditHook = None):
    """11NN ratios of every validation row against its fold's inner training
    set, pooled across folds. Returns ``(ratios, is_target)``."""
    X = as_matrix(train, "train")
    ratios, labels = [], []
    for tr, val, lab in inner_folds(split, plan, include_noise):
        if audit:
            audit("inner_train", tr)
            audit("validation", val)
        if len(tr) < 2:
            raise ParameterError("inner training set needs at least 2 rows for 11NN")
        T = X[tr]
        qd, idx = nearest_rows(T, X[val], 1)
        _, _, r = ratio_grid(qd, idx, self_neighbour_distances(T, 1))
        ratios.append(r[:, 0, 0])
        labels.append(lab)
    return np.concatenate(ratios), np.concatenate(labels)


def select_threshold(ratios, is_target):
    """Best candidate threshold among the pooled ratios.

    Every pooled value is tried as ``tau`` (rows with ratio < tau predicted
    target); the highest gmean wins and ties go to the largest ``tau``.
    Returns ``(tau, gmean)``.
    """
    ratios = np.asarray(ratios, dtype=np.float64)
    is_target = np.asarray(is_target, dtype=bool)
    cands = np.unique(ratios)[::-1]  # descending, so argmax keeps the largest tau
    pred = ratios[:, None] < cands[None, :]
    tpr, tnr = _rates(pred, is_target)
    g = gmean_from_rates(tpr, tnr)
    best = int(np.argmax(g))
    return float(cands[best]), float(g[best])


def optimise_theta(train, split: NoiseSplit, plan: InnerCvPlan, include_noise: bool = False,
                   audit: AuditHook = None) -> TunedParams:
    ratios, labels = pooled_ratios(train, split, plan, include_noise, audit)
    tau, g = select_threshold(ratios, labels)
    if not tau > 0:
        raise ParameterError("every pooled 11NN ratio is zero; no positive threshold exists")
    return TunedParams(theta_emp=tau, achieved_gmean=g)


@dataclass(frozen=True)
class TuningResult:
    model: OcnnModel
    tuned: Optional[TunedParams]
    split: Optional[NoiseSplit]


def fit_tuned_model(train, method: str, iqr: IqrConfig = IqrConfig(), G: int = 2,
                    grid: JkGrid = JkGrid(), stream: Optional[RandomStream] = None,
                    include_noise: bool = False, final_train: str = "retained",
                    audit: AuditHook = None, norm=None) -> TuningResult:
    """Noise filtering, inner CV and the final model for one training matrix.

    ``method`` is one of ``11nn`` (fixed ``theta = 1``, no tuning),
    ``11nn-theta`` or ``jknn``. With ``final_train="retained"`` the returned
    model is built on the rows kept by the IQR fence; ``"all"`` uses every
    training row.
    """
    X = as_matrix(train, "train")
    all_rows = np.arange(X.shape[0])
    if method == "11nn":
        if audit:
            audit("final_train", all_rows)
        return TuningResult(OcnnModel(X, OcnnParams(1, 1, 1.0), norm), None, None)
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    if final_train not in ("retained", "all"):
        raise ParameterError(f"final_train must be 'retained' or 'all', got {final_train!r}")
    if stream is None:
        raise ParameterError("a RandomStream is required for inner cross-validation")

    need = max(G, iqr.min_rejected)
    if need != iqr.min_rejected:
        iqr = IqrConfig(iqr.omega, need, iqr.omega_decay, iqr.omega_floor, iqr.lower_fence)
    if audit:
        audit("noise_filter", all_rows)
    split = iqr_reject(X, iqr)
    plan = make_inner_plan(split, G, stream)
    if method == "jknn":
        tuned = optimise_jk(X, split, plan, grid, include_noise, audit)
    else:
        tuned = optimise_theta(X, split, plan, include_noise, audit)
    rows = split.retained if final_train == "retained" else all_rows
    if audit:
        audit("final_train", rows)
    return TuningResult(OcnnModel(X[rows], tuned.ocnn_params(), norm), tuned, split)
