"""Figures written next to the results CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import METRICS

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    # keeps PNG bytes stable across runs
    "svg.hashsalt": "ocnn",
}

COLORS = {"tpr": "#4C72B0", "tnr": "#DD8452", "gmean": "#55A868"}


def figure_size(n_groups: int, scale: float = 1.0):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    width = max(4.0, 1.1 * n_groups + 2.0) * scale
    return width, max(2.6, width * golden * 0.8)


def plot_metrics(reports, path) -> Path:
    """Grouped bars of mean TPR / TNR / gmean (error bars: fold std), with
    individual fold values overlaid as dots."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = [f"{r.dataset}\n{r.spec.method}/{r.spec.ensemble}\nseed {r.seed}" for r in reports]
    x = np.arange(len(reports))
    width = 0.26
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figure_size(len(reports)))
        for i, m in enumerate(METRICS):
            pos = x + (i - 1) * width
            means = [r.mean(m) for r in reports]
            stds = [r.std(m) for r in reports]
            ax.bar(pos, means, width, yerr=stds, capsize=2, color=COLORS[m], label=m.upper() if m != "gmean" else "gmean",
                   error_kw={"elinewidth": 0.8})
            for p, r in zip(pos, reports):
                vals = r.values(m)
                ax.plot(np.full(len(vals), p), vals, "k.", ms=2.5, alpha=0.6)
        ax.set_xticks(x)
        ax.set_xticklabels(labels)
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("rate")
        ax.legend(ncol=3, loc="upper center", bbox_to_anchor=(0.5, 1.12))
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path


def plot_omega(reports, path) -> Path:
    """Spread of IQR multipliers actually used per fold (after any decay)."""
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figure_size(len(reports)))
        data = [[w for f in r.folds for w in f.omega_used] or [np.nan] for r in reports]
        ax.boxplot(data, showfliers=True)
        ax.set_xticks(np.arange(1, len(reports) + 1))
        ax.set_xticklabels([f"{r.dataset}\n{r.spec.label}" for r in reports])
        ax.set_ylabel("omega used")
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path
