"""Serialisation of evaluation reports.

CSV layout, one row per fold followed by one ``aggregate`` row per report:

=============  ==========================================================
column         meaning
=============  ==========================================================
dataset        dataset name
method         ``11nn`` / ``11nn-theta`` / ``jknn``
ensemble       ``single`` / ``rs50`` / ``rs75`` / ``rp``
seed           master seed
spec_hash      digest of the full experiment spec
target_label   raw class string treated as the target
row            ``fold`` or ``aggregate``
fold           fold index (empty on aggregate rows)
tp fn tn fp    confusion counts (summed over folds on aggregate rows)
tpr tnr gmean  fold value, or the mean across folds
*_std          sample std across folds (aggregate rows only)
*_cell         ``mean(std)`` rendering at three decimals
omega_min/max  range of IQR multipliers used (empty when untuned)
=============  ==========================================================

Floats are written with ``repr`` so re-reading is exact.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path
from typing import Iterable

from .datasets import atomic_write_text
from .evaluation import METRICS, EvalReport, format_cell

COLUMNS = [
    "dataset", "method", "ensemble", "seed", "spec_hash", "target_label",
    "row", "fold", "tp", "fn", "tn", "fp",
    "tpr", "tnr", "gmean", "tpr_std", "tnr_std", "gmean_std",
    "tpr_cell", "tnr_cell", "gmean_cell", "omega_min", "omega_max",
]


def _f(x) -> str:
    return repr(float(x))


def report_rows(report: EvalReport) -> list:
    fp = report.fingerprint
    base = {
        "dataset": report.dataset,
        "method": report.spec.method,
        "ensemble": report.spec.ensemble,
        "seed": str(report.seed),
        "spec_hash": fp.get("spec_hash", ""),
        "target_label": fp.get("target_label", ""),
    }
    rows = []
    all_omegas = []
    for fr in report.folds:
        c = fr.counts
        all_omegas += fr.omega_used
        row = dict(base, row="fold", fold=str(fr.fold), tp=c.tp, fn=c.fn, tn=c.tn, fp=c.fp)
        for m in METRICS:
            v = getattr(fr, m)
            row[m] = _f(v)
            row[f"{m}_std"] = ""
            row[f"{m}_cell"] = f"{v:.3f}"
        row["omega_min"] = _f(min(fr.omega_used)) if fr.omega_used else ""
        row["omega_max"] = _f(max(fr.omega_used)) if fr.omega_used else ""
        rows.append(row)
    agg = dict(base, row="aggregate", fold="",
               tp=sum(f.counts.tp for f in report.folds), fn=sum(f.counts.fn for f in report.folds),
               tn=sum(f.counts.tn for f in report.folds), fp=sum(f.counts.fp for f in report.folds))
    for m in METRICS:
        mean, std = report.mean(m), report.std(m)
        agg[m] = _f(mean)
        agg[f"{m}_std"] = _f(std)
        agg[f"{m}_cell"] = format_cell(mean, std)
    agg["omega_min"] = _f(min(all_omegas)) if all_omegas else ""
    agg["omega_max"] = _f(max(all_omegas)) if all_omegas else ""
    rows.append(agg)
    return rows


def reports_to_csv(reports: Iterable[EvalReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerows(report_rows(r))
    return buf.getvalue()


def report_to_dict(report: EvalReport) -> dict:
    return {
        "dataset": report.dataset,
        "seed": report.seed,
        "fingerprint": report.fingerprint,
        "folds": [
            {
                "fold": f.fold,
                "counts": asdict(f.counts),
                "tpr": f.tpr, "tnr": f.tnr, "gmean": f.gmean,
                "omega_used": f.omega_used,
                "params": f.params,
            }
            for f in report.folds
        ],
        "aggregate": {m: {"mean": report.mean(m), "std": report.std(m)} for m in METRICS},
    }


def write_report(report, path, fmt: str = "csv") -> None:
    """Write one report (or a list of them) as ``csv`` or ``json``."""
    reports = report if isinstance(report, (list, tuple)) else [report]
    try:
        if fmt == "csv":
            atomic_write_text(path, reports_to_csv(reports))
        elif fmt == "json":
            text = json.dumps([report_to_dict(r) for r in reports], indent=2, sort_keys=True,
                              default=_json_default)
            atomic_write_text(path, text + "\n")
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    except OSError as e:
        raise OSError(f"cannot write report to {path}: {e}") from e


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


_INT = {"seed", "fold", "tp", "fn", "tn", "fp"}
_FLOAT = {"tpr", "tnr", "gmean", "tpr_std", "tnr_std", "gmean_std", "omega_min", "omega_max"}


def read_report_csv(path) -> list:
    """Rows of a results CSV with numeric columns converted back."""
    out = []
    with open(Path(path), newline="") as fh:
        for row in csv.DictReader(fh):
            for k, v in row.items():
                if v == "":
                    row[k] = None
                elif k in _INT:
                    row[k] = int(v)
                elif k in _FLOAT:
                    row[k] = float(v)
            out.append(row)
    return out
