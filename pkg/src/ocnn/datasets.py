"""Dataset loading: KEEL ``.dat`` files, headered CSV and synthetic fixtures."""

from __future__ import annotations

import csv
import io
import os
import re
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import RandomStream
from .errors import ParameterError, ParseError


@dataclass
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray  # raw class strings
    target_label: str
    name: str = "dataset"
    provenance: str = ""
    attributes: list = field(default_factory=list)
    ranges: dict = field(default_factory=dict)
    training_only: bool = False

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=object)
        if self.features.ndim != 2 or len(self.labels) != self.features.shape[0]:
            raise ParameterError("label count must equal row count")

    @property
    def is_target(self) -> np.ndarray:
        return self.labels == self.target_label

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> dict:
        return dict(sorted(Counter(self.labels.tolist()).items()))

    def imbalance_ratio(self) -> float:
        """Target count over outlier count."""
        n_t = int(self.is_target.sum())
        n_o = self.n - n_t
        return n_t / n_o if n_o else float("inf")

    def summary(self) -> dict:
        return {
            "name": self.name,
            "rows": self.n,
            "dims": self.d,
            "classes": self.class_counts(),
            "target": self.target_label,
            "imbalance_ratio": self.imbalance_ratio(),
        }


def choose_target(labels: Sequence[str], target: Optional[str], path=None) -> str:
    """Resolve the target class: an explicit label, or the majority class
    (ties go to the lexicographically smallest label)."""
    counts = Counter(labels)
    if target is not None:
        if target not in counts:
            raise ParseError(f"target label {target!r} not present; classes are {sorted(counts)}", path)
        return target
    if not counts:
        raise ParseError("no data rows", path)
    return min(counts, key=lambda c: (-counts[c], c))


_ATTR = re.compile(r"@attribute\s+('[^']*'|\S+)\s*(.*)$", re.IGNORECASE)
_RANGE = re.compile(r"\[\s*([^,\]]+)\s*,\s*([^\]]+)\]")


def _parse_float(tok: str, path, lineno, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"non-numeric {what} {tok!r}", path, lineno) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite {what} {tok!r}", path, lineno)
    return v


def parse_keel(path, target: Optional[str] = None) -> LabeledDataset:
    """Read a KEEL ``.dat`` file.

    Header lines (``@relation``, ``@attribute``, ``@inputs``, ``@output(s)``)
    are interpreted; rows after ``@data`` are comma separated with the
    output attribute as the class. Every input attribute must be numeric.
    By default the majority class becomes the target.
    """
    path = Path(path)
    name = path.stem
    attrs: list = []  # (name, spec)
    output = None
    rows, labels = [], []
    in_data = False
    nominal = None
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if not in_data:
                low = line.lower()
                if low.startswith("@relation"):
                    name = line.split(None, 1)[1].strip() if " " in line else name
                elif low.startswith("@attribute"):
                    m = _ATTR.match(line)
                    if not m:
                        raise ParseError(f"malformed attribute line {line!r}", path, lineno)
                    attrs.append((m.group(1).strip("'"), m.group(2).strip()))
                elif low.startswith("@inputs"):
                    pass
                elif low.startswith("@output"):
                    output = line.split(None, 1)[1].strip() if " " in line else None
                elif low.startswith("@data"):
                    if len(attrs) < 2:
                        raise ParseError("need at least one input and one output attribute", path, lineno)
                    names = [a for a, _ in attrs]
                    if output is None:
                        output = names[-1]
                    if output not in names:
                        raise ParseError(f"output attribute {output!r} is not declared", path, lineno)
                    out_idx = names.index(output)
                    spec = attrs[out_idx][1]
                    if spec.startswith("{"):
                        nominal = {c.strip() for c in spec.strip("{}").split(",")}
                    in_data = True
                else:
                    raise ParseError(f"unexpected header line {line!r}", path, lineno)
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != len(attrs):
                raise ParseError(f"expected {len(attrs)} fields, got {len(parts)}", path, lineno)
            cls = parts[out_idx]
            if nominal is not None and cls not in nominal:
                raise ParseError(f"unknown class {cls!r}", path, lineno)
            feats = [_parse_float(p, path, lineno, f"value for {attrs[i][0]}")
                     for i, p in enumerate(parts) if i != out_idx]
            rows.append(feats)
            labels.append(cls)
    if not in_data:
        raise ParseError("missing @data section", path)
    if not rows:
        raise ParseError("no data rows", path)
    inputs = [a for i, a in enumerate(attrs) if i != out_idx]
    ranges = {}
    for a, spec in inputs:
        m = _RANGE.search(spec)
        if m:
            ranges[a] = (float(m.group(1)), float(m.group(2)))
    return LabeledDataset(
        features=np.array(rows),
        labels=np.array(labels, dtype=object),
        target_label=choose_target(labels, target, path),
        name=name,
        provenance=f"{path}:keel",
        attributes=[a for a, _ in inputs],
        ranges=ranges,
    )


def parse_csv(path, label_column: str = "label", target_label: Optional[str] = None) -> LabeledDataset:
    """Read a headered CSV; every column except ``label_column`` is a feature."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", path, 1) from None
        if label_column not in header:
            raise ParseError(f"label column {label_column!r} not in header {header}", path, 1)
        li = header.index(label_column)
        rows, labels = [], []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
            labels.append(row[li].strip())
            rows.append([_parse_float(c.strip(), path, lineno, f"value for {header[i]}")
                         for i, c in enumerate(row) if i != li])
    if not rows:
        raise ParseError("no data rows", path)
    return LabeledDataset(
        features=np.array(rows),
        labels=np.array(labels, dtype=object),
        target_label=choose_target(labels, target_label, path),
        name=path.stem,
        provenance=f"{path}:csv",
        attributes=[h for i, h in enumerate(header) if i != li],
    )


def load_dataset(path, fmt: str = "auto", label_column: str = "label",
                 target: Optional[str] = None) -> LabeledDataset:
    if fmt == "auto":
        fmt = "keel" if str(path).lower().endswith(".dat") else "csv"
    if fmt == "keel":
        return parse_keel(path, target)
    if fmt == "csv":
        return parse_csv(path, label_column, target)
    raise ParameterError(f"unknown dataset format {fmt!r}")


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv_dataset(ds: LabeledDataset, path, label_column: str = "label") -> None:
    """Write features (lossless float repr) and raw labels as CSV."""
    names = ds.attributes if len(ds.attributes) == ds.d else [f"x{i}" for i in range(ds.d)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(names) + [label_column])
    for row, lab in zip(ds.features, ds.labels):
        w.writerow([repr(float(v)) for v in row] + [lab])
    atomic_write_text(path, buf.getvalue())


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian target clusters plus outliers.

    ``outlier_mode`` is ``"shell"`` (uniform directions at ``outlier_radius``
    from the origin) or ``"uniform"`` (uniform in the cube
    ``[-outlier_radius, outlier_radius]^d``). ``copies`` repeats every
    target point, which makes every held-out target an exact duplicate of
    some training row when at least one copy lands in training.
    """

    n_targets: int = 100
    n_outliers: int = 10
    d: int = 2
    sigma: float = 0.1
    outlier_radius: float = 10.0
    centers: tuple = ()
    outlier_mode: str = "shell"
    copies: int = 1


def generate_synthetic(spec: SyntheticSpec, stream: RandomStream, name: str = "synthetic") -> LabeledDataset:
    if spec.n_targets < 1 or spec.d < 1 or spec.n_outliers < 0 or spec.copies < 1:
        raise ParameterError("synthetic spec needs n_targets >= 1, d >= 1, n_outliers >= 0, copies >= 1")
    if spec.sigma < 0 or spec.outlier_radius <= 0:
        raise ParameterError("sigma must be >= 0 and outlier_radius > 0")
    if spec.outlier_mode not in ("shell", "uniform"):
        raise ParameterError(f"unknown outlier_mode {spec.outlier_mode!r}")
    centers = np.asarray(spec.centers, dtype=np.float64).reshape(-1, spec.d) if spec.centers else np.zeros((1, spec.d))
    rng = stream.generator()
    which = np.arange(spec.n_targets) % len(centers)
    targets = centers[which] + spec.sigma * rng.standard_normal((spec.n_targets, spec.d))
    targets = np.repeat(targets, spec.copies, axis=0)
    if spec.outlier_mode == "shell":
        u = rng.standard_normal((spec.n_outliers, spec.d))
        norms = np.linalg.norm(u, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        outliers = spec.outlier_radius * u / norms
    else:
        outliers = rng.uniform(-spec.outlier_radius, spec.outlier_radius, (spec.n_outliers, spec.d))
    X = np.vstack([targets, outliers])
    labels = np.array(["target"] * len(targets) + ["outlier"] * spec.n_outliers, dtype=object)
    return LabeledDataset(
        features=X, labels=labels, target_label="target", name=name,
        provenance="synthetic", attributes=[f"x{i}" for i in range(spec.d)],
        training_only=spec.n_outliers == 0,
    )
