"""Experiment configuration: a flat ``key = value`` file plus CLI overrides.

Example::

    # glass5, single model and RP ensemble of 11NN(theta)
    data = tests/data/glass5.dat
    method = 11nn-theta
    ensemble = single, rp
    seed = 7

List-valued keys (``method``, ``ensemble``) take comma-separated values
and the run covers their cross product.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ParseError
from .evaluation import ENSEMBLE_MODES, ExperimentSpec
from .tuning import METHODS


@dataclass(frozen=True)
class ExperimentConfig:
    data: Optional[str] = None
    format: str = "auto"
    label_column: str = "label"
    target: Optional[str] = None
    method: tuple = ("11nn-theta",)
    ensemble: tuple = ("single",)
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
    seed: Optional[int] = None
    jobs: int = 1

    def specs(self):
        """One :class:`ExperimentSpec` per (method, ensemble) pair."""
        shared = {f.name: getattr(self, f.name) for f in fields(ExperimentSpec)
                  if f.name not in ("method", "ensemble")}
        return [ExperimentSpec(method=m, ensemble=e, **shared)
                for m in self.method for e in self.ensemble]

    def validate(self):
        for m in self.method:
            if m not in METHODS:
                raise ParseError(f"unknown method {m!r}; expected one of {METHODS}")
        for e in self.ensemble:
            if e not in ENSEMBLE_MODES:
                raise ParseError(f"unknown ensemble {e!r}; expected one of {ENSEMBLE_MODES}")
        for name in ("F", "G", "L", "J_max", "K_max", "min_rejected", "jobs"):
            if getattr(self, name) < 1:
                raise ParseError(f"{name} must be at least 1")
        if self.F < 2 or self.G < 2:
            raise ParseError("F and G must be at least 2")
        if not self.omega > 0:
            raise ParseError("omega must be positive")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ParseError("seed must be a 64-bit unsigned integer")
        return self


_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}
_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def convert(key: str, value: str, path=None, line=None):
    kind = _TYPES[key]
    v = value.strip()
    try:
        if kind == "tuple":
            return tuple(s.strip() for s in v.split(",") if s.strip())
        if v.lower() in ("", "none") and kind.startswith("Optional"):
            return None
        if "int" in kind:
            return int(v)
        if "float" in kind:
            return float(v)
        if kind == "bool":
            return _BOOL[v.lower()]
    except (ValueError, KeyError):
        raise ParseError(f"bad value {value!r} for {key}", path, line) from None
    return v


def normalise_key(key: str) -> str:
    k = key.strip().replace("-", "_")
    lowered = {name.lower(): name for name in _TYPES}
    return lowered.get(k.lower(), k)


def parse_config_text(text: str, path=None) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        key, value = line.split("=", 1)
        key = normalise_key(key)
        if key not in _TYPES:
            raise ParseError(f"unknown key {key!r}", path, lineno)
        values[key] = convert(key, value, path, lineno)
    return values


def load_config(path=None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """File values first, then non-``None`` overrides on top."""
    values = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as e:
            raise ParseError(f"cannot read config: {e}", p) from None
        values = parse_config_text(text, p)
    for k, v in (overrides or {}).items():
        if v is not None:
            values[normalise_key(k)] = v
    return replace(ExperimentConfig(), **values).validate()
