"""Run configuration: ``key = value`` files, defaults and serialization.

Precedence is command-line flag > config file > per-command default.  The
serialized form is canonical (fixed key order, floats in repr form), so
``dumps(loads(text))`` reproduces ``text`` whenever ``text`` came from
``dumps``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .errors import ConfigError

COMMANDS = ("curve", "deviation", "hamiltonian", "tail", "compare", "spectrum")
MODELS = ("bw", "general")
SPACINGS = ("lin", "log")
FORMATS = ("csv", "json")
METHODS = ("closed", "quadrature")


@dataclass
class RunConfig:
    command: Optional[str] = None
    model: Optional[str] = None
    s_r: Optional[float] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    points: Optional[int] = None
    spacing: Optional[str] = None
    format: Optional[str] = None
    method: Optional[str] = None
    abs_tol: Optional[float] = None
    rel_tol: Optional[float] = None
    max_panels: Optional[int] = None
    tail_cutoff: Optional[float] = None
    window: Optional[str] = None
    alpha: Optional[float] = None
    ell: Optional[int] = None
    form_scale: Optional[float] = None
    e_min: Optional[float] = None
    e_max: Optional[float] = None
    unnormalized: Optional[bool] = None
    workers: Optional[int] = None

    def merged(self, other: "RunConfig") -> "RunConfig":
        """Copy of self with every non-None field of ``other`` taking precedence."""
        out = dataclasses.replace(self)
        for f in _FIELDS:
            val = getattr(other, f.name)
            if val is not None:
                setattr(out, f.name, val)
        return out


_FIELDS = fields(RunConfig)
_TYPES = {
    "command": str, "model": str, "s_r": float, "x_min": float, "x_max": float, "points": int,
    "spacing": str, "format": str, "method": str, "abs_tol": float, "rel_tol": float,
    "max_panels": int, "tail_cutoff": float, "window": str, "alpha": float, "ell": int,
    "form_scale": float, "e_min": float, "e_max": float, "unnormalized": bool, "workers": int,
}
_CHOICES = {"command": COMMANDS, "model": MODELS, "spacing": SPACINGS, "format": FORMATS, "method": METHODS}


_COMMAND_DEFAULTS = {
    "curve": dict(x_min=0.0, x_max=10.0, points=1001, spacing="lin"),
    "deviation": dict(x_min=0.0, x_max=30.0, spacing="lin"),
    "hamiltonian": dict(x_min=0.1, x_max=10.0, points=1001, spacing="lin"),
    "tail": dict(x_min=100.0, x_max=1000.0, points=400, spacing="log", window="100:1000"),
    "compare": dict(x_min=0.01, x_max=30.0, points=500, spacing="log"),
    "spectrum": dict(points=2001),
}
_GLOBAL_DEFAULTS = dict(
    model="bw", s_r=1000.0, format="csv", abs_tol=1e-10, rel_tol=1e-9, max_panels=200_000,
    alpha=0.0, ell=0, unnormalized=False, workers=1,
)


def auto_points(cfg: RunConfig) -> int:
    """Uniform grid size resolving the oscillation at s_R / 2 pi with 16 samples per cycle."""
    cycles = cfg.s_r / (2 * math.pi) * (cfg.x_max - cfg.x_min)
    return int(min(400_001, max(4096, math.ceil(16 * cycles) + 1)))


def defaults_for(command: str) -> RunConfig:
    vals = dict(_GLOBAL_DEFAULTS)
    vals.update(_COMMAND_DEFAULTS[command])
    vals["command"] = command
    return RunConfig(**vals)


def _coerce(key: str, raw: str, line=None, column=None):
    typ = _TYPES[key]
    try:
        if typ is bool:
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            val = low in ("true", "1", "yes")
        elif typ is int:
            val = int(raw)
        elif typ is float:
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError(raw)
        else:
            val = raw
    except ValueError:
        raise ConfigError(f"invalid {typ.__name__} for {key!r}: {raw!r}", line, column) from None
    if key in _CHOICES and val not in _CHOICES[key]:
        raise ConfigError(f"{key} must be one of {', '.join(_CHOICES[key])}, got {val!r}", line, column)
    return val


def loads(text: str) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    cfg = RunConfig()
    seen = set()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ConfigError("expected 'key = value'", lineno, col)
        key_part, val_part = line.split("=", 1)
        key = key_part.strip().replace("-", "_")
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key_part.strip()!r}", lineno, key_col)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno, key_col)
        seen.add(key)
        value = val_part.strip()
        val_col = len(key_part) + 2 + (len(val_part) - len(val_part.lstrip()))
        if not value:
            raise ConfigError(f"missing value for {key!r}", lineno, val_col)
        setattr(cfg, key, _coerce(key, value, lineno, val_col))
    return cfg


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return loads(text)


def _fmt(val) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, float):
        return repr(val)
    return str(val)


def as_dict(cfg: RunConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in _FIELDS if getattr(cfg, f.name) is not None}


def dumps(cfg: RunConfig) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in as_dict(cfg).items())


def parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise ConfigError(f"window must look like LO:HI, got {text!r}") from None
    if not (0 < lo < hi):
        raise ConfigError(f"window needs 0 < LO < HI, got {text!r}")
    return lo, hi
