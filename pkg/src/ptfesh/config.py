"""
Run configuration for the command-line front end.

A run is described by one JSON document whose keys mirror ``RunConfig``;
command-line flags override individual fields.  Validation happens before
any computation so that a bad configuration never leaves partial output.

Example document::

    {
      "model": {"f": "0+0.2i", "g": 0.1, "power": 4},
      "basis_dim": 40,
      "method": "both",
      "tol": 1e-10,
      "sweep": {"param": "f_im", "from": 0.0, "to": 1.0, "steps": 21},
      "evolve": {"t_max": 10.0, "steps": 200, "initial": "level:0"},
      "output": {"csv": "levels.csv", "json": "check.json"},
      "seed": 0
    }

A custom partitioned matrix replaces the oscillator model with
``{"kind": "partitioned", "F": ..., "G": ..., "A": ..., "alpha": -1}``;
blocks are nested lists, or ``{"re": ..., "im": ...}`` for complex entries.
``"A_lower"`` overrides the lower coupling block, and ``"file"`` may point
to a JSON file holding the block fields instead.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .exceptions import ConfigError
from .hobasis import ModelSpec

__all__ = ["RunConfig", "ModelConfig", "SweepConfig", "EvolveConfig", "parse_complex", "load_config"]

COMMANDS = ("spectrum", "sweep", "evolve", "check")
METHODS = ("feshbach", "direct", "both")
SWEEP_PARAMS = ("f_im", "f_re", "g", "coupling")


def parse_complex(text) -> complex:
    """
    Read ``"RE+IMi"``, ``"IMi"``, ``"RE"`` or a JSON number as a complex value.

    >>> parse_complex("0+0.2i")
    0.2j
    >>> parse_complex("-1.5-2i")
    (-1.5-2j)
    """
    if isinstance(text, bool):
        raise ConfigError(f"cannot read {text!r} as a complex number")
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, dict) and set(text) <= {"re", "im"}:
        return complex(float(text.get("re", 0.0)), float(text.get("im", 0.0)))
    s = str(text).strip().replace(" ", "")
    if s.endswith(("i", "j")):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
        else:
            s = re.sub(r"([+-])j$", r"\g<1>1j", s)
    try:
        value = complex(s)
    except ValueError:
        raise ConfigError(f"cannot read {text!r} as a complex number (expected RE+IMi)") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ConfigError(f"complex value {text!r} is not finite")
    return value


def _matrix(value, name: str) -> np.ndarray:
    try:
        if isinstance(value, dict):
            re_part = np.asarray(value.get("re", 0.0), dtype=float)
            im_part = np.asarray(value.get("im", 0.0), dtype=float)
            out = re_part + 1j * im_part
        else:
            out = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model.{name} is not a numeric matrix: {exc}") from None
    out = np.atleast_2d(out)
    if out.ndim != 2 or not np.all(np.isfinite(out)):
        raise ConfigError(f"model.{name} must be a finite 2-d matrix")
    return out


@dataclass(frozen=True, eq=False)
class ModelConfig:
    """Either an oscillator model (``kind="oscillator"``) or explicit blocks."""

    kind: str = "oscillator"
    spec: ModelSpec = field(default_factory=lambda: ModelSpec(0.2j, 1.0, 4))
    F: np.ndarray | None = None
    G: np.ndarray | None = None
    A: np.ndarray | None = None
    alpha: int = -1
    A_lower: np.ndarray | None = None


@dataclass(frozen=True)
class SweepConfig:
    param: str
    start: float
    stop: float
    steps: int

    def grid(self) -> np.ndarray:
        """``steps`` equally spaced points from ``start`` to ``stop``."""
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class EvolveConfig:
    t_max: float = 10.0
    steps: int = 200
    initial: str | int = 0

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps)


@dataclass(frozen=True, eq=False)
class RunConfig:
    command: str = "spectrum"
    model: ModelConfig = field(default_factory=ModelConfig)
    basis_dim: int = 20
    method: str = "feshbach"
    interval: tuple[float, float] | None = None
    tol: float = 1e-10
    sweep: SweepConfig | None = None
    evolve: EvolveConfig = field(default_factory=EvolveConfig)
    csv: str | None = None
    json: str | None = None
    seed: int = 0


def _number(value, name: str, kind=float):
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if kind is int and out != value and not (isinstance(value, str) and str(out) == value.strip()):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if kind is float and not math.isfinite(out):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return out


def _model(doc: dict, base_dir: Path) -> ModelConfig:
    if not isinstance(doc, dict):
        raise ConfigError("model must be a JSON object")
    kind = doc.get("kind", "oscillator")
    if kind == "oscillator":
        unknown = set(doc) - {"kind", "f", "g", "power"}
        if unknown:
            raise ConfigError(f"unknown model fields {sorted(unknown)}")
        try:
            spec = ModelSpec(parse_complex(doc.get("f", "0+0.2i")),
                             _number(doc.get("g", 1.0), "model.g"),
                             _number(doc.get("power", 4), "model.power", int))
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from None
        return ModelConfig("oscillator", spec)
    if kind != "partitioned":
        raise ConfigError(f"model.kind must be 'oscillator' or 'partitioned', got {kind!r}")
    if "file" in doc:
        path = Path(doc["file"])
        path = path if path.is_absolute() else base_dir / path
        try:
            blocks = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read model file {path}: {exc}") from None
        doc = {**blocks, **{k: v for k, v in doc.items() if k != "file"}}
    for key in ("F", "G", "A"):
        if key not in doc:
            raise ConfigError(f"partitioned model needs block {key}")
    alpha = _number(doc.get("alpha", -1), "model.alpha", int)
    if alpha not in (1, -1):
        raise ConfigError(f"model.alpha must be +1 or -1, got {alpha}")
    lower = _matrix(doc["A_lower"], "A_lower") if doc.get("A_lower") is not None else None
    return ModelConfig("partitioned", F=_matrix(doc["F"], "F"), G=_matrix(doc["G"], "G"),
                       A=_matrix(doc["A"], "A"), alpha=alpha, A_lower=lower)


def _sweep(doc) -> SweepConfig:
    if not isinstance(doc, dict):
        raise ConfigError("sweep must be a JSON object")
    param = doc.get("param")
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep.param must be one of {SWEEP_PARAMS}, got {param!r}")
    for key in ("from", "to"):
        if key not in doc:
            raise ConfigError(f"sweep.{key} is required")
    steps = _number(doc.get("steps", 11), "sweep.steps", int)
    if steps < 1:
        raise ConfigError(f"sweep.steps must be >= 1, got {steps}")
    start, stop = _number(doc["from"], "sweep.from"), _number(doc["to"], "sweep.to")
    if steps > 1 and start == stop:
        raise ConfigError("sweep.from and sweep.to coincide")
    return SweepConfig(param, start, stop, steps)


def _evolve(doc) -> EvolveConfig:
    if not isinstance(doc, dict):
        raise ConfigError("evolve must be a JSON object")
    t_max = _number(doc.get("t_max", 10.0), "evolve.t_max")
    steps = _number(doc.get("steps", 200), "evolve.steps", int)
    if steps < 1:
        raise ConfigError(f"evolve.steps must be >= 1, got {steps}")
    if t_max < 0 or (steps > 1 and t_max == 0):
        raise ConfigError("evolve.t_max must be positive")
    initial = doc.get("initial", 0)
    if isinstance(initial, bool):
        raise ConfigError("evolve.initial must be a basis index or 'level:n'")
    if isinstance(initial, int):
        if initial < 0:
            raise ConfigError("evolve.initial basis index must be non-negative")
    elif not (isinstance(initial, str) and re.fullmatch(r"level:\d+(,\d+)*", initial.strip())):
        raise ConfigError(f"evolve.initial must be a basis index or 'level:n', got {initial!r}")
    return EvolveConfig(t_max, steps, initial.strip() if isinstance(initial, str) else initial)


def load_config(doc: dict[str, Any] | None = None, base_dir: Path | str = ".",
                overrides: dict[str, Any] | None = None) -> RunConfig:
    """
    Validate a configuration document, applying flag overrides.

    ``overrides`` keys: ``command``, ``dim``, ``g``, ``f``, ``method``,
    ``out``, ``seed``; ``None`` values are ignored.

    Raises
    ------
    ConfigError
        On unknown fields or any violated invariant.
    """
    doc = dict(doc or {})
    over = {k: v for k, v in (overrides or {}).items() if v is not None}
    allowed = {"command", "model", "basis_dim", "method", "interval", "tol", "sweep", "evolve",
               "output", "seed"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown configuration fields {sorted(unknown)}")
    command = over.get("command", doc.get("command", "spectrum"))
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")

    model_doc = dict(doc.get("model") or {})
    if "f" in over or "g" in over:
        if model_doc.get("kind", "oscillator") != "oscillator":
            raise ConfigError("--f and --g apply only to oscillator models")
        if "f" in over:
            model_doc["f"] = over["f"]
        if "g" in over:
            model_doc["g"] = over["g"]
    model = _model(model_doc, Path(base_dir))

    dim = _number(over.get("dim", doc.get("basis_dim", 20)), "basis_dim", int)
    if dim < 2:
        raise ConfigError(f"basis_dim must be >= 2, got {dim}")
    method = over.get("method", doc.get("method", "feshbach"))
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}, got {method!r}")
    interval = doc.get("interval")
    if interval is not None:
        if not isinstance(interval, (list, tuple)) or len(interval) != 2:
            raise ConfigError("interval must be [lo, hi]")
        lo, hi = (_number(x, "interval") for x in interval)
        if not lo < hi:
            raise ConfigError(f"interval requires lo < hi, got [{lo}, {hi}]")
        interval = (lo, hi)
    tol = _number(doc.get("tol", 1e-10), "tol")
    if not tol > 0:
        raise ConfigError(f"tol must be > 0, got {tol}")
    sweep = _sweep(doc["sweep"]) if doc.get("sweep") is not None else None
    if sweep is not None:
        if sweep.param == "coupling" and model.kind != "partitioned":
            raise ConfigError("sweep.param 'coupling' needs a partitioned model")
        if sweep.param != "coupling" and model.kind != "oscillator":
            raise ConfigError(f"sweep.param {sweep.param!r} needs an oscillator model")
    if command == "sweep" and sweep is None:
        raise ConfigError("the sweep command needs a sweep block")
    evolve = _evolve(doc.get("evolve") or {})
    output = doc.get("output") or {}
    if not isinstance(output, dict) or set(output) - {"csv", "json"}:
        raise ConfigError("output must be an object with optional csv and json paths")
    csv_path, json_path = output.get("csv"), output.get("json")
    if "out" in over:
        if command == "check":
            json_path = over["out"]
        else:
            csv_path = over["out"]
    seed = _number(over.get("seed", doc.get("seed", 0)), "seed", int)
    return RunConfig(command, model, dim, method, interval, tol, sweep, evolve,
                     csv_path, json_path, seed)
