"""Scenario configuration files (TOML).

Example::

    shape = "disk"
    epsilon = 0.1
    m = 1.0
    J0 = 0.5
    gamma = 1.0
    ell0 = [1.0, 0.0]
    dt = 0.001
    T = 1.0

    [[blobs]]
    position = [1.0, 0.0]
    strength = 1.0

    [output]
    path = "run.jsonl"
    format = "jsonl"
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from .conformal import BodyGeometry, map_from_name
from .kernels import VortexBlob, VorticityField


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


SHAPES = ("disk", "joukowski")
FORMATS = ("jsonl", "csv")
_KNOWN = {"shape", "a", "epsilon", "epsilon_list", "m", "J0", "gamma", "ell0", "r0", "theta0",
          "h0", "blobs", "dt", "T", "output", "seed"}


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "jsonl"
    stride: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    m: float
    gamma: float
    dt: float
    T: float
    shape: str = "disk"
    a: float | None = None
    epsilon: float | None = None
    epsilon_list: tuple[float, ...] | None = None
    J0: float | None = None
    ell0: tuple[float, float] = (0.0, 0.0)
    r0: float = 0.0
    theta0: float = 0.0
    h0: tuple[float, float] = (0.0, 0.0)
    blobs: tuple[VortexBlob, ...] = ()
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = 0

    # ------------------------------------------------------------------
    def map(self):
        params = {"a": self.a} if self.shape == "joukowski" else {}
        return map_from_name(self.shape, **params)

    def geometry(self, epsilon: float | None = None) -> BodyGeometry:
        eps = epsilon if epsilon is not None else self.epsilon
        if eps is None:
            raise ConfigError("epsilon", "required for a finite-size body")
        return BodyGeometry(self.map(), eps)

    def vorticity(self) -> VorticityField:
        return VorticityField.from_blobs(self.blobs)

    @property
    def largest_epsilon(self) -> float | None:
        values = [e for e in ([self.epsilon] + list(self.epsilon_list or [])) if e is not None]
        return max(values) if values else None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"shape": self.shape}
        if self.a is not None:
            d["a"] = self.a
        if self.epsilon is not None:
            d["epsilon"] = self.epsilon
        if self.epsilon_list is not None:
            d["epsilon_list"] = list(self.epsilon_list)
        d.update(m=self.m, gamma=self.gamma)
        if self.J0 is not None:
            d["J0"] = self.J0
        d.update(ell0=list(self.ell0), r0=self.r0, theta0=self.theta0, h0=list(self.h0),
                 dt=self.dt, T=self.T, seed=self.seed)
        d["blobs"] = [{"position": list(b.position), "strength": b.strength, "core": b.core}
                      for b in self.blobs]
        out = {"format": self.output.format, "stride": self.output.stride}
        if self.output.path is not None:
            out["path"] = self.output.path
        d["output"] = out
        return d

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())


# ---------------------------------------------------------------------------
# parsing and validation


def _real(d, key, default=None, required=False):
    if key not in d:
        if required:
            raise ConfigError(key, "missing required field")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {type(v).__name__}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(key, "must be finite")
    return v


def _vec2(d, key, default):
    if key not in d:
        return default
    v = d[key]
    if not (isinstance(v, list) and len(v) == 2):
        raise ConfigError(key, "expected a list of two numbers")
    return tuple(_real({key: x}, key) for x in v)


def _blob(i, b):
    name = f"blobs[{i}]"
    if not isinstance(b, dict):
        raise ConfigError(name, "expected a table with position, strength and optional core")
    unknown = set(b) - {"position", "strength", "core"}
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}", "unknown field")
    pos = _vec2(b, "position", None)
    if pos is None:
        raise ConfigError(f"{name}.position", "missing required field")
    strength = _real(b, "strength", required=True)
    core = _real(b, "core", 0.0)
    if core < 0:
        raise ConfigError(f"{name}.core", "must be nonnegative")
    return VortexBlob(pos, strength, core)


def from_dict(d: dict[str, Any]) -> ScenarioConfig:
    unknown = set(d) - _KNOWN
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    shape = d.get("shape", "disk")
    if shape not in SHAPES:
        raise ConfigError("shape", f"expected one of {SHAPES}, got {shape!r}")
    a = _real(d, "a")
    if shape == "joukowski":
        a = 0.5 if a is None else a
        if not 0.0 <= a < 1.0:
            raise ConfigError("a", "joukowski parameter must satisfy 0 <= a < 1")
    elif a is not None:
        raise ConfigError("a", "only meaningful for shape = 'joukowski'")

    m = _real(d, "m", required=True)
    if m <= 0:
        raise ConfigError("m", "must be positive")
    gamma = _real(d, "gamma", required=True)
    dt = _real(d, "dt", required=True)
    T = _real(d, "T", required=True)
    if dt <= 0:
        raise ConfigError("dt", "must be positive")
    if not dt < T:
        raise ConfigError("dt", "must be smaller than T")

    epsilon = _real(d, "epsilon")
    if epsilon is not None and epsilon <= 0:
        raise ConfigError("epsilon", "must be positive")
    eps_list = None
    if "epsilon_list" in d:
        raw = d["epsilon_list"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("epsilon_list", "expected a non-empty list of numbers")
        eps_list = tuple(_real({"epsilon_list": e}, "epsilon_list") for e in raw)
        if any(e <= 0 for e in eps_list):
            raise ConfigError("epsilon_list", "entries must be positive")
    J0 = _real(d, "J0")
    if J0 is not None and J0 <= 0:
        raise ConfigError("J0", "must be positive")
    if J0 is None and (epsilon is not None or eps_list is not None):
        raise ConfigError("J0", "required when epsilon or epsilon_list is given")

    raw_blobs = d.get("blobs", [])
    if not isinstance(raw_blobs, list):
        raise ConfigError("blobs", "expected an array of tables")
    blobs = tuple(_blob(i, b) for i, b in enumerate(raw_blobs))

    out_raw = d.get("output", {})
    if not isinstance(out_raw, dict):
        raise ConfigError("output", "expected a table")
    unknown = set(out_raw) - {"path", "format", "stride"}
    if unknown:
        raise ConfigError(f"output.{sorted(unknown)[0]}", "unknown field")
    fmt = out_raw.get("format", "jsonl")
    if fmt not in FORMATS:
        raise ConfigError("output.format", f"expected one of {FORMATS}, got {fmt!r}")
    path = out_raw.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path", "expected a string")
    stride = out_raw.get("stride", 1)
    if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
        raise ConfigError("output.stride", "expected a positive integer")
    seed = d.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed", "expected an integer")

    cfg = ScenarioConfig(
        m=m, gamma=gamma, dt=dt, T=T, shape=shape, a=a, epsilon=epsilon, epsilon_list=eps_list,
        J0=J0, ell0=_vec2(d, "ell0", (0.0, 0.0)), r0=_real(d, "r0", 0.0),
        theta0=_real(d, "theta0", 0.0), h0=_vec2(d, "h0", (0.0, 0.0)), blobs=blobs,
        output=OutputSpec(path, fmt, stride), seed=seed,
    )
    _check_blobs_outside(cfg)
    return cfg


def _check_blobs_outside(cfg: ScenarioConfig):
    eps = cfg.largest_epsilon
    if eps is None or not cfg.blobs:
        return
    geom = cfg.geometry(eps)
    for i, b in enumerate(cfg.blobs):
        w = geom.forward(complex(*b.position))
        if abs(w) <= 1.0:
            raise ConfigError(f"blobs[{i}].position", f"inside the body at epsilon = {eps}")


def loads(text: str) -> ScenarioConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<syntax>", str(exc)) from exc
    return from_dict(data)


def load(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)
