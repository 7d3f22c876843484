"""Run configuration files and reproducible text outputs.

A configuration file holds ``key = value`` lines; ``#`` starts a comment.
Every output file starts with a comment header carrying the tool version
and the SHA-256 of the canonical configuration, so two runs with the same
configuration produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field, fields

import numpy as np

from . import __version__
from .domain import DomainSpec
from .errors import ConfigError

DEFAULT_S_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 4.0, 8.0)


@dataclass
class RunConfig:
    n: int = 1
    omega_min: float = -1.0
    omega_max: float = 1.0
    epsilon: float = 0.25
    alpha: float = 0.4
    p: float = 2.0
    truncation_radius: float | None = None
    resolution: int = 65
    rel_tol: float = 1e-6
    grad_tol: float = 1e-6
    max_iter: int = 3000
    path_samples: int = 41
    s_grid: tuple = DEFAULT_S_GRID
    alpha_list: tuple = (0.9, 0.95, 0.99)
    bbm_resolution: int = 400
    steklov_resolution: int | None = None
    nonlinearity: str = "linear_arctan"
    nonlinearity_params: dict = field(default_factory=dict)
    starts: int = 20
    draws: int = 10_000
    output: str = "out"
    seed: int = 0
    threads: int = 1
    plot: bool = True

    def domain(self) -> DomainSpec:
        if self.n == 1:
            omega = (self.omega_min, self.omega_max)
        else:
            omega = ((self.omega_min,) * 2, (self.omega_max,) * 2)
        return DomainSpec(n=self.n, omega=omega, epsilon=self.epsilon,
                          alpha=self.alpha, p=self.p,
                          truncation_radius=self.truncation_radius)

    def canonical(self) -> str:
        """Sorted ``key = value`` text; the basis of the config hash."""
        out = []
        for f in sorted(fields(self), key=lambda f: f.name):
            out.append(f"{f.name} = {_format_value(getattr(self, f.name))}")
        return "\n".join(out) + "\n"

    def sha256(self) -> str:
        # the output directory does not change results
        text = "\n".join(line for line in self.canonical().splitlines()
                         if not line.startswith("output ="))
        return hashlib.sha256(text.encode()).hexdigest()

    def header(self, command: str) -> list:
        return [f"fracfucik {__version__} {command}",
                f"config sha256 {self.sha256()}"]


def _format_value(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ", ".join(_format_value(x) for x in v)
    if isinstance(v, dict):
        return ", ".join(f"{k}:{_format_value(v[k])}" for k in sorted(v))
    return str(v)


def _parse_float_list(text):
    return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())


def _parse_params(text):
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if ":" not in item:
            raise ConfigError(f"nonlinearity_params entry {item!r} needs name:value")
        k, v = item.split(":", 1)
        out[k.strip()] = float(v)
    return out


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _optional(conv):
    def parse(text):
        if text.strip().lower() in ("none", ""):
            return None
        return conv(text)
    return parse


PARSERS = {
    "n": int, "omega_min": float, "omega_max": float, "epsilon": float,
    "alpha": float, "p": float, "truncation_radius": _optional(float),
    "resolution": int, "rel_tol": float, "grad_tol": float, "max_iter": int,
    "path_samples": int, "s_grid": _parse_float_list,
    "alpha_list": _parse_float_list, "bbm_resolution": int,
    "steklov_resolution": _optional(int), "nonlinearity": str.strip,
    "nonlinearity_params": _parse_params, "starts": int, "draws": int,
    "output": str.strip, "seed": int, "threads": int, "plot": _parse_bool,
}


def parse_config(text: str, overrides=None) -> RunConfig:
    """Build a RunConfig from ``key = value`` text; ``overrides`` (a mapping
    of the same keys to strings) wins over the file."""
    values = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {num}: expected key = value")
        key, val = (t.strip() for t in line.split("=", 1))
        values[key] = val
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    kwargs = {}
    for key, val in values.items():
        if key not in PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            kwargs[key] = PARSERS[key](str(val))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key}: {val!r}") from exc
    cfg = RunConfig(**kwargs)
    if cfg.threads < 1:
        raise ConfigError("threads must be at least 1")
    return cfg


def load_config(path, overrides=None) -> RunConfig:
    if path is None:
        return parse_config("", overrides)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, overrides)


def write_text(path, text: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def format_record(header_lines, items, arrays=None) -> str:
    """Line-oriented record: comment header, ``key = value`` lines and one
    ``name = v0 v1 ...`` line per array."""
    lines = [f"# {h}" for h in header_lines]
    for k, v in items:
        if isinstance(v, float):
            v = f"{v:.12e}"
        lines.append(f"{k} = {_format_value(v)}")
    for k, arr in (arrays or {}).items():
        vals = " ".join(f"{x:.12e}" for x in np.asarray(arr, float).ravel())
        lines.append(f"{k} = {vals}")
    return "\n".join(lines) + "\n"


def read_record(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if line.startswith("#") or "=" not in line:
            continue
        k, v = (t.strip() for t in line.split("=", 1))
        out[k] = v
    return out
