"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Every key is a field of
:class:`RunConfig`; absent keys take the defaults below. Vector values are
comma separated and the metric ``g`` uses ``;`` between rows.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "parse_matrix", "parse_vector"]


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


@dataclass(frozen=True)
class RunConfig:
    a: float = 1.0
    beta: float = 10.0
    w: float = 2.0
    z: tuple = (1.0,)
    n: int = 2000
    r_max: float = 20.0
    seed: int = 0
    csv: str = "particle.csv"
    svg: str = "particle.svg"
    report: str = "report.txt"
    wave_csv: str = "wave.csv"
    wave_amplitude: float = 0.5
    wave_width: float = 0.2
    wave_time_rate: float = 0.0
    wave_weight: float = 2.0
    wave_sizes: tuple = (32, 64, 128, 256)
    g: tuple | None = None
    kappa: float = 0.0
    Q: float | None = None
    epsilon0: float | None = None

    def __post_init__(self):
        positive = {"a": self.a, "beta": self.beta, "r_max": self.r_max, "wave_width": self.wave_width}
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("w", "wave_amplitude", "wave_time_rate", "wave_weight"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.wave_amplitude < 0.0:
            raise ConfigError("wave_amplitude must be >= 0 (the dilation is non-negative)")
        if not all(math.isfinite(v) for v in self.z) or not self.z:
            raise ConfigError("z must be a non-empty list of finite numbers")
        if self.n < 8:
            raise ConfigError(f"n must be >= 8, got {self.n}")
        if self.r_max <= 1.0:
            raise ConfigError("r_max must exceed 1 so that the grid contains r = 1")
        if not 0.0 <= self.kappa < 1.0:
            raise ConfigError(f"kappa must lie in [0, 1), got {self.kappa!r}")
        if len(self.wave_sizes) < 3 or any(s < 4 or s % 2 for s in self.wave_sizes):
            raise ConfigError("wave_sizes needs at least 3 even node counts >= 4")
        if any(b < 2 * a for a, b in zip(self.wave_sizes[:-1], self.wave_sizes[1:])):
            raise ConfigError("each wave size must at least double the previous one")
        if (self.Q is None) != (self.epsilon0 is None):
            raise ConfigError("dimensional output needs both Q and epsilon0")
        if self.epsilon0 is not None and not self.epsilon0 > 0.0:
            raise ConfigError("epsilon0 must be > 0")

    @property
    def dimensional(self) -> bool:
        return self.Q is not None


def parse_vector(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def parse_matrix(text: str) -> tuple:
    rows = tuple(parse_vector(row) for row in text.split(";") if row.strip())
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ConfigError(f"matrix must be square with rows separated by ';', got {text!r}")
    return rows


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(text)
    return int(value)


def _optional_float(text: str):
    return None if text.lower() in ("", "none") else float(text)


_CONVERTERS = {
    "a": float, "beta": float, "w": float, "z": parse_vector, "n": _int, "r_max": float, "seed": _int,
    "csv": str, "svg": str, "report": str, "wave_csv": str,
    "wave_amplitude": float, "wave_width": float, "wave_time_rate": float, "wave_weight": float,
    "wave_sizes": lambda s: tuple(_int(x) for x in s.split(",") if x.strip()),
    "g": parse_matrix, "kappa": float, "Q": _optional_float, "epsilon0": _optional_float,
}
assert set(_CONVERTERS) == {f.name for f in dataclasses.fields(RunConfig)}


def parse_config(text: str, **overrides) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONVERTERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


def load_config(path, **overrides) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text, **overrides)
