"""Uniform node sets: radial, Cartesian, and 1+1D spacetime."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["CartesianGrid", "RadialGrid", "SpacetimeGrid1p1"]

MIN_NODES = 8


@dataclass
class RadialGrid:
    """Nodes ``r_i = r_min + i h`` for ``i = 0 .. n-1`` in units of the particle radius."""

    n: int
    h: float
    r_min: float = 0.0
    fields: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < MIN_NODES:
            raise DomainError(f"radial grid needs at least {MIN_NODES} nodes, got {self.n}")
        if not (np.isfinite(self.h) and self.h > 0.0):
            raise DomainError(f"spacing must be > 0, got {self.h!r}")
        if not (np.isfinite(self.r_min) and self.r_min >= 0.0):
            raise DomainError(f"r_min must be >= 0, got {self.r_min!r}")

    @classmethod
    def spanning(cls, r_min: float, r_max: float, n: int) -> "RadialGrid":
        """``n`` nodes with both end points included."""
        if r_max <= r_min:
            raise DomainError("r_max must exceed r_min")
        return cls(n=n, h=(r_max - r_min) / (n - 1), r_min=float(r_min))

    @property
    def r(self) -> np.ndarray:
        return self.r_min + self.h * np.arange(self.n)

    @property
    def r_max(self) -> float:
        return self.r_min + self.h * (self.n - 1)

    @property
    def has_origin(self) -> bool:
        return self.r_min == 0.0


@dataclass
class CartesianGrid:
    """Tensor-product grid for stationary fields; arrays are indexed ``ij``."""

    shape: tuple
    spacing: tuple
    origin: tuple = None
    fields: dict = field(default_factory=dict)

    def __post_init__(self):
        self.shape = tuple(int(s) for s in self.shape)
        self.spacing = tuple(float(h) for h in np.broadcast_to(self.spacing, (len(self.shape),)))
        self.origin = (0.0,) * len(self.shape) if self.origin is None else tuple(float(o) for o in self.origin)
        if any(s < 4 for s in self.shape):
            raise DomainError("every axis needs at least 4 nodes for the boundary stencils")
        if any(not h > 0.0 for h in self.spacing):
            raise DomainError("spacings must be > 0")
        if len(self.origin) != len(self.shape):
            raise DomainError("origin and shape have different lengths")

    @classmethod
    def spanning(cls, lower, upper, shape) -> "CartesianGrid":
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        shape = tuple(np.atleast_1d(shape))
        spacing = (upper - lower) / (np.asarray(shape) - 1)
        return cls(shape=shape, spacing=tuple(spacing), origin=tuple(lower))

    @property
    def ndim(self) -> int:
        return len(self.shape)

    def axes(self):
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.shape)]

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")


@dataclass
class SpacetimeGrid1p1:
    """Nodes ``(t0 + k dt, x0 + i dx)``; fields have shape ``(nt, nx)``."""

    nt: int
    nx: int
    dt: float
    dx: float
    t0: float = 0.0
    x0: float = 0.0
    cfl_max: float = 1.0
    fields: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nt < 3 or self.nx < 3:
            raise DomainError("spacetime grid needs at least 3 nodes per axis")
        if not (self.dt > 0.0 and self.dx > 0.0):
            raise DomainError("spacings must be > 0")
        if self.dt / self.dx > self.cfl_max:
            raise DomainError(f"dt/dx = {self.dt / self.dx:g} exceeds the CFL bound {self.cfl_max:g}")

    @property
    def shape(self):
        return (self.nt, self.nx)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    def mesh(self):
        return np.meshgrid(self.t, self.x, indexing="ij")
