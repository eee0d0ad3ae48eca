"""Logistic-profile regularized delta and the dilation profile built on it.

All radii are non-dimensional, ``r = r_dim / a``. The delta is

    delta_a(r) = (beta / a) * exp(-r) / (1 + exp(-r))**2

and the dilation profile is ``kappa_a(r) = 1 - exp(-w * delta_a(r))``.
Derivatives are closed form; writing ``p = exp(-r) / (1 + exp(-r))**2`` and
``t = tanh(r / 2)``, ``delta' = -B p t`` and ``delta'' = B p (t**2 - 2 p)``
with ``B = beta / a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError

__all__ = ["ORIGIN_CUTOFF", "KappaProfile", "RegularizedDelta", "normalize_order"]

# radii below this are evaluated at exactly zero
ORIGIN_CUTOFF = 1e-12

_ORDERS = {"value": 0, "first": 1, "second": 2, 0: 0, 1: 1, 2: 2}


def normalize_order(order) -> int:
    try:
        return _ORDERS[order]
    except (KeyError, TypeError):
        raise ValueError(f"order must be one of 'value', 'first', 'second' (or 0, 1, 2), got {order!r}") from None


def _radius(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(np.isnan(r)) or np.any(r < 0.0):
        raise DomainError("radius must be >= 0")
    return np.where(r < ORIGIN_CUTOFF, 0.0, r)


def _shape_factors(r: np.ndarray):
    e = np.exp(-r)
    p = e / (1.0 + e) ** 2
    t = (1.0 - e) / (1.0 + e)
    return p, t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class RegularizedDelta:
    """Regularization radius ``a`` and adjustment constant ``beta``."""

    a: float
    beta: float = 10.0

    def __post_init__(self):
        for name in ("a", "beta"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def amplitude(self) -> float:
        return self.beta / self.a

    def evaluate(self, r, order=0):
        """Value, first or second radial derivative at ``r >= 0``."""
        order = normalize_order(order)
        p, t = _shape_factors(_radius(r))
        B = self.amplitude
        if order == 0:
            out = B * p
        elif order == 1:
            out = -B * p * t
        else:
            out = B * p * (t * t - 2.0 * p)
        return _out(out)

    def derivatives(self, r):
        """``(delta, delta', delta'')`` sharing one evaluation of the shape factors."""
        p, t = _shape_factors(_radius(r))
        B = self.amplitude
        return _out(B * p), _out(-B * p * t), _out(B * p * (t * t - 2.0 * p))

    def peak(self) -> float:
        return self.amplitude / 4.0

    def shell_integral(self) -> float:
        """``4 pi int_0^inf delta_a r**2 dr``; diagnostic only, the profile is not unit-normalized."""
        # int_0^inf r**2 e^-r / (1 + e^-r)**2 dr = pi**2 / 6
        return 4.0 * np.pi * self.amplitude * np.pi**2 / 6.0


@dataclass(frozen=True)
class KappaProfile:
    """``kappa_a = 1 - exp(-w delta_a)`` with closed-form derivatives."""

    delta: RegularizedDelta
    w: float = 2.0

    def __post_init__(self):
        if not np.isfinite(self.w):
            raise DomainError(f"w must be finite, got {self.w!r}")

    def evaluate(self, r, order=0):
        order = normalize_order(order)
        d0, d1, d2 = self.delta.derivatives(r)
        w = self.w
        if order == 0:
            return _out(-np.expm1(-w * np.asarray(d0)))
        damp = np.exp(-w * np.asarray(d0))
        if order == 1:
            return _out(w * np.asarray(d1) * damp)
        return _out(w * damp * (np.asarray(d2) - w * np.asarray(d1) ** 2))

    def derivatives(self, r):
        d0, d1, d2 = (np.asarray(x) for x in self.delta.derivatives(r))
        w = self.w
        damp = np.exp(-w * d0)
        return _out(-np.expm1(-w * d0)), _out(w * d1 * damp), _out(w * damp * (d2 - w * d1**2))

    def origin_residual(self) -> float:
        """``1 - kappa_a(0) = exp(-w beta / (4 a))``, the surviving weight of the 1/r term at the origin."""
        return float(np.exp(-self.w * self.delta.peak()))

    def support_radius(self, threshold: float, rtol: float = 1e-14) -> float:
        """Radius where ``kappa_a`` first drops below ``threshold``, by bisection.

        Returns 0 when the profile starts below the threshold.
        """
        threshold = float(threshold)
        if not 0.0 < threshold < 1.0:
            raise DomainError(f"threshold must lie in (0, 1), got {threshold!r}")
        if self.w <= 0.0:
            raise DomainError("support radius needs w > 0 (monotone decreasing profile)")

        def excess(r):
            return self.evaluate(r) - threshold

        if excess(0.0) <= 0.0:
            return 0.0
        hi = 1.0
        while excess(hi) > 0.0:
            hi *= 2.0
            if hi > 1e4:
                raise DomainError("threshold too small to bracket")
        return float(optimize.bisect(excess, 0.0, hi, xtol=1e-15, rtol=rtol, maxiter=400))
