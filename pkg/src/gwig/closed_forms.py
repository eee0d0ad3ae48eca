"""Closed-form solutions: the affine blend of harmonic and dark parts, and the charged-particle model.

Everything here is non-dimensional: radii are ``r = r_dim / a``, the
potential is in units of ``phi_a``, the field in units of ``E(a)`` and the
charge density in units of ``rho_0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .delta import KappaProfile, RegularizedDelta, _out, _radius
from .errors import DomainError, NonInvertibleError, ShapeError

__all__ = [
    "ParticleModel",
    "SolutionBundle",
    "compose_solution",
    "dirichlet_solution",
    "extract_riemannian",
    "null_dark_potential",
    "particle_charge_density",
    "particle_field",
    "particle_potential",
]


@dataclass(frozen=True)
class ParticleModel:
    """Finite-size charge: regularized delta, field weight ``w`` and dark potential ``phi_d / phi_a``."""

    delta: RegularizedDelta
    w: float = 2.0
    phi_d_over_phi_a: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.w):
            raise DomainError("w must be finite")
        if not np.isfinite(self.phi_d_over_phi_a):
            raise DomainError("phi_d_over_phi_a must be finite")

    @classmethod
    def default(cls, a: float = 1.0, beta: float = 10.0, w: float = 2.0) -> "ParticleModel":
        return cls(RegularizedDelta(a, beta), w=w)

    @property
    def kappa(self) -> KappaProfile:
        return KappaProfile(self.delta, self.w)

    def origin_residual(self) -> float:
        """Coefficient ``exp(-w beta / (4 a))`` of the surviving ``1/r`` term at the origin."""
        return self.kappa.origin_residual()


@dataclass(frozen=True)
class SolutionBundle:
    phi_h: np.ndarray
    phi_d: np.ndarray
    kappa_tilde: np.ndarray
    phi_hat: np.ndarray


def _broadcast_fields(*arrays):
    arrays = [np.asarray(x, dtype=float) for x in arrays]
    try:
        return np.broadcast_arrays(*arrays)
    except ValueError:
        shapes = ", ".join(str(x.shape) for x in arrays)
        raise ShapeError(f"fields have incompatible shapes: {shapes}") from None


def _check_kappa_field(kappa_tilde: np.ndarray, upper_inclusive: bool):
    bad = np.isnan(kappa_tilde) | (kappa_tilde < 0.0)
    bad |= (kappa_tilde > 1.0) if upper_inclusive else (kappa_tilde >= 1.0)
    if np.any(bad):
        if not upper_inclusive and np.any(kappa_tilde == 1.0):
            raise NonInvertibleError("kappa_tilde reaches 1; the harmonic part cannot be recovered there")
        raise DomainError("kappa_tilde must lie in [0, 1]")


def compose_solution(phi_h, phi_d, kappa_tilde) -> SolutionBundle:
    """``phi_hat = (1 - kappa_tilde) phi_h + kappa_tilde phi_d`` nodewise.

    Where ``kappa_tilde == 1`` the result is ``phi_d`` even if ``phi_h`` is
    infinite there.
    """
    phi_h, phi_d, kt = _broadcast_fields(phi_h, phi_d, kappa_tilde)
    _check_kappa_field(kt, upper_inclusive=True)
    with np.errstate(invalid="ignore"):
        phi_hat = (1.0 - kt) * phi_h + kt * phi_d
    phi_hat = np.where(kt == 1.0, phi_d, phi_hat)
    return SolutionBundle(phi_h.copy(), phi_d.copy(), kt.copy(), phi_hat)


def extract_riemannian(phi_hat, phi_d, kappa_tilde) -> np.ndarray:
    """Invert the blend: ``phi_h = (phi_hat - kappa_tilde phi_d) / (1 - kappa_tilde)``."""
    phi_hat, phi_d, kt = _broadcast_fields(phi_hat, phi_d, kappa_tilde)
    _check_kappa_field(kt, upper_inclusive=False)
    return (phi_hat - kt * phi_d) / (1.0 - kt)


def _particle_terms(r_breve, model: ParticleModel):
    r = _radius(r_breve)
    d0, d1, d2 = (np.asarray(x) for x in model.delta.derivatives(r))
    w = model.w
    damp = np.exp(-w * d0)  # 1 - kappa, without cancellation
    kappa = -np.expm1(-w * d0)
    k1 = w * d1 * damp
    k2 = w * damp * (d2 - w * d1**2)
    zero = r == 0.0
    safe = np.where(zero, 1.0, r)
    return r, zero, 1.0 / safe, damp, kappa, k1, k2


def particle_potential(r_breve, model: ParticleModel):
    """``1/r + (d - 1/r) kappa_a`` with ``d = phi_d / phi_a``.

    Equals 1 exactly at ``r = 1`` when ``d = 1``, and ``d`` wherever
    ``kappa_a`` rounds to 1. At ``r = 0`` the limit is returned: ``d`` if
    ``kappa_a(0)`` rounds to 1, infinity otherwise (the ``exp(-w beta/(4a))/r``
    term survives).
    """
    _, zero, inv_r, damp, kappa, _, _ = _particle_terms(r_breve, model)
    d = model.phi_d_over_phi_a
    phi = inv_r + (d - inv_r) * kappa
    phi = np.where(kappa == 1.0, d, phi)
    phi = np.where(zero, np.where(kappa == 1.0, d, np.inf), phi)
    return _out(phi)


def particle_field(r_breve, model: ParticleModel):
    """Radial field ``(1 - kappa_a)/r**2 - (d - 1/r) kappa_a'``, equal to ``-d phi / dr``."""
    _, zero, inv_r, damp, kappa, k1, _ = _particle_terms(r_breve, model)
    d = model.phi_d_over_phi_a
    E = damp * inv_r**2 - (d - inv_r) * k1
    E = np.where(zero, np.where(kappa == 1.0, 0.0, np.inf), E)
    return _out(E)


def particle_charge_density(r_breve, model: ParticleModel):
    """``(1/3) [(2 d / r) kappa_a' + (d - 1/r) kappa_a'']``.

    For ``d = 1`` this is ``(2/(3r)) kappa_a' + (1/3)(1 - 1/r) kappa_a''``. The
    sign convention makes ``3 int rho r**2 dr`` evaluate to -kappa_a(0), close to -1.
    """
    _, zero, inv_r, damp, _, k1, k2 = _particle_terms(r_breve, model)
    d = model.phi_d_over_phi_a
    rho = (2.0 * d * inv_r * k1 + (d - inv_r) * k2) / 3.0
    if np.any(zero):
        # kappa' ~ kappa''(0) r near the origin; the 1/r kappa'' term diverges unless kappa''(0) = 0
        k2_0 = np.where(zero, k2, 0.0)
        rho = np.where(zero, np.where(k2_0 == 0.0, 0.0, np.inf), rho)
    return _out(rho)


def null_dark_potential(r_breve, model: ParticleModel):
    """``(1 - kappa_a) / r``: the potential pinned to a vanishing dark field.

    Evaluated as the blend itself, so it agrees nodewise with
    ``compose_solution(1/r, 0, kappa_a)``.
    """
    _, zero, inv_r, _, kappa, _, _ = _particle_terms(r_breve, model)
    phi = (1.0 - kappa) * inv_r
    phi = np.where(zero, np.where(kappa == 1.0, 0.0, np.inf), phi)
    return _out(phi)


def dirichlet_solution(r, phi_d: float, delta: RegularizedDelta, exponent: float = 1.0, w: float = 2.0):
    """``(1 - kappa_a) phi_d / r**exponent + kappa_a phi_d``.

    ``exponent = 1`` gives the fundamental harmonic part used by the particle
    model; ``exponent = 2`` is the alternative power also in circulation.
    """
    if not np.isfinite(phi_d):
        raise DomainError("phi_d must be finite")
    r = _radius(r)
    if np.any(r == 0.0):
        raise DomainError("dirichlet_solution needs r > 0")
    d0 = np.asarray(delta.evaluate(r))
    damp = np.exp(-w * d0)
    kappa = -np.expm1(-w * d0)
    return _out(damp * phi_d / r**exponent + kappa * phi_d)
