"""Finite-difference realizations of the dilated Laplace, wave and gauge operators.

Second-order centered stencils throughout, with second-order one-sided
stencils at stationary-grid boundaries. Spacetime residuals are returned on
interior nodes only. Every operator collapses to its classical stencil when
``lam`` is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .delta import RegularizedDelta
from .errors import DomainError, NonStationaryError, ShapeError
from .grids import CartesianGrid, RadialGrid, SpacetimeGrid1p1

__all__ = [
    "OperatorCoefficients",
    "appendix_laplace_residual",
    "classical_laplacian",
    "conjugated_laplacian",
    "conservation_residual",
    "coulomb_gauge_residual",
    "first_difference",
    "modified_laplacian_apply",
    "modified_rhs_assemble",
    "radial_coefficients",
    "radial_from_functions",
    "radial_laplacian",
    "second_difference",
    "wave_residual",
]


@dataclass(frozen=True)
class OperatorCoefficients:
    """Sampled dilation ``lam`` and, for radial operators, its gradient and Laplacian.

    ``w`` is the field weight; ``field_weights`` optionally gives a separate
    weight per component ``mu``. ``z`` holds the per-axis dilation exponents;
    a single entry is broadcast to every axis.
    """

    lam: np.ndarray
    grad_lam: np.ndarray | None = None
    laplace_lam: np.ndarray | None = None
    w: float = 2.0
    z: tuple = (1.0,)
    field_weights: tuple | None = None

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if not np.all(np.isfinite(lam)) or np.any(lam < 0.0):
            raise DomainError("lam must be finite and >= 0")
        object.__setattr__(self, "lam", lam)
        for name in ("grad_lam", "laplace_lam"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != lam.shape:
                    raise ShapeError(f"{name} shape {arr.shape} differs from lam shape {lam.shape}")
                object.__setattr__(self, name, arr)
        object.__setattr__(self, "z", tuple(float(v) for v in np.atleast_1d(self.z)))
        if self.field_weights is not None:
            object.__setattr__(self, "field_weights", tuple(float(v) for v in self.field_weights))

    @classmethod
    def zero(cls, shape, w: float = 2.0, z=(1.0,), radial: bool = True) -> "OperatorCoefficients":
        lam = np.zeros(shape)
        if radial:
            return cls(lam, np.zeros(shape), np.zeros(shape), w=w, z=z)
        return cls(lam, w=w, z=z)

    def weight(self, mu: int = 0) -> float:
        if self.field_weights is None:
            return float(self.w)
        return self.field_weights[mu]

    @property
    def kappa_tilde(self) -> np.ndarray:
        """``1 - exp(-w lam)``."""
        return -np.expm1(-self.w * self.lam)


def radial_coefficients(grid: RadialGrid, delta: RegularizedDelta, w: float = 2.0, z=(1.0,)) -> OperatorCoefficients:
    """Coefficients for ``lam = delta_a`` sampled on a radial grid, derivatives in closed form.

    The Laplacian of ``lam`` at the origin is ``3 lam''(0)``.
    """
    r = grid.r
    lam, dlam, d2lam = (np.asarray(x) for x in delta.derivatives(r))
    lap = np.empty_like(r)
    pos = r > 0.0
    lap[pos] = d2lam[pos] + 2.0 * dlam[pos] / r[pos]
    lap[~pos] = 3.0 * d2lam[~pos]
    return OperatorCoefficients(lam, dlam, lap, w=w, z=z)


def radial_from_functions(grid: RadialGrid, lam, dlam, d2lam, w: float = 2.0, z=(1.0,)) -> OperatorCoefficients:
    """Coefficients from callables for a radial ``lam(r)`` and its first two derivatives."""
    r = grid.r
    lam_v, d1, d2 = (np.asarray(f(r), dtype=float) for f in (lam, dlam, d2lam))
    lap = np.where(r > 0.0, d2 + 2.0 * d1 / np.where(r > 0.0, r, 1.0), 3.0 * d2)
    return OperatorCoefficients(lam_v, d1, lap, w=w, z=z)


def _check_axis_length(f: np.ndarray, axis: int, minimum: int):
    if f.shape[axis] < minimum:
        raise ShapeError(f"axis {axis} needs at least {minimum} nodes, got {f.shape[axis]}")


def second_difference(f, h: float, axis: int = -1) -> np.ndarray:
    """Second derivative: centered in the interior, 4-point one-sided at the ends."""
    f = np.asarray(f, dtype=float)
    _check_axis_length(f, axis, 4)
    f = np.moveaxis(f, axis, -1)
    out = np.empty_like(f)
    out[..., 1:-1] = (f[..., 2:] - 2.0 * f[..., 1:-1] + f[..., :-2]) / h**2
    out[..., 0] = (2.0 * f[..., 0] - 5.0 * f[..., 1] + 4.0 * f[..., 2] - f[..., 3]) / h**2
    out[..., -1] = (2.0 * f[..., -1] - 5.0 * f[..., -2] + 4.0 * f[..., -3] - f[..., -4]) / h**2
    return np.moveaxis(out, -1, axis)


def first_difference(f, h: float, axis: int = -1) -> np.ndarray:
    """First derivative: centered in the interior, 3-point one-sided at the ends."""
    f = np.asarray(f, dtype=float)
    _check_axis_length(f, axis, 3)
    return np.gradient(f, h, axis=axis, edge_order=2)


def _radial_field(u, grid: RadialGrid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n,):
        raise ShapeError(f"field shape {u.shape} does not match radial grid of {grid.n} nodes")
    return u


def radial_laplacian(u, grid: RadialGrid) -> np.ndarray:
    """``u'' + 2 u' / r`` for spherically symmetric ``u``.

    At an origin node the regularity stencil ``6 (u_1 - u_0) / h**2`` is used.
    """
    u = _radial_field(u, grid)
    h = grid.h
    r = grid.r
    d1 = first_difference(u, h)
    d2 = second_difference(u, h)
    out = np.empty_like(u)
    start = 1 if grid.has_origin else 0
    out[start:] = d2[start:] + 2.0 * d1[start:] / r[start:]
    if grid.has_origin:
        out[0] = 6.0 * (u[1] - u[0]) / h**2
    return out


def modified_laplacian_apply(u, grid: RadialGrid, coeffs: OperatorCoefficients) -> np.ndarray:
    """``Lap u + 2 w grad(lam).grad(u) + w (Lap lam + w |grad lam|**2) u`` on a radial grid."""
    u = _radial_field(u, grid)
    if coeffs.grad_lam is None or coeffs.laplace_lam is None:
        raise ValueError("radial operator needs grad_lam and laplace_lam")
    if coeffs.lam.shape != u.shape:
        raise ShapeError("coefficients and field live on different grids")
    w = coeffs.w
    du = first_difference(u, grid.h)
    drift = 2.0 * w * coeffs.grad_lam
    potential = w * (coeffs.laplace_lam + w * coeffs.grad_lam**2)
    return radial_laplacian(u, grid) + drift * du + potential * u


def modified_rhs_assemble(phi_d, grid: RadialGrid, coeffs: OperatorCoefficients) -> np.ndarray:
    """The dilated Laplacian applied to ``kappa_tilde * phi_d``, with the same stencil."""
    phi_d = np.broadcast_to(np.asarray(phi_d, dtype=float), (grid.n,))
    if not np.all(np.isfinite(phi_d)):
        raise DomainError("phi_d must be finite")
    return modified_laplacian_apply(coeffs.kappa_tilde * phi_d, grid, coeffs)


def conjugated_laplacian(u, grid: RadialGrid, coeffs: OperatorCoefficients) -> np.ndarray:
    """``exp(-w lam) Lap(exp(w lam) u)`` with the plain radial stencil."""
    u = _radial_field(u, grid)
    shift = float(np.max(coeffs.lam))
    scale = np.exp(coeffs.w * (coeffs.lam - shift))
    return radial_laplacian(scale * u, grid) / scale


def classical_laplacian(u, grid: CartesianGrid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    for j, h in enumerate(grid.spacing):
        out = out + second_difference(u, h, axis=j)
    return out


def _per_axis(values: tuple, n: int, what: str) -> tuple:
    # 1 entry: broadcast; n entries: per axis; n + 1 entries: drop the time slot
    if len(values) == 1:
        return values * n
    if len(values) == n:
        return tuple(values)
    if len(values) == n + 1:
        return tuple(values[1:])
    raise ShapeError(f"{what} has {len(values)} entries, cannot map onto {n} spatial axes")


def _cartesian_field(f, grid: CartesianGrid, name: str) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise ShapeError(f"{name} shape {f.shape} does not match grid shape {grid.shape}")
    return f


def _broadcast(f, shape, name: str) -> np.ndarray:
    try:
        return np.broadcast_to(np.asarray(f, dtype=float), shape)
    except ValueError:
        raise ShapeError(f"{name} cannot be broadcast to {shape}") from None


def appendix_laplace_residual(phi_hat, phi_d, grid: CartesianGrid, coeffs: OperatorCoefficients, mu: int = 0) -> np.ndarray:
    """Stationary component equation, left side minus right side, nodewise.

    ``sum_j exp(-z_j lam) d_j^2 (exp(w_mu lam) phi_hat)
      - sum_j exp(-z_j lam) d_j^2 (exp(w_mu lam) (1 - exp(-w_mu lam)) phi_d)``
    """
    phi_hat = _cartesian_field(phi_hat, grid, "phi_hat")
    phi_d = _broadcast(phi_d, grid.shape, "phi_d")
    lam = _broadcast(coeffs.lam, grid.shape, "lam")
    w = coeffs.weight(mu)
    z = _per_axis(coeffs.z, grid.ndim, "z")
    lifted = np.exp(w * lam) * phi_hat
    source = np.expm1(w * lam) * phi_d
    lhs = np.zeros(grid.shape)
    rhs = np.zeros(grid.shape)
    for j, h in enumerate(grid.spacing):
        damp = np.exp(-z[j] * lam)
        lhs = lhs + damp * second_difference(lifted, h, axis=j)
        rhs = rhs + damp * second_difference(source, h, axis=j)
    return lhs - rhs


def coulomb_gauge_residual(A_hat, A_d, grid: CartesianGrid, coeffs: OperatorCoefficients) -> np.ndarray:
    """Stationary gauge condition for spatial components ``A_hat[j]``, left minus right side.

    ``sum_j exp(-z_j lam) d_j (exp(w_j lam) A_hat^j)
      - sum_j exp(-z_j lam) d_j (exp(w_j lam) (1 - exp(-w_j lam)) A_d^j)``
    """
    if len(A_hat) != grid.ndim:
        raise ShapeError(f"expected {grid.ndim} spatial components, got {len(A_hat)}")
    if len(A_d) != grid.ndim:
        raise ShapeError(f"expected {grid.ndim} dark components, got {len(A_d)}")
    lam = _broadcast(coeffs.lam, grid.shape, "lam")
    z = _per_axis(coeffs.z, grid.ndim, "z")
    weights = _per_axis(coeffs.field_weights or (coeffs.w,), grid.ndim, "field_weights")
    lhs = np.zeros(grid.shape)
    rhs = np.zeros(grid.shape)
    for j, h in enumerate(grid.spacing):
        comp = _cartesian_field(A_hat[j], grid, f"A_hat[{j}]")
        dark = _broadcast(A_d[j], grid.shape, f"A_d[{j}]")
        damp = np.exp(-z[j] * lam)
        lhs = lhs + damp * first_difference(np.exp(weights[j] * lam) * comp, h, axis=j)
        rhs = rhs + damp * first_difference(np.expm1(weights[j] * lam) * dark, h, axis=j)
    return lhs - rhs


def _stationary_lambda(coeffs: OperatorCoefficients, grid: SpacetimeGrid1p1) -> np.ndarray:
    lam = coeffs.lam
    if lam.ndim == 2:
        if lam.shape != grid.shape:
            raise ShapeError(f"lam shape {lam.shape} does not match spacetime grid {grid.shape}")
        if np.any(lam != lam[:1]):
            raise NonStationaryError("lam varies in time; only stationary dilation is supported")
        lam = lam[0]
    lam = _broadcast(lam, (grid.nx,), "lam")
    return np.broadcast_to(lam, grid.shape)


def _spacetime_field(f, grid: SpacetimeGrid1p1, name: str) -> np.ndarray:
    return _broadcast(f, grid.shape, name)


def _dtt(f, dt):
    return (f[2:, 1:-1] - 2.0 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / dt**2


def _dxx(f, dx):
    return (f[1:-1, 2:] - 2.0 * f[1:-1, 1:-1] + f[1:-1, :-2]) / dx**2


def _dt(f, dt):
    return (f[2:, 1:-1] - f[:-2, 1:-1]) / (2.0 * dt)


def _dx(f, dx):
    return (f[1:-1, 2:] - f[1:-1, :-2]) / (2.0 * dx)


def _spacetime_z(coeffs: OperatorCoefficients) -> tuple:
    z = coeffs.z
    if len(z) == 1:
        return z * 2
    return z[0], z[1]


def wave_residual(phi_hat, phi_d, grid: SpacetimeGrid1p1, coeffs: OperatorCoefficients, mu: int = 0,
                  form: str = "conjugated") -> np.ndarray:
    """Residual of one component of the dilated wave equation on interior nodes.

    ``form="conjugated"``:
        ``-d_t^2 psi + d_x^2 psi`` with ``psi = exp(w lam) (phi_hat - K phi_d)``.
    ``form="split"``:
        ``(exp(-z_0 lam) d_t^2 - exp(-z_1 lam) d_x^2)(exp(w lam) phi_hat) - R2`` where
        ``R2`` is the same operator applied to ``exp(w lam) (1 - exp(-w lam)) phi_d``.

    For ``z_0 == z_1 == z`` the split residual equals ``-exp(-z lam)`` times the
    conjugated one. ``lam`` must not depend on time.
    """
    phi_hat = _spacetime_field(phi_hat, grid, "phi_hat")
    phi_d = _spacetime_field(phi_d, grid, "phi_d")
    lam = _stationary_lambda(coeffs, grid)
    w = coeffs.weight(mu)
    dt, dx = grid.dt, grid.dx
    if form == "conjugated":
        K = -np.expm1(-w * lam)
        psi = np.exp(w * lam) * (phi_hat - K * phi_d)
        return -_dtt(psi, dt) + _dxx(psi, dx)
    if form == "split":
        z0, z1 = _spacetime_z(coeffs)
        inner = lam[1:-1, 1:-1]
        damp_t = np.exp(-z0 * inner)
        damp_x = np.exp(-z1 * inner)
        lifted = np.exp(w * lam) * phi_hat
        source = np.expm1(w * lam) * phi_d
        lhs = damp_t * _dtt(lifted, dt) - damp_x * _dxx(lifted, dx)
        r2 = damp_t * _dtt(source, dt) - damp_x * _dxx(source, dx)
        return lhs - r2
    raise ValueError(f"unknown form {form!r}; use 'conjugated' or 'split'")


def conservation_residual(A_hat: Sequence, A_d: Sequence, grid: SpacetimeGrid1p1,
                          coeffs: OperatorCoefficients) -> np.ndarray:
    """Dilated Lorenz condition on interior nodes (covariant components).

    ``-d_t(exp(w_0 lam)(A_hat_0 - K_0 A_d_0)) + d_x(exp(w_1 lam)(A_hat_1 - K_1 A_d_1))``

    Up to four components are accepted; in 1+1D the y and z components carry
    no derivative and do not contribute.
    """
    if not 2 <= len(A_hat) <= 4 or len(A_d) != len(A_hat):
        raise ShapeError("need matching A_hat and A_d with 2 to 4 components")
    lam = _stationary_lambda(coeffs, grid)
    terms = []
    for mu in (0, 1):
        w = coeffs.weight(mu)
        comp = _spacetime_field(A_hat[mu], grid, f"A_hat[{mu}]")
        dark = _spacetime_field(A_d[mu], grid, f"A_d[{mu}]")
        K = -np.expm1(-w * lam)
        terms.append(np.exp(w * lam) * (comp - K * dark))
    for mu in range(2, len(A_hat)):
        _spacetime_field(A_hat[mu], grid, f"A_hat[{mu}]")
        _spacetime_field(A_d[mu], grid, f"A_d[{mu}]")
    return -_dt(terms[0], grid.dt) + _dx(terms[1], grid.dx)
