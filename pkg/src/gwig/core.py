"""Affine bundle transforms, induced metrics and observer representations.

Everything here is pointwise linear algebra on small dense arrays (d <= 8).
The affinity parameter ``kappa`` lives in [0, 1) and is tied to the Weyl
dilation ``lam`` by ``exp(-lam) = 1 - kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, NonInvertibleError, ShapeError, SingularSystemError

__all__ = [
    "KAPPA_EPS",
    "KAPPA_MAX",
    "AffineKappaTensor",
    "AffineMap",
    "DilationScalar",
    "Direction",
    "MetricRep",
    "Observer",
    "WeylWeights",
    "check_kappa",
    "dilation_density",
    "dilation_tensor",
    "forward_transform",
    "induced_metric",
    "inverse_transform",
    "kappa_lambda_roundtrip",
    "kappa_tensor",
    "kappa_to_lambda",
    "lambda_to_kappa",
    "metric_representations",
    "observer_pairing",
]

KAPPA_EPS = 1e-12
KAPPA_MAX = 1.0 - KAPPA_EPS
MAX_DIM = 8


class Direction(str, Enum):
    KAPPA_TO_LAMBDA = "kappa_to_lambda"
    LAMBDA_TO_KAPPA = "lambda_to_kappa"


class Observer(str, Enum):
    """Riemannian (scaled dual frame) or Weylian (standard dual frame)."""

    R = "R"
    W = "W"


def check_kappa(kappa) -> float:
    """Validate a scalar affinity parameter and return it as a float."""
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa < 0.0 or kappa > KAPPA_MAX:
        raise DomainError(f"kappa must lie in [0, 1 - {KAPPA_EPS:g}], got {kappa!r}")
    return kappa


def _vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be a vector, got shape {arr.shape}")
    if arr.size < 1 or arr.size > MAX_DIM:
        raise ShapeError(f"{name} must have length 1..{MAX_DIM}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def _square(g, name: str = "g") -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ShapeError(f"{name} must be a square matrix, got shape {g.shape}")
    if g.shape[0] < 1 or g.shape[0] > MAX_DIM:
        raise ShapeError(f"{name} must be d x d with 1 <= d <= {MAX_DIM}")
    if not np.all(np.isfinite(g)):
        raise DomainError(f"{name} has non-finite entries")
    return g


def _same_length(*pairs):
    sizes = {arr.shape[-1] for arr, _ in pairs}
    if len(sizes) != 1:
        names = ", ".join(f"{n}={a.shape}" for a, n in pairs)
        raise ShapeError(f"dimension mismatch: {names}")


def _one_minus_kappa_pow(kappa: float, weights: np.ndarray) -> np.ndarray:
    # (1 - kappa)**weights without the cancellation of 1 - (1 - kappa)
    return np.exp(weights * np.log1p(-kappa))


def kappa_to_lambda(kappa) -> float:
    return float(-np.log1p(-check_kappa(kappa)))


def lambda_to_kappa(lam) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0.0:
        raise DomainError(f"lambda must be finite and >= 0, got {lam!r}")
    return float(-np.expm1(-lam))


def kappa_lambda_roundtrip(x, direction: Direction | str) -> float:
    """Map kappa to lambda = -ln(1 - kappa), or lambda back to kappa."""
    direction = Direction(direction)
    if direction is Direction.KAPPA_TO_LAMBDA:
        return kappa_to_lambda(x)
    return lambda_to_kappa(x)


@dataclass(frozen=True)
class DilationScalar:
    kappa: float
    lam: float

    def __post_init__(self):
        kappa = check_kappa(self.kappa)
        if not np.isfinite(self.lam) or self.lam < 0.0:
            raise DomainError(f"lambda must be finite and >= 0, got {self.lam!r}")
        if not np.isclose(np.exp(-self.lam), 1.0 - kappa, rtol=1e-14, atol=1e-15):
            raise DomainError("kappa and lambda are inconsistent: exp(-lambda) != 1 - kappa")

    @classmethod
    def from_kappa(cls, kappa) -> "DilationScalar":
        return cls(float(kappa), kappa_to_lambda(kappa))

    @classmethod
    def from_lambda(cls, lam) -> "DilationScalar":
        return cls(lambda_to_kappa(lam), float(lam))


@dataclass(frozen=True)
class WeylWeights:
    """Per-axis dilation exponents ``z`` and per-component field weights ``w``."""

    z: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        z = _vector(self.z, "z")
        w = _vector(self.w, "w")
        _same_length((z, "z"), (w, "w"))
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)

    @classmethod
    def uniform(cls, d: int, z: float = 1.0, w: float = 1.0) -> "WeylWeights":
        return cls(np.full(d, float(z)), np.full(d, float(w)))

    @property
    def d(self) -> int:
        return self.z.size


@dataclass(frozen=True)
class AffineKappaTensor:
    """Diagonal affinity ``K`` together with the fixed point it contracts towards.

    Entries equal to one are allowed (the collapsed limit) but make the
    transform non-invertible.
    """

    entries: np.ndarray
    fixed_point: np.ndarray | None = None

    def __post_init__(self):
        entries = _vector(self.entries, "entries")
        fp = np.zeros_like(entries) if self.fixed_point is None else _vector(self.fixed_point, "fixed_point")
        _same_length((entries, "entries"), (fp, "fixed_point"))
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "fixed_point", fp)

    @property
    def d(self) -> int:
        return self.entries.size


def kappa_tensor(kappa, w, fixed_point=None) -> AffineKappaTensor:
    """Build ``K_j = 1 - (1 - kappa)**w_j`` for the given weights."""
    kappa = check_kappa(kappa)
    w = _vector(w, "w")
    entries = -np.expm1(w * np.log1p(-kappa))
    return AffineKappaTensor(entries, fixed_point)


def forward_transform(v, K: AffineKappaTensor) -> np.ndarray:
    """Apply ``(1 - K) v + K v_d`` componentwise."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (K.d,):
        raise ShapeError(f"vector of shape {v.shape} does not match K of dimension {K.d}")
    return (1.0 - K.entries) * v + K.entries * K.fixed_point


def inverse_transform(v_hat, K: AffineKappaTensor) -> np.ndarray:
    v_hat = np.asarray(v_hat, dtype=float)
    if v_hat.shape[-1:] != (K.d,):
        raise ShapeError(f"vector of shape {v_hat.shape} does not match K of dimension {K.d}")
    if np.any(K.entries == 1.0):
        raise NonInvertibleError("K has an entry equal to 1; the fibre has collapsed to the fixed point")
    return (v_hat - K.entries * K.fixed_point) / (1.0 - K.entries)


@dataclass(frozen=True)
class AffineMap:
    """``x -> linear @ x + offset``."""

    linear: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        linear = _square(self.linear, "linear")
        offset = np.asarray(self.offset, dtype=float)
        if offset.shape != (linear.shape[0],):
            raise ShapeError(f"offset shape {offset.shape} does not match linear part {linear.shape}")
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "offset", offset)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != self.offset.shape:
            raise ShapeError(f"cannot apply a {self.offset.size}-dimensional map to shape {x.shape}")
        return x @ self.linear.T + self.offset

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """Return ``self o inner``."""
        return AffineMap(self.linear @ inner.linear, self.linear @ inner.offset + self.offset)

    def inverse(self) -> "AffineMap":
        try:
            inv = np.linalg.inv(self.linear)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("affine map has a singular linear part") from exc
        return AffineMap(inv, -inv @ self.offset)


def induced_metric(g, kappa, w, v_d) -> AffineMap:
    """Metric induced on the transformed fibres, ``f_alpha o g o f_v^-1``.

    The dark 1-form is ``alpha_d = g(v_d)`` and both fibres share the weights
    ``w``. With ``D = diag((1 - kappa)**w)`` the result has linear part
    ``D g D^-1`` and offset ``K g v_d - D g D^-1 K v_d``; the offset vanishes
    when the weights are equal or ``g`` is diagonal.
    """
    g = _square(g)
    kappa = check_kappa(kappa)
    w = _vector(w, "w")
    v_d = _vector(v_d, "v_d")
    _same_length((g, "g"), (w, "w"), (v_d, "v_d"))
    if np.linalg.cond(g) > 1e14:
        raise SingularSystemError("g is singular", rcond=1.0 / np.linalg.cond(g))

    D = _one_minus_kappa_pow(kappa, w)
    K = -np.expm1(w * np.log1p(-kappa))
    linear = D[:, None] * g / D[None, :]
    offset = K * (g @ v_d) - linear @ (K * v_d)
    return AffineMap(linear, offset)


def dilation_tensor(kappa, z) -> np.ndarray:
    """``chi = diag((1 - kappa)**z_j)`` as a dense diagonal matrix."""
    kappa = check_kappa(kappa)
    z = _vector(z, "z")
    return np.diag(_one_minus_kappa_pow(kappa, z))


@dataclass(frozen=True)
class MetricRep:
    """Base metric and the two observer representations of the dilated metric.

    ``g_hat_W[i, j] = chi_j g[i, j]`` and ``g_hat_R[i, j] = g[i, j] / chi_i``.
    Neither is symmetrised.
    """

    g: np.ndarray
    g_hat_W: np.ndarray
    g_hat_R: np.ndarray


def _check_symmetric(g: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(g))))
    if not np.allclose(g, g.T, rtol=0.0, atol=1e-12 * scale):
        raise DomainError("g must be symmetric")


def metric_representations(g, kappa, z) -> MetricRep:
    g = _square(g)
    _check_symmetric(g)
    kappa = check_kappa(kappa)
    z = _vector(z, "z")
    _same_length((g, "g"), (z, "z"))
    chi = _one_minus_kappa_pow(kappa, z)
    return MetricRep(g=g.copy(), g_hat_W=g * chi[None, :], g_hat_R=g / chi[:, None])


def observer_pairing(alpha_hat, v_hat, kappa, z, observer: Observer | str) -> float:
    """Scalar ``alpha_hat(v_hat)`` as measured by the R or W observer.

    The W observer sees the covector components scaled by ``chi_j``, so its
    pairing goes to zero as kappa -> 1 while the R pairing tends to the
    pairing of the fixed points.
    """
    alpha_hat = _vector(alpha_hat, "alpha_hat")
    v_hat = _vector(v_hat, "v_hat")
    z = _vector(z, "z")
    _same_length((alpha_hat, "alpha_hat"), (v_hat, "v_hat"), (z, "z"))
    kappa = check_kappa(kappa)
    if Observer(observer) is Observer.R:
        return float(np.dot(alpha_hat, v_hat))
    chi = _one_minus_kappa_pow(kappa, z)
    return float(np.dot(chi * alpha_hat, v_hat))


def dilation_density(kappa, z) -> float:
    """``sigma = (1 - kappa)**(-sum(z) / 2)``, so that ``sigma**2 |det chi| = 1``."""
    kappa = check_kappa(kappa)
    z = _vector(z, "z")
    return float(np.exp(-0.5 * np.sum(z) * np.log1p(-kappa)))
