"""Dilated (generalized Weyl integrable) geometry: affine bundle transforms,
dilated Laplace and wave operators, and a singularity-free charged particle."""

from .closed_forms import (
    ParticleModel,
    SolutionBundle,
    compose_solution,
    dirichlet_solution,
    extract_riemannian,
    null_dark_potential,
    particle_charge_density,
    particle_field,
    particle_potential,
)
from .core import (
    AffineKappaTensor,
    AffineMap,
    DilationScalar,
    MetricRep,
    WeylWeights,
    dilation_density,
    dilation_tensor,
    forward_transform,
    induced_metric,
    inverse_transform,
    kappa_lambda_roundtrip,
    kappa_tensor,
    metric_representations,
    observer_pairing,
)
from .delta import KappaProfile, RegularizedDelta
from .errors import (
    DomainError,
    NonInvertibleError,
    NonStationaryError,
    QuadratureError,
    ShapeError,
    SingularSystemError,
)
from .grids import CartesianGrid, RadialGrid, SpacetimeGrid1p1
from .operators import OperatorCoefficients
from .verifier import (
    ConvergenceStudy,
    VerificationReport,
    brute_force_elliptic_solve,
    convergence_order,
    run_property_suites,
    total_charge,
)

__version__ = "0.1.0"
