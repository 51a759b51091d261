"""Classical and quantum mechanics of affinely rigid bodies."""

from .errors import (
    AffineBodyError,
    DegenerateFlag,
    DegenerateLegendre,
    Diverged,
    DomainError,
    InvalidLabel,
    InvalidModel,
    NumericalFailure,
    OrientationError,
    ParseError,
    ShapeError,
    SingularConfiguration,
    Unconverged,
    ValidationError,
)
from .geometry import (
    DeformationTensors,
    MetricPair,
    PolarForm,
    TwoPolarForm,
    deformation_invariants,
    dilatation_split,
    green_cauchy,
    measure_weights,
    polar_decompose,
    two_polar_decompose,
)
from .kinematics import (
    AffineVelocity,
    PhasePoint,
    SpinVorticity,
    TwoPolarMomenta,
    affine_velocity,
    casimir,
    spin_vorticity,
    trace_split,
    two_polar_momenta,
)
from .brackets import bracket_matrix, poisson_bracket
from .models import InertiaModel, inverse_legendre, kinetic_energy, kinetic_hamiltonian, legendre
from .potentials import potential_from_spec
from .dynamics import (
    Boundedness,
    ConservationReport,
    Trajectory,
    classify_2d,
    geodesic_exponential,
    hamilton_rhs,
    hamiltonian,
    integrate,
)

__version__ = "0.1.0"
