"""Reduced Schrodinger problems over deformation invariants."""

from .channels import Channel2D, Channel3D
from .inner import weighted_inner_product
from .operators1d import (
    Discretization1D,
    ReducedOperator1D,
    Spectrum,
    discretize_1d,
    solve_1d,
)
from .operators3d import ReducedOperator3D, interior_axis, reduced_kinetic_3d
from .planar import (
    bound_state_count,
    dalembert_polar_solver,
    dalembert_qpm_solver,
    peter_weyl_reduce_2d,
    qpm_total_levels,
    reduced_kinetic_2d,
    synthesize_2d,
)
from .wigner import AngularMatrices, angular_momentum_matrices
