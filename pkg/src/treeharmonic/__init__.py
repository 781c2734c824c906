"""Harmonic analysis on homogeneous trees."""

from .tree_core import (
    BallFunction,
    RadialProfile,
    TreeParams,
    ball_size,
    cylinder_measure,
    distance,
    embed_radial,
    height,
    radialize,
    sphere_size,
)
from .spectral import (
    SpectralPoint,
    c_func,
    find_unimodular_pair,
    gamma,
    phi_closed,
    phi_profile,
    phi_recur,
    spectrum_membership,
)
from .operators import (
    BoundaryData,
    LatticeFunction,
    laplacian,
    laplacian_iter,
    laplacian_lattice,
    laplacian_radial,
    poisson,
    poisson_field,
    random_boundary_data,
    refine,
)
from .transforms import abel_coefficients, fourier_coefficients, spherical_ft
from .norms import lorentz_norm, lp_norm, radial_growth_curve, weak_quasinorm

__version__ = "0.1.0"
