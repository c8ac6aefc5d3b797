"""Dimension-configurable Landau equation simulator and verification harness.

Simulates the spatially inhomogeneous Landau equation with moderately soft
potentials (kernel exponent gamma in (-2, 0)) on periodic-in-x, truncated-in-v
grids, and measures the transport-dominated decay predictions: dispersion of
velocity averages, collision-coefficient decay, null-structure gain, f-sharp
convergence, and distance from the traveling global Maxwellian family.
"""

from .errors import LandauError
from .kernel import KernelParams, kernel_matrix, kernel_divergence, kernel_c
from .phase_state import DistributionField, Grid, WeightSpec

__all__ = [
    "LandauError",
    "KernelParams",
    "kernel_matrix",
    "kernel_divergence",
    "kernel_c",
    "DistributionField",
    "Grid",
    "WeightSpec",
]

__version__ = "0.1.0"
