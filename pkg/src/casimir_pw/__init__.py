"""Casimir interaction of two spheres in the plane-wave basis.

Proximity-force approximation, diffractive and geometric corrections, PEMC
closed forms and the resummed x**(3/2) term for perfect conductors.
"""
from .asymptotics import (
    BETA_3_2_DIFF, CriticalPointError, beta_coefficients, bessel_roundtrip_sum, delta_crit,
    e1_closed, e_pfa_closed, ntlo_energy, ntlo_fit,
)
from .energy import (
    EnergyBreakdown, Geometry, MaterialPair, casimir_energy_pfa, casimir_energy_with_corrections,
    diff_density, diff_density_general, geo_density, pfa_density,
)
from .materials import (
    PEC, PEMC, PMC, Dielectric, PemcPair, SpectralPoint, plane_reflection_dielectric,
    plane_reflection_pemc, roundtrip_matrix,
)
from .quadrature import ConvergenceError
from .specfun import angular_functions, bernoulli_poly, bessel_half_integer, bessel_k2, polylog

__version__ = "0.1.0"

__all__ = [
    "BETA_3_2_DIFF", "ConvergenceError", "CriticalPointError", "Dielectric", "EnergyBreakdown",
    "Geometry", "MaterialPair", "PEC", "PEMC", "PMC", "PemcPair", "SpectralPoint",
    "angular_functions", "bernoulli_poly", "bessel_half_integer", "bessel_k2",
    "bessel_roundtrip_sum", "beta_coefficients", "casimir_energy_pfa",
    "casimir_energy_with_corrections", "delta_crit", "diff_density", "diff_density_general",
    "e1_closed", "e_pfa_closed", "geo_density", "ntlo_energy", "ntlo_fit", "pfa_density",
    "plane_reflection_dielectric", "plane_reflection_pemc", "polylog", "roundtrip_matrix",
]
