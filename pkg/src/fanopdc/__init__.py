"""Broadband parametric downconversion in dispersive 1D waveguides.

The package treats a monochromatic pump photon coupled to the band of
signal photon pairs as a discrete level embedded in a continuum.  The
analytic side diagonalizes that discrete-continuum problem exactly
(bound state + scattering states) and evaluates pump dynamics, biphoton
correlations, coupled two-pump spectra and the three-photon variant by
oscillatory quadrature.  The numeric side builds the corresponding
finite sparse Hamiltonians and propagates them exactly, which is what
the analytics are validated against throughout the test suite.

All quantities are dimensionless: energies in units of the collective
rate kappa, times in 1/kappa, with the inverse window measure epsilon
controlling the discretization.  `params.normalize` maps physical
waveguide numbers onto these units.
"""

from fanopdc.params import PhysicalParams, NormalizedParams, normalize, l_pdc, shg_mean_field
from fanopdc.continuum import (
    MesonState,
    ContinuumWeight,
    meson_solution,
    continuum_weight,
    pump_amplitude,
    pump_population_series,
    asymptotic_population,
    find_depletion_point,
)
from fanopdc.discrete import (
    DiscreteHamiltonian,
    EvolutionResult,
    build_single_photon_hamiltonian,
    default_p_max,
    evolve,
)
from fanopdc.quadrature import QuadratureError
from fanopdc.biphoton import (
    CorrelationField,
    signal_norm,
    spatial_correlation,
    spectral_correlation,
)
from fanopdc.coupled import (
    CoupledParams,
    bound_states,
    build_coupled_discrete,
    coupled_pump_population,
    detect_bic,
    excitation_spectrum,
)
from fanopdc.multiphoton import (
    Basis,
    BasisState,
    build_hamiltonian,
    enumerate_basis,
    evolve_sparse,
    pump_photon_number,
)
from fanopdc.tpg import (
    TpgParams,
    band_edge,
    build_tpg_hamiltonian,
    tpg_bound_state,
    tpg_discrete_population,
    tpg_pump_population,
    tpg_upper_state,
)
from fanopdc.krylov import PropagationError
from fanopdc._kernels import compiled_available

__all__ = [
    "PhysicalParams",
    "NormalizedParams",
    "normalize",
    "l_pdc",
    "shg_mean_field",
    "MesonState",
    "ContinuumWeight",
    "meson_solution",
    "continuum_weight",
    "pump_amplitude",
    "pump_population_series",
    "asymptotic_population",
    "find_depletion_point",
    "DiscreteHamiltonian",
    "EvolutionResult",
    "build_single_photon_hamiltonian",
    "default_p_max",
    "evolve",
    "QuadratureError",
    "CorrelationField",
    "signal_norm",
    "spatial_correlation",
    "spectral_correlation",
    "CoupledParams",
    "bound_states",
    "build_coupled_discrete",
    "coupled_pump_population",
    "detect_bic",
    "excitation_spectrum",
    "Basis",
    "BasisState",
    "build_hamiltonian",
    "enumerate_basis",
    "evolve_sparse",
    "pump_photon_number",
    "TpgParams",
    "band_edge",
    "build_tpg_hamiltonian",
    "tpg_bound_state",
    "tpg_discrete_population",
    "tpg_pump_population",
    "tpg_upper_state",
    "PropagationError",
    "compiled_available",
]

__version__ = "0.1.0"
