"""Isothermal two-phase van der Waals flow with relaxation to metastable and saturated states."""

from .equilibrium import (
    MixtureState,
    Region,
    SaturationData,
    SpinodalBounds,
    classify,
    maxwell_construction,
    mixture_free_energy,
    spinodal_bounds,
    volume_fractions,
)
from .hydro import BoundaryRule, ConservedCell, GridState, full_step
from .relaxation import (
    EquilibriumKind,
    RelaxationSettings,
    find_equilibrium,
    relax_step,
    source_rhs,
)
from .scenario import ScenarioConfig, load_config, run
from .thermo import (
    ThermoParams,
    chemical_potential,
    extensive_free_energy,
    pressure,
    pressure_derivative,
    specific_free_energy,
)

__version__ = "0.1.0"
from .kernels import backend_name

__all__ = [
    "BoundaryRule", "ConservedCell", "EquilibriumKind", "GridState", "MixtureState", "Region",
    "RelaxationSettings", "SaturationData", "ScenarioConfig", "SpinodalBounds", "ThermoParams",
    "backend_name", "chemical_potential", "classify", "extensive_free_energy", "find_equilibrium",
    "full_step", "load_config", "maxwell_construction", "mixture_free_energy", "pressure",
    "pressure_derivative", "relax_step", "run", "source_rhs", "specific_free_energy",
    "spinodal_bounds", "volume_fractions",
]
