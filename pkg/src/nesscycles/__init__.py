"""Cycle decompositions of non-equilibrium steady states of finite Markov processes."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .cycles import Cycle, CycleCatalog, canonicalize, cycle_counts, enumerate_cycles
from .decomposition import (
    CycleDecomposition,
    db_current_split,
    decompose,
    enumerate_decompositions,
    reconstruct_fluxes,
    sample_decompositions,
)
from .markov import (
    FluxField,
    MarkovProcess,
    dt_reconstruct,
    equilibrium_potential,
    is_detailed_balanced,
    is_dynamically_reversible,
    master_rhs,
    path_weight,
    stationary_distribution,
    steady_fluxes,
    validate_process,
)
from .observables import (
    EdgeObservable,
    cycle_average,
    cycle_observable,
    entropy_production,
    entropy_production_cycles,
    flux_average,
    thermo_quantities,
)
from .simulator import empirical_fluxes, project_kirchhoff, simulate
from .transform import build_cycle_graph, cycle_potential

__all__ = [
    "BACKEND", "Cycle", "CycleCatalog", "CycleDecomposition", "EdgeObservable", "FluxField",
    "MarkovProcess", "build_cycle_graph", "canonicalize", "cycle_average", "cycle_counts",
    "cycle_observable", "cycle_potential", "db_current_split", "decompose", "dt_reconstruct",
    "empirical_fluxes", "entropy_production", "entropy_production_cycles",
    "enumerate_cycles", "enumerate_decompositions", "equilibrium_potential", "flux_average",
    "is_detailed_balanced", "is_dynamically_reversible", "master_rhs", "path_weight",
    "project_kirchhoff", "reconstruct_fluxes", "sample_decompositions", "simulate",
    "stationary_distribution", "steady_fluxes", "thermo_quantities", "validate_process",
]
