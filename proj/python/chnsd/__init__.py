"""Phase-field simulator for two-phase flow in coupled free-flow and porous layers."""

from ._core import (
    Config,
    ConduitPosition,
    ConfigError,
    DomainLayout,
    Mesh,
    MeshError,
    Simulation,
    SolverError,
    build_layered_mesh,
    convergence_order,
    double_well_F,
    double_well_f,
    load_config,
    mixture,
    parse_config,
    refine_uniform,
    run_experiment,
)

__all__ = [
    "Config",
    "ConduitPosition",
    "ConfigError",
    "DomainLayout",
    "Mesh",
    "MeshError",
    "Simulation",
    "SolverError",
    "build_layered_mesh",
    "convergence_order",
    "double_well_F",
    "double_well_f",
    "load_config",
    "mixture",
    "parse_config",
    "refine_uniform",
    "run_experiment",
]
