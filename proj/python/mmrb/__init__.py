"""Micro-macro reduced-basis solver for the time-dependent radiative
transfer equation: asymptotic-preserving full-order solver, greedy offline
training with a positivity-preserving reduced spherical quadrature, and a
fast online reduced solver for moments and unseen angular directions."""

from mmrb._core import (
    AngularQuadrature,
    BoundaryCondition,
    DgOperators,
    GreedyConfig,
    GreedyReport,
    GreedyResult,
    MmrbError,
    Preset,
    PresetScale,
    ProblemDefinition,
    ReducedModel,
    RunMetrics,
    SpatialMesh,
    TimeGrid,
    assemble_operators,
    assemble_problem_operators,
    bench_run,
    build_mesh,
    diffusion_limit_solve,
    fom_solve,
    greedy_offline,
    lebedev,
    lebedev_available,
    load_model,
    load_quadrature,
    ls_quadrature_weights,
    nonneg_reduced_quadrature,
    predict_directions,
    preset,
    real_spherical_harmonic,
    rom_online,
    set_thread_count,
    stable_dt,
)

__all__ = [
    "AngularQuadrature",
    "BoundaryCondition",
    "DgOperators",
    "GreedyConfig",
    "GreedyReport",
    "GreedyResult",
    "MmrbError",
    "Preset",
    "PresetScale",
    "ProblemDefinition",
    "ReducedModel",
    "RunMetrics",
    "SpatialMesh",
    "TimeGrid",
    "assemble_operators",
    "assemble_problem_operators",
    "bench_run",
    "build_mesh",
    "diffusion_limit_solve",
    "fom_solve",
    "greedy_offline",
    "lebedev",
    "lebedev_available",
    "load_model",
    "load_quadrature",
    "ls_quadrature_weights",
    "nonneg_reduced_quadrature",
    "predict_directions",
    "preset",
    "real_spherical_harmonic",
    "rom_online",
    "set_thread_count",
    "stable_dt",
]
