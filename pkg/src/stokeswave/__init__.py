"""Steady deep-water Stokes waves: solver, conformal field, functionals, particle paths."""

from .errors import (
    DegenerateJacobian,
    FunctionalEvaluationError,
    MissingSurfacePoint,
    NoConvergence,
    NonpositiveValue,
    NotInFluid,
    StepTooLarge,
    StokesWaveError,
    TooFewPoints,
)
from .field import (
    conformal_map,
    check_governing_equations,
    field_dump,
    invert_map,
    pressure,
    streamline,
    surface_profile,
    velocity,
)
from .functionals import FunctionalCurve, default_p_grid, functional_sweep
from .properties import PropertyReport, VerifyConfig, verify_all
from .solver import (
    StokesWave,
    WaveParameters,
    continuation_sweep,
    load_wave,
    save_wave,
    solve_stokes_wave,
)
from .trajectories import drift, particle_path, streamline_period_by_simulation

__all__ = [name for name in dir() if not name.startswith("_")]
