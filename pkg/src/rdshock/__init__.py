"""Exact shocked solutions of a reaction-diffusion equation with negative diffusivity."""

from rdshock.errors import (
    ConfigError,
    ConvergenceError,
    InfeasibleShockError,
    LevelNotCrossedError,
    NoRootError,
    NumericalError,
    PoleError,
    RDShockError,
    StencilError,
)
from rdshock.model import DiffusivityModel, SolutionParams, make_params, validate_params
from rdshock.shock import ShockPair, apply_shock, find_shock, shock_by_continuity, shock_by_equal_area
from rdshock.solution import evaluate_solution, sample_profile, track_boundary

__version__ = "0.1.0"
