"""Adversarial objectives forcing second-order methods to their worst-case iteration counts."""
from . import analysis, generators, hermite, methods
from .generators import (
    MAlphaConfig,
    GroundTruthTrace,
    gen_crs,
    gen_malpha,
    gen_newton2d,
    gen_sd,
    predict_iterations,
)
from .hermite import Knot, PiecewiseObjective, QuinticSegment, check_knot_continuity, evaluate, solve_hermite
from .methods import MethodConfig, run

__version__ = "0.1.0"
