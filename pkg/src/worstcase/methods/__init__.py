"""Reference second-order (and steepest-descent) methods in dimensions 1 and 2."""
from .config import METHODS, MethodConfig
from .driver import GRAD_SLACK, FunctionObjective, gradient_converged, run
from .steps import (
    IterateState,
    Step,
    goldstein_holds,
    goldstein_search,
    gqt_iterate,
    gqt_multiplier,
    newton_iterate,
    newton_step,
    reg_iterate,
    reg_model_decrease,
    reg_step_bound,
    rw_direction,
    rw_iterate,
    sd_goldstein_iterate,
    tr_iterate,
)
from .subproblems import solve_reg_subproblem, solve_trs
from .trace import IterateRecord, IterateTrace, read_trace_csv, write_trace_csv

__all__ = [
    "METHODS",
    "MethodConfig",
    "GRAD_SLACK",
    "FunctionObjective",
    "gradient_converged",
    "run",
    "IterateState",
    "Step",
    "goldstein_holds",
    "goldstein_search",
    "gqt_iterate",
    "gqt_multiplier",
    "newton_iterate",
    "newton_step",
    "reg_iterate",
    "reg_model_decrease",
    "reg_step_bound",
    "rw_direction",
    "rw_iterate",
    "sd_goldstein_iterate",
    "tr_iterate",
    "solve_reg_subproblem",
    "solve_trs",
    "IterateRecord",
    "IterateTrace",
    "read_trace_csv",
    "write_trace_csv",
]
