from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import InvalidInputError
from ..storage import atomic_write_text, csv_text, read_csv

TERMINATION_REASONS = ("gradient-tolerance", "budget", "failure")


@dataclass
class IterateRecord:
    """One iteration: the point, its derivatives, and the trial step taken from it.

    ``lam`` is the scalar multiplier with ``M_k = lam I`` (nan when the method
    has no such multiplier, e.g. a negative-curvature step).  ``param`` holds
    the adaptive parameter in force (sigma, omega or Delta).
    """

    k: int
    x: np.ndarray
    f: float
    g: np.ndarray
    H: np.ndarray
    lam: float
    r: np.ndarray
    s: np.ndarray
    model_decrease: float
    actual_decrease: float
    rho: float
    success: bool
    param: float = math.nan
    flags: tuple = ()

    @property
    def gnorm(self) -> float:
        return float(np.linalg.norm(self.g))

    @property
    def step_norm(self) -> float:
        return float(np.linalg.norm(self.s))


@dataclass
class IterateTrace:
    method: str
    records: list = field(default_factory=list)
    termination_index: int = 0
    termination_reason: str = "budget"
    evaluations: int = 0
    linesearch_evaluations: int = 0
    final_x: Optional[np.ndarray] = None
    final_f: float = math.nan
    final_g: Optional[np.ndarray] = None
    message: str = ""

    @property
    def final_gnorm(self) -> float:
        return math.nan if self.final_g is None else float(np.linalg.norm(self.final_g))

    @property
    def successful(self) -> list:
        return [rec for rec in self.records if rec.success]

    def xs(self) -> np.ndarray:
        """Accepted iterates ``x_0 .. x_K`` (one row per distinct iterate)."""
        if not self.records:
            return np.array([] if self.final_x is None else [self.final_x])
        pts = [self.records[0].x] + [rec.x + rec.s for rec in self.records if rec.success]
        return np.array(pts)


def trace_header(dim: int) -> list:
    xs = ["x"] if dim == 1 else ["x1", "x2"]
    ss = ["s"] if dim == 1 else ["s1", "s2"]
    rs = ["r"] if dim == 1 else ["r1", "r2"]
    return ["k", *xs, "f", "gnorm", "lambda", "sigma_or_delta_or_omega", "step_norm", "rho", "success", *ss, *rs]


def trace_rows(trace: IterateTrace, dim: int) -> list:
    rows = []
    for rec in trace.records:
        rows.append(
            [rec.k, *rec.x, rec.f, rec.gnorm, rec.lam, rec.param, rec.step_norm, rec.rho, rec.success, *rec.s, *rec.r]
        )
    if trace.final_x is not None:
        blank = [None] * (2 * dim)
        rows.append(
            [trace.termination_index, *trace.final_x, trace.final_f, trace.final_gnorm, None, None, None, None, None, *blank]
        )
    return rows


def write_trace_csv(trace: IterateTrace, path, dim: int) -> None:
    """Write one row per iteration plus a final row for the terminal iterate (step fields empty)."""
    atomic_write_text(path, csv_text(trace_header(dim), trace_rows(trace, dim)))


@dataclass
class TraceRow:
    k: int
    x: np.ndarray
    f: float
    gnorm: float
    lam: float
    param: float
    s: Optional[np.ndarray]
    r: Optional[np.ndarray]
    rho: float
    success: Optional[bool]


def read_trace_csv(path) -> list:
    """Parse a method trace CSV into :class:`TraceRow` objects."""
    rows = read_csv(path)
    if not rows:
        raise InvalidInputError(f"{path}: empty trace")
    cols = rows[0].keys()
    dim = 2 if "x2" in cols else 1
    xk = ["x"] if dim == 1 else ["x1", "x2"]
    sk = ["s"] if dim == 1 else ["s1", "s2"]
    rk = ["r"] if dim == 1 else ["r1", "r2"]
    missing = {"k", "f", "gnorm", "lambda", "success", *xk} - set(cols)
    if missing:
        raise InvalidInputError(f"{path}: trace is missing columns {sorted(missing)}")

    def num(v):
        return math.nan if v in ("", None) else float(v)

    def vec(row, keys):
        if any(row.get(key) in ("", None) for key in keys):
            return None
        return np.array([float(row[key]) for key in keys])

    out = []
    for row in rows:
        succ = row.get("success", "")
        out.append(
            TraceRow(
                k=int(row["k"]),
                x=np.array([float(row[key]) for key in xk]),
                f=float(row["f"]),
                gnorm=float(row["gnorm"]),
                lam=num(row.get("lambda")),
                param=num(row.get("sigma_or_delta_or_omega")),
                s=vec(row, sk),
                r=vec(row, rk),
                rho=num(row.get("rho")),
                success=None if succ == "" else succ in ("1", "True", "true"),
            )
        )
    return out
