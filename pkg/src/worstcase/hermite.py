"""Piecewise quintic Hermite objectives.

Each segment ``[x_k, x_{k+1}]`` carries a quintic ``p_k`` and the objective is
``p_k(x - x_k) + f_{k+1}`` there, so that ``p_k(0) = f_k - f_{k+1}`` and
``p_k(s_k) = 0``.  Outside the knot range the objective is constant.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidSegmentError
from .storage import atomic_write_text

CONTINUITY_TOL = 1e-10
# points this close (relative to max(1, |x_k|)) to a knot are evaluated at the knot
SNAP_TOL = 1e-10

# derivative coefficient multipliers: d^j/ds^j of s^i is FALLING[j][i] * s^(i-j)
_FALLING = np.array(
    [
        [1, 1, 1, 1, 1, 1],
        [0, 1, 2, 3, 4, 5],
        [0, 0, 2, 6, 12, 20],
        [0, 0, 0, 6, 24, 60],
    ],
    dtype=float,
)


@dataclass(frozen=True)
class Knot:
    x: float
    f: float
    g: float
    H: float

    def __post_init__(self):
        for name in ("x", "f", "g", "H"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidInputError(f"knot field {name}={v!r} is not finite")


@dataclass(frozen=True)
class QuinticSegment:
    """Quintic ``p(s) = sum c_i s^i`` on ``[0, length]`` plus an additive ``base``."""

    coeffs: tuple
    length: float
    base: float

    def __post_init__(self):
        if len(self.coeffs) != 6:
            raise InvalidInputError("a quintic segment needs exactly six coefficients")
        if not self.length > 0.0:
            raise InvalidSegmentError(f"segment length must be positive, got {self.length!r}")

    def __call__(self, s, order=0):
        """Evaluate the ``order``-th derivative of ``p(s) + base`` (base only for order 0)."""
        c = np.asarray(self.coeffs, dtype=float) * _FALLING[order]
        s = np.asarray(s, dtype=float)
        acc = np.zeros_like(s) + c[5]
        for i in range(4, order - 1, -1):
            acc = acc * s + c[i]
        if order == 0:
            acc = acc + self.base
        return acc if acc.ndim else float(acc)


def solve_hermite(left, right, length) -> QuinticSegment:
    """Quintic matching value, slope and curvature at both ends of a segment.

    ``left`` and ``right`` are ``(f, g, H)`` triples (or :class:`Knot`).
    The coefficients come from the closed forms of the 3x3 Hermite system,
    which stay accurate when ``length`` is small.
    """
    fl, gl, Hl = _triple(left)
    fr, gr, Hr = _triple(right)
    s = float(length)
    if not math.isfinite(s):
        raise InvalidInputError(f"segment length {length!r} is not finite")
    if not s > 0.0:
        raise InvalidSegmentError(f"segment length must be positive, got {length!r}")
    df, dg, dH = fr - fl, gr - gl, Hr - Hl
    s2, s3 = s * s, s * s * s
    s4, s5 = s3 * s, s3 * s2
    c3 = 10.0 * df / s3 - 4.0 * dg / s2 + dH / (2.0 * s) - 10.0 * gl / s2 - Hl / s
    c4 = -15.0 * df / s4 + 7.0 * dg / s3 - dH / s2 + 15.0 * gl / s3 + Hl / (2.0 * s2)
    c5 = 6.0 * df / s5 - 3.0 * dg / s4 + dH / (2.0 * s3) - 6.0 * gl / s4
    return QuinticSegment((fl - fr, gl, 0.5 * Hl, c3, c4, c5), s, fr)


def _triple(data):
    if isinstance(data, Knot):
        vals = (data.f, data.g, data.H)
    else:
        vals = tuple(float(v) for v in data)
        if len(vals) != 3:
            raise InvalidInputError("end data must be an (f, g, H) triple")
    for v in vals:
        if not math.isfinite(v):
            raise InvalidInputError(f"end data {vals!r} is not finite")
    return vals


@dataclass(frozen=True)
class PiecewiseObjective:
    """Immutable piecewise quintic objective, optionally paired for a separable 2-D sum.

    With a ``partner`` the objective is ``h(x, y) = self_1d(x) + partner(y)``.

    Derivatives (orders 1 to 3) at points within ``snap_tol * max(1, |x_k|)``
    of a knot ``x_k`` are evaluated at the knot itself; values never are, so
    the value stays exactly the interpolant.  Iterates that should land on a
    knot do so only up to rounding, and on these objectives a rounding error
    in the iterate is amplified from one step to the next through the
    derivatives; snapping them stops that growth.  ``snap_tol = 0`` disables
    it.
    """

    knots: tuple
    segments: tuple
    left_tail: float
    right_tail: float
    partner: Optional["PiecewiseObjective"] = None
    snap_tol: float = SNAP_TOL
    _xs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.knots) < 2 or len(self.segments) != len(self.knots) - 1:
            raise InvalidInputError("need at least two knots and one segment per knot pair")
        xs = np.array([k.x for k in self.knots], dtype=float)
        if np.any(np.diff(xs) <= 0.0):
            raise InvalidInputError("knot abscissae must be strictly increasing")
        if self.partner is not None and self.partner.partner is not None:
            raise InvalidInputError("partners must be one-dimensional")
        if not self.snap_tol >= 0.0:
            raise InvalidInputError(f"snap_tol must be non-negative, got {self.snap_tol!r}")
        object.__setattr__(self, "_xs", xs)

    @classmethod
    def from_knots(cls, knots: Sequence[Knot], partner=None, snap_tol=SNAP_TOL) -> "PiecewiseObjective":
        """Interpolate consecutive knots; tails take the end knot values."""
        knots = tuple(knots)
        segs = tuple(
            solve_hermite(a, b, b.x - a.x) for a, b in zip(knots[:-1], knots[1:])
        )
        return cls(knots, segs, knots[0].f, knots[-1].f, partner, snap_tol)

    @property
    def dim(self) -> int:
        return 1 if self.partner is None else 2

    @property
    def xs(self) -> np.ndarray:
        return self._xs

    # --- one-dimensional evaluation -------------------------------------------------
    def eval1d(self, x, order=0):
        """Evaluate the univariate part at scalar or array ``x``."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xa = np.atleast_1d(x)
        if self.snap_tol > 0.0 and order >= 1:
            xa = self._snap(xa)
        idx = np.searchsorted(self._xs, xa, side="right") - 1
        out = np.empty_like(xa)
        left = idx < 0
        right = idx >= len(self.segments)
        out[left] = self.left_tail if order == 0 else 0.0
        out[right] = self.right_tail if order == 0 else 0.0
        inside = ~(left | right)
        if np.any(inside):
            for j in np.unique(idx[inside]):
                sel = idx == j
                out[sel] = self.segments[j](xa[sel] - self._xs[j], order)
        return float(out[0]) if scalar else out

    def _snap(self, xa):
        xs = self._xs
        j = np.clip(np.searchsorted(xs, xa), 1, len(xs) - 1)
        near = np.where(np.abs(xa - xs[j - 1]) <= np.abs(xa - xs[j]), j - 1, j)
        knot = xs[near]
        close = np.abs(xa - knot) <= self.snap_tol * np.maximum(1.0, np.abs(knot))
        return np.where(close, knot, xa)

    # --- dimension-aware evaluation -------------------------------------------------
    def _split(self, x):
        if self.dim == 1:
            arr = np.asarray(x, dtype=float)
            if arr.ndim == 1 and arr.shape[0] == 1:
                return float(arr[0]), None
            if arr.ndim != 0:
                raise InvalidInputError("one-dimensional objective expects a scalar point")
            return float(arr), None
        arr = np.asarray(x, dtype=float).reshape(-1)
        if arr.shape[0] != 2:
            raise InvalidInputError(f"two-dimensional objective expects a pair, got {x!r}")
        return float(arr[0]), float(arr[1])

    def value(self, x) -> float:
        u, v = self._split(x)
        val = self.eval1d(u, 0)
        return val if v is None else val + self.partner.eval1d(v, 0)

    def gradient(self, x):
        u, v = self._split(x)
        if v is None:
            return self.eval1d(u, 1)
        return np.array([self.eval1d(u, 1), self.partner.eval1d(v, 1)])

    def hessian(self, x):
        u, v = self._split(x)
        if v is None:
            return self.eval1d(u, 2)
        return np.diag([self.eval1d(u, 2), self.partner.eval1d(v, 2)])

    def third(self, x):
        """Third derivative; for 2-D the diagonal pair (mixed terms vanish by separability)."""
        u, v = self._split(x)
        if v is None:
            return self.eval1d(u, 3)
        return np.array([self.eval1d(u, 3), self.partner.eval1d(v, 3)])


def evaluate(obj: PiecewiseObjective, x, order=0):
    """Value (order 0), gradient, Hessian or third derivative of ``obj`` at ``x``."""
    if order == 0:
        return obj.value(x)
    if order == 1:
        return obj.gradient(x)
    if order == 2:
        return obj.hessian(x)
    if order == 3:
        return obj.third(x)
    raise InvalidInputError(f"derivative order must be in 0..3, got {order!r}")


def prolongate(core: Sequence[Knot], left_value=1.0) -> list:
    """Add the two flat prolongation knots one unit left and right of ``core``."""
    first, last = core[0], core[-1]
    return (
        [Knot(first.x - 1.0, left_value, 0.0, 0.0)]
        + list(core)
        + [Knot(last.x + 1.0, last.f, 0.0, 0.0)]
    )


@dataclass
class ContinuityReport:
    max_mismatch: tuple  # relative mismatch of value, gradient, Hessian
    worst_knot: int
    worst_order: int
    tol: float
    passed: bool
    partner: Optional["ContinuityReport"] = None


def check_knot_continuity(obj: PiecewiseObjective, tol=CONTINUITY_TOL) -> ContinuityReport:
    """Compare left and right limits of value, gradient and Hessian at every knot.

    Mismatches are measured relative to ``max(|left|, |right|, 1)``.  The end
    knots are compared against the constant tails.
    """
    n = len(obj.knots)
    worst = [0.0, 0.0, 0.0]
    worst_knot, worst_order, worst_val = 0, 0, -1.0
    for j in range(n):
        for order in range(3):
            if j == 0:
                lv = obj.left_tail if order == 0 else 0.0
            else:
                seg = obj.segments[j - 1]
                lv = seg(seg.length, order)
            if j == n - 1:
                rv = obj.right_tail if order == 0 else 0.0
            else:
                rv = obj.segments[j](0.0, order)
            mis = abs(lv - rv) / max(abs(lv), abs(rv), 1.0)
            worst[order] = max(worst[order], mis)
            if mis > worst_val:
                worst_val, worst_knot, worst_order = mis, j, order
    part = check_knot_continuity(obj.partner, tol) if obj.partner is not None else None
    passed = max(worst) <= tol and (part is None or part.passed)
    return ContinuityReport(tuple(worst), worst_knot, worst_order, tol, passed, part)


# --- serialization -------------------------------------------------------------------

def _hex(v) -> str:
    return float(v).hex()


def to_dict(obj: PiecewiseObjective) -> dict:
    return {
        "dim": obj.dim,
        "knots": [{"x": _hex(k.x), "f": _hex(k.f), "g": _hex(k.g), "H": _hex(k.H)} for k in obj.knots],
        "segments": [
            {**{f"c{i}": _hex(c) for i, c in enumerate(s.coeffs)}, "length": _hex(s.length), "base": _hex(s.base)}
            for s in obj.segments
        ],
        "tails": {"left": _hex(obj.left_tail), "right": _hex(obj.right_tail)},
        "partner": to_dict(obj.partner) if obj.partner is not None else None,
        "snap_tol": _hex(obj.snap_tol),
    }


def from_dict(data: dict) -> PiecewiseObjective:
    try:
        knots = tuple(
            Knot(*(float.fromhex(k[n]) for n in ("x", "f", "g", "H"))) for k in data["knots"]
        )
        segs = tuple(
            QuinticSegment(
                tuple(float.fromhex(s[f"c{i}"]) for i in range(6)),
                float.fromhex(s["length"]),
                float.fromhex(s["base"]),
            )
            for s in data["segments"]
        )
        partner = data.get("partner")
        obj = PiecewiseObjective(
            knots,
            segs,
            float.fromhex(data["tails"]["left"]),
            float.fromhex(data["tails"]["right"]),
            from_dict(partner) if partner else None,
            float.fromhex(data["snap_tol"]) if "snap_tol" in data else SNAP_TOL,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed objective document: {exc}") from exc
    if int(data.get("dim", obj.dim)) != obj.dim:
        raise InvalidInputError("declared dim does not match the partner structure")
    return obj


def dumps(obj: PiecewiseObjective) -> str:
    return json.dumps(to_dict(obj), indent=1, sort_keys=True)


def loads(text: str) -> PiecewiseObjective:
    return from_dict(json.loads(text))


def save(obj: PiecewiseObjective, path) -> None:
    atomic_write_text(path, dumps(obj) + "\n")


def load(path) -> PiecewiseObjective:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
