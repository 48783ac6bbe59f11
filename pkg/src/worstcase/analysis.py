"""Checks on traces and objectives: class membership, smoothness surrogates,
iteration counts and complexity slopes."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import IncompleteTraceError, InvalidConfigError, InvalidInputError
from .generators import (
    MAlphaConfig,
    gen_crs,
    gen_malpha,
    gen_newton2d,
    gen_sd,
    predict_iterations,
    rate,
    termination_tolerance,
)
from .hermite import PiecewiseObjective
from .linalg import lambda_min, norm
from .methods import MethodConfig, run
from .methods.driver import gradient_converged

MALPHA_CHECKS = ("residual", "psd", "multiplier", "step")
CRS_CHECKS = ("lambda-bounds", "slope", "srule2", "rho")
# relative slack for every inequality checked on floating-point data
CHECK_RTOL = 1e-10


def _le(a: float, b: float) -> bool:
    """``a <= b`` up to ``CHECK_RTOL * max(1, |a|, |b|)``."""
    return a <= b + CHECK_RTOL * max(1.0, abs(a), abs(b))


@dataclass
class MembershipReport:
    """Per-iteration verdicts for a set of named conditions."""

    checks: dict
    iterations: list
    params: dict = field(default_factory=dict)
    global_checks: dict = field(default_factory=dict)

    @property
    def first_violation(self) -> dict:
        out = {}
        for name, verdicts in self.checks.items():
            bad = [k for k, ok in zip(self.iterations, verdicts) if not ok]
            out[name] = bad[0] if bad else None
        return out

    @property
    def first_violating_iteration(self) -> Optional[int]:
        idx = [v for v in self.first_violation.values() if v is not None]
        return min(idx) if idx else None

    @property
    def passed(self) -> bool:
        return all(all(v) for v in self.checks.values()) and all(self.global_checks.values())

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "first_violation": self.first_violation,
            "first_violating_iteration": self.first_violating_iteration,
            "global_checks": self.global_checks,
            "params": self.params,
            "iterations": len(self.iterations),
        }


def _records(trace):
    recs = list(trace.records)
    for rec in recs:
        if rec.lam is None or math.isnan(rec.lam):
            raise IncompleteTraceError(f"iteration {rec.k} has no multiplier M_k = lambda_k I")
        if rec.r is None or rec.s is None:
            raise IncompleteTraceError(f"iteration {rec.k} lacks its step or residual")
    return recs


def default_kappa_lambda(trace, alpha: float, kappa_rg: float = 0.0) -> float:
    """``2 kbar^(1/(1+alpha)) (1+kappa_rg)`` with ``kbar = max(1, sup lambda_k / ||s_k||^alpha)``.

    ``kbar`` is the measured ratio between the multiplier and the step length;
    it is floored at 1 because the implication from that ratio to the
    multiplier bound is stated for ratios above 1.
    """
    kbar = 1.0
    for rec in _records(trace):
        sn = norm(rec.s)
        if sn > 0.0:
            kbar = max(kbar, rec.lam / sn ** alpha)
    return 2.0 * kbar ** (1.0 / (1.0 + alpha)) * (1.0 + kappa_rg)


def check_malpha_membership(trace, alpha: float, kappa_rg: float = 0.0, kappa_rs: float = math.inf,
                            kappa_lambda: Optional[float] = None, kappa_s: float = 1.0) -> MembershipReport:
    """Evaluate the four defining conditions of the second-order class at every iteration.

    ``residual``: ``||r_k|| <= min(kappa_rg ||g_k||, kappa_rs ||M_k s_k||)``;
    ``psd``: ``M_k >= 0`` and ``H_k + M_k >= 0``;
    ``multiplier``: ``lambda_min(H_k) + lambda_min(M_k) <= kappa_lambda max(|lambda_min(H_k)|, ||g_k||^(a/(1+a)))``;
    ``step``: ``||s_k|| <= kappa_s``.
    ``M_k = lambda_k I``.  ``kappa_s = 1`` is the value valid on the
    generated families, not a general constant.
    """
    recs = _records(trace)
    if kappa_lambda is None:
        kappa_lambda = default_kappa_lambda(trace, alpha, kappa_rg)
    verdicts = {name: [] for name in MALPHA_CHECKS}
    for rec in recs:
        lam = rec.lam
        gn = norm(rec.g)
        sn = norm(rec.s)
        lmin = lambda_min(rec.H)
        rn = norm(rec.r)
        bound = kappa_rg * gn
        if math.isfinite(kappa_rs):
            bound = min(bound, kappa_rs * lam * sn)
        verdicts["residual"].append(_le(rn, bound))
        verdicts["psd"].append(_le(0.0, lam) and _le(0.0, lmin + lam))
        rhs = kappa_lambda * max(abs(lmin), gn ** (alpha / (1.0 + alpha)))
        verdicts["multiplier"].append(_le(lmin + lam, rhs))
        verdicts["step"].append(_le(sn, kappa_s))
    params = {"alpha": alpha, "kappa_rg": kappa_rg, "kappa_rs": kappa_rs,
              "kappa_lambda": kappa_lambda, "kappa_s": kappa_s}
    return MembershipReport(verdicts, [rec.k for rec in recs], params)


def check_crs_membership(trace, sigma_bar: float, kappa_rg: float = 0.0, eta: float = 0.5,
                         kappa1: float = 0.0, kappa2: float = 0.0) -> MembershipReport:
    """Evaluate the accurate cubic-regularization-type step conditions at every iteration.

    ``lambda-bounds``: ``0 <= lambda_k <= sigma_bar ||s_k||`` (thresholds are
    reset after every successful step and the traces checked here have no
    unsuccessful ones); ``slope``: ``s.r <= s.(H + lambda I).s / 2 + kappa1 ||s||^3 / 2``;
    ``srule2``: ``||r|| <= min(kappa_rg ||g||, lambda ||s|| + kappa2 ||s||^2)``;
    ``rho``: the step is accepted exactly when ``(f_k - f(x_k + s_k)) / ||s_k||^3 >= eta``.
    The global condition ``2 eta (1 + kappa_rg)^3 <= 1`` is reported as ``eta-cond``.
    """
    recs = _records(trace)
    verdicts = {name: [] for name in CRS_CHECKS}
    for rec in recs:
        lam = rec.lam
        s, r = rec.s, rec.r
        sn = norm(s)
        verdicts["lambda-bounds"].append(_le(0.0, lam) and _le(lam, sigma_bar * sn))
        lhs = float(s @ r)
        rhs = 0.5 * float(s @ rec.H @ s) + 0.5 * lam * sn * sn + 0.5 * kappa1 * sn ** 3
        verdicts["slope"].append(_le(lhs, rhs))
        verdicts["srule2"].append(_le(norm(r), min(kappa_rg * norm(rec.g), lam * sn + kappa2 * sn * sn)))
        rho = rec.actual_decrease / sn ** 3 if sn > 0.0 else -math.inf
        verdicts["rho"].append(bool(rec.success) == bool(rho >= eta))
    eta_cond = 2.0 * eta * (1.0 + kappa_rg) ** 3
    params = {"sigma_bar": sigma_bar, "kappa_rg": kappa_rg, "eta": eta, "kappa1": kappa1, "kappa2": kappa2,
              "eta_cond_value": eta_cond}
    return MembershipReport(verdicts, [rec.k for rec in recs], params, {"eta-cond": eta_cond <= 1.0})


def crs_ratios(trace) -> np.ndarray:
    """``(f_k - f(x_k + s_k)) / ||s_k||^3`` for every record."""
    return np.array([rec.actual_decrease / norm(rec.s) ** 3 for rec in trace.records])


# --- smoothness surrogates -----------------------------------------------------------------

@dataclass
class SmoothnessReport:
    alpha: float
    holder_sample: float  # sup of |H(x)-H(y)| / |x-y|^alpha over sampled pairs
    holder_certificate: float  # 2^(1-alpha) max_k segment_bounds[k]; dominates holder_sample
    segment_bounds: np.ndarray  # (6|c3|s^2 + 24|c4|s^3 + 60|c5|s^4) / s^(1+alpha)
    hessian_bounds: np.ndarray  # 2|c2| + (6|c3|s^2 + 12|c4|s^3 + 20|c5|s^4) / s
    sup_hessian: float
    f_min: float
    f_max: float
    partner: Optional["SmoothnessReport"] = None
    path_bounds: Optional[np.ndarray] = None  # 2-D only: Hessian Lipschitz constant on each path segment

    @property
    def max_segment_bound(self) -> float:
        return float(np.max(self.segment_bounds))

    @property
    def max_hessian_bound(self) -> float:
        return float(np.max(self.hessian_bounds))

    @property
    def objective_segment_bound(self) -> float:
        """Hölder bound of the whole objective; the 2-D Hessian is diagonal, so the larger coordinate bound."""
        own = self.max_segment_bound
        return own if self.partner is None else max(own, self.partner.max_segment_bound)

    @property
    def objective_hessian_bound(self) -> float:
        own = self.max_hessian_bound
        return own if self.partner is None else max(own, self.partner.max_hessian_bound)

    @property
    def range_bound(self) -> float:
        """``sup |f|`` over the samples."""
        return max(abs(self.f_min), abs(self.f_max))

    @property
    def certificate_dominates(self) -> bool:
        return self.holder_sample <= self.holder_certificate * (1.0 + 1e-9)

    def to_dict(self) -> dict:
        out = {
            "alpha": self.alpha,
            "holder_sample": self.holder_sample,
            "holder_certificate": self.holder_certificate,
            "certificate_dominates": self.certificate_dominates,
            "max_segment_bound": self.max_segment_bound,
            "max_hessian_bound": self.max_hessian_bound,
            "objective_segment_bound": self.objective_segment_bound,
            "objective_hessian_bound": self.objective_hessian_bound,
            "sup_hessian": self.sup_hessian,
            "range": [self.f_min, self.f_max],
        }
        if self.path_bounds is not None:
            out["max_path_bound"] = float(np.max(self.path_bounds))
        if self.partner is not None:
            out["partner"] = self.partner.to_dict()
        return out


def segment_holder_bounds(obj: PiecewiseObjective, alpha: float) -> np.ndarray:
    out = []
    for seg in obj.segments:
        c, s = np.abs(seg.coeffs), seg.length
        out.append((6 * c[3] * s ** 2 + 24 * c[4] * s ** 3 + 60 * c[5] * s ** 4) / s ** (1.0 + alpha))
    return np.array(out)


def segment_hessian_bounds(obj: PiecewiseObjective) -> np.ndarray:
    out = []
    for seg in obj.segments:
        c, s = np.abs(seg.coeffs), seg.length
        out.append(2 * c[2] + (6 * c[3] * s ** 2 + 12 * c[4] * s ** 3 + 20 * c[5] * s ** 4) / s)
    return np.array(out)


def third_derivative_sup(seg) -> float:
    """``6|c3| + 24|c4| s + 60|c5| s^2``, a bound on ``|p'''|`` over the segment."""
    c, s = np.abs(seg.coeffs), seg.length
    return 6 * c[3] + 24 * c[4] * s + 60 * c[5] * s * s


def _estimate_1d(obj: PiecewiseObjective, alpha: float, points_per_segment: int) -> SmoothnessReport:
    n = int(points_per_segment)
    if n < 1:
        raise InvalidConfigError("need at least one sample point per segment")
    t = np.linspace(0.0, 1.0, n + 1)
    xs, hs, fs = [], [], []
    for xk, seg in zip(obj.xs[:-1], obj.segments):
        loc = t * seg.length
        xs.append(xk + loc)
        hs.append(np.atleast_1d(seg(loc, 2)))
        fs.append(np.atleast_1d(seg(loc, 0)))
    sample = 0.0
    for j in range(len(xs)):
        lo = j
        hi = min(j + 1, len(xs) - 1)
        px = np.concatenate(xs[lo:hi + 1])
        ph = np.concatenate(hs[lo:hi + 1])
        dx = np.abs(px[:, None] - px[None, :])
        dh = np.abs(ph[:, None] - ph[None, :])
        mask = dx > 0.0
        if np.any(mask):
            sample = max(sample, float(np.max(dh[mask] / dx[mask] ** alpha)))
    allf = np.concatenate(fs + [np.array([obj.left_tail, obj.right_tail])])
    bounds = segment_holder_bounds(obj, alpha)
    return SmoothnessReport(
        alpha=alpha,
        holder_sample=sample,
        holder_certificate=2.0 ** (1.0 - alpha) * float(np.max(bounds)),
        segment_bounds=bounds,
        hessian_bounds=segment_hessian_bounds(obj),
        sup_hessian=float(max(np.max(np.abs(h)) for h in hs)),
        f_min=float(np.min(allf)),
        f_max=float(np.max(allf)),
    )


def path_hessian_bounds(obj: PiecewiseObjective) -> np.ndarray:
    """Lipschitz constant of the 2-D Hessian along each straight path segment.

    Along ``z(t) = z_k + t d`` with ``d = (s_k, s^u_k) / ||(s_k, s^u_k)||`` the
    diagonal Hessian changes by at most ``max(T_k s_k, T^u_k s^u_k) / ||(s_k, s^u_k)||``
    per unit length, ``T`` being the third-derivative bound of each coordinate.
    Only the segments traversed by the iterates are included.
    """
    px, py = obj, obj.partner
    # core segments exclude the two prolongation segments at either end
    segs_x = px.segments[1:-1]
    segs_y = py.segments[1:-1]
    out = []
    for sx, sy in zip(segs_x, segs_y):
        n = math.hypot(sx.length, sy.length)
        out.append(max(third_derivative_sup(sx) * sx.length, third_derivative_sup(sy) * sy.length) / n)
    return np.array(out)


def estimate_smoothness(obj: PiecewiseObjective, alpha: float, points_per_segment: int = 64) -> SmoothnessReport:
    """Sampled and analytic smoothness surrogates of ``obj``.

    Samples ``points_per_segment + 1`` equispaced points on every segment
    (knots included) and takes Hölder quotients of the second derivative over
    pairs within a segment or two adjacent segments.  The analytic
    certificate ``2^(1-alpha) max_k B_k`` bounds every such quotient.  For a
    2-D objective the report covers the ``x`` part, ``partner`` the ``y``
    part, and ``path_bounds`` the Hessian along the iterate path.
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidConfigError(f"alpha must lie in [0, 1], got {alpha!r}")
    rep = _estimate_1d(obj, alpha, points_per_segment)
    if obj.partner is not None:
        rep.partner = _estimate_1d(obj.partner, alpha, points_per_segment)
        rep.f_min += rep.partner.f_min
        rep.f_max += rep.partner.f_max
        rep.path_bounds = path_hessian_bounds(obj)
    return rep


# --- counts and slopes -------------------------------------------------------------------

@dataclass
class SlopeFit:
    slope: float
    intercept: float
    points: int
    max_ratio: float = math.nan
    min_ratio: float = math.nan
    predicted_slope: float = math.nan

    def to_dict(self) -> dict:
        return asdict(self)


def fit_complexity_slope(results, alpha: Optional[float] = None) -> SlopeFit:
    """Least-squares fit of ``log(count)`` against ``log(1/eps)``.

    ``results`` holds ``(eps, count)`` pairs with at least three distinct
    ``eps``.  With ``alpha`` given, the ratios ``count / ceil(eps^-(2+a)/(1+a))``
    and the predicted slope are reported too.
    """
    pts = [(float(e), float(c)) for e, c in results]
    if len({e for e, _ in pts}) < 3:
        raise InvalidConfigError("a slope fit needs at least three distinct eps values")
    if any(not 0.0 < e < 1.0 or c <= 0.0 for e, c in pts):
        raise InvalidConfigError("eps must lie in (0, 1) and counts must be positive")
    X = np.log([1.0 / e for e, _ in pts])
    Y = np.log([c for _, c in pts])
    slope, intercept = np.polyfit(X, Y, 1)
    fit = SlopeFit(float(slope), float(intercept), len(pts))
    if alpha is not None:
        ratios = [c / predict_iterations(e, alpha) for e, c in pts]
        fit.max_ratio, fit.min_ratio = max(ratios), min(ratios)
        fit.predicted_slope = rate(alpha)
    return fit


MATCHING = {
    "malpha": ("newton", "reg2alpha", "gqt", "trust_region", "royer_wright"),
    "newton2d": ("newton",),
    "sd": ("sd_goldstein",),
    "crs": ("newton", "reg2alpha", "trust_region", "royer_wright"),
}


@dataclass
class Setup:
    objective: PiecewiseObjective
    ground_truth: object  # GroundTruthTrace, or a pair for the 2-D family
    config: MethodConfig
    x0: np.ndarray
    tol: float
    predicted: int


def matching_setup(family: str, method: str, eps: float, alpha: float = 1.0, preset: Optional[str] = None,
                   **method_overrides) -> Setup:
    """Objective, ground truth and method configuration under which ``method`` follows the family exactly.

    ``preset="figure"`` on the general family uses ``lambda_k = |g_k|^(a/(1+a))/10``
    and Newton with the matching multiplier.  Regularization runs use a
    constant ``sigma = 1``; GQT runs a constant ``omega = 3``.
    """
    if family not in MATCHING:
        raise InvalidConfigError(f"unknown family {family!r}")
    if method not in MATCHING[family]:
        raise InvalidConfigError(
            f"{method!r} has no matching construction on {family!r}; expected one of {MATCHING[family]}"
        )
    base = {"method": method, "eps": eps}
    if family == "malpha":
        if method == "newton":
            if preset == "figure":
                obj, gt = gen_malpha(MAlphaConfig(eps, alpha, lambda_rule="figure"))
                base.update(alpha=alpha, lambda_coef=0.1)
            else:
                obj, gt = gen_malpha(MAlphaConfig(eps, alpha))
                base.update(alpha=alpha)
        elif method == "reg2alpha":
            obj, gt = gen_malpha(MAlphaConfig(eps, alpha, lambda_rule="reg:1"))
            base.update(alpha=alpha, sigma0=1.0, gamma_dec=1.0)
        elif method == "gqt":
            if alpha == 0.0:
                raise InvalidConfigError("GQT needs alpha > 0")
            obj, gt = gen_malpha(MAlphaConfig(eps, alpha, kappa_lambda=3.0, lambda_rule="gqt:3"))
            base.update(alpha=alpha, omega0=3.0, omega_min=3.0)
        elif method == "trust_region":
            obj, gt = gen_malpha(MAlphaConfig(eps, alpha))
            base.update(delta0=1.0)
        else:  # royer_wright follows the alpha = 1 family
            if alpha != 1.0:
                raise InvalidConfigError("the Royer-Wright construction uses alpha = 1")
            obj, gt = gen_malpha(MAlphaConfig(eps, 1.0))
        x0 = np.zeros(1)
        predicted = predict_iterations(eps, alpha)
    elif family == "newton2d":
        obj, gt = gen_newton2d(eps)
        base.update(alpha=0.0)
        x0 = np.zeros(2)
        predicted = predict_iterations(eps, 0.0)
    elif family == "sd":
        obj, gt = gen_sd(eps)
        x0 = np.zeros(1)
        predicted = predict_iterations(eps, 0.0)
    else:
        crs = {"sigma_bar": 1.0, "kappa_rg": 0.1, "eta": 0.3}
        if method == "reg2alpha":
            obj, gt = gen_crs(eps, lambda_rule="reg:1", **crs)
            base.update(alpha=1.0, sigma0=1.0, gamma_dec=1.0)
        else:
            obj, gt = gen_crs(eps, **crs)
        x0 = np.zeros(1)
        predicted = predict_iterations(eps, 1.0)
    base.update(method_overrides)
    base.setdefault("budget", max(10 * predicted, 100))
    cfg = MethodConfig(**base)
    return Setup(obj, gt, cfg, x0, termination_tolerance(family, eps), predicted)


@dataclass
class LowerBoundReport:
    family: str
    method: str
    eps: float
    alpha: float
    count: int
    predicted: int
    termination_reason: str
    final_gnorm: float
    tol: float
    prior_above_tol: bool
    max_x_error: float
    evaluations: int
    trace: object = field(default=None, repr=False)
    objective: object = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return (
            self.count == self.predicted
            and self.termination_reason == "gradient-tolerance"
            and self.prior_above_tol
            and gradient_converged(self.final_gnorm, self.tol)
        )

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k not in ("trace", "objective")}
        out["passed"] = self.passed
        return out


def ground_truth_points(gt) -> np.ndarray:
    if isinstance(gt, tuple):
        return np.column_stack([gt[0].x, gt[1].x])
    return np.asarray(gt.x)[:, None]


def trajectory_error(trace, gt) -> float:
    """Largest ``|x_k - x_k^true| / max(1, |x_k^true|)`` over the common iterates."""
    xs = trace.xs()
    ref = ground_truth_points(gt)
    n = min(len(xs), len(ref))
    if n == 0:
        return math.nan
    diff = np.abs(xs[:n] - ref[:n]) / np.maximum(1.0, np.abs(ref[:n]))
    return float(np.max(diff))


def verify_lower_bound_run(family: str, method: str, eps: float, alpha: float = 1.0, **kwargs) -> LowerBoundReport:
    """Run ``method`` on its matching ``family`` and compare the stopping index with the prediction exactly."""
    setup = matching_setup(family, method, eps, alpha, **kwargs)
    trace = run(setup.config, setup.objective, setup.x0, tol=setup.tol)
    prior = all(not gradient_converged(rec.gnorm, setup.tol) for rec in trace.records)
    a = {"newton2d": 0.0, "sd": 0.0, "crs": 1.0}.get(family, alpha)
    return LowerBoundReport(
        family=family,
        method=method,
        eps=eps,
        alpha=a,
        count=trace.termination_index,
        predicted=setup.predicted,
        termination_reason=trace.termination_reason,
        final_gnorm=trace.final_gnorm,
        tol=setup.tol,
        prior_above_tol=prior,
        max_x_error=trajectory_error(trace, setup.ground_truth),
        evaluations=trace.evaluations,
        trace=trace,
        objective=setup.objective,
    )


@dataclass
class ComplexityReport:
    """Aggregated JSON-ready verdicts of a run or a verification."""

    runs: list = field(default_factory=list)
    slope: Optional[SlopeFit] = None
    membership: dict = field(default_factory=dict)
    smoothness: Optional[SmoothnessReport] = None

    @property
    def passed(self) -> bool:
        ok = all(r.passed for r in self.runs)
        ok = ok and all(m.passed for m in self.membership.values())
        if self.smoothness is not None:
            ok = ok and self.smoothness.certificate_dominates
        return ok

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "runs": [r.to_dict() for r in self.runs],
            "slope": self.slope.to_dict() if self.slope else None,
            "membership": {k: m.to_dict() for k, m in self.membership.items()},
            "smoothness": self.smoothness.to_dict() if self.smoothness else None,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=1, sort_keys=True)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def trace_from_csv(path, obj: PiecewiseObjective):
    """Rebuild iterate records from a trace CSV and the objective it was run on.

    Accepts both the method trace schema and the ground-truth schema.
    Gradients and Hessians are re-evaluated on ``obj``; a missing residual is
    recomputed as ``(H + lambda I) s + g``; a missing success flag means the
    step was accepted.  The terminal row (no step) ends the trace.
    """
    from .methods.trace import IterateRecord, IterateTrace
    from .storage import read_csv

    rows = read_csv(path)
    if not rows:
        raise InvalidInputError(f"{path}: empty trace")
    cols = set(rows[0])
    dim = obj.dim
    xk = ["x"] if dim == 1 else ["x1", "x2"]
    sk = ["s"] if dim == 1 else ["s1", "s2"]
    rk = ["r"] if dim == 1 else ["r1", "r2"]
    missing = {"k", "f", "lambda", *xk, *sk} - cols
    if missing:
        raise InvalidInputError(f"{path}: trace is missing columns {sorted(missing)}")

    def vec(row, keys):
        if any(row.get(key, "") == "" for key in keys):
            return None
        return np.array([float(row[key]) for key in keys])

    point = (lambda v: float(v[0])) if dim == 1 else (lambda v: v)
    trace = IterateTrace("from-csv")
    for row in rows:
        x = vec(row, xk)
        s = vec(row, sk)
        g = np.atleast_1d(obj.gradient(point(x))).astype(float)
        H = np.atleast_2d(obj.hessian(point(x))).astype(float)
        f = float(row["f"])
        if s is None:
            trace.final_x, trace.final_f, trace.final_g = x, f, g
            trace.termination_index = int(row["k"])
            trace.termination_reason = "gradient-tolerance"
            break
        lam = math.nan if row.get("lambda", "") == "" else float(row["lambda"])
        r = vec(row, rk) if set(rk) <= cols else None
        if r is None:
            r = (H + (0.0 if math.isnan(lam) else lam) * np.eye(dim)) @ s + g
        succ = row.get("success", "")
        actual = f - float(obj.value(point(x + s)))
        trace.records.append(IterateRecord(
            k=int(row["k"]), x=x, f=f, g=g, H=H, lam=lam, r=r, s=s,
            model_decrease=math.nan, actual_decrease=actual, rho=math.nan,
            success=True if succ == "" else succ in ("1", "True", "true"),
        ))
    trace.evaluations = len(trace.records)
    return trace
