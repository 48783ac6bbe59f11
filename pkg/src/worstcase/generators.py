"""Adversarial objective families and the iterate sequences they force.

Each generator prescribes values, slopes and curvatures ``(f_k, g_k, H_k)`` at
the iterates ``x_k`` a method is meant to visit, then joins them by quintic
Hermite segments.  The returned :class:`GroundTruthTrace` is the sequence the
matching method must reproduce.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .errors import GeneratorInconsistencyError, InvalidConfigError
from .hermite import Knot, PiecewiseObjective, prolongate
from .methods.steps import gqt_multiplier
from .methods.trace import IterateRecord, IterateTrace
from .storage import atomic_write_text, csv_text

FAMILIES = ("malpha", "newton2d", "sd", "crs")

# relative slack when testing a rule's output against its admissible interval
ADMISSIBLE_SLACK = 1e-12
# a power within this relative distance of an integer is taken to be that integer
_SNAP = 1e-9

Rule = Union[str, float, Callable]


def rate(alpha: float) -> float:
    """Exponent ``(2+alpha)/(1+alpha)`` of the iteration count."""
    return (2.0 + alpha) / (1.0 + alpha)


def predict_iterations(eps: float, alpha: float) -> int:
    """``ceil(eps^(-(2+alpha)/(1+alpha)))``.

    The power is computed in floating point, where exact integers such as
    ``0.05^-2 = 400`` come out as ``399.99999999999994``; values within a
    relative ``1e-9`` of an integer are snapped to it before the ceiling.
    """
    if not 0.0 < eps < 1.0:
        raise InvalidConfigError(f"eps must lie in (0, 1), got {eps!r}")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidConfigError(f"alpha must lie in [0, 1], got {alpha!r}")
    val = eps ** (-rate(alpha))
    near = round(val)
    if abs(val - near) <= _SNAP * val:
        return int(near)
    return int(math.ceil(val))


def termination_tolerance(family: str, eps: float) -> float:
    """Gradient-norm threshold at which a run on ``family`` stops.

    For the separable 2-D family both coordinates shrink together and the
    final gradient is ``(eps, eps^2)`` in magnitude, so its norm
    ``eps sqrt(1 + eps^2)`` is the threshold; every other family uses ``eps``.
    """
    if family == "newton2d":
        return eps * math.sqrt(1.0 + eps * eps)
    return eps


# --- rules for theta_k and lambda_k ------------------------------------------------------

def _parse_rule(rule: Rule):
    """Split a rule into ``(name, parameter)``; callables and numbers pass through."""
    if callable(rule):
        return "callable", rule
    if isinstance(rule, (int, float)):
        return "const", float(rule)
    text = str(rule).strip().lower()
    name, _, arg = text.partition(":")
    if name in ("newton", "zero", "exact", "figure"):
        if arg:
            raise InvalidConfigError(f"rule {rule!r} takes no parameter")
        return name, None
    if name in ("const", "reg", "gqt"):
        try:
            return name, float(arg)
        except ValueError:
            raise InvalidConfigError(f"rule {rule!r} needs a numeric parameter, e.g. {name}:1") from None
    raise InvalidConfigError(f"unknown rule {rule!r}")


@dataclass
class MAlphaConfig:
    """Parameters of the general second-order family.

    ``lambda_rule`` gives the multiplier ``lambda_k``: ``"newton"`` (zero),
    ``"figure"`` (``|g_k|^(a/(1+a))/10``), ``"const:c"``, ``"reg:sigma"``
    (``sigma |s_k|^alpha``, the regularization multiplier), ``"gqt:omega"``
    (the GQT shift) or a callable ``(k, f_k, g_k) -> lambda_k``.
    ``theta_rule`` gives the step scale ``theta_k``: ``"exact"`` solves
    ``(H_k + lambda_k) s_k = -g_k`` with zero residual, ``"const:c"`` or a
    callable ``(k, f_k, g_k) -> theta_k``.
    """

    eps: float
    alpha: float = 1.0
    kappa_rg: float = 0.0
    kappa_lambda: float = 2.0
    theta_rule: Rule = "exact"
    lambda_rule: Rule = "newton"

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise InvalidConfigError(f"eps must lie in (0, 1), got {self.eps!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidConfigError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if not 0.0 <= self.kappa_rg < 1.0:
            raise InvalidConfigError(f"kappa_rg must lie in [0, 1), got {self.kappa_rg!r}")
        if not self.kappa_lambda > 1.0:
            raise InvalidConfigError(f"kappa_lambda must exceed 1, got {self.kappa_lambda!r}")
        lname, _ = _parse_rule(self.lambda_rule)
        tname, _ = _parse_rule(self.theta_rule)
        if lname == "exact":
            raise InvalidConfigError("'exact' is a theta rule, not a lambda rule")
        if tname in ("newton", "zero", "figure", "reg", "gqt"):
            raise InvalidConfigError(f"{self.theta_rule!r} is not a theta rule")
        if lname == "gqt" and self.alpha == 0.0:
            raise InvalidConfigError("the GQT multiplier needs alpha > 0")

    @property
    def theta_bounds(self):
        return (1.0 - self.kappa_rg) / self.kappa_lambda, 1.0 + self.kappa_rg

    def lambda_upper(self, f: float) -> float:
        a = self.alpha
        return 4.0 * (self.kappa_lambda - 1.0) * self.eps ** (a / (1.0 + a)) * f * f


@dataclass
class GroundTruthTrace:
    """Prescribed iterates: arrays over ``k = 0..K`` (``s``, ``lam``, ``theta``, ``r`` over ``0..K-1``)."""

    family: str
    eps: float
    alpha: float
    x: np.ndarray
    f: np.ndarray
    g: np.ndarray
    H: np.ndarray
    s: np.ndarray
    lam: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    kappa_rg: float = 0.0
    kappa_lambda: float = math.nan
    extra: dict = field(default_factory=dict)

    @property
    def k_target(self) -> int:
        return len(self.f) - 1

    def model_decrease(self, k: int, beta: float = 1.0) -> float:
        """``f_k - m_k(s_k)`` with ``m_k(s) = f_k + g_k s + s (H_k + beta lambda_k) s / 2``."""
        s = self.s[k]
        lam = 0.0 if math.isnan(self.lam[k]) else self.lam[k]
        return -(self.g[k] * s + 0.5 * s * (self.H[k] + beta * lam) * s)

    def decrease_ratios(self, beta: float = 1.0) -> np.ndarray:
        """``(f_k - f_{k+1}) / (f_k - m_k(s_k))`` for every step."""
        return np.array(
            [(self.f[k] - self.f[k + 1]) / self.model_decrease(k, beta) for k in range(self.k_target)]
        )

    def to_iterate_trace(self, method: str = "ground-truth") -> IterateTrace:
        """Iterate records of a method following this trace exactly (every step successful)."""
        trace = IterateTrace(method)
        for k in range(self.k_target):
            mdec = self.model_decrease(k)
            act = self.f[k] - self.f[k + 1]
            trace.records.append(
                IterateRecord(
                    k=k,
                    x=np.array([self.x[k]]),
                    f=float(self.f[k]),
                    g=np.array([self.g[k]]),
                    H=np.array([[self.H[k]]]),
                    lam=float(self.lam[k]),
                    r=np.array([self.r[k]]),
                    s=np.array([self.s[k]]),
                    model_decrease=float(mdec),
                    actual_decrease=float(act),
                    rho=float(act / mdec) if mdec != 0.0 else math.nan,
                    success=True,
                )
            )
        trace.termination_index = self.k_target
        trace.termination_reason = "gradient-tolerance"
        trace.evaluations = self.k_target
        K = self.k_target
        trace.final_x = np.array([self.x[K]])
        trace.final_f = float(self.f[K])
        trace.final_g = np.array([self.g[K]])
        return trace

    def csv_rows(self):
        rows = []
        for k in range(self.k_target + 1):
            step = k < self.k_target
            rows.append(
                [
                    k,
                    self.x[k],
                    self.f[k],
                    self.g[k],
                    self.H[k],
                    self.lam[k] if step else None,
                    self.theta[k] if step else None,
                    self.s[k] if step else None,
                ]
            )
        return rows

    def write_csv(self, path) -> None:
        """Columns ``k, x, f, g, H, lambda, theta, s``; the last row has no step."""
        atomic_write_text(path, csv_text(["k", "x", "f", "g", "H", "lambda", "theta", "s"], self.csv_rows()))


def combine_traces(tx: GroundTruthTrace, ty: GroundTruthTrace, method="ground-truth") -> IterateTrace:
    """2-D iterate records of a separable pair of ground-truth traces."""
    trace = IterateTrace(method)
    K = tx.k_target
    for k in range(K):
        s = np.array([tx.s[k], ty.s[k]])
        g = np.array([tx.g[k], ty.g[k]])
        H = np.diag([tx.H[k], ty.H[k]])
        mdec = -(float(g @ s) + 0.5 * float(s @ H @ s))
        act = (tx.f[k] + ty.f[k]) - (tx.f[k + 1] + ty.f[k + 1])
        trace.records.append(
            IterateRecord(
                k=k,
                x=np.array([tx.x[k], ty.x[k]]),
                f=float(tx.f[k] + ty.f[k]),
                g=g,
                H=H,
                lam=0.0,
                r=np.zeros(2),
                s=s,
                model_decrease=mdec,
                actual_decrease=float(act),
                rho=float(act / mdec),
                success=True,
            )
        )
    trace.termination_index = K
    trace.termination_reason = "gradient-tolerance"
    trace.evaluations = K
    trace.final_x = np.array([tx.x[K], ty.x[K]])
    trace.final_f = float(tx.f[K] + ty.f[K])
    trace.final_g = np.array([tx.g[K], ty.g[K]])
    return trace


# --- construction helpers ----------------------------------------------------------------

def _objective(x, f, g, H, partner=None) -> PiecewiseObjective:
    core = [Knot(float(a), float(b), float(c), float(d)) for a, b, c, d in zip(x, f, g, H)]
    return PiecewiseObjective.from_knots(prolongate(core, left_value=1.0), partner=partner)


def _check(value, lo, hi, what, k):
    slack = ADMISSIBLE_SLACK * max(1.0, abs(lo), abs(hi))
    if not (lo - slack <= value <= hi + slack) or not math.isfinite(value):
        raise GeneratorInconsistencyError(
            f"{what} at k={k} is {value!r}, outside the admissible interval [{lo!r}, {hi!r}]"
        )


def _positions(s):
    x = np.zeros(len(s) + 1)
    if len(s):
        x[1:] = np.cumsum(s)
    return x


def _sequences(eps, alpha, K):
    k = np.arange(K + 1, dtype=float)
    f = 1.0 - 0.5 * k * eps ** rate(alpha)
    g = -2.0 * eps * f
    H = 4.0 * eps ** (alpha / (1.0 + alpha)) * f * f
    return f, g, H


def _reg_fixed_point(sigma, alpha, g, H):
    """Multiplier solving ``lam = sigma |s|^alpha`` with ``s = |g| / (H + lam)``."""
    if alpha == 0.0:
        return sigma
    # phi is increasing in lam; phi(0) < 0 < phi(sigma |g/H|^alpha)
    phi = lambda lam: lam - sigma * (abs(g) / (H + lam)) ** alpha  # noqa: E731
    hi = sigma * (abs(g) / H) ** alpha
    if hi == 0.0:
        return 0.0
    return brentq(phi, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def _multipliers(cfg, k, f, g, H, step_of_theta):
    """Multiplier for step ``k`` under ``cfg.lambda_rule``."""
    name, arg = _parse_rule(cfg.lambda_rule)
    a = cfg.alpha
    if name in ("newton", "zero"):
        return 0.0
    if name == "figure":
        return abs(g) ** (a / (1.0 + a)) / 10.0
    if name == "const":
        return arg
    if name == "callable":
        return float(arg(k, f, g))
    if name == "gqt":
        return gqt_multiplier([g], [[H]], arg, a)
    if name == "reg":
        tname, _ = _parse_rule(cfg.theta_rule)
        if tname == "exact":
            return _reg_fixed_point(arg, a, g, H)
        theta = _theta(cfg, k, f, g, H, None)
        return arg * step_of_theta(theta) ** a
    raise InvalidConfigError(f"unknown lambda rule {cfg.lambda_rule!r}")


def _theta(cfg, k, f, g, H, lam):
    name, arg = _parse_rule(cfg.theta_rule)
    if name == "exact":
        return H / (H + lam)
    if name == "const":
        return arg
    if name == "callable":
        return float(arg(k, f, g))
    raise InvalidConfigError(f"unknown theta rule {cfg.theta_rule!r}")


# --- the four families -------------------------------------------------------------------

def gen_malpha(cfg: MAlphaConfig):
    """Objective on which a method with the configured multipliers stops after exactly ``k_target`` steps.

    Returns ``(objective, GroundTruthTrace)``.  A rule producing a multiplier
    or step scale outside its admissible interval raises
    :class:`GeneratorInconsistencyError`.
    """
    eps, a = cfg.eps, cfg.alpha
    K = predict_iterations(eps, a)
    f, g, H = _sequences(eps, a, K)
    unit = eps ** (1.0 / (1.0 + a))
    tlo, thi = cfg.theta_bounds
    s = np.empty(K)
    lam = np.empty(K)
    theta = np.empty(K)
    r = np.empty(K)
    for k in range(K):
        lam[k] = _multipliers(cfg, k, f[k], g[k], H[k], lambda th: th * unit / (2.0 * f[k]))
        _check(lam[k], 0.0, cfg.lambda_upper(f[k]), "lambda", k)
        theta[k] = _theta(cfg, k, f[k], g[k], H[k], lam[k])
        _check(theta[k], tlo, thi, "theta", k)
        s[k] = theta[k] * unit / (2.0 * f[k])
        r[k] = (H[k] + lam[k]) * s[k] + g[k]
        _check(abs(r[k]), 0.0, cfg.kappa_rg * abs(g[k]), "|r|", k)
    x = _positions(s)
    obj = _objective(x, f, g, H)
    gt = GroundTruthTrace("malpha", eps, a, x, f, g, H, s, lam, theta, r, cfg.kappa_rg, cfg.kappa_lambda)
    return obj, gt


def gen_newton2d(eps: float, nu_rule: Rule = "const:1", kappa_rg: float = 0.0):
    """Separable 2-D objective ``f(x) + u(y)`` on which Newton stops after ``ceil(eps^-2)`` steps.

    The ``x`` part is the ``alpha = 0`` Newton member of the general family;
    the ``y`` part has ``u_k = 1 - k eps^2 / 2``, ``g_k = -2 eps^2 u_k``,
    ``H_k = 4 eps^2 u_k^2`` and steps ``nu_k / (2 u_k)``.  Returns
    ``(objective, (trace_x, trace_y))``.
    """
    if not 0.0 < eps < 1.0:
        raise InvalidConfigError(f"eps must lie in (0, 1), got {eps!r}")
    if not 0.0 <= kappa_rg < 1.0:
        raise InvalidConfigError(f"kappa_rg must lie in [0, 1), got {kappa_rg!r}")
    _, tx = gen_malpha(MAlphaConfig(eps, 0.0, kappa_rg=kappa_rg))
    K = tx.k_target
    k = np.arange(K + 1, dtype=float)
    u = 1.0 - 0.5 * k * eps * eps
    gu = -2.0 * eps * eps * u
    Hu = 2.0 * np.abs(gu) * u
    name, arg = _parse_rule(nu_rule)
    if name not in ("const", "callable"):
        raise InvalidConfigError(f"nu rule must be 'const:c' or a callable, got {nu_rule!r}")
    nu = np.empty(K)
    su = np.empty(K)
    ru = np.empty(K)
    for j in range(K):
        nu[j] = arg if name == "const" else float(arg(j, u[j], gu[j]))
        _check(nu[j], 1.0 - kappa_rg, 1.0 + kappa_rg, "nu", j)
        su[j] = nu[j] / (2.0 * u[j])
        ru[j] = Hu[j] * su[j] + gu[j]
    y = _positions(su)
    ty = GroundTruthTrace("newton2d-y", eps, 0.0, y, u, gu, Hu, su, np.zeros(K), nu, ru, kappa_rg)
    partner = _objective(y, u, gu, Hu)
    obj = _objective(tx.x, tx.f, tx.g, tx.H, partner=partner)
    tx.family = "newton2d"
    return obj, (tx, ty)


def gen_sd(eps: float):
    """Objective on which steepest descent with a Goldstein linesearch stops after ``ceil(eps^-2)`` steps.

    Knots carry ``f_k = 1 - k eps^2 / 2``, ``g_k = -2 eps f_k``, ``H_k = 0``
    and steps ``eps / (2 f_k)``, i.e. stepsizes ``mu_k = 1 / (4 f_k^2)``
    (stored in ``extra["mu"]``); each ``f_{k+1}`` sits on the midline
    ``f_k + g_k s_k / 2`` of the Goldstein wedge.
    """
    if not 0.0 < eps < 1.0:
        raise InvalidConfigError(f"eps must lie in (0, 1), got {eps!r}")
    K = predict_iterations(eps, 0.0)
    k = np.arange(K + 1, dtype=float)
    f = 1.0 - 0.5 * k * eps * eps
    g = -2.0 * eps * f
    H = np.zeros(K + 1)
    s = eps / (2.0 * f[:K])
    x = _positions(s)
    nan = np.full(K, math.nan)
    gt = GroundTruthTrace("sd", eps, 0.0, x, f, g, H, s, nan, np.ones(K), np.zeros(K),
                          extra={"mu": 1.0 / (4.0 * f[:K] ** 2)})
    return _objective(x, f, g, H), gt


@dataclass
class CRSParams:
    sigma_bar: float = 1.0
    kappa_rg: float = 0.0
    eta: float = 0.5
    kappa1: float = 0.0
    kappa2: float = 0.0

    def __post_init__(self):
        if not self.sigma_bar > 0.0:
            raise InvalidConfigError(f"sigma_bar must be positive, got {self.sigma_bar!r}")
        if not 0.0 <= self.kappa_rg < 1.0:
            raise InvalidConfigError(f"kappa_rg must lie in [0, 1), got {self.kappa_rg!r}")
        if not 0.0 < self.eta < 1.0:
            raise InvalidConfigError(f"eta must lie in (0, 1), got {self.eta!r}")
        if self.kappa1 < 0.0 or self.kappa2 < 0.0:
            raise InvalidConfigError("kappa1 and kappa2 must be non-negative")
        if not self.eta_condition:
            raise InvalidConfigError(
                f"2 eta (1 + kappa_rg)^3 = {self.eta_value!r} exceeds 1"
            )

    @property
    def eta_value(self) -> float:
        return 2.0 * self.eta * (1.0 + self.kappa_rg) ** 3

    @property
    def eta_condition(self) -> bool:
        return self.eta_value <= 1.0

    @property
    def theta_bounds(self):
        return (1.0 - self.kappa_rg) / (1.0 + self.sigma_bar * (1.0 + self.kappa_rg)), 1.0 + self.kappa_rg


def gen_crs(eps: float, sigma_bar: float = 1.0, kappa_rg: float = 0.0, eta: float = 0.5,
            theta_rule: Rule = "exact", lambda_rule: Rule = "newton", kappa2: float = 0.0):
    """Objective on which any accurate cubic-regularization-type step stops after ``ceil(eps^-1.5)`` steps.

    The knot data are those of the ``alpha = 1`` general family.  Each step
    must satisfy ``0 <= lambda_k <= sigma_bar s_k``, the residual bound
    ``|r_k| <= min(kappa_rg |g_k|, lambda_k s_k + kappa2 s_k^2)`` and the
    acceptance test ``(f_k - f_{k+1}) / s_k^3 >= eta``.
    """
    params = CRSParams(sigma_bar, kappa_rg, eta, 0.0, kappa2)
    K = predict_iterations(eps, 1.0)
    f, g, H = _sequences(eps, 1.0, K)
    unit = math.sqrt(eps)
    tlo, thi = params.theta_bounds
    # the theta/lambda rules are evaluated through the general-family machinery
    shim = MAlphaConfig(eps, 1.0, kappa_rg, 1.0 + sigma_bar * (1.0 + kappa_rg), theta_rule, lambda_rule)
    s = np.empty(K)
    lam = np.empty(K)
    theta = np.empty(K)
    r = np.empty(K)
    rho = np.empty(K)
    for k in range(K):
        lam[k] = _multipliers(shim, k, f[k], g[k], H[k], lambda th: th * unit / (2.0 * f[k]))
        theta[k] = _theta(shim, k, f[k], g[k], H[k], lam[k])
        _check(theta[k], tlo, thi, "theta", k)
        s[k] = theta[k] * unit / (2.0 * f[k])
        _check(lam[k], 0.0, sigma_bar * s[k], "lambda", k)
        r[k] = (H[k] + lam[k]) * s[k] + g[k]
        _check(abs(r[k]), 0.0, min(kappa_rg * abs(g[k]), lam[k] * s[k] + kappa2 * s[k] ** 2), "|r|", k)
        rho[k] = (f[k] - f[k + 1]) / s[k] ** 3
        if not rho[k] >= eta:
            raise GeneratorInconsistencyError(f"acceptance ratio {rho[k]!r} < eta={eta!r} at k={k}")
    x = _positions(s)
    gt = GroundTruthTrace("crs", eps, 1.0, x, f, g, H, s, lam, theta, r, kappa_rg,
                          1.0 + sigma_bar * (1.0 + kappa_rg), extra={"rho": rho, "params": params})
    return _objective(x, f, g, H), gt


def generate(family: str, eps: float, alpha: float = 1.0, **kwargs):
    """Dispatch to the generator of ``family``; returns ``(objective, trace or trace pair)``."""
    if family == "malpha":
        return gen_malpha(MAlphaConfig(eps, alpha, **kwargs))
    if family == "newton2d":
        return gen_newton2d(eps, **kwargs)
    if family == "sd":
        return gen_sd(eps, **kwargs)
    if family == "crs":
        return gen_crs(eps, **kwargs)
    raise InvalidConfigError(f"unknown family {family!r}, expected one of {FAMILIES}")
