"""Single-iteration rules of each method.

Every ``*_iterate`` function maps an :class:`IterateState` (and a config) to a
:class:`Step`: the trial step, its multiplier and residual, the model and
actual decreases, the acceptance decision and the next adaptive parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import MethodInapplicableError, WorstCaseError
from ..linalg import as_matrix, as_vector, lambda_min, norm, solve_shifted, spectral_norm, sym_eig
from .config import MethodConfig
from .subproblems import solve_reg_subproblem, solve_trs

LINESEARCH_MAX = 60
# relative slack on the step-length bound of the regularization method
_BOUND_SLACK = 1e-12


@dataclass
class IterateState:
    """Current iterate with its derivatives.

    ``value`` evaluates the objective at a trial point given as an array;
    ``param`` is the adaptive parameter (sigma, omega or Delta).
    """

    x: np.ndarray
    f: float
    g: np.ndarray
    H: np.ndarray
    param: float = math.nan
    k: int = 0
    value: Optional[Callable] = None

    def __post_init__(self):
        self.x = as_vector(self.x)
        self.g = as_vector(self.g)
        self.H = as_matrix(self.H, self.g.shape[0])

    @classmethod
    def at(cls, g, H, x=None, f=0.0, param=math.nan, value=None):
        g = as_vector(g)
        x = np.zeros_like(g) if x is None else x
        return cls(x, f, g, H, param, 0, value)

    def trial(self, s) -> float:
        if self.value is None:
            return math.nan
        return float(self.value(self.x + s))


@dataclass
class Step:
    s: np.ndarray
    lam: float
    r: np.ndarray
    model_decrease: float
    f_trial: float
    success: bool
    next_param: float = math.nan
    flags: tuple = ()
    extra_evaluations: int = 0
    failed: bool = False

    f0: float = math.nan

    @property
    def actual_decrease(self) -> float:
        return math.nan if math.isnan(self.f_trial) else self.f0 - self.f_trial

    @property
    def rho(self) -> float:
        if self.model_decrease == 0.0 or math.isnan(self.actual_decrease):
            return math.nan
        return self.actual_decrease / self.model_decrease


def _quad_decrease(g, H, s, shift=0.0):
    """``f - m(s)`` for ``m(s) = f + g.s + s.(H + shift I).s / 2``."""
    return -(float(g @ s) + 0.5 * float(s @ H @ s) + 0.5 * shift * float(s @ s))


def grad_power(g, alpha) -> float:
    """``||g||^(alpha/(1+alpha))``."""
    return norm(g) ** (alpha / (1.0 + alpha))


# --- Newton ---------------------------------------------------------------------------

def newton_step(g, H, shift=0.0):
    """``s = -(H + shift I)^{-1} g``; requires ``H + shift I`` positive definite."""
    g = as_vector(g)
    H = as_matrix(H, g.shape[0])
    lmin = lambda_min(H) + shift
    if not lmin > 0.0:
        raise MethodInapplicableError(
            f"Newton needs a positive definite (shifted) Hessian, smallest eigenvalue is {lmin!r}"
        )
    return solve_shifted(H, shift, -g)


def newton_iterate(state: IterateState, cfg: MethodConfig | None = None) -> Step:
    """Newton step, optionally with ``M_k = c ||g_k||^(alpha/(1+alpha)) I``.

    Pure Newton has no acceptance test: the step is always taken.  A trial
    value that does not decrease is flagged ``no-decrease``.
    """
    coef = 0.0 if cfg is None else cfg.lambda_coef
    alpha = 1.0 if cfg is None else cfg.alpha
    lam = coef * grad_power(state.g, alpha) if coef > 0.0 else 0.0
    s = newton_step(state.g, state.H, lam)
    ftrial = state.trial(s)
    step = Step(s, lam, np.zeros_like(s), _quad_decrease(state.g, state.H, s, lam), ftrial, True)
    step.f0 = state.f
    if not math.isnan(ftrial) and ftrial >= state.f:
        step.flags = ("no-decrease",)
    return step


# --- (2+alpha)-regularization ------------------------------------------------------------

def reg_model_decrease(g, H, s, sigma, alpha) -> float:
    return _quad_decrease(g, H, s) - sigma / (2.0 + alpha) * norm(s) ** (2.0 + alpha)


def reg_step_bound(g, H, sigma, alpha) -> float:
    """Upper bound on the global model minimizer's length.

    ``max{(3(2+a)||H||/(4 sigma))^(1/a), (3(2+a)||g||/sigma)^(1/(1+a))}``; for
    ``alpha = 0`` the first term is dropped when ``H`` is positive semidefinite
    and is otherwise 0 or infinite depending on whether its base is below 1.
    """
    hn = spectral_norm(H)
    second = (3.0 * (2.0 + alpha) * norm(g) / sigma) ** (1.0 / (1.0 + alpha))
    base = 3.0 * (2.0 + alpha) * hn / (4.0 * sigma)
    if alpha == 0.0:
        if lambda_min(H) >= 0.0 or base < 1.0:
            return second
        return math.inf
    return max(base ** (1.0 / alpha), second)


def reg_iterate(state: IterateState, cfg: MethodConfig) -> Step:
    sigma = state.param
    if not sigma >= cfg.sigma_min:
        raise WorstCaseError(f"sigma={sigma!r} fell below sigma_min={cfg.sigma_min!r}")
    s, lam = solve_reg_subproblem(state.g, state.H, sigma, cfg.alpha)
    bound = reg_step_bound(state.g, state.H, sigma, cfg.alpha)
    if norm(s) > bound * (1.0 + _BOUND_SLACK):
        raise WorstCaseError(f"regularized step {norm(s)!r} exceeds its bound {bound!r}")
    mdec = reg_model_decrease(state.g, state.H, s, sigma, cfg.alpha)
    ftrial = state.trial(s)
    step = Step(s, lam, np.zeros_like(s), mdec, ftrial, False)
    step.f0 = state.f
    step.success = bool(step.rho >= cfg.eta1) if mdec > 0.0 else False
    step.next_param = max(cfg.sigma_min, sigma / cfg.gamma_dec) if step.success else cfg.gamma_inc * sigma
    return step


# --- GQT ----------------------------------------------------------------------------------

def gqt_multiplier(g, H, omega, alpha) -> float:
    """``0`` if ``lambda_min(H) >= omega ||g||^(a/(1+a))``, else ``-lambda_min(H) + omega ||g||^(a/(1+a))``."""
    thresh = omega * grad_power(g, alpha)
    lmin = lambda_min(H)
    return 0.0 if lmin >= thresh else -lmin + thresh


def gqt_iterate(state: IterateState, cfg: MethodConfig) -> Step:
    """GQT step; progress is measured against the plain quadratic model.

    With ``cfg.residual_scale = c > 0`` the system is solved inexactly as
    ``(H + lam I) s = -(1 - c) g``, i.e. ``r = c g``, which keeps
    ``||r|| <= kappa_rg ||g||`` and ``r.s <= 0``.
    """
    omega = state.param
    if not omega >= cfg.omega_min:
        raise WorstCaseError(f"omega={omega!r} fell below omega_min={cfg.omega_min!r}")
    lam = gqt_multiplier(state.g, state.H, omega, cfg.alpha)
    c = cfg.residual_scale
    r = c * state.g
    s = solve_shifted(state.H, lam, -state.g + r)
    if c > 0.0 and float(r @ s) > 0.0:
        raise WorstCaseError("GQT residual violates r.s <= 0")
    mdec = _quad_decrease(state.g, state.H, s)
    ftrial = state.trial(s)
    step = Step(s, lam, r, mdec, ftrial, False)
    step.f0 = state.f
    step.success = bool(mdec > 0.0 and step.rho > cfg.eta1)
    step.next_param = max(cfg.omega_min, omega / cfg.gamma1) if step.success else cfg.gamma1 * omega
    return step


# --- trust region -------------------------------------------------------------------------

def tr_iterate(state: IterateState, cfg: MethodConfig) -> Step:
    delta = state.param
    s, lam = solve_trs(state.g, state.H, delta)
    mdec = _quad_decrease(state.g, state.H, s)
    ftrial = state.trial(s)
    step = Step(s, lam, np.zeros_like(s), mdec, ftrial, False)
    step.f0 = state.f
    step.success = bool(mdec > 0.0 and step.rho >= cfg.eta)
    if not step.success:
        step.next_param = cfg.gamma2 * delta
    elif step.rho >= cfg.eta_very and norm(s) >= delta * (1.0 - 1e-12):
        step.next_param = min(cfg.gamma1 * delta, cfg.delta_max)
    else:
        step.next_param = delta
    return step


# --- steepest descent with a Goldstein linesearch -----------------------------------------

def goldstein_holds(f0, f_trial, slope_step, mu1, mu2) -> bool:
    """``f0 + mu1 g.s <= f_trial <= f0 + mu2 g.s`` with ``slope_step = g.s < 0``."""
    return f0 + mu1 * slope_step <= f_trial <= f0 + mu2 * slope_step


def goldstein_search(phi: Callable, f0: float, gg: float, mu1: float, mu2: float,
                     grid: float = 1.0 / 64.0, mu_max: float = 64.0):
    """Stepsize on the midline of the Goldstein wedge.

    ``phi(mu)`` is the objective along ``x - mu g`` and ``gg = ||g||^2``.  With
    ``psi(mu) = phi(mu) - f0 + mu gg / 2``, the unit step is accepted when it
    lies on the midline (``psi(1) = 0`` up to rounding).  Otherwise ``psi`` is
    scanned on a grid (spacing ``grid`` up to ``mu = 1``, relative spacing
    ``grid`` beyond) for the first interval where it changes from positive to
    non-positive, i.e. where the objective comes back down onto the midline,
    and that interval is bisected up to :data:`LINESEARCH_MAX` times.  The
    accepted ``mu`` satisfies both Goldstein inequalities.

    Returns ``(mu, phi(mu), n_evals)`` or ``(None, None, n_evals)`` on failure.
    """
    tol = 2.0 ** -50 * max(1.0, abs(f0))
    n = 0

    def psi(mu):
        nonlocal n
        n += 1
        val = phi(mu)
        return val - f0 + 0.5 * mu * gg, val

    p1, v1 = psi(1.0)
    if abs(p1) <= tol and goldstein_holds(f0, v1, -gg, mu1, mu2):
        return 1.0, v1, n
    prev_mu, prev_psi = 0.0, 0.0
    mu = grid
    while mu <= mu_max:
        p, v = (p1, v1) if mu == 1.0 else psi(mu)
        if prev_psi > 0.0 and p <= 0.0:
            lo, hi, vhi, phi_hi = prev_mu, mu, v, p
            for _ in range(LINESEARCH_MAX):
                if abs(phi_hi) <= tol:
                    break
                mid = 0.5 * (lo + hi)
                if not lo < mid < hi:
                    break
                pm, vm = psi(mid)
                if pm > 0.0:
                    lo = mid
                else:
                    hi, vhi, phi_hi = mid, vm, pm
            if goldstein_holds(f0, vhi, -hi * gg, mu1, mu2):
                return hi, vhi, n
            return None, None, n
        prev_mu, prev_psi = mu, p
        mu += grid * max(1.0, mu)
    return None, None, n


def sd_goldstein_iterate(state: IterateState, cfg: MethodConfig) -> Step:
    g = state.g
    gg = float(g @ g)
    if gg == 0.0:
        z = np.zeros_like(g)
        step = Step(z, math.nan, z, 0.0, state.f, False, failed=True, flags=("zero-gradient",))
        step.f0 = state.f
        return step
    mu, val, n = goldstein_search(lambda m: state.trial(-m * g), state.f, gg, cfg.mu1, cfg.mu2)
    if mu is None:
        z = np.zeros_like(g)
        step = Step(z, math.nan, z, 0.0, math.nan, False, failed=True, flags=("linesearch-failure",))
        step.extra_evaluations = n
        step.f0 = state.f
        return step
    s = -mu * g
    # linear model decrease mu ||g||^2; rho = 1/2 on the Goldstein midline
    step = Step(s, math.nan, np.zeros_like(s), mu * gg, val, True, next_param=mu)
    step.extra_evaluations = n - 1
    step.f0 = state.f
    return step


# --- Royer-Wright -------------------------------------------------------------------------

def rw_direction(g, H, eps_g, eps_h):
    """Search direction and its kind: ``newton``, ``negative-curvature`` or ``regularized``.

    Newton's equation is used when the curvature along ``g`` exceeds
    ``eps_g`` and ``lambda_min(H) >= eps_h``.  When ``lambda_min(H) < -eps_h``
    the direction is the leftmost eigenvector scaled by ``|lambda_min|`` with
    its sign chosen so that ``g.d <= 0``.  Otherwise ``(H + 2 eps_h I) d = -g``.
    """
    g = as_vector(g)
    H = as_matrix(H, g.shape[0])
    d_eig, Q = sym_eig(H)
    lmin = float(d_eig[0])
    gg = float(g @ g)
    curv = float(g @ H @ g) / gg if gg > 0.0 else math.inf
    if curv > eps_g and lmin >= eps_h:
        return solve_shifted(H, 0.0, -g), "newton"
    if lmin < -eps_h:
        v = Q[:, 0] * abs(lmin)
        if float(g @ v) > 0.0:
            v = -v
        return v, "negative-curvature"
    return solve_shifted(H, 2.0 * eps_h, -g), "regularized"


def rw_iterate(state: IterateState, cfg: MethodConfig) -> Step:
    d, kind = rw_direction(state.g, state.H, cfg.eps, cfg.eps_H)
    dn3 = norm(d) ** 3
    a = 1.0
    n = 0
    for _ in range(LINESEARCH_MAX + 1):
        val = state.trial(a * d)
        n += 1
        if val <= state.f - cfg.rw_eta / 6.0 * a ** 3 * dn3:
            s = a * d
            lam = 0.0 if kind == "newton" else (2.0 * cfg.eps_H if kind == "regularized" else math.nan)
            flags = () if kind == "newton" else (kind,)
            step = Step(s, lam, np.zeros_like(s), _quad_decrease(state.g, state.H, s), val, True,
                        next_param=a, flags=flags)
            step.extra_evaluations = n - 1
            step.f0 = state.f
            return step
        a *= cfg.backtrack
    z = np.zeros_like(d)
    step = Step(z, math.nan, z, 0.0, math.nan, False, failed=True, flags=("linesearch-failure", kind))
    step.extra_evaluations = n
    step.f0 = state.f
    return step


ITERATES = {
    "newton": newton_iterate,
    "reg2alpha": reg_iterate,
    "gqt": gqt_iterate,
    "trust_region": tr_iterate,
    "sd_goldstein": sd_goldstein_iterate,
    "royer_wright": rw_iterate,
}
