"""Exact global solvers for the 1-D/2-D regularized and trust-region subproblems.

Both work in the eigenbasis of ``H`` and locate the multiplier ``lam`` that
solves ``(H + lam I) s = -g`` together with the subproblem's norm equation.
"""
import math

import numpy as np
from scipy.optimize import brentq

from ..errors import HardCaseError, InvalidConfigError
from ..linalg import as_matrix, as_vector, norm, sym_eig

# a gradient component along the leftmost eigenvector below this (relative) size is treated as zero
_HARD_TOL = 1e-14


def _step_norm(ghat, d, lam):
    # next to the pole the norm is legitimately inf
    with np.errstate(over="ignore", divide="ignore"):
        return float(np.linalg.norm(ghat / (d + lam)))


def _shifted_root(ghat, dd, lo, target):
    """Shift ``t > 0`` with ``||ghat / (dd + t)|| = target(lo + t)``, or None if the norm is already below at ``t = 0+``.

    Working with ``t`` rather than ``lam = lo + t`` keeps full relative precision
    when the root sits right next to the pole at ``lam = lo``.
    """
    def psi(t):
        return _step_norm(ghat, dd, t) - target(lo + t)

    # geometric search keeps the bracket within a constant ratio, so brentq stays fast at any scale
    t = 1.0
    if psi(t) > 0.0:
        for _ in range(2000):
            lower, t = t, 2.0 * t
            if psi(t) < 0.0:
                break
        else:
            raise RuntimeError("failed to bracket the secular equation")
        upper = t
    else:
        while True:
            upper, t = t, t / 16.0
            if t == 0.0:
                return None
            if psi(t) > 0.0:
                break
        lower = t
    if psi(upper) == 0.0:
        return upper
    return brentq(psi, lower, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def solve_reg_subproblem(g, H, sigma, alpha):
    """Global minimizer of ``g.s + s.H.s/2 + sigma/(2+alpha) ||s||^(2+alpha)``.

    Returns ``(s, lam)`` with ``lam = sigma ||s||^alpha``; at the solution
    ``(H + lam I) s = -g`` and ``H + lam I`` is positive semidefinite.
    """
    g = as_vector(g)
    H = as_matrix(H, g.shape[0])
    if not sigma > 0.0:
        raise InvalidConfigError(f"sigma must be positive, got {sigma!r}")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidConfigError(f"alpha must lie in [0, 1], got {alpha!r}")
    d, Q = sym_eig(H)
    ghat = Q.T @ g
    gscale = max(norm(g), 1.0)

    if alpha == 0.0:
        # the model is the quadratic with Hessian H + sigma I
        if d[0] + sigma <= 0.0:
            raise HardCaseError(
                f"alpha=0: H + sigma I has eigenvalue {d[0] + sigma!r} <= 0, the model has no minimizer"
            )
        s = Q @ (-ghat / (d + sigma))
        return s, float(sigma)

    inv_a = 1.0 / alpha

    def target(lam):
        return (lam / sigma) ** inv_a

    lo = max(0.0, -d[0])
    if abs(ghat[0]) <= _HARD_TOL * gscale and lo > 0.0:
        # possible hard case: the leftmost component cannot blow up the norm
        rest = ghat.copy()
        rest[0] = 0.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            srest = np.where(rest != 0.0, -rest / (d + lo), 0.0)
        if norm(srest) <= target(lo):
            tau = math.sqrt(max(target(lo) ** 2 - float(np.sum(srest ** 2)), 0.0))
            shat = srest.copy()
            shat[0] = tau
            return Q @ shat, float(lo)
        ghat = rest

    dd = d + lo  # dd[0] == 0 exactly when H is indefinite
    t = _shifted_root(ghat, dd, lo, target)
    if t is None:  # only when g = 0
        return np.zeros_like(g), float(lo)
    s = Q @ (-ghat / (dd + t))
    return s, float(sigma * norm(s) ** alpha)


def solve_trs(g, H, delta):
    """Global minimizer of ``g.s + s.H.s/2`` subject to ``||s|| <= delta``.

    Returns ``(s, lam)`` with ``(H + lam I) s = -g``, ``lam >= max(0, -lambda_min(H))``
    and ``lam (delta - ||s||) = 0``.
    """
    g = as_vector(g)
    H = as_matrix(H, g.shape[0])
    if not delta > 0.0:
        raise InvalidConfigError(f"trust-region radius must be positive, got {delta!r}")
    d, Q = sym_eig(H)
    ghat = Q.T @ g
    gscale = max(norm(g), 1.0)

    if d[0] > 0.0:
        with np.errstate(over="ignore"):  # inf for a subnormal eigenvalue, which rejects the step
            s_newton = -ghat / d
        if norm(s_newton) <= delta:
            return Q @ s_newton, 0.0

    lo = max(0.0, -d[0])
    if abs(ghat[0]) <= _HARD_TOL * gscale:
        rest = ghat.copy()
        rest[0] = 0.0
        shift = d + lo
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            srest = np.where(rest != 0.0, -rest / shift, 0.0)
        if norm(srest) <= delta and lo >= 0.0 and d[0] <= 0.0:
            tau = math.sqrt(max(delta * delta - float(np.sum(srest ** 2)), 0.0))
            shat = srest.copy()
            shat[0] = tau
            return Q @ shat, float(lo)
        ghat = rest

    dd = d + lo
    t = _shifted_root(ghat, dd, lo, lambda lam: delta)
    if t is None:
        # boundary reached only in the limit; treat as the hard case with zero extra component
        with np.errstate(divide="ignore", invalid="ignore"):
            return Q @ np.where(ghat != 0.0, -ghat / dd, 0.0), float(lo)
    return Q @ (-ghat / (dd + t)), float(lo + t)
