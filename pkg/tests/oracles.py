"""Independent reference computations used to freeze expected values in the tests.

None of these share code paths with the package: Hermite coefficients come
from a dense 6x6 solve, subproblem minimizers from grid search polished by
Newton's method on the Cartesian gradient (or angle bisection on the
trust-region boundary), with no eigen-decomposition or secular equation.
"""
import math

import numpy as np


# --- Hermite interpolation ---------------------------------------------------------------

def hermite_coeffs_dense(left, right, length):
    """Coefficients c0..c5 of the quintic matching value/slope/curvature at both ends."""
    L = float(length)
    A = np.zeros((6, 6))
    b = np.zeros(6)
    for row, (t, order, val) in enumerate(
        [(0.0, 0, left[0]), (0.0, 1, left[1]), (0.0, 2, left[2]),
         (L, 0, right[0]), (L, 1, right[1]), (L, 2, right[2])]
    ):
        for j in range(6):
            if j >= order:
                A[row, j] = math.factorial(j) / math.factorial(j - order) * t ** (j - order)
        b[row] = val
    return np.linalg.solve(A, b)


def horner(coeffs, t):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


# --- subproblem oracles ----------------------------------------------------------------------

def reg_model(g, H, sigma, alpha, s):
    s = np.asarray(s, float)
    n = float(np.sqrt(s @ s))
    return float(g @ s + 0.5 * s @ H @ s + sigma / (2.0 + alpha) * n ** (2.0 + alpha))


def _bisect(fn, lo, hi, iters=200):
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton_polish(grad, hess, s, iters=60):
    s = np.array(s, float)
    for _ in range(iters):
        step = np.linalg.solve(hess(s), -grad(s))
        s = s + step
        if np.linalg.norm(step) <= 1e-16 * max(1.0, np.linalg.norm(s)):
            break
    return s


def reg_oracle(g, H, sigma, alpha):
    """All global minimizers of the regularized model (a list; two in a hard case)."""
    g = np.atleast_1d(np.asarray(g, float))
    H = np.atleast_2d(np.asarray(H, float))
    n = g.shape[0]
    hn = float(np.max(np.abs(H))) * n
    R = 1.0
    while sigma * R ** (1.0 + alpha) <= np.linalg.norm(g) + hn * R:
        R *= 2.0

    def grad(s):
        return g + H @ s + sigma * np.linalg.norm(s) ** alpha * s

    def hess(s):
        r = np.linalg.norm(s)
        out = H + sigma * r ** alpha * np.eye(n)
        if alpha > 0.0:
            out = out + sigma * alpha * r ** (alpha - 2.0) * np.outer(s, s)
        return out

    if n == 1:
        cands = []
        for sign in (-1.0, 1.0):
            # d/dr of m(sign r) is sign*g + H r + sigma r^(1+alpha), convex in r for alpha > 0
            fn = lambda r, sg=sign: sg * g[0] + H[0, 0] * r + sigma * r ** (1.0 + alpha)
            grid = np.linspace(0.0, R, 4001)
            vals = fn(grid)
            for i in range(len(grid) - 1):
                if vals[i] < 0.0 <= vals[i + 1]:
                    cands.append(np.array([sign * _bisect(fn, grid[i], grid[i + 1])]))
        cands.append(np.zeros(1))
    else:
        rr = np.linspace(0.0, R, 201)[1:]
        th = np.linspace(0.0, 2 * np.pi, 361)[:-1]
        Rg, Tg = np.meshgrid(rr, th, indexing="ij")
        S = np.stack([Rg * np.cos(Tg), Rg * np.sin(Tg)], axis=-1).reshape(-1, 2)
        vals = S @ g + 0.5 * np.einsum("ij,jk,ik->i", S, H, S) + sigma / (2 + alpha) * np.linalg.norm(S, axis=1) ** (2 + alpha)
        order = np.argsort(vals)[:12]
        cands = [np.zeros(2)]
        for i in order:
            try:
                cands.append(_newton_polish(grad, hess, S[i]))
            except np.linalg.LinAlgError:
                continue
    best = min(reg_model(g, H, sigma, alpha, c) for c in cands)
    out = []
    for c in cands:
        if reg_model(g, H, sigma, alpha, c) <= best + 1e-12 * max(1.0, abs(best)):
            if all(np.linalg.norm(c - o) > 1e-9 for o in out):
                out.append(c)
    return out


def quad_model(g, H, s):
    s = np.asarray(s, float)
    return float(g @ s + 0.5 * s @ H @ s)


def trs_oracle(g, H, delta):
    """All global minimizers of the quadratic over the ball of radius ``delta``."""
    g = np.atleast_1d(np.asarray(g, float))
    H = np.atleast_2d(np.asarray(H, float))
    n = g.shape[0]
    cands = []
    # interior stationary point when the quadratic is strictly convex
    if n == 1:
        if H[0, 0] > 0.0:
            cands.append(np.array([-g[0] / H[0, 0]]))
        cands += [np.array([delta]), np.array([-delta])]
    else:
        det = H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0]
        if H[0, 0] > 0.0 and det > 0.0:
            cands.append(np.linalg.solve(H, -g))

        def q(t):
            u = np.array([math.cos(t), math.sin(t)])
            return delta * (g @ u) + 0.5 * delta * delta * (u @ H @ u)

        def dq(t):
            u = np.array([math.cos(t), math.sin(t)])
            du = np.array([-math.sin(t), math.cos(t)])
            return delta * (g @ du) + delta * delta * (u @ H @ du)

        grid = np.linspace(0.0, 2 * np.pi, 2049)
        d = np.array([dq(t) for t in grid])
        for i in range(len(grid) - 1):
            if d[i] < 0.0 <= d[i + 1]:
                t = _bisect(dq, grid[i], grid[i + 1])
                cands.append(delta * np.array([math.cos(t), math.sin(t)]))
            elif d[i] == 0.0:
                cands.append(delta * np.array([math.cos(grid[i]), math.sin(grid[i])]))
    cands = [c for c in cands if np.linalg.norm(c) <= delta * (1 + 1e-12)]
    best = min(quad_model(g, H, c) for c in cands)
    out = []
    for c in cands:
        if quad_model(g, H, c) <= best + 1e-12 * max(1.0, abs(best)):
            if all(np.linalg.norm(c - o) > 1e-9 for o in out):
                out.append(c)
    return out


# --- random instances ------------------------------------------------------------------------

def random_instances(seed=20240611, count=120):
    """Seeded ``(g, H, sigma, alpha, delta)`` tuples in dimensions 1 and 2; every sixth is a hard case."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = 1 + (i % 2)
        sigma = float(rng.uniform(0.2, 3.0))
        alpha = float(rng.choice([0.25, 0.5, 1.0]))
        delta = float(rng.uniform(0.2, 2.0))
        if i % 6 == 5 and n == 2:
            # leftmost eigenvector orthogonal to g, radius beyond the shifted Newton step
            t = rng.uniform(0, np.pi)
            Q = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
            d1 = -float(rng.uniform(0.5, 2.0))
            d2 = float(rng.uniform(0.5, 2.0))
            H = Q @ np.diag([d1, d2]) @ Q.T
            g = float(rng.uniform(0.1, 0.5)) * (d2 - d1) * Q[:, 1] * 0.5
            delta = float(2.0 * np.linalg.norm(g) / (d2 - d1) + rng.uniform(0.2, 1.0))
            H = 0.5 * (H + H.T)
        else:
            g = rng.normal(size=n)
            A = rng.normal(size=(n, n))
            H = 0.5 * (A + A.T)
        out.append((g, H, sigma, alpha, delta))
    return out
