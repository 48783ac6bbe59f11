"""Closed-form dense linear algebra for dimensions 1 and 2.

Every routine accepts a vector of shape (n,) and a symmetric matrix of shape
(n, n) with n in {1, 2}.
"""
import math

import numpy as np

from .errors import InvalidInputError


def as_vector(v):
    out = np.atleast_1d(np.asarray(v, dtype=float)).reshape(-1)
    if out.shape[0] not in (1, 2):
        raise InvalidInputError(f"only dimensions 1 and 2 are supported, got {out.shape[0]}")
    return out


def as_matrix(H, n=None):
    out = np.atleast_2d(np.asarray(H, dtype=float))
    if out.shape[0] != out.shape[1] or out.shape[0] not in (1, 2):
        raise InvalidInputError(f"expected a 1x1 or 2x2 matrix, got shape {out.shape}")
    if n is not None and out.shape[0] != n:
        raise InvalidInputError(f"matrix of size {out.shape[0]} does not match vector of size {n}")
    return out


def sym_eig(H):
    """Eigen-decomposition of a symmetric 1x1 or 2x2 matrix.

    Returns ``(d, Q)`` with ascending eigenvalues ``d`` and orthonormal
    eigenvectors as the columns of ``Q``.
    """
    H = as_matrix(H)
    if H.shape[0] == 1:
        return np.array([H[0, 0]]), np.ones((1, 1))
    a, b, c = H[0, 0], 0.5 * (H[0, 1] + H[1, 0]), H[1, 1]
    if b == 0.0:
        if a <= c:
            return np.array([a, c]), np.eye(2)
        return np.array([c, a]), np.array([[0.0, 1.0], [1.0, 0.0]])
    m = 0.5 * (a + c)
    r = math.hypot(0.5 * (a - c), b)
    det = a * c - b * b
    # the larger-magnitude root is formed by addition; the other from the determinant
    if m >= 0.0:
        hi = m + r
        lo = det / hi if hi != 0.0 else m - r
    else:
        lo = m - r
        hi = det / lo
    phi = 0.5 * math.atan2(2.0 * b, a - c)
    v_hi = np.array([math.cos(phi), math.sin(phi)])
    v_lo = np.array([-math.sin(phi), math.cos(phi)])
    return np.array([lo, hi]), np.column_stack([v_lo, v_hi])


def lambda_min(H):
    return float(sym_eig(H)[0][0])


def solve_shifted(H, shift, rhs):
    """Solve ``(H + shift I) x = rhs`` by scalar division or Cramer's rule."""
    H = as_matrix(H)
    rhs = as_vector(rhs)
    if H.shape[0] == 1:
        den = H[0, 0] + shift
        if den == 0.0:
            raise np.linalg.LinAlgError("singular 1x1 system")
        return np.array([rhs[0] / den])
    a = H[0, 0] + shift
    c = H[1, 1] + shift
    b = H[0, 1]
    det = a * c - b * H[1, 0]
    if det == 0.0:
        raise np.linalg.LinAlgError("singular 2x2 system")
    return np.array([(c * rhs[0] - b * rhs[1]) / det, (a * rhs[1] - H[1, 0] * rhs[0]) / det])


def norm(v):
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] == 1:
        return abs(float(v[0]))
    return math.hypot(float(v[0]), float(v[1]))


def spectral_norm(H):
    d, _ = sym_eig(H)
    return float(max(abs(d[0]), abs(d[-1])))
