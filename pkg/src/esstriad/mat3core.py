"""Exact 3x3 kernels: cross-product matrices, adjugates, the diamond
product, rotation constructors and deterministic rotation sampling.

Everything operates on plain float64 numpy arrays and is pure, so all
functions are safe for concurrent use.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateAxis

# Orthonormality / determinant tolerance for accepting a rotation matrix.
ORTHONORMALITY_TOL = 1e-9

_IDENTITY = np.eye(3)


def as_rng(seed) -> np.random.Generator:
    """Return a fresh PCG64 generator for an integer seed, pass through
    an existing Generator. No global randomness state is ever touched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def as_vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    return a


def as_mat3(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def skew(v) -> np.ndarray:
    """Skew-symmetric matrix S with S @ w == cross(v, w) for every w."""
    x, y, z = as_vec3(v)
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def adjugate(a) -> np.ndarray:
    """Adjugate (transposed cofactor matrix), by explicit cofactors.

    Computed without any inverse so it is exact (up to roundoff) on
    singular input; rank-2 matrices are the main clients here.
    """
    a = as_mat3(a)
    return np.array([
        [a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1],
         a[0, 2] * a[2, 1] - a[0, 1] * a[2, 2],
         a[0, 1] * a[1, 2] - a[0, 2] * a[1, 1]],
        [a[1, 2] * a[2, 0] - a[1, 0] * a[2, 2],
         a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0],
         a[0, 2] * a[1, 0] - a[0, 0] * a[1, 2]],
        [a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0],
         a[0, 1] * a[2, 0] - a[0, 0] * a[2, 1],
         a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]],
    ])


def diamond(a, b) -> np.ndarray:
    """Symmetric bilinear product A <> B = (A - B)* - A* - B*.

    The star is the adjugate. The operation is commutative, bilinear,
    transposes componentwise, and satisfies A <> I = A - tr(A) I.
    """
    a = as_mat3(a)
    b = as_mat3(b)
    return adjugate(a - b) - adjugate(a) - adjugate(b)


def diamond_trace_form(a, b) -> np.ndarray:
    """Trace expansion of the diamond product, kept as a cross-check of
    :func:`diamond` (both must agree to roundoff)."""
    a = as_mat3(a)
    b = as_mat3(b)
    ab = a @ b
    tra = np.trace(a)
    trb = np.trace(b)
    return (np.trace(ab) - tra * trb) * _IDENTITY + a * trb + b * tra - ab - b @ a


def rotation_from_axis_angle(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about ``axis`` (need not be unit) by ``angle`` radians."""
    axis = as_vec3(axis)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise DegenerateAxis("rotation axis must be nonzero")
    k = skew(axis / n)
    return _IDENTITY + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def half_turn(axis) -> np.ndarray:
    """Rotation by pi about ``axis``: 2 u u^T - I for the unit axis u."""
    axis = as_vec3(axis)
    n2 = axis @ axis
    if n2 == 0.0:
        raise DegenerateAxis("rotation axis must be nonzero")
    u = axis / np.sqrt(n2)
    return 2.0 * np.outer(u, u) - _IDENTITY


def random_rotation(seed) -> np.ndarray:
    """Haar-uniform rotation, deterministic per seed (unit-quaternion sampling)."""
    rng = as_rng(seed)
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def polar_project_rotation(m) -> np.ndarray:
    """Closest rotation in Frobenius norm (polar factor with det +1)."""
    m = as_mat3(m)
    u, _, vt = np.linalg.svd(m)
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt


def require_rotation(m, tol: float = ORTHONORMALITY_TOL, project: bool = False) -> np.ndarray:
    """Validate that ``m`` is in SO(3) within ``tol``; reject otherwise.

    With ``project=True`` an off-manifold matrix is re-orthonormalized by
    polar projection instead of rejected.
    """
    m = as_mat3(m)
    defect = np.linalg.norm(m.T @ m - _IDENTITY)
    det = np.linalg.det(m)
    if defect <= tol and abs(det - 1.0) <= tol:
        return m
    if project and det > 0:
        return polar_project_rotation(m)
    raise ValueError(
        f"not a rotation: orthonormality defect {defect:.3e}, det {det:.6f}")


def rotation_angle(r) -> float:
    """Rotation angle in [0, pi] of a rotation matrix."""
    r = as_mat3(r)
    c = (np.trace(r) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))
