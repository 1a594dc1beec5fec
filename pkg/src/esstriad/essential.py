"""Single essential-matrix algebra.

Construction from calibrated poses, the cubic rank-two characterization,
rank diagnostics, epipoles, and factorization into a baseline/rotation
pair. Default tolerances are module constants and every operation
accepts per-call overrides; the algebra assumes exact rank-2 input, the
thresholds make that usable on floating-point data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotEssential, RankError
from .mat3core import as_mat3, as_vec3, rotation_angle, require_rotation, skew

TAU_RANK = 1e-8
TAU_ESS = 1e-8
TAU_FAC = 1e-9

# Sign convention for direction vectors: first component larger than this
# in magnitude is made positive.
_SIGN_TOL = 1e-12

# Quarter-turn about z, the standard factorization helper.
_W = np.array([
    [0.0, -1.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0],
])


@dataclass
class Pose:
    """Calibrated camera [R | t]."""

    r: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        self.r = require_rotation(self.r)
        self.t = as_vec3(self.t)


@dataclass
class FactorCandidate:
    """One baseline/rotation factorization of an essential matrix.

    ``skew(baseline) @ rotation`` reconstructs ``sign * E``. Only two of
    the four pose candidates reproduce +E; the twisted pair reproduces -E
    and corresponds to a negated scale of the input.
    """

    baseline: np.ndarray
    rotation: np.ndarray
    sign: int


def essential_from_poses(p1: Pose, p2: Pose) -> np.ndarray:
    """Essential matrix mapping view-1 rays to view-2 epipolar lines.

    Returns the zero matrix (degenerate) when the camera centers coincide.
    """
    d = p2.r.T @ p2.t - p1.r.T @ p1.t
    return p2.r @ skew(d) @ p1.r.T


def demazure_residual(e) -> tuple[np.ndarray, float]:
    """Cubic characterization residual E^T E E^T - tr(E^T E)/2 * E^T.

    Returns the 3x3 residual and its Frobenius norm divided by ||E||^3
    (0/0 mapped to 0). A rank-two matrix is essential iff the residual
    vanishes.
    """
    e = as_mat3(e)
    g = e.T @ e
    r = g @ e.T - 0.5 * np.trace(g) * e.T
    n = np.linalg.norm(e)
    return r, (float(np.linalg.norm(r)) / n**3 if n > 0 else 0.0)


def is_rank_two(e, tol: float = TAU_RANK) -> bool:
    """True iff the two leading singular values dominate: s3 <= tol*s1 < s2."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(as_mat3(e), compute_uv=False)
    return bool(s[2] <= tol * s[0] and s[1] > tol * s[0])


def canonical_sign(v, tol: float = _SIGN_TOL) -> np.ndarray:
    """Flip ``v`` so its first above-tolerance component is positive."""
    v = as_vec3(v)
    for x in v:
        if abs(x) > tol:
            return -v if x < 0 else v
    return v


def epipoles(e, tol: float = TAU_RANK) -> tuple[np.ndarray, np.ndarray]:
    """Unit left/right null vectors of a rank-two matrix.

    The left epipole x satisfies x^T E = 0, the right one E y = 0. Signs
    follow the first-nonzero-component-positive convention so outputs are
    deterministic.
    """
    e = as_mat3(e)
    if not is_rank_two(e, tol):
        raise RankError("epipoles require a rank-two matrix")
    u, _, vt = np.linalg.svd(e)
    return canonical_sign(u[:, 2]), canonical_sign(vt[2, :])


def closest_essential(e) -> np.ndarray:
    """Frobenius-closest essential matrix: equalize the top two singular
    values and zero the third."""
    e = as_mat3(e)
    u, s, vt = np.linalg.svd(e)
    sigma = 0.5 * (s[0] + s[1])
    return u @ np.diag([sigma, sigma, 0.0]) @ vt


def factor_essential(e, tol_rank: float = TAU_RANK, tol_ess: float = TAU_ESS,
                     tol_fac: float = TAU_FAC) -> list[FactorCandidate]:
    """All four baseline/rotation factorizations of an essential matrix.

    Each candidate satisfies ||skew(b) @ R - sign * E|| <= tol_fac * ||E||.
    The canonical candidate comes first under the deterministic ordering:
    sign +1 before -1, then the baseline sign convention, then the smaller
    rotation angle.
    """
    e = as_mat3(e)
    if not is_rank_two(e, tol_rank):
        raise RankError("factorization requires a rank-two matrix")
    _, rel = demazure_residual(e)
    if rel > tol_ess:
        raise NotEssential(f"characterization residual {rel:.3e} exceeds {tol_ess:.3e}")

    u, s, vt = np.linalg.svd(e)
    if np.linalg.det(u) < 0:
        u = u.copy()
        u[:, 2] *= -1.0
    if np.linalg.det(vt) < 0:
        vt = vt.copy()
        vt[2, :] *= -1.0
    sigma = 0.5 * (s[0] + s[1])
    b = sigma * u[:, 2]
    r_a = u @ _W.T @ vt
    r_b = u @ _W @ vt
    candidates = [
        FactorCandidate(b, r_a, 1),
        FactorCandidate(-b, r_b, 1),
        FactorCandidate(b, r_b, -1),
        FactorCandidate(-b, r_a, -1),
    ]
    scale = np.linalg.norm(e)
    for c in candidates:
        defect = np.linalg.norm(skew(c.baseline) @ c.rotation - c.sign * e)
        if defect > tol_fac * scale:
            raise NotEssential(
                f"factorization defect {defect / scale:.3e} exceeds {tol_fac:.3e}")

    def order(c: FactorCandidate):
        flipped = bool(np.any(c.baseline != canonical_sign(c.baseline)))
        return (-c.sign, flipped, rotation_angle(c.rotation))

    candidates.sort(key=order)
    return candidates


def epipolar_residual(e, q1, q2) -> float:
    """Epipolar form q2^T E q1 for matched ray directions q1, q2."""
    return float(as_vec3(q2) @ as_mat3(e) @ as_vec3(q1))
