"""Three-view auto-calibration from a compatible fundamental triplet.

For fundamental matrices F_ij = K_i^-T E_ij K_j^-1 (up to scales), the
compatibility constraints of the calibrated triplet translate into
polynomial equations in the symmetric unknowns

    C_i = lambda_i / det(K_i) * K_i K_i^T,

one per camera. In the entries of C the four constraint families are of
degree three (one scalar), two (six 3x3 matrices), one (three 3x3
matrices), and six (one scalar). The linear family alone gives a
27x18 homogeneous system; a one-dimensional nullspace determines every
C_i up to a common scale, and since K_i K_i^T = C_i / (C_i)_33 the
calibration matrices follow by an (upper-triangular) Cholesky split.
The nonlinear families serve as validators of the recovered candidates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import CYCLIC_TRIPLES, ALL_TRIPLES
from .errors import RankError
from .essential import TAU_RANK, is_rank_two
from .mat3core import adjugate, as_mat3, diamond

# Relative singular-value gap below which a direction counts as nullspace.
NULLSPACE_GAP = 1e-8

STATUS_OK = "ok"
STATUS_INCONSISTENT = "inconsistent"
STATUS_UNDERDETERMINED = "underdetermined"
STATUS_INDEFINITE = "indefinite"

# Symmetric 3x3 parametrization order: (11, 22, 33, 12, 13, 23).
_SYM_INDEX = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


def sym_to_vec(m) -> np.ndarray:
    m = as_mat3(m)
    return np.array([m[i, j] for i, j in _SYM_INDEX])


def vec_to_sym(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (6,):
        raise ValueError(f"expected 6 symmetric coefficients, got shape {v.shape}")
    a, b, c, d, e, f = v
    return np.array([
        [a, d, e],
        [d, b, f],
        [e, f, c],
    ])


@dataclass
class CalibSystem:
    """Stacked linear system of the degree-one constraint family.

    ``a`` has 27 rows (three cyclic index triples, nine matrix entries
    each, row-major) and 18 columns: the symmetric coefficients of
    (C1, C2, C3) in the order (11, 22, 33, 12, 13, 23) per camera.
    """

    a: np.ndarray
    scale_gauge: str = ("nullspace vectors are unit norm; global sign chosen "
                        "so that (C1)_33 >= 0")

    def apply(self, c1, c2, c3) -> np.ndarray:
        return self.a @ np.concatenate([sym_to_vec(c1), sym_to_vec(c2),
                                        sym_to_vec(c3)])


@dataclass
class AutoCalibResiduals:
    """Residuals of all four constraint families at given (C1, C2, C3),
    keyed by the camera-index triple where matrix-valued."""

    cubic_trace: float
    quadratic: dict[tuple[int, int, int], np.ndarray]
    linear: dict[tuple[int, int, int], np.ndarray]
    sextic: float
    normalized: bool

    def max_abs(self) -> float:
        q = max(float(np.max(np.abs(m))) for m in self.quadratic.values())
        l = max(float(np.max(np.abs(m))) for m in self.linear.values())
        return max(abs(self.cubic_trace), q, l, abs(self.sextic))


@dataclass
class CalibrationSolution:
    """Result of :func:`solve_calibration`.

    ``status`` is one of ``ok`` (unique candidate recovered),
    ``inconsistent`` (empty nullspace), ``underdetermined`` (nullspace
    dimension above one; ``nullspace`` holds an orthonormal basis and no
    K is produced), or ``indefinite`` (the candidate C_i do not admit a
    Cholesky split).
    """

    status: str
    singular_values: np.ndarray
    nullspace_dim: int
    nullspace: np.ndarray
    dual_candidates: list[np.ndarray] | None = None
    calibrations: list[np.ndarray] | None = None
    residuals: AutoCalibResiduals | None = None


def _blocks(f12, f23, f31) -> dict[tuple[int, int], np.ndarray]:
    f12, f23, f31 = as_mat3(f12), as_mat3(f23), as_mat3(f31)
    return {
        (1, 2): f12, (2, 3): f23, (3, 1): f31,
        (2, 1): f12.T, (3, 2): f23.T, (1, 3): f31.T,
    }


def _linear_core(cs, fs, i, j, k) -> np.ndarray:
    fij, fjk, fki = fs[(i, j)], fs[(j, k)], fs[(k, i)]
    return (cs[k] @ fjk.T @ adjugate(fij)
            + adjugate(fjk) @ fij.T @ cs[i]
            + diamond(fij @ cs[j] @ fjk, fki.T))


def _quadratic_core(cs, fs, i, j, k) -> np.ndarray:
    fij, fjk, fki = fs[(i, j)], fs[(j, k)], fs[(k, i)]
    m = fij.T @ cs[i] @ fij
    return (m @ cs[j] @ fjk - 0.5 * np.trace(cs[j] @ m) * fjk
            + adjugate(cs[j]) @ adjugate(fij) @ fki.T)


def assemble_calib_system(f12, f23, f31, rank_tol: float = TAU_RANK) -> CalibSystem:
    """Stack the linear constraint family into a 27x18 matrix.

    Applying the matrix to the stacked symmetric coefficients of any
    (C1, C2, C3) reproduces the direct evaluation exactly.
    """
    fs = _blocks(f12, f23, f31)
    for key in ((1, 2), (2, 3), (3, 1)):
        if not is_rank_two(fs[key], rank_tol):
            raise RankError(f"block F{key[0]}{key[1]} is not rank two")
    a = np.zeros((27, 18))
    zero = {1: np.zeros((3, 3)), 2: np.zeros((3, 3)), 3: np.zeros((3, 3))}
    for cam in (1, 2, 3):
        for m in range(6):
            basis = np.zeros(6)
            basis[m] = 1.0
            cs = dict(zero)
            cs[cam] = vec_to_sym(basis)
            col = np.concatenate([
                _linear_core(cs, fs, i, j, k).ravel() for (i, j, k) in CYCLIC_TRIPLES])
            a[:, 6 * (cam - 1) + m] = col
    return CalibSystem(a)


def _block_diag(c1, c2, c3) -> np.ndarray:
    out = np.zeros((9, 9))
    for idx, c in enumerate((c1, c2, c3)):
        out[3 * idx:3 * idx + 3, 3 * idx:3 * idx + 3] = c
    return out


def _fundamental_block_matrix(fs) -> np.ndarray:
    out = np.zeros((9, 9))
    for i in range(1, 4):
        for j in range(1, 4):
            if i != j:
                out[3 * (i - 1):3 * i, 3 * (j - 1):3 * j] = fs[(i, j)]
    return out


def calib_residuals(f12, f23, f31, c1, c2, c3,
                    normalized: bool = True) -> AutoCalibResiduals:
    """Evaluate all four constraint families at candidate (C1, C2, C3).

    Normalization divides each residual by the largest product of factor
    norms among its monomials, so values are invariant to rescaling any
    C_i or the whole fundamental triplet.
    """
    fs = _blocks(f12, f23, f31)
    cs = {1: as_mat3(c1), 2: as_mat3(c2), 3: as_mat3(c3)}
    fn = {k: np.linalg.norm(v) for k, v in fs.items()}
    cn = {k: np.linalg.norm(v) for k, v in cs.items()}

    def div(value, d):
        return value / d if (normalized and d > 0) else value

    cubic = float(np.trace(cs[1] @ fs[(1, 2)] @ cs[2] @ fs[(2, 3)]
                           @ cs[3] @ fs[(3, 1)]))
    cubic = div(cubic, cn[1] * cn[2] * cn[3]
                * fn[(1, 2)] * fn[(2, 3)] * fn[(3, 1)])

    quadratic = {}
    for (i, j, k) in ALL_TRIPLES:
        raw = _quadratic_core(cs, fs, i, j, k)
        d = max(cn[i] * cn[j] * fn[(i, j)]**2 * fn[(j, k)],
                cn[j]**2 * fn[(i, j)]**2 * fn[(k, i)])
        quadratic[(i, j, k)] = div(raw, d)

    linear = {}
    for (i, j, k) in CYCLIC_TRIPLES:
        raw = _linear_core(cs, fs, i, j, k)
        d = max(cn[k] * fn[(j, k)] * fn[(i, j)]**2,
                cn[i] * fn[(j, k)]**2 * fn[(i, j)],
                cn[j] * fn[(i, j)] * fn[(j, k)] * fn[(k, i)])
        linear[(i, j, k)] = div(raw, d)

    cf = _block_diag(cs[1], cs[2], cs[3]) @ _fundamental_block_matrix(fs)
    m2 = cf @ cf
    m4 = m2 @ m2
    t2, t4, t6 = (float(np.trace(m2)), float(np.trace(m4)),
                  float(np.trace(m4 @ m2)))
    sextic = t2**3 - 12.0 * t2 * t4 + 32.0 * t6
    sextic = div(sextic, float(np.linalg.norm(cf))**6)

    return AutoCalibResiduals(cubic, quadratic, linear, sextic, normalized)


def upper_cholesky(m) -> np.ndarray:
    """Upper-triangular K with K K^T = m (requires m positive definite)."""
    m = as_mat3(m)
    p = np.eye(3)[::-1]
    lower = np.linalg.cholesky(p @ m @ p)
    return p @ lower @ p


def recover_calibrations(c1, c2, c3) -> tuple[str, list[np.ndarray] | None]:
    """Calibration matrices from dual candidates C_i.

    Each C_i is normalized by its (3,3) entry (which removes the per-view
    scale) and split as K_i K_i^T with K_i upper triangular, positive
    diagonal, and (K_i)_33 = 1. Returns ``(status, Ks)`` where status is
    ``ok`` or ``indefinite`` (normalized candidate not positive definite,
    or vanishing (3,3) entry).
    """
    calibrations = []
    for c in (c1, c2, c3):
        c = as_mat3(c)
        d = c[2, 2]
        if abs(d) <= 1e-12 * np.linalg.norm(c):
            return STATUS_INDEFINITE, None
        try:
            calibrations.append(upper_cholesky(c / d))
        except np.linalg.LinAlgError:
            return STATUS_INDEFINITE, None
    return STATUS_OK, calibrations


def solve_calibration(f12, f23, f31, rank_tol: float = TAU_RANK,
                      gap: float = NULLSPACE_GAP) -> CalibrationSolution:
    """Recover calibration candidates from the linear constraint family.

    The nullspace of the 27x18 system is extracted by singular value
    decomposition (directions with singular value below ``gap`` times the
    largest). A one-dimensional nullspace yields candidate C_i, each
    normalized by its (3,3) entry and split as K_i K_i^T by Cholesky into
    an upper-triangular K_i with positive diagonal and (K_i)_33 = 1. The
    nonlinear families are evaluated at the candidates for validation.
    """
    system = assemble_calib_system(f12, f23, f31, rank_tol)
    u, s, vt = np.linalg.svd(system.a)
    if s[0] == 0.0:
        dim = 18
    else:
        dim = int(np.sum(s / s[0] <= gap)) + (18 - len(s))
    if dim == 0:
        return CalibrationSolution(STATUS_INCONSISTENT, s, 0,
                                   np.zeros((18, 0)))
    nullspace = vt[len(s) - dim if dim <= len(s) else 0:].T
    if dim > 1:
        return CalibrationSolution(STATUS_UNDERDETERMINED, s, dim, nullspace)

    v = vt[-1]
    cs = [vec_to_sym(v[0:6]), vec_to_sym(v[6:12]), vec_to_sym(v[12:18])]
    if cs[0][2, 2] < 0:
        cs = [-c for c in cs]
    residuals = calib_residuals(f12, f23, f31, *cs)
    status, calibrations = recover_calibrations(*cs)
    return CalibrationSolution(status, s, 1, nullspace, cs,
                               calibrations, residuals)
