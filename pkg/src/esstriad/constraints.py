"""Compatibility constraints on triplets of essential matrices.

A triplet {E12, E23, E31} is compatible when a single configuration of
three calibrated cameras produces all three blocks. Compatibility of
rank-two blocks is equivalent to the vanishing of a finite family of
homogeneous polynomial residuals:

* ``triple_trace``  - one cubic scalar, tr(E12 E23 E31);
* ``cubic``         - six cubic 3x3 matrix residuals (one per ordered
  index triple), generalizing the single-matrix characterization;
* ``diamond``       - three cubic 3x3 matrix residuals built with the
  adjugate/diamond product, one per cyclic index triple;
* ``quartic``       - one scalar of degree four in the 9x9 block matrix;
* ``sextic``        - one scalar of degree six in the 9x9 block matrix.

That is 84 scalar equations in total ("full" set). The ``triple_trace``
equation and the three anti-cyclic ``cubic`` residuals are algebraically
redundant; dropping them leaves the 56-equation "reduced" set (54 cubics
plus the quartic and the sextic) which decides compatibility equally.

Residual normalization: a degree-d residual is divided by the largest
product of the Frobenius norms of the d matrix factors appearing in its
monomials (matrix residuals entrywise by the same scalar), making the
normalized values invariant to a common rescaling of the triplet.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RankError
from .essential import TAU_RANK, demazure_residual, epipoles, is_rank_two
from .mat3core import adjugate, as_mat3, diamond

DEFAULT_TOL = 1e-8

CYCLIC_TRIPLES = ((1, 2, 3), (2, 3, 1), (3, 1, 2))
ANTICYCLIC_TRIPLES = ((1, 3, 2), (3, 2, 1), (2, 1, 3))
ALL_TRIPLES = CYCLIC_TRIPLES + ANTICYCLIC_TRIPLES

COMPATIBLE = "compatible"
INCOMPATIBLE = "incompatible"
DEGENERATE = "degenerate"


@dataclass
class EssentialTriplet:
    """Ordered triplet of essential matrices with the fixed transpose
    convention E21 = E12^T, E32 = E23^T, E13 = E31^T.

    Blocks are plain matrices; rank/validity is checked by the consumers
    that need it (:func:`is_compatible` and friends).
    """

    e12: np.ndarray
    e23: np.ndarray
    e31: np.ndarray

    def __post_init__(self):
        self.e12 = as_mat3(self.e12)
        self.e23 = as_mat3(self.e23)
        self.e31 = as_mat3(self.e31)

    def block(self, i: int, j: int) -> np.ndarray:
        """E_ij for any distinct i, j in {1, 2, 3}."""
        key = (i, j)
        if key == (1, 2):
            return self.e12
        if key == (2, 3):
            return self.e23
        if key == (3, 1):
            return self.e31
        if key == (2, 1):
            return self.e12.T
        if key == (3, 2):
            return self.e23.T
        if key == (1, 3):
            return self.e31.T
        raise IndexError(f"invalid block index pair {key}")

    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.e12, self.e23, self.e31

    def norms(self) -> tuple[float, float, float]:
        return (float(np.linalg.norm(self.e12)),
                float(np.linalg.norm(self.e23)),
                float(np.linalg.norm(self.e31)))

    def scaled(self, factor: float) -> "EssentialTriplet":
        return EssentialTriplet(factor * self.e12, factor * self.e23,
                                factor * self.e31)

    def rotated(self, u1, u2, u3) -> "EssentialTriplet":
        """Per-view change of orientation E_ij -> U_i E_ij U_j^T, which
        preserves compatibility and all normalized residuals."""
        u1, u2, u3 = as_mat3(u1), as_mat3(u2), as_mat3(u3)
        return EssentialTriplet(u1 @ self.e12 @ u2.T,
                                u2 @ self.e23 @ u3.T,
                                u3 @ self.e31 @ u1.T)


@dataclass
class ResidualReport:
    """Structured residuals of every constraint family.

    ``cubic`` and ``diamond`` map ordered index triples to 3x3 residual
    matrices. ``divisors`` records the normalization scalar applied to
    each entry (1.0 everywhere when ``normalized`` is False).
    """

    set_name: str
    normalized: bool
    triple_trace: float | None
    cubic: dict[tuple[int, int, int], np.ndarray]
    diamond: dict[tuple[int, int, int], np.ndarray]
    quartic: float
    sextic: float
    divisors: dict[str, float] = field(default_factory=dict)

    def scalars(self) -> np.ndarray:
        """Flat vector of all scalar residuals (84 full / 56 reduced)."""
        parts = []
        if self.triple_trace is not None:
            parts.append([self.triple_trace])
        for key in ALL_TRIPLES:
            if key in self.cubic:
                parts.append(self.cubic[key].ravel())
        for key in CYCLIC_TRIPLES:
            parts.append(self.diamond[key].ravel())
        parts.append([self.quartic, self.sextic])
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.scalars())))

    def family_maxima(self) -> dict[str, float]:
        out = {}
        if self.triple_trace is not None:
            out["triple_trace"] = abs(self.triple_trace)
        out["cubic"] = max(float(np.max(np.abs(m))) for m in self.cubic.values())
        out["diamond"] = max(float(np.max(np.abs(m))) for m in self.diamond.values())
        out["quartic"] = abs(self.quartic)
        out["sextic"] = abs(self.sextic)
        return out

    def family_norms(self) -> np.ndarray:
        """Frobenius norm of each residual, scalars as absolute values.

        Matrix residuals conjugate under per-view rotations of the
        triplet, so unlike raw entries these norms are invariant.
        """
        parts = []
        if self.triple_trace is not None:
            parts.append(abs(self.triple_trace))
        for key in ALL_TRIPLES:
            if key in self.cubic:
                parts.append(float(np.linalg.norm(self.cubic[key])))
        for key in CYCLIC_TRIPLES:
            parts.append(float(np.linalg.norm(self.diamond[key])))
        parts.extend([abs(self.quartic), abs(self.sextic)])
        return np.array(parts)


@dataclass
class SpectralDiagnostics:
    """Eigenstructure of the 9x9 block matrix.

    ``eigenvalues`` are sorted by decreasing magnitude. For a compatible
    triplet the spectrum is {l1, -l1, l2, -l2, l3, -l3, 0, 0, 0} with
    l1^2 = l2^2 + l3^2 for the largest magnitude l1. ``odd_char_coeffs``
    are the characteristic-polynomial coefficients at powers
    8, 6, 4, 2, 1, 0 of the spectral variable (the coefficients that the
    paired structure forces to zero); the power-6 entry equals
    -2 tr(E12 E23 E31) for every triplet.
    """

    eigenvalues: np.ndarray
    odd_char_coeffs: np.ndarray
    pairing_defect: float
    lambda_relation: float

    @property
    def lambda6_coeff(self) -> float:
        return float(self.odd_char_coeffs[1])


@dataclass
class CompatibilityDecision:
    decision: str
    report: ResidualReport
    spectral: SpectralDiagnostics
    tol: float
    rank_tol: float

    def __bool__(self) -> bool:
        return self.decision == COMPATIBLE


@dataclass
class FundamentalTripletResiduals:
    """Residuals of the uncalibrated (fundamental) triplet constraints:
    the adjugate triple products F_ij* F_ik F_jk* and the epipole match
    scalars e_ij^T F_ik e_kj, one per cyclic index triple."""

    triple_products: dict[tuple[int, int, int], np.ndarray]
    epipole_matches: dict[tuple[int, int, int], float]
    normalized: bool

    def max_abs(self) -> float:
        m = max(float(np.max(np.abs(v))) for v in self.triple_products.values())
        e = max(abs(v) for v in self.epipole_matches.values())
        return max(m, e)


def _check_triple(i: int, j: int, k: int) -> None:
    if {i, j, k} != {1, 2, 3}:
        raise IndexError(f"indices must be a permutation of 1..3, got {(i, j, k)}")


def block_matrix(t: EssentialTriplet) -> np.ndarray:
    """Symmetric 9x9 matrix with zero diagonal blocks and E_ij off-diagonal."""
    m = np.zeros((9, 9))
    for i in range(1, 4):
        for j in range(1, 4):
            if i != j:
                m[3 * (i - 1):3 * i, 3 * (j - 1):3 * j] = t.block(i, j)
    return m


def _safe_div(value, divisor: float):
    if divisor == 0.0:
        return value * 0.0
    return value / divisor


def residual_triple_trace(t: EssentialTriplet, normalized: bool = True) -> float:
    """Scalar cubic tr(E12 E23 E31); zero on compatible triplets."""
    raw = float(np.trace(t.e12 @ t.e23 @ t.e31))
    if not normalized:
        return raw
    n12, n23, n31 = t.norms()
    return float(_safe_div(raw, n12 * n23 * n31))


def _cubic_core(eij, ejk, eki) -> np.ndarray:
    g = eij.T @ eij
    return g @ ejk - 0.5 * np.trace(g) * ejk + adjugate(eij) @ eki.T


def residual_cubic(t: EssentialTriplet, i: int, j: int, k: int,
                   normalized: bool = True) -> np.ndarray:
    """Matrix cubic E_ij^T E_ij E_jk - tr(E_ij^T E_ij)/2 E_jk + E_ij* E_ki^T.

    Collapsing k onto i recovers the single-matrix characterization of
    E_ij (the E_ki block becomes zero).
    """
    _check_triple(i, j, k)
    eij, ejk, eki = t.block(i, j), t.block(j, k), t.block(k, i)
    raw = _cubic_core(eij, ejk, eki)
    if not normalized:
        return raw
    nij = np.linalg.norm(eij)
    div = nij * nij * max(np.linalg.norm(ejk), np.linalg.norm(eki))
    return _safe_div(raw, div)


def _diamond_core(eij, ejk, eki) -> np.ndarray:
    return ejk.T @ adjugate(eij) + adjugate(ejk) @ eij.T + diamond(eij @ ejk, eki.T)


def residual_diamond(t: EssentialTriplet, i: int, j: int, k: int,
                     normalized: bool = True) -> np.ndarray:
    """Matrix cubic E_jk^T E_ij* + E_jk* E_ij^T + (E_ij E_jk) <> E_ki^T.

    Reversed index triples give the transposed residual, so the three
    cyclic triples carry all the information.
    """
    _check_triple(i, j, k)
    eij, ejk, eki = t.block(i, j), t.block(j, k), t.block(k, i)
    raw = _diamond_core(eij, ejk, eki)
    if not normalized:
        return raw
    nij, njk, nki = (np.linalg.norm(eij), np.linalg.norm(ejk),
                     np.linalg.norm(eki))
    div = nij * njk * max(nij, njk, nki)
    return _safe_div(raw, div)


def _power_traces(m: np.ndarray) -> tuple[float, float, float]:
    m2 = m @ m
    m4 = m2 @ m2
    t2 = float(np.trace(m2))
    t4 = float(np.trace(m4))
    t6 = float(np.trace(m4 @ m2))
    return t2, t4, t6


def residual_quartic(t: EssentialTriplet, normalized: bool = True) -> float:
    """Degree-4 scalar tr^2(M^2) - 16 tr(M^4) + 24 sum_ij ||E_ij||^4 of the
    9x9 block matrix M; normalized by ||M||^4."""
    m = block_matrix(t)
    t2, t4, _ = _power_traces(m)
    n12, n23, n31 = t.norms()
    raw = t2 * t2 - 16.0 * t4 + 24.0 * (n12**4 + n23**4 + n31**4)
    if not normalized:
        return raw
    return float(_safe_div(raw, t2 * t2))  # ||M||_F^2 == tr(M^2) for symmetric M


def residual_sextic(t: EssentialTriplet, normalized: bool = True) -> float:
    """Degree-6 scalar tr^3(M^2) - 12 tr(M^2) tr(M^4) + 32 tr(M^6) of the
    9x9 block matrix M; normalized by ||M||^6."""
    m = block_matrix(t)
    t2, t4, t6 = _power_traces(m)
    raw = t2**3 - 12.0 * t2 * t4 + 32.0 * t6
    if not normalized:
        return raw
    return float(_safe_div(raw, t2**3))


def residual_vector(t: EssentialTriplet, residual_set: str = "full",
                    normalized: bool = True) -> ResidualReport:
    """Evaluate all constraint families.

    ``residual_set="full"`` yields 84 scalars; ``"reduced"`` omits the
    (redundant) triple-trace scalar and the three anti-cyclic cubic
    residuals, leaving 56.
    """
    if residual_set not in ("full", "reduced"):
        raise ValueError(f"unknown residual set {residual_set!r}")
    full = residual_set == "full"
    n12, n23, n31 = t.norms()
    divisors: dict[str, float] = {}

    triple = None
    if full:
        triple = residual_triple_trace(t, normalized)
        divisors["triple_trace"] = n12 * n23 * n31 if normalized else 1.0

    cubic = {}
    cubic_triples = ALL_TRIPLES if full else CYCLIC_TRIPLES
    for (i, j, k) in cubic_triples:
        cubic[(i, j, k)] = residual_cubic(t, i, j, k, normalized)

    diamond_res = {}
    for (i, j, k) in CYCLIC_TRIPLES:
        diamond_res[(i, j, k)] = residual_diamond(t, i, j, k, normalized)

    quartic = residual_quartic(t, normalized)
    sextic = residual_sextic(t, normalized)
    if normalized:
        m2 = 2.0 * (n12**2 + n23**2 + n31**2)
        divisors["quartic"] = m2**2
        divisors["sextic"] = m2**3

    return ResidualReport(residual_set, normalized, triple, cubic,
                          diamond_res, quartic, sextic, divisors)


def spectral_diagnostics(t: EssentialTriplet) -> SpectralDiagnostics:
    """Eigenvalues of the block matrix plus the pairing diagnostics."""
    m = block_matrix(t)
    w = np.linalg.eigvalsh(m)  # ascending
    by_mag = w[np.argsort(-np.abs(w), kind="stable")]
    pairing = max(abs(w[i] + w[8 - i]) for i in range(5))
    # one representative of each +- pair: positions 0, 2, 4 by magnitude
    l1, l2, l3 = by_mag[0], by_mag[2], by_mag[4]
    coeffs = np.poly(w)  # powers 9..0
    odd = coeffs[[1, 3, 5, 7, 8, 9]]
    return SpectralDiagnostics(by_mag, odd, float(pairing),
                               float(l1 * l1 - l2 * l2 - l3 * l3))


def is_compatible(t: EssentialTriplet, tol: float = DEFAULT_TOL,
                  rank_tol: float = TAU_RANK,
                  residual_set: str = "full") -> CompatibilityDecision:
    """Decide compatibility of a triplet.

    Degenerate when any block fails the rank-two test; otherwise
    compatible iff every normalized residual is at most ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    report = residual_vector(t, residual_set, normalized=True)
    spectral = spectral_diagnostics(t)
    if not all(is_rank_two(b, rank_tol) for b in t.blocks()):
        decision = DEGENERATE
    elif report.max_abs() <= tol:
        decision = COMPATIBLE
    else:
        decision = INCOMPATIBLE
    return CompatibilityDecision(decision, report, spectral, tol, rank_tol)


def fundamental_triplet_residuals(f12, f23, f31, normalized: bool = True,
                                  rank_tol: float = TAU_RANK) -> FundamentalTripletResiduals:
    """Uncalibrated triplet constraints for rank-two fundamental matrices.

    For each cyclic (i, j, k): the matrix residual F_ij* F_ik F_jk* and
    the scalar e_ij^T F_ik e_kj built from unit epipoles. Both vanish
    exactly on compatible fundamental triplets.
    """
    f12, f23, f31 = as_mat3(f12), as_mat3(f23), as_mat3(f31)
    blocks = {
        (1, 2): f12, (2, 3): f23, (3, 1): f31,
        (2, 1): f12.T, (3, 2): f23.T, (1, 3): f31.T,
    }
    for key in ((1, 2), (2, 3), (3, 1)):
        if not is_rank_two(blocks[key], rank_tol):
            raise RankError(f"block F{key[0]}{key[1]} is not rank two")

    left_null = {}
    for (i, j), f in blocks.items():
        left_null[(i, j)] = epipoles(f, rank_tol)[0]

    products = {}
    matches = {}
    for (i, j, k) in CYCLIC_TRIPLES:
        fij, fik, fjk = blocks[(i, j)], blocks[(i, k)], blocks[(j, k)]
        raw = adjugate(fij) @ fik @ adjugate(fjk)
        if normalized:
            div = (np.linalg.norm(fij)**2 * np.linalg.norm(fik)
                   * np.linalg.norm(fjk)**2)
            raw = _safe_div(raw, div)
        products[(i, j, k)] = raw
        scalar = float(left_null[(i, j)] @ fik @ left_null[(k, j)])
        if normalized:
            scalar = float(_safe_div(scalar, np.linalg.norm(fik)))
        matches[(i, j, k)] = scalar
    return FundamentalTripletResiduals(products, matches, normalized)


def cubic_collapses_to_demazure(t: EssentialTriplet, i: int, j: int) -> float:
    """Max difference between the cubic core with the closing block zeroed
    and the single-matrix characterization residual of E_ij (identically
    zero; exposed for verification)."""
    eij = t.block(i, j)
    # with k == i the linear factor is E_ji = E_ij^T and E_ki vanishes
    collapsed = _cubic_core(eij, eij.T, np.zeros((3, 3)))
    dem, _ = demazure_residual(eij)
    return float(np.max(np.abs(collapsed - dem)))
