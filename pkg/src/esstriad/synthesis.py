"""Generators for compatible (and deliberately incompatible) triplets.

Three kinds of synthetic data:

* random camera triples (general position, collinear centers, or two
  nearly coincident centers) and the compatible triplet they induce via
  E_ij = R_i [b_i - b_j]_x R_j^T;
* eleven parametric families of compatible triplets ("t1" ... "t10",
  plus the mirrored variants "t2_1"/"t4_1") together with explicit
  per-edge factorization witnesses E_ij = [b_ij]_x R_ij whose chain
  closes (R12 R23 R31 = I and R12^T b12 + R23 b31 + b23 = 0);
* independent random essential matrices, which are incompatible as a
  triplet with probability one.

All sampling is deterministic per seed and keeps parameters away from
family degeneracies by a 0.1 margin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import EssentialTriplet
from .errors import ChainError, FamilyParamError
from .mat3core import (as_rng, as_vec3, half_turn, random_rotation,
                       require_rotation, skew)

FAMILIES = ("t1", "t2", "t2_1", "t3", "t4", "t4_1", "t5", "t7", "t8", "t9", "t10")

GENERAL = "general"
COLLINEAR = "collinear"
NEAR_COINCIDENT = "near_coincident"
MODES = (GENERAL, COLLINEAR, NEAR_COINCIDENT)

_I = np.eye(3)


@dataclass
class CameraTriple:
    """Three calibrated views: rotations R_i and baseline points b_i.

    The induced triplet is E_ij = R_i [b_i - b_j]_x R_j^T, so collinear
    b_i model cameras with collinear centers.
    """

    rotations: tuple[np.ndarray, np.ndarray, np.ndarray]
    baselines: tuple[np.ndarray, np.ndarray, np.ndarray]

    def __post_init__(self):
        self.rotations = tuple(require_rotation(r) for r in self.rotations)
        self.baselines = tuple(as_vec3(b) for b in self.baselines)


@dataclass
class ChainWitness:
    """Per-edge factorization E_ij = [b_ij]_x R_ij for edges 12, 23, 31."""

    r12: np.ndarray
    b12: np.ndarray
    r23: np.ndarray
    b23: np.ndarray
    r31: np.ndarray
    b31: np.ndarray

    def edges(self):
        return ((self.r12, self.b12), (self.r23, self.b23), (self.r31, self.b31))


@dataclass
class FamilyParams:
    """A family identifier plus its named scalar parameters."""

    family: str
    scalars: dict[str, float]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FamilyParamError(f"unknown family {self.family!r}")

    def __getitem__(self, name: str) -> float:
        try:
            return float(self.scalars[name])
        except KeyError:
            raise FamilyParamError(
                f"family {self.family!r} requires parameter {name!r}") from None


def _unit_sphere(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _unit_ball(rng) -> np.ndarray:
    return _unit_sphere(rng) * rng.uniform() ** (1.0 / 3.0)


def random_camera_triple(mode: str = GENERAL, seed=0,
                         epsilon: float = 1e-3) -> CameraTriple:
    """Random camera triple, deterministic per seed.

    ``general``: i.i.d. rotations, baselines i.i.d. in the unit ball.
    ``collinear``: the three baselines sit exactly on a random line with
    offsets separated by at least 0.1.
    ``near_coincident``: two baselines at distance ``epsilon``.
    """
    rng = as_rng(seed)
    rotations = tuple(random_rotation(rng) for _ in range(3))
    if mode == GENERAL:
        baselines = tuple(_unit_ball(rng) for _ in range(3))
    elif mode == COLLINEAR:
        origin = _unit_ball(rng)
        direction = _unit_sphere(rng)
        first = rng.uniform(-1.0, -0.2)
        gaps = 0.1 + rng.uniform(0.0, 0.6, size=2)
        offsets = (first, first + gaps[0], first + gaps[0] + gaps[1])
        baselines = tuple(origin + o * direction for o in offsets)
    elif mode == NEAR_COINCIDENT:
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        b1 = _unit_ball(rng)
        b2 = b1 + epsilon * _unit_sphere(rng)
        baselines = (b1, b2, _unit_ball(rng))
    else:
        raise ValueError(f"unknown generation mode {mode!r}")
    return CameraTriple(rotations, baselines)


def triplet_from_cameras(c: CameraTriple) -> EssentialTriplet:
    """Compatible triplet induced by a camera triple."""
    r1, r2, r3 = c.rotations
    b1, b2, b3 = c.baselines
    return EssentialTriplet(
        r1 @ skew(b1 - b2) @ r2.T,
        r2 @ skew(b2 - b3) @ r3.T,
        r3 @ skew(b3 - b1) @ r1.T,
    )


def random_essential(seed) -> np.ndarray:
    """A single random essential matrix [b]_x R with unit baseline."""
    rng = as_rng(seed)
    return skew(_unit_sphere(rng)) @ random_rotation(rng)


# ---------------------------------------------------------------------------
# parametric families
# ---------------------------------------------------------------------------

def _corner(x: float) -> np.ndarray:
    return np.array([
        [0.0, 0.0, x],
        [0.0, 0.0, 0.0],
        [x, 0.0, 0.0],
    ])


def _wide_corner(g: float, b: float) -> np.ndarray:
    return np.array([
        [0.0, g, b],
        [-g, 0.0, 0.0],
        [b, 0.0, 0.0],
    ])


def _z_slant(lam: float, mu: float, scale: float) -> np.ndarray:
    return scale * np.array([
        [0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0],
        [-lam, -mu, 0.0],
    ])


def _require(cond: bool, family: str, constraint: str) -> None:
    if not cond:
        raise FamilyParamError(f"family {family!r}: constraint violated: {constraint}")


def _unit_circle(p: FamilyParams) -> tuple[float, float]:
    lam, mu = p["lambda"], p["mu"]
    _require(abs(lam * lam + mu * mu - 1.0) <= 1e-9, p.family,
             "lambda^2 + mu^2 = 1")
    _require(mu != 0.0, p.family, "mu != 0")
    return lam, mu


def _t5_gammas(b1: float, b2: float, b3: float, delta: float):
    g1 = delta * b1 * (b1 + b2 - b3)
    g2 = delta * b2 * (b1 + b2 + b3)
    g3 = delta * b3 * (-b1 + b2 + b3)
    return g1, g2, g3


def t5_delta(b1: float, b2: float, b3: float) -> float:
    """Positive scale making the t5 closure relation delta*(g1+g2+g3) = -1
    hold; only parameter sets with (b1+b2+b3)^2 < 4*b1*b3 admit one."""
    s = (b1 + b2 + b3) ** 2 - 4.0 * b1 * b3
    if s >= 0:
        raise FamilyParamError(
            "family 't5': no real delta, requires (b1+b2+b3)^2 < 4 b1 b3")
    return 1.0 / np.sqrt(-s)


def _t9_derived(a1: float, b1: float, lam: float, mu: float):
    p3 = a1 * mu - b1 * (lam - 1.0)
    _require(p3 != 0.0, "t9", "a1*mu - b1*(lambda - 1) != 0")
    beta2 = -(a1 * (lam - 1.0) + b1 * mu) * (a1 * lam + b1 * mu) / p3
    beta3 = (a1 * a1 + b1 * b1) * (lam - 1.0) / p3
    return beta2, beta3


def family_triplet(p: FamilyParams) -> EssentialTriplet:
    """The exact compatible triplet of a parametric family.

    Raises :class:`FamilyParamError` when the family's validity
    constraints are violated (divisions by zero, closure relations, the
    unit-circle constraint of t7..t9, or sign parameters outside {-1, 1}).
    """
    f = p.family
    if f == "t1":
        a1, b1, g1 = p["alpha1"], p["beta1"], p["gamma1"]
        b2, g2 = p["beta2"], p["gamma2"]
        return EssentialTriplet(
            skew([a1, b1, g1]),
            skew([-a1, b2, g2]),
            skew([0.0, -b1 - b2, -g1 - g2]),
        )
    if f == "t2":
        a1, b2 = p["alpha1"], p["beta2"]
        return EssentialTriplet(skew([a1, 0, 0]), skew([a1, b2, 0]), _corner(b2))
    if f == "t2_1":
        a1, b1 = p["alpha1"], p["beta1"]
        return EssentialTriplet(skew([a1, b1, 0]), skew([a1, 0, 0]), _corner(-b1))
    if f == "t3":
        a1, b1 = p["alpha1"], p["beta1"]
        _require(b1 != 0.0, f, "beta1 != 0")
        return EssentialTriplet(
            skew([a1, b1, 0]),
            skew([a1, -a1 * a1 / b1, 0]),
            _corner(-(a1 * a1 + b1 * b1) / b1),
        )
    if f == "t4":
        b2, g2, g3 = p["beta2"], p["gamma2"], p["gamma3"]
        return EssentialTriplet(
            skew([0, 0, g2 + g3]),
            skew([0, b2, g2]),
            _wide_corner(g3, -b2),
        )
    if f == "t4_1":
        b1, g1, g3 = p["beta1"], p["gamma1"], p["gamma3"]
        return EssentialTriplet(
            skew([0, b1, g1]),
            skew([0, 0, g1 + g3]),
            _wide_corner(g3, b1),
        )
    if f == "t5":
        b1, b2, b3, delta = p["beta1"], p["beta2"], p["beta3"], p["delta"]
        g1, g2, g3 = _t5_gammas(b1, b2, b3, delta)
        closure = delta * (g1 + g2 + g3)
        _require(abs(closure + 1.0) <= 1e-9, f, "delta*(gamma1+gamma2+gamma3) = -1")
        return EssentialTriplet(
            skew([0, b1, g1]),
            skew([0, b2, g2]),
            _wide_corner(g3, b3),
        )
    if f == "t7":
        lam, mu = _unit_circle(p)
        b1, b3 = p["beta1"], p["beta3"]
        a = (lam - 1.0) / mu
        return EssentialTriplet(
            skew([b1 * a, b1, 0]),
            skew([b1 * a, b1 + b3, 0]),
            _z_slant(lam, mu, b3),
        )
    if f == "t8":
        lam, mu = _unit_circle(p)
        b2, b3 = p["beta2"], p["beta3"]
        a = (lam - 1.0) / mu
        a1 = (b2 + b3 * (lam + 1.0)) * a
        return EssentialTriplet(
            skew([a1, b2 + b3 * lam, 0]),
            skew([b2 * a, b2, 0]),
            _z_slant(lam, mu, b3),
        )
    if f == "t9":
        lam, mu = _unit_circle(p)
        a1, b1 = p["alpha1"], p["beta1"]
        beta2, beta3 = _t9_derived(a1, b1, lam, mu)
        return EssentialTriplet(
            skew([a1, b1, 0]),
            skew([-a1 * lam - b1 * mu, beta2, 0]),
            _z_slant(lam, mu, beta3),
        )
    if f == "t10":
        g1, g2, delta = p["gamma1"], p["gamma2"], p["delta"]
        e1, e2 = p["eps1"], p["eps2"]
        _require(e1 in (-1.0, 1.0) and e2 in (-1.0, 1.0), f, "eps in {-1, +1}")
        s = skew([0.0, delta, 1.0])
        return EssentialTriplet(g1 * s, g2 * s, (e1 * g1 + e2 * g2) * s)
    raise FamilyParamError(f"unknown family {f!r}")


def _edges_from_cameras(rotations, baselines) -> ChainWitness:
    # E_ij = R_i [b_i - b_j]_x R_j^T == [R_i (b_i - b_j)]_x (R_i R_j^T)
    r1, r2, r3 = rotations
    b1, b2, b3 = (np.asarray(b, dtype=float) for b in baselines)
    return ChainWitness(
        r12=r1 @ r2.T, b12=r1 @ (b1 - b2),
        r23=r2 @ r3.T, b23=r2 @ (b2 - b3),
        r31=r3 @ r1.T, b31=r3 @ (b3 - b1),
    )


def _xy_half_turn(x: float, y: float) -> np.ndarray:
    _require(x * x + y * y > 0.0, "t7", "half-turn axis nonzero")
    return half_turn([x, y, 0.0])


def witness_for_family(p: FamilyParams) -> ChainWitness:
    """Explicit edge witness (R_ij, b_ij) for a family triplet.

    Beyond the triplet's own validity constraints this needs the blocks
    to be nonzero (a zero block has no baseline direction).
    """
    f = p.family
    d1 = np.diag([1.0, -1.0, -1.0])
    d3 = np.diag([-1.0, -1.0, 1.0])
    if f == "t1":
        a1, b1, g1 = p["alpha1"], p["beta1"], p["gamma1"]
        b2, g2 = p["beta2"], p["gamma2"]
        cam_b1 = np.array([a1, b1, g1])
        cam_b3 = np.array([a1, -b2, -g2])
        return _edges_from_cameras((_I, _I, _I), (cam_b1, np.zeros(3), cam_b3))
    if f == "t2":
        a1, b2 = p["alpha1"], p["beta2"]
        return _edges_from_cameras(
            (d1, _I, _I),
            (np.zeros(3), np.array([a1, 0.0, 0.0]), np.array([0.0, -b2, 0.0])))
    if f == "t2_1":
        a1, b1 = p["alpha1"], p["beta1"]
        return _edges_from_cameras(
            (_I, _I, d1),
            (np.array([0.0, b1, 0.0]), np.array([-a1, 0.0, 0.0]), np.zeros(3)))
    if f == "t3":
        a1, b1 = p["alpha1"], p["beta1"]
        _require(b1 != 0.0, f, "beta1 != 0")
        _require(a1 != 0.0, f, "alpha1 != 0 (zero block otherwise)")
        den = a1 * a1 + b1 * b1
        c, s = (a1 * a1 - b1 * b1) / den, 2.0 * a1 * b1 / den
        r12 = np.array([[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, -1.0]])
        r23 = np.array([[-c, -s, 0.0], [-s, c, 0.0], [0.0, 0.0, -1.0]])
        return ChainWitness(
            r12=r12, b12=np.array([-a1, -b1, 0.0]),
            r23=r23, b23=np.array([-a1, a1 * a1 / b1, 0.0]),
            r31=d3, b31=np.array([0.0, -den / b1, 0.0]),
        )
    if f == "t4":
        b2, g2, g3 = p["beta2"], p["gamma2"], p["gamma3"]
        cam_b1 = np.array([0.0, b2, -g3])
        cam_b2 = np.array([0.0, b2, g2])
        return _edges_from_cameras((d3, _I, _I), (cam_b1, cam_b2, np.zeros(3)))
    if f == "t4_1":
        b1, g1, g3 = p["beta1"], p["gamma1"], p["gamma3"]
        cam_b2 = np.array([0.0, -b1, -g1])
        cam_b3 = np.array([0.0, -b1, g3])
        return _edges_from_cameras((_I, _I, d3), (np.zeros(3), cam_b2, cam_b3))
    if f == "t5":
        b1, b2, b3, delta = p["beta1"], p["beta2"], p["beta3"], p["delta"]
        g1, g2, g3 = _t5_gammas(b1, b2, b3, delta)
        _require(abs(delta * (g1 + g2 + g3) + 1.0) <= 1e-9, f,
                 "delta*(gamma1+gamma2+gamma3) = -1")

        def yz(bi, gi):
            den = bi * bi + gi * gi
            _require(den > 0.0, f, "nonzero block")
            return (bi * bi - gi * gi) / den, 2.0 * bi * gi / den

        c1, s1 = yz(b1, g1)
        c2, s2 = yz(b2, g2)
        c3, s3 = yz(b3, g3)
        r12 = np.array([[-1.0, 0, 0], [0, c1, s1], [0, s1, -c1]])
        r23 = np.array([[-1.0, 0, 0], [0, c2, s2], [0, s2, -c2]])
        r31 = np.array([[1.0, 0, 0], [0, -c3, s3], [0, -s3, -c3]])
        return ChainWitness(
            r12=r12, b12=np.array([0.0, -b1, -g1]),
            r23=r23, b23=np.array([0.0, -b2, -g2]),
            r31=r31, b31=np.array([0.0, -b3, -g3]),
        )
    if f == "t7":
        lam, mu = _unit_circle(p)
        b1, b3 = p["beta1"], p["beta3"]
        _require(b1 != 0.0, f, "beta1 != 0")
        _require(b3 != 0.0, f, "beta3 != 0")
        a1 = b1 * (lam - 1.0) / mu
        r12 = _xy_half_turn(a1, b1)
        return ChainWitness(
            r12=r12, b12=np.array([-a1, -b1, 0.0]),
            r23=_I.copy(), b23=np.array([a1, b1 + b3, 0.0]),
            r31=r12.copy(), b31=np.array([0.0, -b3, 0.0]),
        )
    if f == "t8":
        lam, mu = _unit_circle(p)
        b2, b3 = p["beta2"], p["beta3"]
        _require(b2 != 0.0, f, "beta2 != 0")
        _require(b3 != 0.0, f, "beta3 != 0")
        a1 = (b2 + b3 * (lam + 1.0)) * (lam - 1.0) / mu
        a2 = b2 * (lam - 1.0) / mu
        r23 = _xy_half_turn(a2, b2)
        return ChainWitness(
            r12=_I.copy(), b12=np.array([a1, b2 + b3 * lam, 0.0]),
            r23=r23, b23=np.array([-a2, -b2, 0.0]),
            r31=r23.copy(), b31=np.array([0.0, -b3, 0.0]),
        )
    if f == "t9":
        lam, mu = _unit_circle(p)
        a1, b1 = p["alpha1"], p["beta1"]
        beta2, beta3 = _t9_derived(a1, b1, lam, mu)
        a2 = -(a1 * lam + b1 * mu)
        _require(a1 * a1 + b1 * b1 > 0.0, f, "nonzero first block")
        _require(a2 * a2 + beta2 * beta2 > 0.0, f, "nonzero second block")
        r12 = _xy_half_turn(a1, b1)
        r23 = _xy_half_turn(a2, beta2)
        r31 = np.array([[lam, mu, 0.0], [-mu, lam, 0.0], [0.0, 0.0, 1.0]])
        return ChainWitness(
            r12=r12, b12=np.array([-a1, -b1, 0.0]),
            r23=r23, b23=np.array([-a2, -beta2, 0.0]),
            r31=r31, b31=np.array([0.0, beta3, 0.0]),
        )
    if f == "t10":
        g1, g2, delta = p["gamma1"], p["gamma2"], p["delta"]
        e1, e2 = p["eps1"], p["eps2"]
        _require(e1 in (-1.0, 1.0) and e2 in (-1.0, 1.0), f, "eps in {-1, +1}")
        s = np.array([0.0, delta, 1.0])
        r0 = half_turn(s)
        return ChainWitness(
            r12=(r0 if e2 == 1.0 else _I).copy(), b12=-e2 * g1 * s,
            r23=(r0 if e1 == 1.0 else _I).copy(), b23=-e1 * g2 * s,
            r31=(r0 if e1 * e2 == -1.0 else _I).copy(),
            b31=(e2 * g1 + e1 * g2) * s,
        )
    raise FamilyParamError(f"unknown family {f!r}")


def chain_defect(w: ChainWitness, t: EssentialTriplet) -> tuple[float, float, float]:
    """(rotation closure, baseline closure, edge reconstruction) defects.

    The baseline defect is relative to the largest baseline, the edge
    defect relative to the block norms; the rotation defect is already
    dimensionless.
    """
    rot = float(np.linalg.norm(w.r12 @ w.r23 @ w.r31 - _I))
    residual = w.r12.T @ w.b12 + w.r23 @ w.b31 + w.b23
    scale = max(1.0, *(float(np.linalg.norm(b)) for _, b in w.edges()))
    trans = float(np.linalg.norm(residual)) / scale
    recon = 0.0
    for (r, b), e in zip(w.edges(), t.blocks()):
        recon = max(recon, float(np.linalg.norm(skew(b) @ r - e))
                    / max(1.0, float(np.linalg.norm(e))))
    return rot, trans, recon


def verify_chain(w: ChainWitness, t: EssentialTriplet, tol: float = 1e-8) -> bool:
    """True iff the chain closes and every edge reconstructs its block
    within ``tol``."""
    rot, trans, recon = chain_defect(w, t)
    return rot <= tol and trans <= tol and recon <= tol


def witness_from_chain(w: ChainWitness, tol: float = 1e-8) -> CameraTriple:
    """Camera triple realizing a closed chain (gauge: R1 = I, b1 = 0).

    Raises :class:`ChainError` when the chain conditions do not hold.
    """
    rot = float(np.linalg.norm(w.r12 @ w.r23 @ w.r31 - _I))
    residual = w.r12.T @ w.b12 + w.r23 @ w.b31 + w.b23
    scale = max(1.0, *(float(np.linalg.norm(b)) for _, b in w.edges()))
    if rot > tol or float(np.linalg.norm(residual)) / scale > tol:
        raise ChainError(
            f"chain does not close: rotation defect {rot:.3e}, "
            f"baseline defect {np.linalg.norm(residual) / scale:.3e}")
    return CameraTriple(
        (_I.copy(), w.r12.T.copy(), w.r31.copy()),
        (np.zeros(3), -w.b12, w.r31.T @ w.b31),
    )


# ---------------------------------------------------------------------------
# parameter sampling for randomized studies
# ---------------------------------------------------------------------------

def _away_from_zero(rng, lo: float = 0.1, hi: float = 1.1) -> float:
    return float(rng.uniform(lo, hi) * rng.choice([-1.0, 1.0]))


def _circle_point(rng) -> tuple[float, float]:
    theta = rng.uniform(0.1, np.pi - 0.1)
    return float(np.cos(theta)), float(np.sin(theta))


def sample_family_params(family: str, seed) -> FamilyParams:
    """Random valid parameters with every block bounded away from zero."""
    rng = as_rng(seed)
    if family == "t1":
        while True:
            sc = {k: _away_from_zero(rng) for k in
                  ("alpha1", "beta1", "gamma1", "beta2", "gamma2")}
            if max(abs(sc["beta1"] + sc["beta2"]),
                   abs(sc["gamma1"] + sc["gamma2"])) > 0.05:
                return FamilyParams("t1", sc)
    if family == "t2":
        return FamilyParams("t2", {"alpha1": _away_from_zero(rng),
                                   "beta2": _away_from_zero(rng)})
    if family == "t2_1":
        return FamilyParams("t2_1", {"alpha1": _away_from_zero(rng),
                                     "beta1": _away_from_zero(rng)})
    if family == "t3":
        return FamilyParams("t3", {"alpha1": _away_from_zero(rng),
                                   "beta1": _away_from_zero(rng)})
    if family == "t4":
        while True:
            sc = {k: _away_from_zero(rng) for k in ("beta2", "gamma2", "gamma3")}
            if abs(sc["gamma2"] + sc["gamma3"]) > 0.05:
                return FamilyParams("t4", sc)
    if family == "t4_1":
        while True:
            sc = {k: _away_from_zero(rng) for k in ("beta1", "gamma1", "gamma3")}
            if abs(sc["gamma1"] + sc["gamma3"]) > 0.05:
                return FamilyParams("t4_1", sc)
    if family == "t5":
        while True:
            b1 = float(rng.uniform(0.3, 1.1))
            b3 = float(rng.uniform(0.3, 1.1))
            b2 = -b1 - b3 + rng.uniform(-0.9, 0.9) * 2.0 * np.sqrt(b1 * b3)
            if abs(b2) < 0.05:
                continue
            delta = t5_delta(b1, b2, b3) * rng.choice([-1.0, 1.0])
            return FamilyParams("t5", {"beta1": b1, "beta2": float(b2),
                                       "beta3": b3, "delta": float(delta)})
    if family == "t7":
        lam, mu = _circle_point(rng)
        return FamilyParams("t7", {"beta1": _away_from_zero(rng),
                                   "beta3": _away_from_zero(rng),
                                   "lambda": lam, "mu": mu})
    if family == "t8":
        lam, mu = _circle_point(rng)
        return FamilyParams("t8", {"beta2": _away_from_zero(rng),
                                   "beta3": _away_from_zero(rng),
                                   "lambda": lam, "mu": mu})
    if family == "t9":
        while True:
            lam, mu = _circle_point(rng)
            a1 = _away_from_zero(rng)
            b1 = _away_from_zero(rng)
            if (abs(a1 * mu - b1 * (lam - 1.0)) > 0.05
                    and abs(a1 * lam + b1 * mu) > 0.05):
                return FamilyParams("t9", {"alpha1": a1, "beta1": b1,
                                           "lambda": lam, "mu": mu})
    if family == "t10":
        while True:
            g1 = _away_from_zero(rng)
            g2 = _away_from_zero(rng)
            e1 = float(rng.choice([-1.0, 1.0]))
            e2 = float(rng.choice([-1.0, 1.0]))
            if abs(e1 * g1 + e2 * g2) > 0.05:
                return FamilyParams("t10", {"gamma1": g1, "gamma2": g2,
                                            "delta": float(rng.uniform(-1, 1)),
                                            "eps1": e1, "eps2": e2})
    raise FamilyParamError(f"unknown family {family!r}")
