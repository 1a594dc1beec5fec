"""Rectification (averaging) of a noisy triplet of essential matrices.

Given a triplet ``That`` whose blocks are rank two but jointly
incompatible, find unit-norm edge scales ``L = (l12, l23, l31)`` and a
compatible triplet ``T`` minimizing  ||T - L o That||_F^2  (each block of
``That`` multiplied by its scale).

The compatible set is parametrized by a camera triple with the gauge
R1 = I, b1 = 0, which keeps every iterate exactly compatible and turns
the problem into alternation between

* a closed-form scale update: the quadratic-over-the-sphere subproblem
  l_e = <T_e, That_e> / (||That_e||^2 + nu) with the multiplier nu fixed
  by safeguarded root bracketing so that ||L|| = 1 (with the standard
  hard-case handling when the inner products vanish on the smallest
  block);
* gradient descent over (R2, R3, b2, b3) with analytic gradients,
  axis-angle retraction on the rotations, and Armijo backtracking;
* an exact line search along the common rescaling of (b2, b3), which is
  free because the scale triple only fixes relative block weights.

Initialization factors each block (after projecting it to the closest
essential matrix) into its four baseline/rotation candidates, picks the
combination with the smallest chain-closure defect among the 4^3, and
repairs that chain in least squares before lifting it to cameras.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constraints import EssentialTriplet, ResidualReport, residual_vector
from .errors import DegenerateInput
from .essential import TAU_RANK, closest_essential, factor_essential
from .mat3core import rotation_from_axis_angle, skew
from .synthesis import CameraTriple, ChainWitness, triplet_from_cameras, witness_from_chain

MAX_ITERS = 500
TOL_GRAD = 1e-10
TOL_COST = 1e-14
RESTARTS = 8

# Lower bound on ||b2||^2 + ||b3||^2, excluding the collapsed configuration.
_BASELINE_FLOOR = 1e-6
_I = np.eye(3)


@dataclass
class AveragingResult:
    """Outcome of :func:`average`.

    ``triplet`` is exactly compatible by construction (it is generated
    from ``cameras``) regardless of convergence; ``cost`` is the attained
    value of ||T - L o That||^2.
    """

    triplet: EssentialTriplet
    scales: np.ndarray
    cameras: CameraTriple
    cost: float
    iterations: int
    converged: bool
    residual_report: ResidualReport
    cost_trace: list[float] = field(default_factory=list)


def cost(t: EssentialTriplet, that: EssentialTriplet, scales) -> float:
    """Sum over edges of ||T_e - l_e * That_e||_F^2."""
    scales = np.asarray(scales, dtype=float)
    total = 0.0
    for l, a, b in zip(scales, t.blocks(), that.blocks()):
        d = a - l * b
        total += float(np.sum(d * d))
    return total


def optimal_scales(t: EssentialTriplet, that: EssentialTriplet) -> np.ndarray:
    """Unit-norm scales minimizing :func:`cost` for fixed ``t``.

    Solves the sphere-constrained quadratic exactly, including the hard
    case (all inner products vanishing on the smallest-norm edge), where
    the leftover mass goes to the smallest-norm edge with positive sign.
    """
    a = np.array([np.sum(b * b) for b in that.blocks()])  # ||That_e||^2
    c = np.array([np.sum(x * y) for x, y in zip(t.blocks(), that.blocks())])
    if np.all(a == 0.0):
        raise DegenerateInput("all blocks of the target triplet are zero")

    a_min = float(np.min(a))
    on_min = np.isclose(a, a_min, rtol=1e-12, atol=1e-300)
    free = ~on_min

    def sq_norm(nu: float) -> float:
        return float(np.sum((c / (a + nu)) ** 2))

    hard_mass = float(np.sum((c[free] / (a[free] - a_min)) ** 2)) if np.any(free) else 0.0
    min_c_zero = np.allclose(c[on_min], 0.0, atol=1e-300)
    if min_c_zero and hard_mass <= 1.0:
        # hard case: the multiplier sits at the boundary nu = -a_min
        scales = np.zeros(3)
        scales[free] = c[free] / (a[free] - a_min)
        leftover = np.sqrt(max(0.0, 1.0 - hard_mass))
        scales[int(np.argmin(a))] = leftover
    else:
        lo = -a_min
        span = float(np.linalg.norm(c))
        hi = -a_min + span + 1.0  # sq_norm(hi) < 1 by construction
        step = max(span, 1.0) * 1e-8
        while sq_norm(lo + step) <= 1.0:
            step *= 0.5
            if step < 1e-300:
                break
        nu = brentq(lambda x: sq_norm(x) - 1.0, lo + step, hi,
                    xtol=1e-15 * max(1.0, a_min), rtol=8.9e-16, maxiter=200)
        scales = c / (a + nu)
    n = np.linalg.norm(scales)
    return scales / n if n > 0 else scales


def _vee2(m: np.ndarray) -> np.ndarray:
    """Pairing of a matrix against skew generators: <M, [w]_x> = vee2(M) . w."""
    return np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])


def _blocks_of(cams: CameraTriple) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r2, r3 = cams.rotations[1], cams.rotations[2]
    b2, b3 = cams.baselines[1], cams.baselines[2]
    return (-skew(b2) @ r2.T, r2 @ skew(b2 - b3) @ r3.T, r3 @ skew(b3))


def cost_and_gradient(cams: CameraTriple, that: EssentialTriplet,
                      scales) -> tuple[float, np.ndarray]:
    """Cost and its gradient in the 12 free camera parameters.

    Parameter order: body-frame rotation increments (w2, w3) with the
    retraction R -> R exp([w]_x), then the baseline increments (b2, b3).
    """
    scales = np.asarray(scales, dtype=float)
    r2, r3 = cams.rotations[1], cams.rotations[2]
    b2, b3 = cams.baselines[1], cams.baselines[2]
    e12, e23, e31 = _blocks_of(cams)
    g12 = e12 - scales[0] * that.e12
    g23 = e23 - scales[1] * that.e23
    g31 = e31 - scales[2] * that.e31
    f = float(np.sum(g12 * g12) + np.sum(g23 * g23) + np.sum(g31 * g31))

    c = b2 - b3
    m23 = r2.T @ g23 @ r3
    gw2 = 2.0 * (_vee2(-skew(b2) @ g12 @ r2) + _vee2(-m23 @ skew(c)))
    gw3 = 2.0 * (_vee2(skew(c) @ m23) + _vee2(-r3.T @ g31 @ skew(b3)))
    gb2 = 2.0 * (-_vee2(g12 @ r2) + _vee2(m23))
    gb3 = 2.0 * (-_vee2(m23) + _vee2(r3.T @ g31))
    return f, np.concatenate([gw2, gw3, gb2, gb3])


def _exp_so3(w: np.ndarray) -> np.ndarray:
    angle = float(np.linalg.norm(w))
    if angle == 0.0:
        return _I.copy()
    return rotation_from_axis_angle(w / angle, angle)


_BASIS_SKEW = (skew([1.0, 0.0, 0.0]), skew([0.0, 1.0, 0.0]), skew([0.0, 0.0, 1.0]))


def _residual_and_jacobian(cams: CameraTriple, that: EssentialTriplet,
                           scales) -> tuple[np.ndarray, np.ndarray]:
    """Stacked 27-vector residual of the three blocks and its 27x12
    Jacobian in the tangent parametrization of :func:`apply_step`."""
    scales = np.asarray(scales, dtype=float)
    r2, r3 = cams.rotations[1], cams.rotations[2]
    b2, b3 = cams.baselines[1], cams.baselines[2]
    c = b2 - b3
    e12, e23, e31 = _blocks_of(cams)
    res = np.concatenate([
        (e12 - scales[0] * that.e12).ravel(),
        (e23 - scales[1] * that.e23).ravel(),
        (e31 - scales[2] * that.e31).ravel(),
    ])
    jac = np.zeros((27, 12))
    sb2, sb3, sc = skew(b2), skew(b3), skew(c)
    for i, g in enumerate(_BASIS_SKEW):
        jac[0:9, i] = (sb2 @ g @ r2.T).ravel()            # dE12/dw2
        jac[9:18, i] = (r2 @ g @ sc @ r3.T).ravel()       # dE23/dw2
        jac[9:18, 3 + i] = -(r2 @ sc @ g @ r3.T).ravel()  # dE23/dw3
        jac[18:27, 3 + i] = (r3 @ g @ sb3).ravel()        # dE31/dw3
        jac[0:9, 6 + i] = -(g @ r2.T).ravel()             # dE12/db2
        jac[9:18, 6 + i] = (r2 @ g @ r3.T).ravel()        # dE23/db2
        jac[9:18, 9 + i] = -(r2 @ g @ r3.T).ravel()       # dE23/db3
        jac[18:27, 9 + i] = (r3 @ g).ravel()              # dE31/db3
    return res, jac


def apply_step(cams: CameraTriple, delta: np.ndarray) -> CameraTriple:
    """Retract a 12-vector step onto the camera parametrization.

    Keeps the gauge (R1 = I, b1 = 0) and enforces the baseline floor that
    excludes the collapsed all-zero configuration.
    """
    delta = np.asarray(delta, dtype=float)
    r2 = cams.rotations[1] @ _exp_so3(delta[0:3])
    r3 = cams.rotations[2] @ _exp_so3(delta[3:6])
    b2 = cams.baselines[1] + delta[6:9]
    b3 = cams.baselines[2] + delta[9:12]
    s = float(b2 @ b2 + b3 @ b3)
    if s < _BASELINE_FLOOR:
        if s == 0.0:
            b2 = np.array([np.sqrt(_BASELINE_FLOOR), 0.0, 0.0])
        else:
            f = np.sqrt(_BASELINE_FLOOR / s)
            b2, b3 = b2 * f, b3 * f
    return CameraTriple((_I.copy(), r2, r3), (np.zeros(3), b2, b3))


def _joint_scale_update(cams: CameraTriple,
                        that: EssentialTriplet) -> tuple[np.ndarray, CameraTriple]:
    """Exact minimization over the scale triple and the free common
    rescaling of (b2, b3) with the camera directions held fixed.

    With the baseline scale s eliminated, the cost is the quadratic form
    l^T (diag(||That_e||^2) - q q^T / ||E||^2) l on the unit sphere with
    q_e = <E_e, That_e>, so the optimum is the smallest eigenvector. This
    captures in one step the norm-rebalancing mode that plain alternation
    traverses slowly.
    """
    blocks = _blocks_of(cams)
    a = np.array([np.sum(b * b) for b in that.blocks()])
    q = np.array([np.sum(e * b) for e, b in zip(blocks, that.blocks())])
    e2 = sum(float(np.sum(e * e)) for e in blocks)
    if e2 == 0.0:
        return optimal_scales(triplet_from_cameras(cams), that), cams
    form = np.diag(a) - np.outer(q, q) / e2
    w, v = np.linalg.eigh(form)
    lam = v[:, 0]
    s = float(lam @ q) / e2
    if s < 0.0:
        lam, s = -lam, -s
    b2, b3 = s * cams.baselines[1], s * cams.baselines[2]
    if s == 0.0 or float(b2 @ b2 + b3 @ b3) < _BASELINE_FLOOR:
        return optimal_scales(triplet_from_cameras(cams), that), cams
    return lam, CameraTriple(cams.rotations, (np.zeros(3), b2, b3))


def _solve_from(cams: CameraTriple, that: EssentialTriplet, max_iters: int,
                tol_grad: float, tol_cost: float):
    """Descend the scale-eliminated cost from one initialization.

    Every evaluation re-solves the closed-form scale subproblem, so the
    iteration minimizes F(cameras) = min over unit scales of the cost
    (the scales are "projected out"). By the envelope theorem the partial
    camera gradient at the optimal scales is the gradient of F, so damped
    Gauss-Newton steps with Armijo backtracking (falling back to steepest
    descent) are monotone on F.
    """
    scales, cams = _joint_scale_update(cams, that)
    res, jac = _residual_and_jacobian(cams, that, scales)
    f = float(res @ res)
    trace = [f]
    iterations = 0
    converged = False
    while iterations < max_iters:
        g = 2.0 * jac.T @ res
        if float(np.linalg.norm(g)) <= tol_grad:
            converged = True
            break
        jtj = jac.T @ jac
        damping = 1e-12 * max(1.0, float(np.trace(jtj)) / 12.0)
        try:
            gauss_newton = np.linalg.solve(jtj + damping * np.eye(12), -0.5 * g)
        except np.linalg.LinAlgError:
            gauss_newton = -g
        accepted = False
        for direction in (gauss_newton, -g):
            slope = float(g @ direction)
            if slope >= 0.0:
                continue
            alpha = 1.0
            while alpha > 1e-18:
                trial = apply_step(cams, alpha * direction)
                scales_t, trial = _joint_scale_update(trial, that)
                res_t, jac_t = _residual_and_jacobian(trial, that, scales_t)
                ft = float(res_t @ res_t)
                if ft <= f + 1e-4 * alpha * slope:
                    cams, scales, res, jac, f = trial, scales_t, res_t, jac_t, ft
                    accepted = True
                    break
                alpha *= 0.5
            if accepted:
                break
        iterations += 1
        if not accepted:
            break
        trace.append(f)
        if len(trace) > 2 and abs(trace[-2] - trace[-1]) <= tol_cost * max(1.0, f):
            converged = True
            break
    return cams, scales, f, iterations, converged, trace


def _candidate_chains(that: EssentialTriplet) -> list[tuple[float, ChainWitness]]:
    """Rank the 4^3 factorization combinations by chain-closure defect.

    The baseline cycle only closes at the true relative edge scales,
    which the (arbitrarily scaled) input blocks do not reveal; for each
    combination the best-closing scales are the smallest right singular
    vector of the stacked cycle directions, and the baselines are
    rescaled by them before scoring.
    """
    factored = [factor_essential(closest_essential(b), tol_ess=np.inf)
                for b in that.blocks()]
    ranked = []
    for c12 in factored[0]:
        for c23 in factored[1]:
            for c31 in factored[2]:
                rot = np.linalg.norm(c12.rotation @ c23.rotation @ c31.rotation - _I)
                cycle = np.column_stack([
                    c12.rotation.T @ c12.baseline,
                    c23.baseline,
                    c23.rotation @ c31.baseline,
                ])
                col_norms = np.linalg.norm(cycle, axis=0)
                u, s, vt = np.linalg.svd(cycle / np.maximum(col_norms, 1e-12))
                t = vt[-1]
                # keep every edge alive: the optimizer needs a nonzero
                # baseline direction per edge
                floor = 1e-3 * float(np.max(np.abs(t)))
                t = np.where(np.abs(t) < floor, floor, t)
                t /= np.max(np.abs(t))
                scales = t / np.maximum(col_norms, 1e-12)
                defect = float(rot) + float(s[-1])
                w = ChainWitness(c12.rotation, scales[0] * c12.baseline,
                                 c23.rotation, scales[1] * c23.baseline,
                                 c31.rotation, scales[2] * c31.baseline)
                ranked.append((defect, w))
    ranked.sort(key=lambda item: item[0])
    return ranked


def _repair_chain(w: ChainWitness) -> ChainWitness:
    """Exactly close a nearly-closed chain (least-squares baseline split)."""
    r31 = (w.r12 @ w.r23).T
    s = w.r12.T @ w.b12 + w.r23 @ w.b31 + w.b23
    return ChainWitness(
        r12=w.r12, b12=w.b12 - w.r12 @ (s / 3.0),
        r23=w.r23, b23=w.b23 - s / 3.0,
        r31=r31, b31=w.b31 - w.r23.T @ (s / 3.0),
    )


def _perturbed(cams: CameraTriple, rng: np.random.Generator,
               magnitude: float) -> CameraTriple:
    def jiggle_rot(r):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        return r @ rotation_from_axis_angle(axis, magnitude * rng.uniform(0.2, 1.0))

    scale = max(np.linalg.norm(cams.baselines[1]), np.linalg.norm(cams.baselines[2]), 0.1)
    return CameraTriple(
        (_I.copy(), jiggle_rot(cams.rotations[1]), jiggle_rot(cams.rotations[2])),
        (np.zeros(3),
         cams.baselines[1] + magnitude * scale * rng.normal(size=3),
         cams.baselines[2] + magnitude * scale * rng.normal(size=3)),
    )


def _canonical(scales: np.ndarray, cams: CameraTriple) -> tuple[np.ndarray, CameraTriple]:
    # (T, L) and (-T, -L) are the same solution; pick the first nonzero
    # scale positive.
    for s in scales:
        if s != 0.0:
            if s < 0.0:
                return -scales, CameraTriple(
                    cams.rotations, tuple(-b for b in cams.baselines))
            break
    return scales, cams


def average(that: EssentialTriplet, max_iters: int = MAX_ITERS,
            tol_grad: float = TOL_GRAD, tol_cost: float = TOL_COST,
            restarts: int = RESTARTS, seed=0,
            rank_tol: float = TAU_RANK) -> AveragingResult:
    """Project a noisy triplet onto the compatible set (see module docs).

    Raises :class:`DegenerateInput` when a block is not rank two.
    Non-convergence within the iteration budget is reported through
    ``converged=False`` on the best iterate, not as an error.
    """
    for name, b in zip(("E12", "E23", "E31"), that.blocks()):
        # noisy measurements are full rank; only blocks without two clear
        # directions (no factorable essential nearby) are degenerate
        s = np.linalg.svd(b, compute_uv=False)
        if s[0] == 0.0 or s[1] <= rank_tol * s[0]:
            raise DegenerateInput(f"block {name} has rank below two")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")

    chains = _candidate_chains(that)
    # the best-closing combinations first; later restarts jitter the best
    # one to probe its neighborhood
    seeds = [witness_from_chain(_repair_chain(w), tol=np.inf)
             for _, w in chains[:min(4, restarts)]]
    rng = np.random.default_rng(seed)

    best = None
    for restart in range(restarts):
        if restart < len(seeds):
            start = seeds[restart]
        else:
            start = _perturbed(seeds[0], rng,
                               0.15 * restart / max(1, restarts - 1))
        cams, scales, f, iterations, converged, trace = _solve_from(
            start, that, max_iters, tol_grad, tol_cost)
        if best is None or f < best[2]:
            best = (cams, scales, f, iterations, converged, trace)

    cams, scales, _, iterations, converged, trace = best
    # the scales are jointly optimal already; one plain refresh pins them
    # to the exact per-edge optimum for the final triplet
    scales = optimal_scales(triplet_from_cameras(cams), that)
    scales, cams = _canonical(scales, cams)
    triplet = triplet_from_cameras(cams)
    final_cost = cost(triplet, that, scales)
    trace.append(final_cost)
    return AveragingResult(
        triplet=triplet,
        scales=scales,
        cameras=cams,
        cost=final_cost,
        iterations=iterations,
        converged=converged,
        residual_report=residual_vector(triplet),
        cost_trace=trace,
    )
