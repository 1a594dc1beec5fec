"""Invariant suite behind the ``selftest`` CLI command.

Each check runs a randomized study at a configurable trial count and
returns (name, passed, detail). The full acceptance suite in the test
tree runs the same properties at the pinned scales.
"""
from __future__ import annotations

import numpy as np

from . import averaging, constraints, mat3core, synthesis
from .essential import factor_essential
from .mat3core import as_rng, random_rotation, skew


def _check_diamond_identities(rng, trials: int):
    worst = 0.0
    for _ in range(trials):
        a, b, c, d = (rng.uniform(-1, 1, size=(3, 3)) for _ in range(4))
        beta, gamma = rng.uniform(-2, 2, size=2)
        pairs = [
            (mat3core.diamond(a, b), mat3core.diamond(b, a)),
            (mat3core.diamond(a, beta * b + gamma * c),
             beta * mat3core.diamond(a, b) + gamma * mat3core.diamond(a, c)),
            (mat3core.diamond(a, b).T, mat3core.diamond(a.T, b.T)),
            (mat3core.diamond(c @ a @ d, c @ b @ d),
             mat3core.adjugate(d) @ mat3core.diamond(a, b) @ mat3core.adjugate(c)),
            (mat3core.diamond(a, np.eye(3)), a - np.trace(a) * np.eye(3)),
            (mat3core.diamond(a, b), mat3core.diamond_trace_form(a, b)),
        ]
        for lhs, rhs in pairs:
            scale = max(1.0, float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
            worst = max(worst, float(np.linalg.norm(lhs - rhs)) / scale)
    return worst < 1e-10, f"max relative defect {worst:.2e}"


def _check_necessity(rng, trials: int):
    worst = 0.0
    modes = [synthesis.GENERAL, synthesis.COLLINEAR, synthesis.NEAR_COINCIDENT]
    for k in range(trials):
        mode = modes[k % 3]
        t = synthesis.triplet_from_cameras(
            synthesis.random_camera_triple(mode, seed=rng, epsilon=1e-3))
        worst = max(worst, constraints.residual_vector(t).max_abs())
    return worst < 1e-9, f"max normalized residual {worst:.2e}"


def _check_families(rng, trials: int):
    worst_r = worst_c = 0.0
    per_family = max(1, trials // len(synthesis.FAMILIES))
    for family in synthesis.FAMILIES:
        for _ in range(per_family):
            p = synthesis.sample_family_params(family, rng)
            t = synthesis.family_triplet(p)
            w = synthesis.witness_for_family(p)
            worst_r = max(worst_r, constraints.residual_vector(t).max_abs())
            worst_c = max(worst_c, max(synthesis.chain_defect(w, t)))
    ok = worst_r < 1e-9 and worst_c < 1e-10
    return ok, f"residual {worst_r:.2e}, chain defect {worst_c:.2e}"


def _check_discrimination(rng, trials: int):
    smallest = np.inf
    for _ in range(trials):
        t = constraints.EssentialTriplet(
            synthesis.random_essential(rng), synthesis.random_essential(rng),
            synthesis.random_essential(rng))
        decision = constraints.is_compatible(t)
        if decision.decision != constraints.INCOMPATIBLE:
            return False, f"random triplet classified {decision.decision}"
        smallest = min(smallest, decision.report.max_abs())
    return smallest >= 1e-3, f"min residual {smallest:.2e}"


def _check_invariance(rng, trials: int):
    worst = 0.0
    for k in range(trials):
        if k % 2 == 0:
            t = synthesis.triplet_from_cameras(
                synthesis.random_camera_triple(seed=rng))
        else:
            t = constraints.EssentialTriplet(
                synthesis.random_essential(rng), synthesis.random_essential(rng),
                synthesis.random_essential(rng))
        us = [random_rotation(rng) for _ in range(3)]
        scale = float(10.0 ** rng.uniform(-3, 3))
        other = t.rotated(*us).scaled(scale)
        r0 = constraints.residual_vector(t).family_norms()
        r1 = constraints.residual_vector(other).family_norms()
        worst = max(worst, float(np.max(np.abs(r0 - r1))))
        if (constraints.is_compatible(t).decision
                != constraints.is_compatible(other).decision):
            return False, "decision changed under transform"
    return worst < 1e-9, f"max residual drift {worst:.2e}"


def _check_reduced_agreement(rng, trials: int):
    for k in range(trials):
        if k % 2 == 0:
            t = synthesis.triplet_from_cameras(
                synthesis.random_camera_triple(seed=rng))
        else:
            t = constraints.EssentialTriplet(
                synthesis.random_essential(rng), synthesis.random_essential(rng),
                synthesis.random_essential(rng))
        full = constraints.is_compatible(t, residual_set="full").decision
        reduced = constraints.is_compatible(t, residual_set="reduced").decision
        if full != reduced:
            return False, f"sets disagree: {full} vs {reduced}"
    return True, "full and reduced decisions agree"


def _check_spectral(rng, trials: int):
    worst = 0.0
    for _ in range(trials):
        t = synthesis.triplet_from_cameras(
            synthesis.random_camera_triple(seed=rng))
        sd = constraints.spectral_diagnostics(t)
        m = float(np.linalg.norm(constraints.block_matrix(t)))
        coeff_err = abs(sd.lambda6_coeff
                        + 2.0 * np.trace(t.e12 @ t.e23 @ t.e31)) / m**3
        worst = max(worst, sd.pairing_defect / m,
                    abs(sd.lambda_relation) / m**2, coeff_err)
    return worst < 1e-8, f"max spectral defect {worst:.2e}"


def _check_factorization(rng, trials: int):
    worst = 0.0
    for _ in range(trials):
        e = synthesis.random_essential(rng)
        best = min(
            float(np.linalg.norm(skew(c.baseline) @ c.rotation - e))
            for c in factor_essential(e) if c.sign == 1)
        worst = max(worst, best / float(np.linalg.norm(e)))
    return worst < 1e-10, f"max reconstruction defect {worst:.2e}"


def _check_averaging(rng, trials: int):
    worst_cost = worst_feas = 0.0
    for k in range(max(2, trials // 10)):
        t = synthesis.triplet_from_cameras(
            synthesis.random_camera_triple(
                synthesis.COLLINEAR if k % 2 else synthesis.GENERAL, seed=rng))
        result = averaging.average(t, restarts=1, seed=int(rng.integers(2**32)))
        worst_cost = max(worst_cost, result.cost)
        worst_feas = max(worst_feas, result.residual_report.max_abs())
    ok = worst_cost < 1e-12 and worst_feas < 1e-9
    return ok, f"zero-noise cost {worst_cost:.2e}, feasibility {worst_feas:.2e}"


CHECKS = (
    ("diamond-identities", _check_diamond_identities),
    ("necessity-random-cameras", _check_necessity),
    ("family-sufficiency", _check_families),
    ("discrimination", _check_discrimination),
    ("transform-invariance", _check_invariance),
    ("reduced-set-agreement", _check_reduced_agreement),
    ("spectral-structure", _check_spectral),
    ("factorization-roundtrip", _check_factorization),
    ("averaging-fixed-point", _check_averaging),
)


def run_selftest(trials: int = 100, seed=0):
    """Run every invariant check; returns a list of (name, ok, detail)."""
    results = []
    for name, fn in CHECKS:
        rng = as_rng(np.random.SeedSequence([hash(name) & 0xFFFF, int(seed)]))
        ok, detail = fn(rng, trials)
        results.append((name, bool(ok), detail))
    return results
