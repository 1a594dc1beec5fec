import numpy as np
import pytest

from esstriad.constraints import (ALL_TRIPLES, ANTICYCLIC_TRIPLES,
                                  COMPATIBLE, CYCLIC_TRIPLES, DEGENERATE,
                                  INCOMPATIBLE, EssentialTriplet, block_matrix,
                                  cubic_collapses_to_demazure,
                                  fundamental_triplet_residuals, is_compatible,
                                  residual_cubic, residual_diamond,
                                  residual_quartic, residual_sextic,
                                  residual_triple_trace, residual_vector,
                                  spectral_diagnostics)
from esstriad.errors import RankError
from esstriad.mat3core import random_rotation, skew
from esstriad.synthesis import random_essential

from conftest import compatible_triplet, fundamental_compatible


def skew_triplet(c, d):
    c, d = np.asarray(c, dtype=float), np.asarray(d, dtype=float)
    return EssentialTriplet(skew(c), skew(d), -skew(c) - skew(d))


def random_triplet(rng):
    return EssentialTriplet(random_essential(rng), random_essential(rng),
                            random_essential(rng))


ZERO = EssentialTriplet(np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3)))


class TestBlockMatrix:
    def test_zero_triplet(self):
        np.testing.assert_array_equal(block_matrix(ZERO), np.zeros((9, 9)))

    def test_symmetric_with_zero_diagonal(self, rng):
        m = block_matrix(random_triplet(rng))
        np.testing.assert_array_equal(m, m.T)
        for i in range(3):
            np.testing.assert_array_equal(m[3 * i:3 * i + 3, 3 * i:3 * i + 3],
                                          np.zeros((3, 3)))

    def test_skew_triplet_spectrum_pairs(self):
        # eigenvalues come in +- pairs with a triple zero
        t = skew_triplet([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        w = np.sort(np.linalg.eigvalsh(block_matrix(t)))
        np.testing.assert_allclose(w[:3][::-1], -w[6:], atol=1e-12)
        np.testing.assert_allclose(w[3:6], np.zeros(3), atol=1e-12)

    def test_block_indexing(self, rng):
        t = random_triplet(rng)
        np.testing.assert_array_equal(t.block(2, 1), t.e12.T)
        np.testing.assert_array_equal(t.block(1, 3), t.e31.T)
        with pytest.raises(IndexError):
            t.block(1, 1)


class TestResidualFamilies:
    def test_triple_trace_on_paper_case(self):
        t = skew_triplet([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        assert abs(residual_triple_trace(t)) < 1e-15

    def test_triple_trace_zero_triplet(self):
        assert residual_triple_trace(ZERO) == 0.0

    def test_triple_trace_random_nonzero(self, rng):
        assert abs(residual_triple_trace(random_triplet(rng))) > 1e-8

    def test_cubic_zero_on_skew_triplet(self, rng):
        t = skew_triplet(rng.normal(size=3), rng.normal(size=3))
        for (i, j, k) in ALL_TRIPLES:
            np.testing.assert_allclose(residual_cubic(t, i, j, k),
                                       np.zeros((3, 3)), atol=1e-14)

    def test_cubic_zero_on_camera_triplet(self):
        for seed in range(20):
            t = compatible_triplet(seed)
            for (i, j, k) in ALL_TRIPLES:
                assert np.max(np.abs(residual_cubic(t, i, j, k))) < 1e-13

    def test_cubic_rejects_bad_indices(self, rng):
        with pytest.raises(IndexError):
            residual_cubic(random_triplet(rng), 1, 1, 2)

    def test_cubic_nonzero_on_random(self, rng):
        vals = [np.max(np.abs(residual_cubic(random_triplet(rng), 1, 2, 3)))
                for _ in range(50)]
        assert min(vals) > 1e-3

    def test_cubic_collapses_to_single_matrix_characterization(self, rng):
        t = random_triplet(rng)
        for (i, j) in ((1, 2), (2, 3), (3, 1)):
            assert cubic_collapses_to_demazure(t, i, j) == 0.0

    def test_diamond_zero_on_compatible(self):
        for seed in range(20):
            t = compatible_triplet(seed)
            for (i, j, k) in CYCLIC_TRIPLES:
                assert np.max(np.abs(residual_diamond(t, i, j, k))) < 1e-10

    def test_diamond_zero_triplet(self):
        for (i, j, k) in CYCLIC_TRIPLES:
            np.testing.assert_array_equal(residual_diamond(ZERO, i, j, k),
                                          np.zeros((3, 3)))

    def test_diamond_reversal_transposes(self, rng):
        t = random_triplet(rng)
        for (i, j, k) in CYCLIC_TRIPLES:
            np.testing.assert_allclose(residual_diamond(t, k, j, i,
                                                        normalized=False),
                                       residual_diamond(t, i, j, k,
                                                        normalized=False).T,
                                       atol=1e-12)

    def test_quartic_sextic_zero_on_compatible(self):
        for seed in range(20):
            for mode in ("general", "collinear"):
                t = compatible_triplet(seed, mode)
                assert abs(residual_quartic(t)) < 1e-10
                assert abs(residual_sextic(t)) < 1e-10

    def test_quartic_sextic_zero_triplet(self):
        assert residual_quartic(ZERO) == 0.0
        assert residual_sextic(ZERO) == 0.0

    def test_collinear_epipole_family_quartic(self):
        s = skew([0.0, 0.0, 1.0])
        t = EssentialTriplet(s, s, 2.0 * s)
        assert abs(residual_quartic(t)) < 1e-14

    def test_sextic_matches_eigenvalue_expansion(self, rng):
        # the sextic equals the symmetric-function expansion of the
        # pair-magnitude relation evaluated on the spectrum
        for _ in range(20):
            t = random_triplet(rng)
            w = np.linalg.eigvalsh(block_matrix(t))
            p = [sum(w**2), sum([x**2 * y**2 for i, x in enumerate(w)
                                 for y in w[i + 1:]]),
                 ]
            t2 = float(np.sum(w**2))
            t4 = float(np.sum(w**4))
            t6 = float(np.sum(w**6))
            expansion = t2**3 - 12.0 * t2 * t4 + 32.0 * t6
            assert abs(residual_sextic(t, normalized=False) - expansion) \
                <= 1e-8 * max(1.0, abs(expansion))


class TestResidualVector:
    def test_counts(self, rng):
        t = random_triplet(rng)
        assert residual_vector(t, "full").scalars().size == 84
        assert residual_vector(t, "reduced").scalars().size == 56

    def test_reduced_is_subset(self, rng):
        t = random_triplet(rng)
        full = residual_vector(t, "full")
        reduced = residual_vector(t, "reduced")
        assert reduced.triple_trace is None
        for key in ANTICYCLIC_TRIPLES:
            assert key in full.cubic and key not in reduced.cubic
        for key in CYCLIC_TRIPLES:
            np.testing.assert_array_equal(full.cubic[key], reduced.cubic[key])
            np.testing.assert_array_equal(full.diamond[key],
                                          reduced.diamond[key])
        assert full.quartic == reduced.quartic
        assert full.sextic == reduced.sextic

    def test_zero_triplet_all_zero(self):
        assert residual_vector(ZERO).max_abs() == 0.0

    def test_compatible_small_both_sets(self):
        t = compatible_triplet(7)
        assert residual_vector(t, "full").max_abs() < 1e-10
        assert residual_vector(t, "reduced").max_abs() < 1e-10

    def test_unknown_set_rejected(self, rng):
        with pytest.raises(ValueError):
            residual_vector(random_triplet(rng), "minimal")

    def test_scaling_covariance(self, rng):
        t = random_triplet(rng)
        lam = 3.7
        scaled = t.scaled(lam)
        for degree, fn in ((3, residual_triple_trace), (4, residual_quartic),
                           (6, residual_sextic)):
            raw = fn(t, normalized=False)
            raw_scaled = fn(scaled, normalized=False)
            assert abs(raw_scaled - lam**degree * raw) \
                <= 1e-9 * max(1.0, abs(raw_scaled))
        raw = residual_cubic(t, 1, 2, 3, normalized=False)
        np.testing.assert_allclose(residual_cubic(scaled, 1, 2, 3,
                                                  normalized=False),
                                   lam**3 * raw, rtol=1e-12)
        norm0 = residual_vector(t).scalars()
        norm1 = residual_vector(scaled).scalars()
        assert np.max(np.abs(norm0 - norm1)) < 1e-12


class TestDecision:
    def test_compatible(self):
        decision = is_compatible(compatible_triplet(3))
        assert decision.decision == COMPATIBLE
        assert bool(decision)

    def test_incompatible(self, rng):
        decision = is_compatible(random_triplet(rng))
        assert decision.decision == INCOMPATIBLE
        assert decision.report.max_abs() > 1e-3

    def test_degenerate_zero_block(self):
        t = compatible_triplet(3)
        degenerate = EssentialTriplet(t.e12, t.e23, np.zeros((3, 3)))
        assert is_compatible(degenerate).decision == DEGENERATE

    def test_tol_validation(self):
        with pytest.raises(ValueError):
            is_compatible(compatible_triplet(3), tol=-1.0)

    def test_transform_invariance(self, rng):
        for k in range(10):
            t = compatible_triplet(k) if k % 2 else random_triplet(rng)
            us = [random_rotation(rng) for _ in range(3)]
            other = t.rotated(*us).scaled(float(10.0 ** rng.uniform(-3, 3)))
            assert (is_compatible(t).decision
                    == is_compatible(other).decision)
            # matrix residuals conjugate under the transform; their norms
            # are the invariant quantities
            drift = np.abs(residual_vector(t).family_norms()
                           - residual_vector(other).family_norms())
            assert np.max(drift) < 1e-9


class TestSpectral:
    def test_compatible_structure(self):
        for seed in range(10):
            t = compatible_triplet(seed)
            sd = spectral_diagnostics(t)
            m = np.linalg.norm(block_matrix(t))
            assert sd.pairing_defect < 1e-8 * m
            assert abs(sd.lambda_relation) < 1e-8 * m * m
            assert np.all(np.abs(sd.eigenvalues[-3:]) < 1e-8 * m)

    def test_zero_triplet(self):
        sd = spectral_diagnostics(ZERO)
        np.testing.assert_array_equal(sd.eigenvalues, np.zeros(9))

    def test_power6_coefficient_identity(self, rng):
        # holds for every triplet, compatible or not
        for _ in range(20):
            t = random_triplet(rng)
            sd = spectral_diagnostics(t)
            expected = -2.0 * np.trace(t.e12 @ t.e23 @ t.e31)
            assert abs(sd.lambda6_coeff - expected) \
                <= 1e-10 * max(abs(expected), 1.0)

    def test_eigenvalues_sorted_by_magnitude(self, rng):
        sd = spectral_diagnostics(random_triplet(rng))
        mags = np.abs(sd.eigenvalues)
        assert np.all(np.diff(mags) <= 1e-12)


class TestFundamentalTriplet:
    def test_essential_triplet_passes(self):
        t = compatible_triplet(11)
        res = fundamental_triplet_residuals(*t.blocks())
        assert res.max_abs() < 1e-12

    def test_projective_construction_passes(self, rng):
        for _ in range(50):
            f12, f23, f31 = fundamental_compatible(rng)
            res = fundamental_triplet_residuals(f12, f23, f31)
            assert res.max_abs() < 1e-10

    def test_random_rank_two_fails(self, rng):
        def rank2(r):
            u, _, vt = np.linalg.svd(r.normal(size=(3, 3)))
            return u @ np.diag([1.0, r.uniform(0.3, 1.0), 0.0]) @ vt

        for _ in range(50):
            res = fundamental_triplet_residuals(rank2(rng), rank2(rng),
                                                rank2(rng))
            assert res.max_abs() > 1e-6

    def test_rank_failure_raises(self, rng):
        f12, f23, _ = fundamental_compatible(rng)
        with pytest.raises(RankError):
            fundamental_triplet_residuals(f12, f23, np.eye(3))
