import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from esstriad.errors import DegenerateAxis
from esstriad.mat3core import (adjugate, as_rng, diamond, diamond_trace_form,
                               half_turn, polar_project_rotation,
                               random_rotation, require_rotation,
                               rotation_angle, rotation_from_axis_angle, skew)

mat3 = arrays(np.float64, (3, 3), elements=st.floats(-10, 10))
vec3 = arrays(np.float64, (3,), elements=st.floats(-10, 10))


class TestSkew:
    def test_zero(self):
        np.testing.assert_array_equal(skew([0, 0, 0]), np.zeros((3, 3)))

    def test_unit_x(self):
        expected = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
        np.testing.assert_array_equal(skew([1, 0, 0]), expected)

    def test_annihilates_own_vector(self):
        v = np.array([2.0, -3.0, 5.0])
        np.testing.assert_array_equal(skew(v) @ v, np.zeros(3))

    @given(vec3, vec3)
    def test_matches_cross_product(self, v, w):
        np.testing.assert_allclose(skew(v) @ w, np.cross(v, w), atol=1e-9)

    @given(vec3, vec3)
    def test_product_identity(self, v, w):
        lhs = skew(v) @ skew(w)
        rhs = np.outer(w, v) - (v @ w) * np.eye(3)
        np.testing.assert_allclose(lhs, rhs, atol=1e-8)


class TestAdjugate:
    def test_identity(self):
        np.testing.assert_array_equal(adjugate(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_array_equal(adjugate(np.diag([1.0, 2.0, 3.0])),
                                      np.diag([6.0, 3.0, 2.0]))

    def test_skew_gives_outer_product(self):
        v = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(adjugate(skew(v)), np.outer(v, v), atol=1e-14)

    @given(mat3)
    @settings(max_examples=200)
    def test_fundamental_identity(self, a):
        lhs = a @ adjugate(a)
        with np.errstate(divide="ignore"):  # det warns on exactly singular a
            det = np.linalg.det(a)
        bound = 1e-12 * (1.0 + np.linalg.norm(a) ** 3)
        assert np.linalg.norm(lhs - det * np.eye(3)) <= bound

    def test_exact_on_singular(self):
        a = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]])
        assert abs(np.linalg.det(a)) < 1e-12
        np.testing.assert_allclose(a @ adjugate(a), np.zeros((3, 3)), atol=1e-12)


class TestDiamond:
    def test_with_identity(self):
        a = np.diag([1.0, 2.0, 3.0])
        np.testing.assert_allclose(diamond(a, np.eye(3)),
                                   np.diag([-5.0, -4.0, -3.0]), atol=1e-14)

    def test_zero(self):
        z = np.zeros((3, 3))
        np.testing.assert_array_equal(diamond(z, z), z)

    @given(mat3, mat3)
    @settings(max_examples=200)
    def test_commutative(self, a, b):
        np.testing.assert_allclose(diamond(a, b), diamond(b, a), atol=1e-8)

    @given(mat3, mat3, mat3, st.floats(-3, 3), st.floats(-3, 3))
    @settings(max_examples=200)
    def test_bilinear(self, a, b, c, beta, gamma):
        lhs = diamond(a, beta * b + gamma * c)
        rhs = beta * diamond(a, b) + gamma * diamond(a, c)
        scale = max(1.0, np.linalg.norm(lhs), np.linalg.norm(rhs))
        assert np.linalg.norm(lhs - rhs) / scale < 1e-10

    @given(mat3, mat3)
    @settings(max_examples=200)
    def test_transpose(self, a, b):
        np.testing.assert_allclose(diamond(a, b).T, diamond(a.T, b.T), atol=1e-8)

    @given(mat3, mat3, mat3, mat3)
    @settings(max_examples=200)
    def test_congruence(self, a, b, c, d):
        lhs = diamond(c @ a @ d, c @ b @ d)
        rhs = adjugate(d) @ diamond(a, b) @ adjugate(c)
        scale = max(1.0, np.linalg.norm(lhs), np.linalg.norm(rhs))
        assert np.linalg.norm(lhs - rhs) / scale < 1e-10

    @given(mat3, mat3)
    @settings(max_examples=200)
    def test_trace_form_agrees(self, a, b):
        lhs = diamond(a, b)
        rhs = diamond_trace_form(a, b)
        scale = max(1.0, np.linalg.norm(lhs), np.linalg.norm(rhs))
        assert np.linalg.norm(lhs - rhs) / scale < 1e-12


class TestRotations:
    def test_axis_angle_identity(self):
        np.testing.assert_allclose(rotation_from_axis_angle([0, 0, 1], 0.0),
                                   np.eye(3), atol=1e-15)

    def test_half_turn_about_z(self):
        np.testing.assert_allclose(rotation_from_axis_angle([0, 0, 1], np.pi),
                                   np.diag([-1.0, -1.0, 1.0]), atol=1e-15)

    def test_third_turn_cycles_coordinates(self):
        r = rotation_from_axis_angle([1, 1, 1], 2 * np.pi / 3)
        perm = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float)
        np.testing.assert_allclose(r, perm, atol=1e-14)

    def test_zero_axis_rejected(self):
        with pytest.raises(DegenerateAxis):
            rotation_from_axis_angle([0, 0, 0], 1.0)

    def test_half_turn_matches_axis_angle(self):
        axis = np.array([1.0, -2.0, 0.5])
        np.testing.assert_allclose(half_turn(axis),
                                   rotation_from_axis_angle(axis, np.pi),
                                   atol=1e-14)

    def test_random_rotation_deterministic(self):
        np.testing.assert_array_equal(random_rotation(42), random_rotation(42))

    def test_random_rotation_orthonormal(self):
        for seed in range(50):
            r = random_rotation(seed)
            assert np.linalg.norm(r.T @ r - np.eye(3)) < 1e-12
            assert abs(np.linalg.det(r) - 1.0) < 1e-9

    def test_haar_mean_trace(self):
        # Haar measure on the rotation group has zero expected trace
        gen = as_rng(123)
        total = 0.0
        n = 100_000
        for _ in range(n):
            total += np.trace(random_rotation(gen))
        assert abs(total / n) < 0.02

    def test_require_rotation_rejects(self):
        with pytest.raises(ValueError):
            require_rotation(1.5 * np.eye(3))

    def test_require_rotation_projects(self):
        noisy = random_rotation(3) + 1e-4 * np.ones((3, 3))
        fixed = require_rotation(noisy, project=True)
        assert np.linalg.norm(fixed.T @ fixed - np.eye(3)) < 1e-12

    def test_polar_projection_is_closest(self):
        m = np.random.default_rng(1).normal(size=(3, 3)) + 2 * np.eye(3)
        r = polar_project_rotation(m)
        assert np.linalg.norm(r.T @ r - np.eye(3)) < 1e-12
        for seed in range(20):
            other = random_rotation(seed)
            assert (np.linalg.norm(m - r)
                    <= np.linalg.norm(m - other) + 1e-12)

    def test_rotation_angle(self):
        assert rotation_angle(np.eye(3)) == 0.0
        assert abs(rotation_angle(rotation_from_axis_angle([0, 1, 0], 1.3))
                   - 1.3) < 1e-12
