import numpy as np
import pytest

from dispflow import (ConstraintError, complex_structure, curvature_op,
                      metric, project_tangent, renormalize)
from conftest import random_point, random_tangent


def test_project_tangent_removes_normal_component():
    out = project_tangent([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
    np.testing.assert_allclose(out, [1.0, 2.0, 0.0], atol=1e-15)


def test_project_tangent_kills_normal_input():
    out = project_tangent([0.0, 0.0, 1.0], [0.0, 0.0, 5.0])
    np.testing.assert_allclose(out, [0.0, 0.0, 0.0], atol=1e-15)


def test_project_tangent_mixed():
    out = project_tangent([1.0, 0.0, 0.0], [1.0, 1.0, 0.0])
    np.testing.assert_allclose(out, [0.0, 1.0, 0.0], atol=1e-15)


def test_project_tangent_result_is_tangent(rng):
    for _ in range(50):
        p = random_point(rng, radius=2.0)
        v = rng.standard_normal(3) * 10
        out = project_tangent(p, v, radius=2.0)
        assert abs(np.dot(out, p)) < 1e-13 * np.abs(v).max()


def test_metric_examples():
    assert metric([1, 0, 0], [1, 0, 0]) == 1.0
    assert metric([1, 2, 3], [0, 0, 0]) == 0.0
    assert metric([1, 1, 0], [1, -1, 0]) == 0.0


def test_complex_structure_rotates_by_quarter_turn():
    np.testing.assert_allclose(
        complex_structure([0, 0, 1], [1, 0, 0]), [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(
        complex_structure([0, 0, 1], [0, 1, 0]), [-1, 0, 0], atol=1e-15)


def test_complex_structure_scaled_sphere_isometry():
    out = complex_structure([0, 0, 2], [2, 0, 0], radius=2.0)
    np.testing.assert_allclose(out, [0, 2, 0], atol=1e-15)


def test_complex_structure_is_isometric_involution(rng):
    # g(Jv, Jv) = g(v, v) and J(Jv) = -v on tangent vectors
    for _ in range(100):
        r = rng.uniform(0.5, 3.0)
        p = random_point(rng, r)
        v = random_tangent(rng, p, r)
        jv = complex_structure(p, v, r)
        assert abs(metric(jv, jv) - metric(v, v)) < 1e-12 * metric(v, v)
        np.testing.assert_allclose(complex_structure(p, jv, r), -v,
                                   atol=1e-12 * np.abs(v).max())


def test_curvature_examples():
    z = np.array([0.3, -1.0, 2.0])
    np.testing.assert_allclose(
        curvature_op([1, 0, 0], [1, 0, 0], z, K=1.0), [0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(
        curvature_op([1, 0, 0], [0, 1, 0], [0, 1, 0], K=1.0), [1, 0, 0],
        atol=1e-15)
    np.testing.assert_allclose(
        curvature_op([1, 0, 0], [0, 1, 0], [0, 1, 0], K=2.0), [2, 0, 0],
        atol=1e-15)


def test_curvature_antisymmetry_and_pair_symmetry(rng):
    # R(x,x,.) = 0 and g(R(x,y)z, w) = g(R(z,w)x, y)
    for _ in range(200):
        K = rng.uniform(0.1, 4.0)
        x, y, z, w = rng.standard_normal((4, 3))
        scale = max(np.abs(np.stack([x, y, z, w])).max(), 1.0) ** 3 * K
        assert np.abs(curvature_op(x, x, z, K)).max() <= 1e-14 * scale
        lhs = metric(curvature_op(x, y, z, K), w)
        rhs = metric(curvature_op(z, w, x, K), y)
        assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), scale)


def test_sectional_curvature_nonnegative(rng):
    for _ in range(100):
        K = rng.uniform(0.1, 4.0)
        x, y = rng.standard_normal((2, 3))
        sec = metric(curvature_op(x, y, y, K), x)
        expected = K * (metric(x, x) * metric(y, y) - metric(x, y) ** 2)
        assert abs(sec - expected) < 1e-12 * max(1.0, abs(expected))
        assert sec > -1e-12 * max(1.0, abs(expected))


def test_renormalize_examples():
    np.testing.assert_allclose(renormalize([0.0, 0.0, 2.0]), [0, 0, 1])
    np.testing.assert_allclose(renormalize([3.0, 4.0, 0.0]), [0.6, 0.8, 0.0])
    with pytest.raises(ConstraintError):
        renormalize([0.0, 0.0, 0.0])


def test_renormalize_vectorized(rng):
    pts = rng.standard_normal((40, 3))
    out = renormalize(pts, 2.5)
    np.testing.assert_allclose(np.linalg.norm(out, axis=1), 2.5, rtol=1e-14)
