import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import multivariate_normal, norm

from panc.regions import ConvexRegion
from panc.special_functions import GaussianSpec, craig_q1, craig_sector, eigen_2x2, gaussian_region_prob, q1, q2


def bvn_upper(x, rho):
    """P(X > x, Y > x) for a standard bivariate normal pair."""
    cov = [[1.0, rho], [rho, 1.0]]
    return multivariate_normal.cdf([-x, -x], mean=[0, 0], cov=cov, abseps=1e-12, releps=1e-12)


def test_q1_matches_normal_tail():
    x = np.linspace(-5, 8, 101)
    np.testing.assert_allclose(q1(x), norm.sf(x), rtol=1e-12, atol=1e-300)
    assert isinstance(q1(0.3), float)
    assert q1(0.0) == 0.5


def test_q1_rejects_nan():
    with pytest.raises(ValueError):
        q1(float("nan"))


@pytest.mark.parametrize("x", [-2.5, -0.3, 0.0, 0.7, 2.0, 5.5])
def test_craig_q1_agrees_with_erfc(x):
    assert craig_q1(x) == pytest.approx(q1(x), abs=1e-13, rel=1e-10)


def test_craig_sector_full_range_is_twice_q():
    for x in (0.1, 1.0, 3.0):
        assert craig_sector(x, math.pi) == pytest.approx(2 * q1(x), rel=1e-10)
    assert craig_sector(0.0, 1.0) == pytest.approx(1.0 / math.pi)
    assert craig_sector(2.0, 0.0) == 0.0


@pytest.mark.parametrize("x,rho", [(0.0, 0.0), (0.5, 0.3), (1.2, -0.6), (2.5, 0.9), (0.3, -0.95), (3.0, 0.0)])
def test_q2_is_bivariate_upper_orthant(x, rho):
    assert q2(x, rho) == pytest.approx(bvn_upper(x, rho), abs=1e-9)


def test_q2_independent_case_factorizes():
    assert q2(1.1, 0.0) == pytest.approx(q1(1.1) ** 2, rel=1e-10)
    assert q2(0.0, 0.0) == pytest.approx(0.25)


@pytest.mark.parametrize("x,rho", [(1.0, 1.0), (1.0, -1.0), (-0.1, 0.2), (float("inf"), 0.0)])
def test_q2_rejects_bad_input(x, rho):
    with pytest.raises(ValueError):
        q2(x, rho)


def test_region_oracle_half_plane():
    g = GaussianSpec.isotropic([0.3, -0.2], 0.7)
    region = ConvexRegion([[1.0, 0.0]], [1.0])
    assert gaussian_region_prob(g, region) == pytest.approx(norm.cdf((1.0 - 0.3) / math.sqrt(0.7)), abs=1e-12)


def test_region_oracle_correlated_quadrant():
    cov = np.array([[1.0, 0.6], [0.6, 2.0]])
    g = GaussianSpec([0.4, -0.3], cov)
    quadrant = ConvexRegion([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
    ref = multivariate_normal.cdf([0.0, 0.0], mean=[0.4, -0.3], cov=cov, abseps=1e-12, releps=1e-12)
    assert gaussian_region_prob(g, quadrant) == pytest.approx(ref, abs=1e-9)


def test_region_oracle_whole_plane_and_empty():
    g = GaussianSpec.isotropic([0.0, 0.0], 1.0)
    assert gaussian_region_prob(g, ConvexRegion.plane()) == pytest.approx(1.0, abs=1e-12)
    empty = ConvexRegion([[1.0, 0.0], [-1.0, 0.0]], [-1.0, -1.0])
    p, info = gaussian_region_prob(g, empty, full_output=True)
    assert p == 0.0 and info["degenerate"]


def test_gaussian_spec_validation():
    with pytest.raises(ValueError):
        GaussianSpec([0, 0], [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        GaussianSpec([0, 0], [[1.0, 0.1], [0.2, 1.0]])
    assert GaussianSpec.isotropic([0, 0], 2.0).is_isotropic


sym = st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))


@given(sym)
def test_eigen_2x2_reconstructs(t):
    b11, b12, b22 = t
    m = np.array([[b11, b12], [b12, b22]])
    lam, q = eigen_2x2(m)
    scale = max(1.0, np.abs(m).max())
    assert lam[0] >= lam[1]
    np.testing.assert_allclose(q @ q.T, np.eye(2), atol=1e-12)
    assert np.linalg.det(q) == pytest.approx(1.0)
    np.testing.assert_allclose(q.T @ np.diag(lam) @ q, m, atol=1e-10 * scale)
    np.testing.assert_allclose(lam, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-10 * scale)


def test_eigen_2x2_rejects_asymmetric():
    with pytest.raises(ValueError):
        eigen_2x2([[1.0, 0.5], [0.1, 1.0]])


def test_region_oracle_near_vertical_edge():
    # a boundary almost parallel to the integration axis must not lose mass
    g = GaussianSpec.isotropic([-0.8, 0.0], 0.5)
    ref = None
    for t in (0.0, 0.4, 1.3):
        r = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        n = np.array([[math.sin(0.82), -math.cos(0.82)], [-math.sin(1.5703), math.cos(1.5703)]])
        val = gaussian_region_prob(GaussianSpec.isotropic(r @ g.mean, 0.5), ConvexRegion(n @ r.T, [0.0, 0.0]))
        ref = val if ref is None else ref
        assert val == pytest.approx(ref, abs=1e-13)
