"""Tests for the offline comparators."""

import math

import numpy as np
import pytest

from drsub.domain import Norm, PolytopeDomain
from drsub.errors import GridTooLargeError, InvalidParameterError
from drsub.functions import QuadraticUtility
from drsub.offline import best_comparator, grid_axes, grid_maximize, offline_fw

INTERVAL = PolytopeDomain.unit_box(1)


@pytest.fixture
def concave_1d():
    """f(x) = x - x²/2 on [0, 1]."""
    return QuadraticUtility([[-1.0]], [1.0])


def test_offline_fw_hand_iterates(concave_1d):
    """Test the iterates 0, 0.25, 0.5, 0.75, 1.0 for K = 4."""
    result = offline_fw(concave_1d, INTERVAL, 4, record=True)
    assert [x[0] for x in result.iterates] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert result.value == pytest.approx(0.5)
    assert result.K_used == 4
    assert result.certificate.method == "fw"


def test_offline_fw_single_step():
    """Test that K = 1 returns the LMO vertex of ∇f(0)."""
    domain = PolytopeDomain.budget(3, 1.0)
    f = QuadraticUtility(-np.eye(3), [0.2, 0.9, 0.4])
    result = offline_fw(f, domain, 1)
    np.testing.assert_allclose(result.point, domain.linear_maximize(f.gradient(domain.zero)))


def test_offline_fw_exact_on_linear():
    """Test that Frank-Wolfe lands on the LMO vertex for linear f."""
    domain = PolytopeDomain.budget(2, 1.0)
    f = QuadraticUtility(np.zeros((2, 2)), [1.0, 3.0])
    result = offline_fw(f, domain, 7)
    np.testing.assert_allclose(result.point, [0.0, 1.0], atol=1e-12)
    assert result.value == pytest.approx(3.0)


def test_offline_fw_iterates_feasible_and_improving():
    """Test feasibility and monotone improvement of every iterate."""
    rng = np.random.default_rng(1)
    domain = PolytopeDomain.random_packing(2, 3, rng)
    upper = np.triu(rng.uniform(-1.0, 0.0, (3, 3)), 1)
    A = upper + upper.T + np.diag(rng.uniform(-1.0, 0.0, 3))
    f = QuadraticUtility(A, -A @ np.ones(3))
    result = offline_fw(f, domain, 50, record=True)
    values = [f.value(x) for x in result.iterates]
    assert all(domain.contains(x, 1e-7) for x in result.iterates)
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_offline_fw_rejects_zero_steps(concave_1d):
    """Test that K must be positive."""
    with pytest.raises(InvalidParameterError):
        offline_fw(concave_1d, INTERVAL, 0)


def test_grid_axes_include_endpoints():
    """Test that axis grids cover both bounds."""
    (axis,) = grid_axes(INTERVAL, 0.3)
    assert axis[0] == 0.0
    assert axis[-1] == 1.0
    assert np.diff(axis).max() <= 0.3


def test_grid_maximize_1d(concave_1d):
    """Test the grid maximum of x - x²/2."""
    result = grid_maximize(concave_1d, INTERVAL, 0.01)
    assert result.value == pytest.approx(0.5, abs=5e-3)
    assert result.certificate.method == "grid"
    assert result.certificate.grid_step == 0.01
    assert result.certificate.slack > 0


def test_grid_maximize_linear_corner():
    """Test that the (1, 1) direction peaks at the corner."""
    f = QuadraticUtility(np.zeros((2, 2)), [1.0, 1.0])
    result = grid_maximize(f, PolytopeDomain.unit_box(2), 0.1)
    np.testing.assert_allclose(result.point, [1.0, 1.0])


def test_grid_maximize_refuses_high_dimension():
    """Test the dimension guard."""
    f = QuadraticUtility(np.zeros((5, 5)), np.ones(5))
    with pytest.raises(GridTooLargeError):
        grid_maximize(f, PolytopeDomain.unit_box(5), 0.5)


def test_offline_fw_approximation_bound():
    """Test f(x_fw) >= (1 - 1/e) grid max - LR²/(2K) - grid slack on random instances."""
    rng = np.random.default_rng(0)
    domain = PolytopeDomain.budget(2, 1.0)
    K = 200
    R = domain.diameter(Norm.L1)
    for _ in range(10):
        upper = np.triu(rng.uniform(-1.0, 0.0, (2, 2)), 1)
        A = upper + upper.T + np.diag(rng.uniform(-1.0, 0.0, 2))
        f = QuadraticUtility(A, -A @ np.ones(2))
        grid = grid_maximize(f, domain, 0.005)
        fw = offline_fw(f, domain, K)
        L = f.smoothness_l1()
        bound = (1 - 1 / math.e) * grid.value - L * R**2 / (2 * K) - grid.certificate.slack
        assert fw.value >= bound


def test_best_comparator_prefers_higher_value(concave_1d):
    """Test that the comparator is at least as good as both oracles."""
    result = best_comparator(concave_1d, INTERVAL, K=3, grid_step=0.05)
    assert result.value >= offline_fw(concave_1d, INTERVAL, 3).value
    assert result.value >= grid_maximize(concave_1d, INTERVAL, 0.05).value
