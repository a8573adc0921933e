"""Tests for the dense simplex solver."""

import numpy as np
import pytest

from drsub.errors import InfeasibleProblemError, SimplexCyclingError, UnboundedProblemError
from drsub.simplex import lexicographic_maximize, solve_lp


def test_solve_lp_textbook():
    """Test max x + y s.t. x + 2y <= 4, 3x + y <= 6."""
    result = solve_lp(np.array([1.0, 1.0]), np.array([[1.0, 2.0], [3.0, 1.0]]), np.array([4.0, 6.0]))
    np.testing.assert_allclose(result.x, [1.6, 1.2], atol=1e-9)
    assert result.value == pytest.approx(2.8)
    assert not result.tied


def test_solve_lp_negative_rhs_needs_phase_one():
    """Test a lower bound y >= 1 written as -y <= -1."""
    result = solve_lp(np.array([-1.0]), np.array([[-1.0], [1.0]]), np.array([-1.0, 3.0]))
    assert result.x[0] == pytest.approx(1.0)


def test_solve_lp_unbounded():
    """Test that an unbounded objective raises."""
    with pytest.raises(UnboundedProblemError):
        solve_lp(np.array([1.0]), np.array([[-1.0]]), np.array([1.0]))


def test_solve_lp_infeasible():
    """Test that y <= -1 with y >= 0 is reported infeasible."""
    with pytest.raises(InfeasibleProblemError):
        solve_lp(np.array([1.0]), np.array([[1.0]]), np.array([-1.0]))


def test_solve_lp_iteration_cap():
    """Test that the pivot cap raises a cycling error."""
    with pytest.raises(SimplexCyclingError):
        solve_lp(np.array([1.0, 1.0]), np.array([[1.0, 2.0], [3.0, 1.0]]), np.array([4.0, 6.0]), max_iter=1)


def test_lexicographic_maximize_breaks_ties():
    """Test that among optimal vertices the lexicographically smallest wins."""
    result = lexicographic_maximize(np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), np.array([1.0]))
    np.testing.assert_allclose(result.x, [0.0, 1.0], atol=1e-8)
    assert result.tied
