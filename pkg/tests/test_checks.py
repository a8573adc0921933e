"""Tests for the property checkers."""

import json

import numpy as np
import pytest

from drsub.checks import (
    FunctionCheckConfig,
    check_dr_submodular,
    check_monotone,
    check_smoothness,
    check_strong_dr,
    check_submodular,
    estimate_lipschitz,
    run_checks,
)
from drsub.domain import Norm, PolytopeDomain
from drsub.errors import ConfigError
from drsub.experiments import exp2_functions
from drsub.functions import ConcaveNegDepUtility, LogDiversityUtility, LogTerm, QuadraticUtility

BOX = PolytopeDomain.unit_box(2)


def _moved_coordinates(witness):
    x, y = (np.asarray(p) for p in witness)
    return np.flatnonzero(x != y).tolist()


def test_dr_submodular_nonpositive_quadratic():
    """Test that an entrywise non-positive Hessian passes."""
    f = QuadraticUtility([[-1.0, -0.5], [-0.5, -2.0]], [2.0, 2.0])
    report = check_dr_submodular(f, BOX, samples=100)
    assert report.holds
    assert set(report.sub_checks) == {"gradient_order", "hessian"}


def test_dr_submodular_positive_diagonal_fails_along_axis():
    """Test that A11 = +1 fails with a witness moving coordinate 1 only."""
    f = QuadraticUtility([[1.0, 0.0], [0.0, -1.0]], [0.0, 1.0])
    report = check_dr_submodular(f, BOX, samples=100)
    assert not report.holds
    assert _moved_coordinates(report.witness) == [0]


def test_dr_submodular_sum_of_logs():
    """Test that Σ ln(1 + x_i) is DR-submodular."""
    f = ConcaveNegDepUtility([LogTerm(1.0), LogTerm(1.0)])
    assert check_dr_submodular(f, BOX, samples=100).holds


def test_strong_dr_at_exact_modulus():
    """Test diag(-2, -2) at µ = 2 in the L2 norm."""
    f = QuadraticUtility([[-2.0, 0.0], [0.0, -2.0]], [4.0, 4.0])
    report = check_strong_dr(f, BOX, 2.0, Norm.L2, samples=100)
    assert report.holds
    assert set(report.sub_checks) == {"definition", "hessian"}


def test_strong_dr_above_modulus_fails_along_axis():
    """Test that µ = 2.5 fails with an axis witness."""
    f = QuadraticUtility([[-2.0, 0.0], [0.0, -2.0]], [4.0, 4.0])
    report = check_strong_dr(f, BOX, 2.5, Norm.L2, samples=100)
    assert not report.holds
    assert not report.sub_checks["definition"].holds
    assert len(_moved_coordinates(report.sub_checks["definition"].witness)) == 1


def test_strong_dr_zero_modulus_delegates():
    """Test that µ = 0 runs the DR-submodularity check."""
    f = QuadraticUtility([[-1.0, 0.0], [0.0, -1.0]], [1.0, 1.0])
    assert check_strong_dr(f, BOX, 0.0, samples=50).name == "dr_submodular"


def test_hessian_criterion_implies_definition():
    """Test 200 random quadratics with diag <= -µ and off-diagonals <= 0."""
    rng = np.random.default_rng(0)
    domain = PolytopeDomain.unit_box(3)
    mu = 1.5
    for _ in range(200):
        upper = np.triu(rng.uniform(-2.0, 0.0, (3, 3)), 1)
        A = upper + upper.T + np.diag(rng.uniform(-3.0, -mu, 3))
        f = QuadraticUtility(A, -A @ np.ones(3))
        report = check_strong_dr(f, domain, mu, Norm.L2, samples=30, seed=int(rng.integers(1000)))
        assert report.sub_checks["hessian"].holds
        assert report.sub_checks["definition"].holds


def test_smoothness_holds_for_entry_bound():
    """Test that |A_ij| <= L gives L-smoothness in L1."""
    f = QuadraticUtility([[-1.0, -0.7], [-0.7, -0.4]], [2.0, 2.0])
    assert check_smoothness(f, BOX, 1.0, Norm.L1, samples=200).holds


def test_smoothness_zero_fails_on_curved_quadratic():
    """Test that L = 0 fails with a witness."""
    f = QuadraticUtility([[-1.0, 0.0], [0.0, -1.0]], [1.0, 1.0])
    report = check_smoothness(f, BOX, 0.0, Norm.L1, samples=50)
    assert not report.holds
    assert report.witness is not None


def test_smoothness_experiment_two_matrices():
    """Test that the Experiment 2 quadratics are 10-smooth in L1."""
    rng = np.random.default_rng(4)
    domain = PolytopeDomain.random_packing(2, 4, rng)
    for f in exp2_functions(rng, 4, 10):
        assert check_smoothness(f, domain, 10.0, Norm.L1, samples=50).holds


def test_monotone_with_corrected_linear_term():
    """Test that a = -Aᵀ1 with A <= 0 is monotone on the box."""
    A = np.array([[-1.0, -0.5], [-0.5, -2.0]])
    assert check_monotone(QuadraticUtility(A, -A.T @ np.ones(2)), BOX, samples=100).holds


def test_monotone_negative_linear_fails():
    """Test that a = (-1, -1), A = 0 fails at the origin."""
    report = check_monotone(QuadraticUtility(np.zeros((2, 2)), [-1.0, -1.0]), BOX, samples=10)
    assert not report.holds
    assert report.witness == [[0.0, 0.0]]


def test_monotone_log_diversity():
    """Test a log-diversity utility whose penalties stay below the rating gain."""
    f = LogDiversityUtility([0.8, 0.6], [[0.0, -0.5], [-0.5, 0.0]])
    assert check_monotone(f, BOX, samples=100).holds


def test_submodular():
    """Test the off-diagonal Hessian criterion both ways."""
    good = ConcaveNegDepUtility([LogTerm(1.0), LogTerm(1.0)], {(0, 1): -0.5})
    bad = QuadraticUtility([[-1.0, 0.5], [0.5, -1.0]], [1.0, 1.0])
    assert check_submodular(good, BOX, samples=50).holds
    assert not check_submodular(bad, BOX, samples=50).holds


def test_estimate_lipschitz_linear():
    """Test that a linear function's gradient norm is recovered."""
    f = QuadraticUtility(np.zeros((2, 2)), [3.0, 4.0])
    assert estimate_lipschitz([f], BOX) == pytest.approx(5.0)
    assert estimate_lipschitz([f], BOX, norm=Norm.L1) == pytest.approx(7.0)


def test_run_checks_from_config(tmp_path):
    """Test the check-function config document."""
    path = tmp_path / "check.json"
    path.write_text(
        json.dumps(
            {
                "function": {"family": "quadratic", "A": [[-2.0, 0.0], [0.0, -2.0]], "a": [4.0, 4.0]},
                "domain": {"dim": 2, "C": [[1.0, 1.0]], "b": [1.0]},
                "mu": 2.0,
                "smoothness": 2.0,
                "samples": 50,
            }
        )
    )
    reports = run_checks(FunctionCheckConfig.load(path))
    assert set(reports) == {"monotone", "submodular", "dr_submodular", "strong_dr", "smoothness"}
    assert all(report.holds for report in reports.values())


def test_check_config_invalid(tmp_path):
    """Test that an unknown family raises ConfigError."""
    path = tmp_path / "check.json"
    path.write_text(json.dumps({"function": {"family": "cubic"}, "domain": {"dim": 1}}))
    with pytest.raises(ConfigError):
        FunctionCheckConfig.load(path)
