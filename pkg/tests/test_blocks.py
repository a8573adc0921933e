"""Tests for block-size thresholds and their Monte-Carlo check."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from drsub.blocks import (
    THETA,
    BlockSpec,
    compute_w0_discretized,
    compute_w0_quadratic,
    compute_w0_tail,
    validate_block_strong_dr,
)
from drsub.domain import PolytopeDomain
from drsub.errors import InvalidParameterError
from drsub.experiments import derived_rng, exp2_functions, validate_blocks
from drsub.functions import ConcaveNegDepUtility, LogTerm, QuadraticTerm, QuadraticUtility


def test_theta_constant():
    """Test θ = (5/2) ln 3 - 2/3."""
    assert THETA == pytest.approx(2.5 * math.log(3) - 2 / 3, abs=1e-12)
    assert THETA == pytest.approx(2.07986, abs=1e-5)


def test_w0_example():
    """Test L = 1, ε = 0.5, n = 2, T = 100, δ = 0.1 against a direct evaluation."""
    theta = 5 / 2 * math.log(3) - 2 / 3
    expected = math.ceil(128 * theta * 1**2 / 0.5**2 * math.log(4 * 2 * 100 / 0.1))
    assert compute_w0_quadratic(1.0, 1.0, 0.5, 0.1, 2, 100) == expected
    assert expected == 9571


def test_w0_monotone():
    """Test that W₀ shrinks with ε and grows with L, n, T and 1/δ."""
    base = compute_w0_quadratic(2.0, 1.0, 0.5, 0.1, 2, 100)
    assert compute_w0_quadratic(2.0, 1.0, 0.8, 0.1, 2, 100) < base
    assert compute_w0_quadratic(2.0, 1.5, 0.5, 0.1, 2, 100) > base
    assert compute_w0_quadratic(2.0, 1.0, 0.5, 0.1, 4, 100) > base
    assert compute_w0_quadratic(2.0, 1.0, 0.5, 0.1, 2, 200) > base
    assert compute_w0_quadratic(2.0, 1.0, 0.5, 0.05, 2, 100) > base


def test_w0_branch_errors():
    """Test that ε outside the sub-Gaussian branch names the condition."""
    with pytest.raises(InvalidParameterError, match="mu/2"):
        compute_w0_quadratic(1.0, 1.0, 0.6, 0.1, 2, 100)
    with pytest.raises(InvalidParameterError, match="6\\*theta\\*L"):
        compute_w0_quadratic(10.0, 0.01, 1.0, 0.1, 2, 100)
    with pytest.raises(InvalidParameterError):
        compute_w0_quadratic(1.0, 1.0, 0.5, 1.5, 2, 100)


def test_w0_tail_branch():
    """Test the ε > 6θL formula."""
    assert compute_w0_tail(0.01, 0.5, 0.1, 2, 100) == math.ceil(64 * 0.01 / 1.5 * math.log(8000))
    with pytest.raises(InvalidParameterError):
        compute_w0_tail(1.0, 0.5, 0.1, 2, 100)


def test_w0_discretized_modulus():
    """Test the degraded modulus µ - ε - γH."""
    result = compute_w0_discretized(1.0, 1.0, 0.25, 0.1, 0.1, 2.0, [1.0, 1.0], 100)
    assert result.modulus == pytest.approx(0.55)
    assert compute_w0_discretized(1.0, 1.0, 0.25, 0.1, 0.1, 0.0, [1.0], 100).modulus == pytest.approx(0.75)
    with pytest.raises(InvalidParameterError):
        compute_w0_discretized(1.0, 1.0, 0.5, 0.1, 1.0, 1.0, [1.0], 100)


def test_w0_discretized_value():
    """Test the discretized threshold against a direct evaluation of its formula."""
    w0, modulus = compute_w0_discretized(1.0, 1.0, 0.25, 0.1, 0.1, 2.0, [1.0, 1.0], 100)
    assert w0 == math.ceil(128 * THETA / 0.25**2 * math.log(4 * 100 * 2.0 / (2 * 0.1 * 0.1)))
    assert modulus == pytest.approx(0.55)


def test_uneven_last_block():
    """Test that a short last block is averaged over its own size."""
    functions = [QuadraticUtility(np.diag([-10.0]), [10.0]) for _ in range(4)]
    functions.append(QuadraticUtility(np.diag([-1.0]), [1.0]))
    # Blocks of sizes 2, 2, 1: only the weak function alone in the last block violates
    report = validate_block_strong_dr(functions, 2, 4.0, 5000, seed=3)
    assert report.premise_holds
    assert report.violation_rate == pytest.approx(0.2, abs=0.03)
    assert report.worst_block_diagonal == pytest.approx(-1.0)


def test_w0_discretized_log_factor():
    """Test that a fine net gives a larger threshold than the quadratic formula."""
    discretized = compute_w0_discretized(1.0, 1.0, 0.5, 0.1, 0.001, 0.0, [1.0, 1.0], 100)
    assert discretized.w0 >= compute_w0_quadratic(1.0, 1.0, 0.5, 0.1, 2, 100)


def test_block_spec_defaults():
    """Test ε defaulting to µ/2 and the range checks."""
    assert BlockSpec(W=5, T=100, mu=1.25, L=10).epsilon == pytest.approx(0.625)
    with pytest.raises(ValidationError):
        BlockSpec(W=101, T=100, mu=1.0, L=1.0)
    with pytest.raises(ValidationError):
        BlockSpec(W=5, T=100, mu=1.0, L=1.0, epsilon=0.8)


def test_identical_functions_never_violate():
    """Test that averaging identical diag = -µ quadratics never violates."""
    f = QuadraticUtility([[-1.0, -0.2], [-0.2, -1.0]], [1.2, 1.2])
    for W in (1, 3, 10):
        report = validate_block_strong_dr([f] * 10, W, 1.0, 200, 0)
        assert report.violation_rate == 0.0
        assert report.premise_holds


def test_full_block_never_violates():
    """Test that W = T reduces to the global average."""
    rng = np.random.default_rng(1)
    functions = []
    for t in range(20):
        diag = rng.uniform(-4.0, -2.0, 2) if t % 2 else rng.uniform(-0.5, 0.0, 2)
        functions.append(QuadraticUtility(np.diag(diag), -diag))
    report = validate_block_strong_dr(functions, 20, 1.0, 100, 3)
    assert report.premise_holds
    assert report.violation_rate == 0.0


def test_block_size_bounds():
    """Test that W must lie in [1, T]."""
    f = QuadraticUtility([[-1.0]], [1.0])
    with pytest.raises(InvalidParameterError):
        validate_block_strong_dr([f] * 3, 4, 1.0, 10, 0)


def test_non_quadratic_needs_domain():
    """Test the sampled fallback for non-quadratic families."""
    f = ConcaveNegDepUtility([QuadraticTerm(2.0, 1.0), LogTerm(1.0)])
    g = ConcaveNegDepUtility([QuadraticTerm(2.0, 1.0), QuadraticTerm(2.0, 1.0)])
    with pytest.raises(InvalidParameterError):
        validate_block_strong_dr([f, g], 1, 1.0, 5, 0)
    report = validate_block_strong_dr([g, g], 1, 2.0, 3, 0, domain=PolytopeDomain.unit_box(2), samples=20)
    assert report.violation_rate == 0.0


def test_experiment_two_mix():
    """Test the threshold premise and the W = 1 power check on the Experiment 2 mix."""
    summary = validate_blocks(trials=2000, delta=0.1, seed=0)
    assert summary.w0 > 100
    assert summary.W == 100

    rng = derived_rng(0, 2)
    PolytopeDomain.random_packing(2, 4, rng)
    average = np.mean([np.diag(f.A) for f in exp2_functions(rng, 4, 100)], axis=0)
    # One block equal to the global average decides every trial the same way
    assert summary.report.violation_rate == (1.0 if np.any(average > -1.25 / 2 + 1e-12) else 0.0)
    assert summary.report.premise_holds == bool(np.all(average <= -1.25 + 1e-12))
    assert summary.report.worst_block_diagonal == pytest.approx(average.max())
    # Half the rounds have a non-negative diagonal
    assert summary.power.violation_rate == 1.0


@pytest.mark.slow
def test_experiment_two_mix_full_trials():
    """Test the W = 1 power check over 10⁴ permutations."""
    summary = validate_blocks(trials=10_000, delta=0.1, seed=0)
    assert summary.power.trials == 10_000
    assert summary.power.violation_rate > 0.3
    assert summary.report.violation_rate in (0.0, 1.0)
