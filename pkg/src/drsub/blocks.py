"""Block-size thresholds for random-order runs and their Monte-Carlo check.

Averaging W consecutive functions of a random permutation concentrates the
block's Hessian diagonal around the global average. Above the threshold W₀
every block average is (µ/2)-strongly DR-submodular with probability at
least 1 - δ.
"""

from typing import NamedTuple, Self, Sequence
import logging
import math

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .checks import check_strong_dr
from .domain import PolytopeDomain
from .errors import InvalidParameterError
from .functions import ObjectiveFunction, QuadraticUtility, average_functions
from .streams import permute

logger = logging.getLogger(__name__)

# Variance-proxy constant of the sub-Gaussian branch
THETA = 2.5 * math.log(3) - 2.0 / 3.0

_TRIAL_CHUNK = 1000


class BlockSpec(BaseModel):
    """Parameters of a blocked random-order run."""

    W: int = Field(ge=1)
    T: int = Field(ge=1)
    mu: float = Field(gt=0)
    L: float = Field(gt=0)
    epsilon: float | None = None
    delta: float = Field(default=0.1, gt=0, lt=1)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.W > self.T:
            raise ValueError("W must not exceed T")
        if self.epsilon is None:
            self.epsilon = self.mu / 2
        if not 0 < self.epsilon <= self.mu / 2:
            raise ValueError("epsilon must lie in (0, mu/2]")
        return self

    @property
    def theta(self) -> float:
        return THETA


def _check_common(L: float, epsilon: float, delta: float, n: int, T: int) -> None:
    if L <= 0:
        raise InvalidParameterError("L must be positive", L=L)
    if epsilon <= 0:
        raise InvalidParameterError("epsilon must be positive", epsilon=epsilon)
    if not 0 < delta < 1:
        raise InvalidParameterError("delta must lie in (0, 1)", delta=delta)
    if n < 1 or T < 1:
        raise InvalidParameterError("n and T must be >= 1", n=n, T=T)


def compute_w0_quadratic(mu: float, L: float, epsilon: float, delta: float, n: int, T: int) -> int:
    """W₀ = ⌈(128θL²/ε²) ln(4nT/δ)⌉ for quadratic sequences.

    Raises:
        InvalidParameterError: Parameters outside the sub-Gaussian branch,
            i.e. ε > µ/2 or ε > 6θL
    """
    _check_common(L, epsilon, delta, n, T)
    if epsilon > mu / 2:
        raise InvalidParameterError("epsilon must satisfy epsilon <= mu/2", epsilon=epsilon, mu=mu)
    if epsilon > 6 * THETA * L:
        raise InvalidParameterError("epsilon must satisfy epsilon <= 6*theta*L", epsilon=epsilon, L=L)
    return math.ceil(128 * THETA * L**2 / epsilon**2 * math.log(4 * n * T / delta))


def compute_w0_tail(L: float, epsilon: float, delta: float, n: int, T: int) -> int:
    """W₀ = ⌈(64L/(3ε)) ln(4nT/δ)⌉, the branch for ε > 6θL.

    Raises:
        InvalidParameterError: ε <= 6θL, where the quadratic branch applies
    """
    _check_common(L, epsilon, delta, n, T)
    if epsilon <= 6 * THETA * L:
        raise InvalidParameterError("the tail branch needs epsilon > 6*theta*L", epsilon=epsilon, L=L)
    return math.ceil(64 * L / (3 * epsilon) * math.log(4 * n * T / delta))


class DiscretizedThreshold(NamedTuple):
    w0: int
    # µ - ε - γH, the modulus the block averages keep
    modulus: float


def compute_w0_discretized(
    mu: float,
    L: float,
    epsilon: float,
    delta: float,
    gamma: float,
    H: float,
    R_coords: Sequence[float],
    T: int,
) -> DiscretizedThreshold:
    """Threshold for non-quadratic families via a γ-net of the domain.

    W₀ = ⌈(128θL²/ε²) ln(4T ΣR_i/(2γδ))⌉, and the block averages are
    (µ - ε - γH)-strongly DR-submodular when H bounds the Lipschitz
    constant of their second derivatives.
    """
    _check_common(L, epsilon, delta, 1, T)
    if gamma <= 0:
        raise InvalidParameterError("gamma must be positive", gamma=gamma)
    if H < 0:
        raise InvalidParameterError("H must be non-negative", H=H)
    modulus = mu - epsilon - gamma * H
    if modulus <= 0:
        raise InvalidParameterError(
            "mu - epsilon - gamma*H must be positive",
            mu=mu,
            epsilon=epsilon,
            gamma=gamma,
            H=H,
        )
    spread = float(sum(R_coords))
    if spread <= 0:
        raise InvalidParameterError("R_coords must have a positive sum")
    w0 = math.ceil(128 * THETA * L**2 / epsilon**2 * math.log(4 * T * spread / (2 * gamma * delta)))
    return DiscretizedThreshold(max(w0, 1), modulus)


class BlockValidationReport(BaseModel):
    """Monte-Carlo estimate of how often some block average loses strong DR-submodularity."""

    W: int
    mu: float
    trials: int
    violations: int
    violation_rate: float
    premise_holds: bool
    worst_block_diagonal: float | None = None


def validate_block_strong_dr(
    functions: Sequence[ObjectiveFunction],
    W: int,
    mu: float,
    trials: int,
    seed: int,
    domain: PolytopeDomain | None = None,
    samples: int = 100,
) -> BlockValidationReport:
    """Fraction of random permutations with a block average above -µ/2 on the diagonal.

    Quadratic sequences are checked exactly on their constant Hessian
    diagonals, vectorized over trials. Other families fall back to sampled
    check_strong_dr at µ/2 on every block average, which needs ``domain``.
    The premise is that the global average diagonal is <= -µ; when it
    fails a warning is logged and the rate is still reported.
    """
    T = len(functions)
    if not 1 <= W <= T:
        raise InvalidParameterError(f"block size W must lie in [1, {T}]", W=W, T=T)
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1", trials=trials)

    if all(isinstance(f, QuadraticUtility) for f in functions):
        return _validate_quadratic(functions, W, mu, trials, seed)  # type: ignore[arg-type]
    if domain is None:
        raise InvalidParameterError("non-quadratic block validation needs a domain")

    premise = check_strong_dr(average_functions(functions), domain, mu, samples=samples, seed=seed).holds
    if not premise:
        logger.warning("global average is not %.4g-strongly DR-submodular; premise violated", mu)
    violations = 0
    for trial in range(trials):
        ordered = permute(functions, seed + trial)
        blocks = [ordered[start : start + W] for start in range(0, T, W)]
        if any(
            not check_strong_dr(average_functions(block), domain, mu / 2, samples=samples, seed=seed).holds
            for block in blocks
        ):
            violations += 1
    return BlockValidationReport(
        W=W,
        mu=mu,
        trials=trials,
        violations=violations,
        violation_rate=violations / trials,
        premise_holds=premise,
    )


def _validate_quadratic(
    functions: Sequence[QuadraticUtility],
    W: int,
    mu: float,
    trials: int,
    seed: int,
) -> BlockValidationReport:
    T = len(functions)
    diagonals = np.array([np.diag(f.A) for f in functions])
    premise = bool(np.all(diagonals.mean(axis=0) <= -mu + 1e-12))
    if not premise:
        logger.warning("global average diagonal exceeds -%.4g; premise violated", mu)

    starts = np.arange(0, T, W)
    sizes = np.diff(np.append(starts, T))
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -np.inf
    for first in range(0, trials, _TRIAL_CHUNK):
        count = min(_TRIAL_CHUNK, trials - first)
        orders = rng.permuted(np.tile(np.arange(T), (count, 1)), axis=1)
        block_sums = np.add.reduceat(diagonals[orders], starts, axis=1)
        block_means = block_sums / sizes[None, :, None]
        peak = block_means.max(axis=(1, 2))
        violations += int(np.count_nonzero(peak > -mu / 2 + 1e-12))
        worst = max(worst, float(peak.max()))

    return BlockValidationReport(
        W=W,
        mu=mu,
        trials=trials,
        violations=violations,
        violation_rate=violations / trials,
        premise_holds=premise,
        worst_block_diagonal=worst,
    )
