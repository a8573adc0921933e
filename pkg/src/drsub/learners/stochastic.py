"""Projection-free learners for i.i.d. stochastic functions.

- Algorithm 2: at round t, run ⌈√t⌉ Frank-Wolfe steps from the origin on
  the average of fresh stochastic gradients of all t past functions.
- Algorithm 3: one Frank-Wolfe step of size 1/T per round along the
  recursive estimator d_t = ∇̃f_t(x_t) + (1 - ρ_t)(d_{t-1} - ∇̃f_t(x_{t-1})),
  ρ_t = 1/(t + 1).
- OSFW: Algorithm 3 with ρ_t ≡ 1, i.e. d_t = ∇̃f_t(x_t).
"""

from dataclasses import dataclass, field, replace
from enum import StrEnum
import logging
import math

import numpy as np

from ..domain import Point, PolytopeDomain
from ..errors import InvalidParameterError
from ..functions import FloatArray, NoisyGradientOracle
from ..offline import OfflineResult, best_comparator
from ..trace import ALPHA_OFFLINE, ALPHA_STOCHASTIC, RegretTrace, TraceMetadata
from .base import convex_step

logger = logging.getLogger(__name__)


class StochasticAlgorithm(StrEnum):
    ALG2 = "alg2"
    ALG3 = "alg3"
    OSFW = "osfw"


def alg2_inner_steps(t: int) -> int:
    """K_t = ⌈√t⌉."""
    return math.ceil(math.sqrt(t))


def alg2_gradient_calls(T: int) -> int:
    """Σ_{t<=T} t·⌈√t⌉ oracle calls made by Algorithm 2 through round T."""
    return sum(t * alg2_inner_steps(t) for t in range(1, T + 1))


def alg2_bound(L: float, R: float, T: int) -> float:
    """Discretization term Σ_t LR²/(2K_t) of Algorithm 2's regret bound."""
    return sum(L * R**2 / (2 * alg2_inner_steps(t)) for t in range(1, T + 1))


@dataclass
class Alg2State:
    """Algorithm 2 keeps no estimator; only the round counter and last play."""

    x: Point
    round: int = 0
    fresh: bool = True

    @classmethod
    def fresh_start(cls, dim: int, fresh: bool = True) -> "Alg2State":
        return cls(np.zeros(dim), 0, fresh)


def alg2_round(
    state: Alg2State,
    domain: PolytopeDomain,
    t: int,
    oracle: NoisyGradientOracle,
) -> tuple[Point, Alg2State]:
    """Compute x_{t+1} after observing f_1..f_t.

    With ``state.fresh`` every past function's gradient is re-sampled at
    each inner point; otherwise the oracle's retained realizations are
    re-queried. Either way a step costs t oracle calls.
    """
    if t < 1:
        raise InvalidParameterError("round index starts at 1", t=t)
    K_t = alg2_inner_steps(t)
    x = domain.zero.copy()
    for _ in range(K_t):
        if state.fresh:
            d = oracle.fresh_gradient_mean(t, x)
        else:
            d = oracle.retained_gradient_mean(t, x)
        x = convex_step(x, domain.linear_maximize(d), 1.0 / K_t)
    return x, replace(state, x=x, round=t)


@dataclass
class Alg3State:
    """Recursive-estimator state.

    Attributes:
        d: Estimator d_{t-1} from the previous round
        x: Iterate x_t to play this round
        x_prev: Iterate x_{t-1}
        round: Rounds completed
        horizon: T, which fixes the step size 1/T
        recursive: False turns the estimator off (OSFW)
        errors: ‖d_t - ∇f(x_t)‖₂ per round, when the mean gradient is known
    """

    d: FloatArray
    x: Point
    x_prev: Point
    horizon: int
    round: int = 0
    recursive: bool = True
    errors: list[float] = field(default_factory=list)

    @classmethod
    def fresh(cls, dim: int, horizon: int, recursive: bool = True) -> "Alg3State":
        if horizon < 1:
            raise InvalidParameterError("horizon must be >= 1", T=horizon)
        zero = np.zeros(dim)
        return cls(zero, zero, zero, horizon, 0, recursive)

    def rho(self, t: int) -> float:
        return 1.0 / (t + 1) if self.recursive else 1.0


def estimator_step(
    d_prev: FloatArray,
    gradient_now: FloatArray,
    gradient_before: FloatArray | None,
    rho: float,
) -> FloatArray:
    """d_t = g(x_t) + (1 - ρ)(d_{t-1} - g(x_{t-1})), both g from the same f_t."""
    if gradient_before is None:
        return gradient_now
    return gradient_now + (1.0 - rho) * (d_prev - gradient_before)


def alg3_round(
    state: Alg3State,
    domain: PolytopeDomain,
    t: int,
    oracle: NoisyGradientOracle,
    T: int | None = None,
) -> tuple[Point, Alg3State]:
    """Update on f_t and return x_{t+1} = x_t + v_t/T.

    Round 1 uses d_1 = ∇̃f_1(x_1) (one oracle call); later rounds query the
    same realization f_t at x_t and x_{t-1} (two calls).
    """
    T = state.horizon if T is None else T
    if t < 1:
        raise InvalidParameterError("round index starts at 1", t=t)
    gradient_now = oracle.stochastic_gradient(t, state.x)
    gradient_before = None
    if t > 1 and state.recursive:
        gradient_before = oracle.stochastic_gradient(t, state.x_prev)
    d = estimator_step(state.d, gradient_now, gradient_before, state.rho(t))

    errors = state.errors
    if oracle.expected is not None:
        errors = [*errors, float(np.linalg.norm(d - oracle.expected.gradient(state.x)))]

    x_next = convex_step(state.x, domain.linear_maximize(d), 1.0 / T)
    return x_next, replace(state, d=d, x=x_next, x_prev=state.x, round=t, errors=errors)


def osfw_round(
    state: Alg3State,
    domain: PolytopeDomain,
    t: int,
    oracle: NoisyGradientOracle,
    T: int | None = None,
) -> tuple[Point, Alg3State]:
    """OSFW: a single stochastic gradient per round, no recursion."""
    if state.recursive:
        raise InvalidParameterError("OSFW state must be created with recursive=False")
    return alg3_round(state, domain, t, oracle, T)


def run_iid(
    algorithm: StochasticAlgorithm | str,
    oracle: NoisyGradientOracle,
    domain: PolytopeDomain,
    T: int,
    alpha: float = ALPHA_OFFLINE,
    comparator: OfflineResult | None = None,
    seed: int | None = None,
    fresh: bool = True,
) -> RegretTrace:
    """Play T rounds against i.i.d. draws and record stochastic regret.

    Utilities are the realized f_t(x_t); regret is measured on the expected
    function f. Algorithm 2 plays the origin in round 1, as do Algorithm 3
    and OSFW.
    """
    algorithm = StochasticAlgorithm(algorithm)
    if T < 1:
        raise InvalidParameterError("T must be >= 1", T=T)
    if comparator is None:
        comparator = best_comparator(oracle.expected, domain)
    calls_before = oracle.calls

    state: Alg2State | Alg3State
    if algorithm is StochasticAlgorithm.ALG2:
        state = Alg2State.fresh_start(domain.dim, fresh)
    else:
        state = Alg3State.fresh(domain.dim, T, recursive=algorithm is StochasticAlgorithm.ALG3)

    x = domain.zero.copy()
    plays, utilities, expected = [], [], []
    for t in range(1, T + 1):
        plays.append(x)
        utilities.append(oracle.realize(t).value(x))
        expected.append(oracle.expected.value(x))
        if isinstance(state, Alg2State):
            x, state = alg2_round(state, domain, t, oracle)
        else:
            x, state = alg3_round(state, domain, t, oracle, T)

    params: dict = {"T": T}
    provable_alpha = None
    if isinstance(state, Alg3State):
        params["estimator_errors"] = state.errors
        provable_alpha = ALPHA_STOCHASTIC
    else:
        params["fresh"] = fresh

    metadata = TraceMetadata(
        algorithm=algorithm.value,
        alpha=alpha,
        seed=seed,
        comparator=comparator.x_out,
        comparator_value=comparator.value,
        certificate=comparator.certificate,
        gradient_calls=oracle.calls - calls_before,
        provable_alpha=provable_alpha,
        params=params,
    )
    return RegretTrace.build(plays, utilities, [comparator.value] * T, metadata, expected_utilities=expected)
