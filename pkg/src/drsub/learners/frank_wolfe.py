"""Meta-Frank-Wolfe learners for adversarial sequences.

Both algorithms run K sub-learners, one per Frank-Wolfe step. Each round
the sub-learners propose directions v⁽¹⁾..v⁽ᴷ⁾ from past feedback only,
the played point is x⁽ᴷ⁺¹⁾ = Σ_k v⁽ᵏ⁾/K, and sub-learner k is then fed
∇f_t(x⁽ᵏ⁾). Algorithm 1 uses FTL on strongly concave surrogates and
needs K = O(T/ln T); the Meta-FW baseline uses FTRL on linear payoffs.
"""

from dataclasses import dataclass, field
from typing import Sequence
import logging
import math

import numpy as np

from ..domain import Norm, Point, PolytopeDomain
from ..errors import InvalidParameterError
from ..functions import ObjectiveFunction, sum_functions
from ..checks import estimate_lipschitz
from ..offline import OfflineResult, best_comparator
from ..trace import ALPHA_OFFLINE, RegretTrace, TraceMetadata
from .base import SubLearner, convex_step
from .ftl import FtlState, FtrlState, StepSchedule

logger = logging.getLogger(__name__)


def default_alg1_k(T: int) -> int:
    """K = max(1, ⌈T / ln T⌉)."""
    if T < 2:
        return 1
    return max(1, math.ceil(T / math.log(T)))


def default_metafw_k(T: int) -> int:
    """K = ⌈√T⌉."""
    return max(1, math.ceil(math.sqrt(T)))


def tradeoff_schedule(T: int, epsilon: float) -> tuple[int, int]:
    """Block size and inner steps (⌈T^ε⌉, ⌈T^(1-ε)⌉) for blocked adversarial runs.

    Blocking trades regret O(T^ε ln T) for T^(1-ε) FTL updates in total.
    """
    if not 0 <= epsilon <= 1:
        raise InvalidParameterError("epsilon must lie in [0, 1]", epsilon=epsilon)
    return max(1, math.ceil(T**epsilon)), max(1, math.ceil(T ** (1 - epsilon)))


def alg1_bound(beta: float, mu: float, R: float, T: int) -> float:
    """FTL regret bound (β + µR)²(1 + ln T)/(2µ) used in bound reports."""
    return (beta + mu * R) ** 2 * (1 + math.log(T)) / (2 * mu)


@dataclass
class MetaFrankWolfeState:
    """K sub-learners plus the last round's inner iterates for diagnostics."""

    instances: list[SubLearner]
    round: int = 0
    iterates: list[Point] = field(default_factory=list)
    directions: list[Point] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.instances:
            raise InvalidParameterError("K must be >= 1")

    @property
    def K(self) -> int:
        return len(self.instances)

    def learner_regrets(self, domain: PolytopeDomain) -> np.ndarray:
        """Hindsight regret of each sub-learner on the payoffs it was fed."""
        return np.array([learner.regret(domain) for learner in self.instances])


@dataclass
class Alg1State(MetaFrankWolfeState):
    """Algorithm 1 state: K FTL instances sharing µ."""

    @classmethod
    def fresh(cls, K: int, dim: int, mu: float) -> "Alg1State":
        if K < 1:
            raise InvalidParameterError("K must be >= 1", K=K)
        return cls([FtlState.fresh(dim, mu) for _ in range(K)])


@dataclass
class MetaFwState(MetaFrankWolfeState):
    """Meta-FW baseline state: K FTRL instances."""

    @classmethod
    def fresh(
        cls,
        K: int,
        dim: int,
        eta: float,
        schedule: StepSchedule = StepSchedule.CONSTANT,
    ) -> "MetaFwState":
        if K < 1:
            raise InvalidParameterError("K must be >= 1", K=K)
        return cls([FtrlState.fresh(dim, eta, schedule) for _ in range(K)])


def meta_frank_wolfe_round[S: MetaFrankWolfeState](
    state: S,
    domain: PolytopeDomain,
    f_t: ObjectiveFunction,
) -> tuple[Point, S]:
    """One round of the shared Meta-Frank-Wolfe loop.

    Returns:
        The played point x_t = x⁽ᴷ⁺¹⁾ and the next state
    """
    K = state.K
    directions = [learner.select(domain) for learner in state.instances]

    x = domain.zero.copy()
    iterates = [x]
    for v in directions:
        x = convex_step(x, v, 1.0 / K)
        iterates.append(x)

    # Sub-learner k is rewarded at the iterate it moved from
    instances = [
        learner.update(f_t.gradient(x_k), v) for learner, x_k, v in zip(state.instances, iterates, directions)
    ]
    next_state = type(state)(instances, state.round + 1, iterates, directions)
    return x, next_state


def alg1_round(state: Alg1State, domain: PolytopeDomain, f_t: ObjectiveFunction) -> tuple[Point, Alg1State]:
    """Algorithm 1 round: FTL sub-learners on µ-strongly concave surrogates."""
    return meta_frank_wolfe_round(state, domain, f_t)


def metafw_round(state: MetaFwState, domain: PolytopeDomain, f_t: ObjectiveFunction) -> tuple[Point, MetaFwState]:
    """Meta-FW baseline round: FTRL sub-learners on linear payoffs."""
    return meta_frank_wolfe_round(state, domain, f_t)


def _comparator(
    functions: Sequence[ObjectiveFunction],
    domain: PolytopeDomain,
    comparator: OfflineResult | None,
) -> OfflineResult:
    return best_comparator(sum_functions(functions), domain) if comparator is None else comparator


def run_meta_frank_wolfe(
    state: MetaFrankWolfeState,
    functions: Sequence[ObjectiveFunction],
    domain: PolytopeDomain,
    metadata: TraceMetadata,
    comparator: OfflineResult | None = None,
) -> RegretTrace:
    """Play every function in order and assemble the regret trace."""
    comparator = _comparator(functions, domain, comparator)
    plays, utilities = [], []
    for f_t in functions:
        x, state = meta_frank_wolfe_round(state, domain, f_t)
        plays.append(x)
        utilities.append(f_t.value(x))

    x_star = comparator.point
    metadata.comparator = comparator.x_out
    metadata.comparator_value = comparator.value
    metadata.certificate = comparator.certificate
    metadata.gradient_calls = state.K * len(functions)
    metadata.params["learner_regret"] = float(state.learner_regrets(domain).mean())
    return RegretTrace.build(plays, utilities, [f.value(x_star) for f in functions], metadata)


def run_alg1(
    functions: Sequence[ObjectiveFunction],
    domain: PolytopeDomain,
    mu: float,
    K: int | None = None,
    comparator: OfflineResult | None = None,
    seed: int | None = None,
) -> RegretTrace:
    """Run Algorithm 1 over an adversarially ordered sequence."""
    K = default_alg1_k(len(functions)) if K is None else K
    metadata = TraceMetadata(algorithm="alg1", alpha=ALPHA_OFFLINE, seed=seed, params={"K": K, "mu": mu})
    return run_meta_frank_wolfe(Alg1State.fresh(K, domain.dim, mu), functions, domain, metadata, comparator)


def run_metafw(
    functions: Sequence[ObjectiveFunction],
    domain: PolytopeDomain,
    K: int | None = None,
    eta: float | None = None,
    comparator: OfflineResult | None = None,
    seed: int | None = None,
) -> RegretTrace:
    """Run the Meta-FW baseline; η defaults to R/(β√T)."""
    T = len(functions)
    K = default_metafw_k(T) if K is None else K
    if eta is None:
        R = domain.diameter(Norm.L2)
        beta = estimate_lipschitz(functions, domain)
        eta = R / (beta * math.sqrt(T)) if beta > 0 else 1.0
        logger.debug("Meta-FW step size eta=%.6g from R=%.6g beta=%.6g", eta, R, beta)
    metadata = TraceMetadata(algorithm="metafw", alpha=ALPHA_OFFLINE, seed=seed, params={"K": K, "eta": eta})
    return run_meta_frank_wolfe(MetaFwState.fresh(K, domain.dim, eta), functions, domain, metadata, comparator)


def inner_progress_gaps(
    state: MetaFrankWolfeState,
    f_t: ObjectiveFunction,
    L: float,
    norm: Norm = Norm.L1,
) -> np.ndarray:
    """Per-step slack of f(x⁽ᵏ⁺¹⁾) >= f(x⁽ᵏ⁾) + ⟨v, ∇f(x⁽ᵏ⁾)⟩/K - L‖v‖²/(2K²).

    Computed on the inner iterates stored by the last round; every entry is
    non-negative for an L-smooth f.
    """
    K = state.K
    order = Norm(norm).order
    gaps = []
    for k, v in enumerate(state.directions):
        x, x_next = state.iterates[k], state.iterates[k + 1]
        lower = f_t.value(x) + f_t.gradient(x) @ v / K - L * np.linalg.norm(v, ord=order) ** 2 / (2 * K**2)
        gaps.append(f_t.value(x_next) - lower)
    return np.array(gaps)
