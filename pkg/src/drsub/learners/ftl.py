"""Follow-the-leader and follow-the-regularized-leader sub-learners."""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike

from ..domain import Point, PolytopeDomain
from ..errors import DimensionMismatchError, InvalidParameterError
from ..functions import FloatArray


def _as_gradient(gradient: ArrayLike, grad_sum: FloatArray) -> FloatArray:
    g = np.asarray(gradient, dtype=float)
    if g.shape != grad_sum.shape:
        raise DimensionMismatchError("gradient dimension differs from the learner's", shape=list(g.shape))
    return g


@dataclass(frozen=True)
class FtlState:
    """FTL on the strongly concave payoffs ⟨v, g_s⟩ - (µ/2)‖v‖².

    The leader after t - 1 rounds has the closed form
    Proj(grad_sum / (µ (t - 1))). ``payoff`` accumulates the payoff of the
    played points for the rounds whose play was passed to ``update``.
    """

    grad_sum: FloatArray
    rounds_seen: int
    mu: float
    payoff: float = 0.0

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise InvalidParameterError("FTL needs mu > 0", mu=self.mu)
        if self.rounds_seen < 0:
            raise InvalidParameterError("rounds_seen must be >= 0", rounds_seen=self.rounds_seen)
        if not np.all(np.isfinite(self.grad_sum)):
            raise InvalidParameterError("grad_sum must be finite")

    @classmethod
    def fresh(cls, dim: int, mu: float) -> "FtlState":
        return cls(np.zeros(dim), 0, mu)

    def select(self, domain: PolytopeDomain) -> Point:
        return ftl_select(self, domain)

    def update(self, gradient: ArrayLike, played: ArrayLike | None = None) -> "FtlState":
        return ftl_update(self, gradient, played)

    def regret(self, domain: PolytopeDomain) -> float:
        return ftl_regret(self, domain)


def ftl_select(state: FtlState, domain: PolytopeDomain) -> Point:
    """Play the leader; with no data yet, play the origin."""
    if state.rounds_seen == 0:
        return domain.zero.copy()
    return domain.project(state.grad_sum / (state.mu * state.rounds_seen))


def ftl_update(state: FtlState, gradient: ArrayLike, played: ArrayLike | None = None) -> FtlState:
    g = _as_gradient(gradient, state.grad_sum)
    payoff = state.payoff
    if played is not None:
        v = np.asarray(played, dtype=float)
        payoff += float(v @ g - 0.5 * state.mu * (v @ v))
    return FtlState(state.grad_sum + g, state.rounds_seen + 1, state.mu, payoff)


def ftl_regret(state: FtlState, domain: PolytopeDomain) -> float:
    """Best fixed payoff in hindsight minus the accumulated payoff.

    Over n rounds with µ-strongly concave payoffs whose gradients are bounded
    by G, FTL keeps this below G²(1 + ln n)/(2µ).
    """
    n = state.rounds_seen
    if n == 0:
        return 0.0
    best = domain.project(state.grad_sum / (state.mu * n))
    return float(best @ state.grad_sum - 0.5 * state.mu * n * (best @ best)) - state.payoff


class StepSchedule(StrEnum):
    """FTRL step-size schedules."""

    # η_t = η
    CONSTANT = "constant"
    # η_t = η / (t - 1); with η = 1/µ this is FTL on linear payoffs
    INVERSE = "inverse"


@dataclass(frozen=True)
class FtrlState:
    """FTRL with the Euclidean regularizer ‖v‖²/(2η_t) on linear payoffs.

    The regularized leader is Proj(η_t · grad_sum).
    """

    grad_sum: FloatArray
    rounds_seen: int
    eta: float
    schedule: StepSchedule = StepSchedule.CONSTANT
    payoff: float = 0.0

    def __post_init__(self) -> None:
        if self.eta <= 0:
            raise InvalidParameterError("FTRL needs eta > 0", eta=self.eta)

    @classmethod
    def fresh(cls, dim: int, eta: float, schedule: StepSchedule = StepSchedule.CONSTANT) -> "FtrlState":
        return cls(np.zeros(dim), 0, eta, StepSchedule(schedule))

    @property
    def step(self) -> float:
        if self.schedule is StepSchedule.INVERSE:
            return self.eta / max(self.rounds_seen, 1)
        return self.eta

    def select(self, domain: PolytopeDomain) -> Point:
        if self.rounds_seen == 0:
            return domain.zero.copy()
        return domain.project(self.step * self.grad_sum)

    def update(self, gradient: ArrayLike, played: ArrayLike | None = None) -> "FtrlState":
        g = _as_gradient(gradient, self.grad_sum)
        payoff = self.payoff if played is None else self.payoff + float(np.asarray(played, dtype=float) @ g)
        return FtrlState(self.grad_sum + g, self.rounds_seen + 1, self.eta, self.schedule, payoff)

    def regret(self, domain: PolytopeDomain) -> float:
        """Best fixed linear payoff in hindsight minus the accumulated payoff."""
        if self.rounds_seen == 0:
            return 0.0
        return float(domain.linear_maximize(self.grad_sum) @ self.grad_sum) - self.payoff
