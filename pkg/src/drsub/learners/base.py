"""Base interfaces for online learners."""

from typing import Protocol, Self

import numpy as np
from numpy.typing import ArrayLike

from ..domain import Point, PolytopeDomain


class SubLearner(Protocol):
    """Protocol for the online linear (or strongly concave) maximizers that
    Meta-Frank-Wolfe style algorithms run one per inner step.

    Sub-learners are immutable: ``update`` returns the next state.
    """

    def select(self, domain: PolytopeDomain) -> Point:
        """Point to play this round, from past feedback only.

        Args:
            domain: Feasible set

        Returns:
            Feasible point v
        """
        ...

    def update(self, gradient: ArrayLike, played: ArrayLike | None = None) -> Self:
        """Absorb this round's payoff gradient.

        Args:
            gradient: Linear part of the payoff, ∇f_t at the inner iterate
            played: The point selected this round, added to the running payoff

        Returns:
            Next state
        """
        ...

    def regret(self, domain: PolytopeDomain) -> float:
        """Hindsight regret of the recorded plays against the best fixed point."""
        ...


def convex_step(x: Point, v: Point, step: float) -> Point:
    """x + step·v, the Frank-Wolfe move shared by every learner here."""
    return x + step * np.asarray(v, dtype=float)
