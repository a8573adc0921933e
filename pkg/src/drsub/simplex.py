"""Dense two-phase tableau simplex with Bland's pivoting rule.

Solves ``max c·y  s.t.  A y <= r, y >= 0`` for the tiny problems that show
up as linear maximization oracles (a handful of rows, at most a few dozen
columns). Rows with a negative right-hand side get an artificial variable
and are handled by a phase-one pass.
"""

from dataclasses import dataclass
import logging

import numpy as np
from numpy.typing import NDArray

from .errors import InfeasibleProblemError, SimplexCyclingError, UnboundedProblemError

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class LinearProgramResult:
    """Optimal vertex of a linear program.

    Attributes:
        x: Optimal values of the structural variables
        value: Objective value c·x
        iterations: Pivots performed over both phases
        tied: True when some nonbasic column has a zero reduced cost, i.e.
            the optimum may not be unique
    """

    x: FloatArray
    value: float
    iterations: int
    tied: bool


class _Tableau:
    """Tableau in the form B⁻¹[A | I | artificials | r] with its basis."""

    def __init__(self, A: FloatArray, r: FloatArray):
        m, n = A.shape
        negative = r < 0
        k = int(negative.sum())
        sign = np.where(negative, -1.0, 1.0)

        self.n = n
        self.width = n + m + k
        self.T = np.zeros((m, self.width + 1))
        self.T[:, :n] = A * sign[:, None]
        self.T[np.arange(m), n + np.arange(m)] = sign
        self.T[:, -1] = r * sign

        self.basis = n + np.arange(m)
        artificial_rows = np.flatnonzero(negative)
        artificial_cols = n + m + np.arange(k)
        self.T[artificial_rows, artificial_cols] = 1.0
        self.basis[artificial_rows] = artificial_cols

        self.artificial = np.zeros(self.width, dtype=bool)
        self.artificial[n + m:] = True

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        # Pivoting can leave -1e-17 style residue on the right-hand side
        rhs = T[:, -1]
        rhs[(rhs < 0) & (rhs > -1e-12)] = 0.0
        self.basis[row] = col

    def reduced_costs(self, c: FloatArray) -> FloatArray:
        cbar = c - c[self.basis] @ self.T[:, :-1]
        cbar[self.basis] = 0.0
        return cbar

    def objective(self, c: FloatArray) -> float:
        return float(c[self.basis] @ self.T[:, -1])

    def solution(self) -> FloatArray:
        values = np.zeros(self.width)
        values[self.basis] = self.T[:, -1]
        return np.maximum(values[: self.n], 0.0)

    def optimize(self, c: FloatArray, allowed: NDArray[np.bool_], tol: float, max_iter: int) -> tuple[int, FloatArray]:
        """Run Bland-rule pivots until no improving column remains."""
        for iteration in range(max_iter):
            cbar = self.reduced_costs(c)
            entering = np.flatnonzero((cbar > tol) & allowed)
            if entering.size == 0:
                return iteration, cbar
            col = int(entering[0])

            column = self.T[:, col]
            positive = column > tol
            if not positive.any():
                raise UnboundedProblemError(
                    "Linear program is unbounded",
                    entering_column=col,
                )
            ratios = np.full(column.shape, np.inf)
            ratios[positive] = self.T[positive, -1] / column[positive]
            best = ratios.min()
            candidates = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
            row = int(candidates[np.argmin(self.basis[candidates])])
            self.pivot(row, col)

        raise SimplexCyclingError(
            f"Simplex did not terminate within {max_iter} pivots",
            max_iter=max_iter,
        )


def solve_lp(
    c: FloatArray,
    A: FloatArray,
    r: FloatArray,
    tol: float = 1e-9,
    max_iter: int = 5000,
) -> LinearProgramResult:
    """Maximize c·y subject to A y <= r and y >= 0.

    Args:
        c: Objective vector of length n
        A: Constraint matrix of shape (m, n)
        r: Right-hand side of length m (may contain negative entries)
        tol: Pivoting and optimality tolerance
        max_iter: Pivot cap per phase

    Returns:
        LinearProgramResult with the optimal vertex

    Raises:
        InfeasibleProblemError: The constraints admit no y >= 0
        UnboundedProblemError: The objective is unbounded above
        SimplexCyclingError: A phase exceeded ``max_iter`` pivots
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, c.size)
    r = np.asarray(r, dtype=float)

    tableau = _Tableau(A, r)
    iterations = 0

    if tableau.artificial.any():
        phase_one = np.where(tableau.artificial, -1.0, 0.0)
        used, _ = tableau.optimize(phase_one, np.ones(tableau.width, dtype=bool), tol, max_iter)
        iterations += used
        infeasibility = -tableau.objective(phase_one)
        if infeasibility > tol * max(1.0, float(np.abs(r).max())):
            raise InfeasibleProblemError(
                "Linear program is infeasible",
                infeasibility=infeasibility,
            )
        # Drive artificials still in the basis (at value zero) out of it
        for row, basic in enumerate(tableau.basis.copy()):
            if not tableau.artificial[basic]:
                continue
            candidates = np.flatnonzero((np.abs(tableau.T[row, :-1]) > tol) & ~tableau.artificial)
            if candidates.size:
                tableau.pivot(row, int(candidates[0]))

    c_full = np.zeros(tableau.width)
    c_full[: c.size] = c
    used, cbar = tableau.optimize(c_full, ~tableau.artificial, tol, max_iter)
    iterations += used

    nonbasic = ~tableau.artificial
    nonbasic[tableau.basis] = False
    tied = bool(np.any(np.abs(cbar[nonbasic]) <= tol))

    x = tableau.solution()
    logger.debug("simplex finished after %d pivots (tied=%s)", iterations, tied)
    return LinearProgramResult(x=x, value=float(c @ x), iterations=iterations, tied=tied)


def lexicographic_maximize(
    c: FloatArray,
    A: FloatArray,
    r: FloatArray,
    tol: float = 1e-9,
    max_iter: int = 5000,
) -> LinearProgramResult:
    """Maximize c·y, returning the lexicographically smallest optimal vertex.

    When the first solve reports no tied reduced costs the optimum is unique
    and returned as is. Otherwise the optimal face is pinned with the row
    ``-c·y <= -value + tol`` and the coordinates are minimized one at a time,
    each minimum being frozen before the next coordinate is considered.
    """
    result = solve_lp(c, A, r, tol, max_iter)
    if not result.tied:
        return result

    n = result.x.size
    A_face = np.vstack([np.asarray(A, dtype=float).reshape(-1, n), -np.asarray(c, dtype=float)])
    r_face = np.append(np.asarray(r, dtype=float), -result.value + tol)
    iterations = result.iterations
    x = result.x

    for i in range(n):
        unit = np.zeros(n)
        unit[i] = 1.0
        step = solve_lp(-unit, A_face, r_face, tol, max_iter)
        iterations += step.iterations
        x = step.x
        if not step.tied:
            break
        A_face = np.vstack([A_face, unit])
        r_face = np.append(r_face, x[i] + tol)

    return LinearProgramResult(x=x, value=float(np.asarray(c) @ x), iterations=iterations, tied=True)
