"""Polytope feasible sets and their geometric oracles."""

from enum import StrEnum
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Any, Self
import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .config import config
from .errors import (
    ConfigError,
    DimensionMismatchError,
    InvalidParameterError,
    ProjectionError,
)
from .simplex import lexicographic_maximize

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
# Points are plain float vectors; feasibility is checked by the domain.
Point = FloatArray

# Dykstra tries an exact solve on its current active set every this many sweeps
_POLISH_EVERY = 25
# Relative slack under which a constraint counts as active
_ACTIVE_SLACK = 1e-6


class Norm(StrEnum):
    """Norms used for diameters, smoothness and strong DR-submodularity."""

    L1 = "l1"
    L2 = "l2"

    @property
    def order(self) -> int:
        return 1 if self is Norm.L1 else 2


def as_point(x: ArrayLike, dim: int) -> Point:
    """Convert ``x`` to a float vector of length ``dim``.

    Raises:
        DimensionMismatchError: Wrong length or shape
        InvalidParameterError: Non-finite entries
    """
    point = np.asarray(x, dtype=float)
    if point.ndim != 1 or point.size != dim:
        raise DimensionMismatchError(
            f"Expected a vector of dimension {dim}, got shape {point.shape}",
            expected=dim,
            shape=list(point.shape),
        )
    if not np.all(np.isfinite(point)):
        raise InvalidParameterError("Point has non-finite entries", point=point)
    return point


class PolytopeDomain(BaseModel):
    """Compact convex set {x : Cx ⪯ b, lower ⪯ x ⪯ upper}.

    Serialized with the keys ``dim``, ``C``, ``b``, ``lower`` and ``upper``.
    ``lower`` defaults to zeros and ``upper`` to ones. The origin must be
    feasible, which every algorithm relies on for its first play.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    dim: int = Field(gt=0)
    ineq_matrix: list[list[float]] = Field(default_factory=list, alias="C")
    ineq_rhs: list[float] = Field(default_factory=list, alias="b")
    lower: list[float]
    upper: list[float]

    @model_validator(mode="before")
    @classmethod
    def _default_bounds(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("dim"), int):
            data = dict(data)
            if data.get("lower") is None:
                data["lower"] = [0.0] * data["dim"]
            if data.get("upper") is None:
                data["upper"] = [1.0] * data["dim"]
        return data

    @model_validator(mode="after")
    def _check_shape(self) -> Self:
        n = self.dim
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError(f"lower and upper must have length {n}")
        if any(len(row) != n for row in self.ineq_matrix):
            raise ValueError(f"every row of C must have length {n}")
        if len(self.ineq_rhs) != len(self.ineq_matrix):
            raise ValueError("C and b must have the same number of rows")
        values = [*self.lower, *self.upper, *self.ineq_rhs, *(v for row in self.ineq_matrix for v in row)]
        if not all(math.isfinite(v) for v in values):
            raise ValueError("domain data must be finite")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("lower must be componentwise <= upper")
        if any(lo > 0 or hi < 0 for lo, hi in zip(self.lower, self.upper)) or any(v < 0 for v in self.ineq_rhs):
            raise ValueError("the origin must be feasible (lower <= 0 <= upper and b >= 0)")
        return self

    # Constructors

    @classmethod
    def unit_box(cls, n: int) -> "PolytopeDomain":
        """The box [0, 1]^n."""
        return cls(dim=n)

    @classmethod
    def budget(cls, n: int, total: float) -> "PolytopeDomain":
        """{x : 1ᵀx <= total, 0 ⪯ x ⪯ 1}, the "pick ``total`` items" polytope."""
        return cls(dim=n, C=[[1.0] * n], b=[float(total)])

    @classmethod
    def random_packing(cls, m: int, n: int, rng: np.random.Generator) -> "PolytopeDomain":
        """{x : Cx ⪯ 1, 0 ⪯ x ⪯ 1} with entries of C uniform on [0, 1]."""
        C = rng.uniform(0.0, 1.0, size=(m, n))
        return cls(dim=n, C=C.tolist(), b=[1.0] * m)

    @classmethod
    def load(cls, path: Path) -> "PolytopeDomain":
        """Read a domain from a JSON document."""
        try:
            return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigError(f"Invalid domain document {path}", errors=e.errors()) from e

    def dump(self, path: Path) -> None:
        """Write the domain as a JSON document."""
        Path(path).write_text(self.model_dump_json(by_alias=True, indent=2), encoding="utf-8")

    # Cached arrays

    @cached_property
    def matrix(self) -> FloatArray:
        return np.asarray(self.ineq_matrix, dtype=float).reshape(-1, self.dim)

    @cached_property
    def rhs(self) -> FloatArray:
        return np.asarray(self.ineq_rhs, dtype=float)

    @cached_property
    def lower_bound(self) -> FloatArray:
        return np.asarray(self.lower, dtype=float)

    @cached_property
    def upper_bound(self) -> FloatArray:
        return np.asarray(self.upper, dtype=float)

    @property
    def n_constraints(self) -> int:
        return len(self.ineq_rhs)

    @property
    def is_box(self) -> bool:
        return self.n_constraints == 0

    @cached_property
    def zero(self) -> Point:
        return np.zeros(self.dim)

    # Oracles

    def contains(self, x: ArrayLike, tol: float = 0.0) -> bool:
        """Return True iff Cx ⪯ b + tol and lower - tol ⪯ x ⪯ upper + tol."""
        if tol < 0:
            raise InvalidParameterError("tol must be non-negative", tol=tol)
        point = as_point(x, self.dim)
        if np.any(point < self.lower_bound - tol) or np.any(point > self.upper_bound + tol):
            return False
        return bool(np.all(self.matrix @ point <= self.rhs + tol))

    def contains_rows(self, X: FloatArray, tol: float = 0.0) -> NDArray[np.bool_]:
        """Vectorized ``contains`` over the rows of X."""
        inside = np.all((X >= self.lower_bound - tol) & (X <= self.upper_bound + tol), axis=1)
        if not self.is_box:
            inside &= np.all(X @ self.matrix.T <= self.rhs + tol, axis=1)
        return inside

    def linear_maximize(self, direction: ArrayLike, tol: float | None = None) -> Point:
        """Linear maximization oracle: argmax over the domain of ⟨x, direction⟩.

        Among optimal vertices the lexicographically smallest one is returned,
        so identical inputs always give identical outputs. Boxes are solved in
        closed form; general polytopes go through the dense simplex.
        """
        tol = config.lmo_tol if tol is None else tol
        d = as_point(direction, self.dim)

        if self.is_box:
            return np.where(d > 0, self.upper_bound, self.lower_bound)

        # Shift to y = x - lower >= 0 so the simplex works in standard form
        lo = self.lower_bound
        A = np.vstack([self.matrix, np.eye(self.dim)])
        r = np.concatenate([self.rhs - self.matrix @ lo, self.upper_bound - lo])
        result = lexicographic_maximize(d, A, r, tol=tol, max_iter=config.simplex_max_iter)
        return np.minimum(result.x + lo, self.upper_bound)

    def project(self, y: ArrayLike, tol: float | None = None, max_iter: int | None = None) -> Point:
        """Euclidean projection by Dykstra's alternating projections.

        The family of sets is one half-space per row of C followed by the box.
        Iteration stops once a full sweep moves the iterate by at most
        ``tol * max(1, ‖y‖)`` and the iterate is feasible within
        ``config.feasibility_tol``. Every few sweeps the constraints active at
        the iterate are solved exactly and the result is returned once it
        meets the KKT conditions. When Dykstra stalls, the projection is solved
        by enumerating the active sets of C and the box bounds.

        Raises:
            ProjectionError: No convergence within ``max_iter`` sweeps and too
                many active sets to enumerate
        """
        tol = config.projection_tol if tol is None else tol
        max_iter = config.projection_max_iter if max_iter is None else max_iter
        point = as_point(y, self.dim)

        if self.contains(point):
            return point.copy()
        if self.is_box:
            return np.clip(point, self.lower_bound, self.upper_bound)

        rows = self.matrix
        norms = self._row_norms_squared
        active = np.flatnonzero(norms > 0)
        increments = np.zeros((rows.shape[0] + 1, self.dim))
        x = point.copy()
        residual = math.inf
        scale = max(1.0, float(np.linalg.norm(point)))

        for sweep in range(1, max_iter + 1):
            previous = x
            for i in active:
                z = x + increments[i]
                excess = rows[i] @ z - self.rhs[i]
                x = z - (excess / norms[i]) * rows[i] if excess > 0 else z
                increments[i] = z - x
            z = x + increments[-1]
            x = np.clip(z, self.lower_bound, self.upper_bound)
            increments[-1] = z - x

            residual = float(np.linalg.norm(x - previous))
            converged = residual <= tol * scale
            if converged or sweep % _POLISH_EVERY == 0:
                polished = self._polish(point, x, scale)
                if polished is not None:
                    return polished
            if converged and self.contains(x, config.feasibility_tol):
                return x

        exact = self._project_active_sets(point)
        if exact is not None:
            logger.debug("Dykstra stalled at residual %.3g; used the active-set projection", residual)
            return exact
        raise ProjectionError(
            f"Dykstra projection did not converge in {max_iter} sweeps",
            last_iterate=x,
            residual=residual,
        )

    @cached_property
    def _constraints(self) -> tuple[FloatArray, FloatArray]:
        """All constraints as G x ⪯ h: the rows of C, then -x ⪯ -lower, then x ⪯ upper."""
        n = self.dim
        G = np.vstack([self.matrix, -np.eye(n), np.eye(n)])
        h = np.concatenate([self.rhs, -self.lower_bound, self.upper_bound])
        return G, h

    def _polish(self, point: Point, x: Point, scale: float) -> Point | None:
        """Solve the projection exactly on the constraints active at ``x``.

        The result is returned only when it satisfies the KKT conditions:
        feasibility and non-negative multipliers.
        """
        G, h = self._constraints
        slack_tol = _ACTIVE_SLACK * scale
        tight = np.flatnonzero(G @ x >= h - slack_tol)
        if tight.size == 0:
            return None
        sub = G[tight]
        multipliers = np.linalg.lstsq(sub @ sub.T, sub @ point - h[tight], rcond=None)[0]
        if np.any(multipliers < -slack_tol):
            return None
        polished = point - sub.T @ multipliers
        if np.any(sub @ polished < h[tight] - slack_tol):
            return None
        if not self.contains(polished, config.feasibility_tol):
            return None
        return np.clip(polished, self.lower_bound, self.upper_bound)

    def _project_active_sets(self, point: Point) -> Point | None:
        """Exact projection by enumerating linearly independent active sets.

        For each candidate set S the equality-constrained problem
        min ‖x - y‖ s.t. G_S x = h_S has the closed form
        x = y - G_Sᵀ (G_S G_Sᵀ)⁻¹ (G_S y - h_S). The projection is the
        feasible candidate closest to y. Returns None when the number of
        candidate sets exceeds ``config.vertex_candidate_limit``.
        """
        n = self.dim
        G, h = self._constraints
        n_sets = sum(math.comb(G.shape[0], k) for k in range(1, n + 1))
        if n_sets > config.vertex_candidate_limit:
            return None

        best: Point | None = None
        best_distance = math.inf
        for k in range(1, n + 1):
            for subset in combinations(range(G.shape[0]), k):
                sub = G[list(subset)]
                gram = sub @ sub.T
                if abs(np.linalg.det(gram)) < 1e-12:
                    continue
                multipliers = np.linalg.solve(gram, sub @ point - h[list(subset)])
                x = point - sub.T @ multipliers
                if not self.contains(x, config.feasibility_tol):
                    continue
                distance = float(np.linalg.norm(x - point))
                if distance < best_distance:
                    best, best_distance = x, distance
        if best is None:
            return None
        return np.clip(best, self.lower_bound, self.upper_bound)

    @cached_property
    def _row_norms_squared(self) -> FloatArray:
        return np.einsum("ij,ij->i", self.matrix, self.matrix)

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        """Draw ``size`` feasible points.

        A uniform point of the box is shrunk toward the origin until every
        row of C holds; the origin being feasible makes this always succeed.
        """
        Z = rng.uniform(self.lower_bound, self.upper_bound, size=(size, self.dim))
        if self.is_box:
            return Z
        loads = Z @ self.matrix.T
        with np.errstate(divide="ignore", invalid="ignore"):
            limits = np.where(loads > self.rhs, self.rhs / loads, 1.0)
        scale = np.minimum(limits.min(axis=1), 1.0)
        return Z * scale[:, None]

    # Diameter

    def vertices(self) -> FloatArray | None:
        """Enumerate the vertices, or None when the caps make it impractical.

        Every choice of ``dim`` constraints among C, lower and upper is solved
        as a linear system; feasible solutions are the vertices. Vertices come
        back sorted lexicographically.
        """
        n = self.dim
        G, h = self._constraints
        if math.comb(G.shape[0], n) > config.vertex_candidate_limit:
            return None

        found: dict[tuple[float, ...], FloatArray] = {}
        for rows in combinations(range(G.shape[0]), n):
            sub = G[list(rows)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            v = np.linalg.solve(sub, h[list(rows)])
            if not self.contains(v, config.feasibility_tol):
                continue
            found.setdefault(tuple(np.round(v, 9)), v)
            if len(found) > config.vertex_limit:
                return None
        keys = sorted(found)
        return np.array([found[key] for key in keys])

    def diameter(self, norm: Norm = Norm.L2) -> float:
        """Diameter max ‖x - y‖ over the domain.

        Exact for boxes and for polytopes whose vertices can be enumerated;
        otherwise the box bound ‖upper - lower‖, which is an upper bound.
        """
        return self._diameters[Norm(norm)]

    @cached_property
    def _diameters(self) -> dict[Norm, float]:
        box = self.upper_bound - self.lower_bound
        box_bound = {norm: float(np.linalg.norm(box, ord=norm.order)) for norm in Norm}
        if self.is_box:
            return box_bound

        vertices = self.vertices()
        if vertices is None:
            logger.warning("vertex enumeration skipped for dim=%d; using the box bound as diameter", self.dim)
            return box_bound

        diffs = vertices[:, None, :] - vertices[None, :, :]
        return {norm: float(np.linalg.norm(diffs, ord=norm.order, axis=-1).max()) for norm in Norm}

    def max_l1_norm(self) -> float:
        """Upper bound on sup ‖x‖₁ over the domain (exact when lower ⪰ 0)."""
        if np.all(self.lower_bound >= 0):
            v = self.linear_maximize(np.ones(self.dim))
            return float(v.sum())
        return float(np.maximum(np.abs(self.lower_bound), np.abs(self.upper_bound)).sum())
