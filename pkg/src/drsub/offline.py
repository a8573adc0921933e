"""Offline comparators: Frank-Wolfe continuous greedy and grid brute force."""

from typing import Literal
import logging
import math

import numpy as np
from pydantic import BaseModel

from .checks import estimate_lipschitz
from .config import config
from .domain import PolytopeDomain, Point
from .errors import GridTooLargeError, InvalidParameterError
from .functions import ObjectiveFunction

logger = logging.getLogger(__name__)

_GRID_CHUNK = 200_000


class Certificate(BaseModel):
    """How a comparator value was obtained."""

    method: Literal["fw", "grid"]
    grid_step: float | None = None
    # Grid results are within this much of the true maximum
    slack: float | None = None


class OfflineResult(BaseModel):
    """Offline maximizer of one function."""

    x_out: list[float]
    value: float
    K_used: int
    certificate: Certificate
    iterates: list[list[float]] | None = None

    @property
    def point(self) -> Point:
        return np.asarray(self.x_out, dtype=float)


def offline_fw(f: ObjectiveFunction, domain: PolytopeDomain, K: int, record: bool = False) -> OfflineResult:
    """Continuous greedy Frank-Wolfe: x⁽ᵏ⁺¹⁾ = x⁽ᵏ⁾ + v_k/K from x⁽¹⁾ = 0.

    For monotone DR-submodular f with smoothness L over a domain of
    diameter R, f(x_out) >= (1 - 1/e) max f - LR²/(2K).

    Args:
        f: Objective with an exact gradient
        domain: Feasible polytope
        K: Number of Frank-Wolfe steps
        record: Keep every iterate x⁽¹⁾..x⁽ᴷ⁺¹⁾ on the result

    Returns:
        OfflineResult with x_out = x⁽ᴷ⁺¹⁾
    """
    if K < 1:
        raise InvalidParameterError("K must be >= 1", K=K)
    x = domain.zero.copy()
    iterates = [x.tolist()] if record else None
    for _ in range(K):
        v = domain.linear_maximize(f.gradient(x))
        x = x + v / K
        if iterates is not None:
            iterates.append(x.tolist())
    return OfflineResult(
        x_out=x.tolist(),
        value=f.value(x),
        K_used=K,
        certificate=Certificate(method="fw"),
        iterates=iterates,
    )


def grid_axes(domain: PolytopeDomain, step: float) -> list[np.ndarray]:
    """Per-coordinate grids with spacing at most ``step``, endpoints included."""
    return [
        np.linspace(lo, hi, max(int(math.ceil((hi - lo) / step - 1e-12)), 0) + 1)
        for lo, hi in zip(domain.lower_bound, domain.upper_bound)
    ]


def grid_maximize(
    f: ObjectiveFunction,
    domain: PolytopeDomain,
    step: float,
    lipschitz: float | None = None,
) -> OfflineResult:
    """Brute-force maximum over the feasible points of a regular grid.

    Points are scanned in lexicographic order and the first maximizer wins.
    The result is within ``lipschitz · step · √n`` of the true maximum.

    Raises:
        GridTooLargeError: Dimension above the configured cap
        InvalidParameterError: Non-positive step or no feasible grid point
    """
    n = domain.dim
    if n > config.grid_max_dim:
        raise GridTooLargeError(
            f"Grid search refused for dimension {n} (cap {config.grid_max_dim})",
            dim=n,
            cap=config.grid_max_dim,
        )
    if step <= 0:
        raise InvalidParameterError("step must be positive", step=step)

    axes = grid_axes(domain, step)
    sizes = tuple(len(axis) for axis in axes)
    total = math.prod(sizes)
    best_value = -np.inf
    best_point: Point | None = None

    for start in range(0, total, _GRID_CHUNK):
        index = np.unravel_index(np.arange(start, min(start + _GRID_CHUNK, total)), sizes)
        X = np.column_stack([axis[i] for axis, i in zip(axes, index)])
        X = X[domain.contains_rows(X)]
        if X.shape[0] == 0:
            continue
        values = f.values(X)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value = float(values[i])
            best_point = X[i]

    if best_point is None:
        raise InvalidParameterError("grid has no feasible point", step=step)

    if lipschitz is None:
        lipschitz = estimate_lipschitz([f], domain)
    logger.debug("grid search over %d points, best %.6g", total, best_value)
    return OfflineResult(
        x_out=best_point.tolist(),
        value=f.value(best_point),
        K_used=0,
        certificate=Certificate(method="grid", grid_step=step, slack=lipschitz * step * math.sqrt(n)),
    )


def best_comparator(
    f: ObjectiveFunction,
    domain: PolytopeDomain,
    K: int | None = None,
    grid_step: float | None = None,
) -> OfflineResult:
    """Better of offline Frank-Wolfe and, for small dimensions, the grid.

    Regret traces are measured against this point.
    """
    fw = offline_fw(f, domain, config.comparator_fw_iterations if K is None else K)
    if domain.dim > config.grid_max_dim:
        return fw
    grid = grid_maximize(f, domain, config.comparator_grid_step if grid_step is None else grid_step)
    return grid if grid.value > fw.value else fw
