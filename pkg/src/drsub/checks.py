"""Sampling-based property checkers for utility functions.

Each checker draws feasible points (and ordered pairs x ⪯ y) from the
domain and reports the first violating witness it finds. Single-coordinate
probes y = x + δe_i are tried before random pairs, so witnesses of
coordinate-wise failures point along one axis.
"""

from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, ValidationError

from .config import config
from .domain import Norm, PolytopeDomain
from .errors import ConfigError, InvalidParameterError
from .functions import FamilySpec, ObjectiveFunction

FloatArray = NDArray[np.float64]

# Axis probes are built around this many base points
_AXIS_BASES = 25


class CheckReport(BaseModel):
    """Outcome of one property check."""

    name: str
    holds: bool
    witness: list[list[float]] | None = None
    max_violation: float = 0.0
    samples: int = 0
    sub_checks: dict[str, "CheckReport"] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)


class _Tracker:
    """Keeps the worst violation and the first witness beyond tol."""

    def __init__(self, name: str, tol: float):
        self.name = name
        self.tol = tol
        self.worst = -np.inf
        self.witness: list[list[float]] | None = None
        self.count = 0

    def record(self, violation: float, *points: FloatArray) -> None:
        self.count += 1
        self.worst = max(self.worst, violation)
        if violation > self.tol and self.witness is None:
            self.witness = [p.tolist() for p in points]

    def report(self, **extra) -> CheckReport:
        return CheckReport(
            name=self.name,
            holds=self.witness is None,
            witness=self.witness,
            max_violation=float(max(self.worst, 0.0)),
            samples=self.count,
            **extra,
        )


def _step_room(domain: PolytopeDomain, x: FloatArray, i: int) -> float:
    """Largest δ >= 0 keeping x + δe_i feasible."""
    room = domain.upper_bound[i] - x[i]
    if not domain.is_box:
        column = domain.matrix[:, i]
        slack = domain.rhs - domain.matrix @ x
        growing = column > 0
        if growing.any():
            room = min(room, float((slack[growing] / column[growing]).min()))
    return max(float(room), 0.0)


def axis_pairs(domain: PolytopeDomain, rng: np.random.Generator, bases: int = _AXIS_BASES) -> Iterator[tuple[FloatArray, FloatArray]]:
    """Ordered pairs (x, x + δe_i) with δ half the feasible room."""
    for x in domain.sample(rng, bases):
        for i in range(domain.dim):
            delta = 0.5 * _step_room(domain, x, i)
            if delta < 1e-6:
                continue
            y = x.copy()
            y[i] += delta
            yield x, y


def random_pairs(domain: PolytopeDomain, rng: np.random.Generator, count: int) -> Iterator[tuple[FloatArray, FloatArray]]:
    """Ordered feasible pairs x ⪯ y.

    y is a feasible sample and x = y - u∘(y - lower) for uniform u; u is
    halved until x is feasible (x = y is always a fallback).
    """
    Y = domain.sample(rng, count)
    U = rng.uniform(0.0, 1.0, size=Y.shape)
    for y, u in zip(Y, U):
        gap = y - domain.lower_bound
        for _ in range(30):
            x = y - u * gap
            if domain.contains(x, 1e-12):
                break
            u = u / 2
        else:
            x = y.copy()
        yield x, y


def ordered_pairs(domain: PolytopeDomain, samples: int, seed: int) -> list[tuple[FloatArray, FloatArray]]:
    rng = np.random.default_rng(seed)
    return [*axis_pairs(domain, rng), *random_pairs(domain, rng, samples)]


def sample_points(domain: PolytopeDomain, samples: int, seed: int) -> FloatArray:
    rng = np.random.default_rng(seed)
    return np.vstack([domain.zero, domain.sample(rng, samples)])


def _norm(v: FloatArray, norm: Norm) -> float:
    return float(np.linalg.norm(v, ord=Norm(norm).order))


def _hessian_criterion(
    f: ObjectiveFunction,
    points: FloatArray,
    name: str,
    tol: float,
    diagonal_cap: float | None,
    off_diagonal_only: bool = False,
) -> CheckReport | None:
    """Entrywise Hessian test: off-diagonals <= 0 and diagonal <= diagonal_cap."""
    tracker = _Tracker(name, tol)
    mask = ~np.eye(f.dim, dtype=bool)
    for x in points:
        H = f.hessian(x)
        if H is None:
            return None
        off = float(H[mask].max()) if f.dim > 1 else -np.inf
        if off_diagonal_only:
            tracker.record(off, x)
            continue
        cap = 0.0 if diagonal_cap is None else diagonal_cap
        tracker.record(max(off, float((np.diag(H) - cap).max())), x)
    return tracker.report()


def check_dr_submodular(
    f: ObjectiveFunction,
    domain: PolytopeDomain,
    samples: int | None = None,
    seed: int = 0,
    tol: float | None = None,
) -> CheckReport:
    """Check that ∇f is order-reversing: x ⪯ y implies ∇f(x) ⪰ ∇f(y).

    Twice-differentiable families are additionally checked for an entrywise
    non-positive Hessian at the sampled points.
    """
    samples = config.checker_samples if samples is None else samples
    tol = config.checker_tol if tol is None else tol
    if samples < 1:
        raise InvalidParameterError("samples must be >= 1", samples=samples)

    tracker = _Tracker("gradient_order", tol)
    for x, y in ordered_pairs(domain, samples, seed):
        tracker.record(float((f.gradient(y) - f.gradient(x)).max()), x, y)
    order = tracker.report()

    sub_checks = {"gradient_order": order}
    notes = []
    hessian = _hessian_criterion(f, sample_points(domain, samples, seed + 1), "hessian", tol, 0.0)
    if hessian is None:
        notes.append("hessian unavailable; gradient-order check only")
    else:
        sub_checks["hessian"] = hessian
    return _combine("dr_submodular", sub_checks, notes)


def _combine(name: str, sub_checks: dict[str, CheckReport], notes: list[str]) -> CheckReport:
    failing = [report for report in sub_checks.values() if not report.holds]
    return CheckReport(
        name=name,
        holds=not failing,
        witness=failing[0].witness if failing else None,
        max_violation=max(report.max_violation for report in sub_checks.values()),
        samples=sum(report.samples for report in sub_checks.values()),
        sub_checks=sub_checks,
        notes=notes,
    )


def check_strong_dr(
    f: ObjectiveFunction,
    domain: PolytopeDomain,
    mu: float,
    norm: Norm = Norm.L2,
    samples: int | None = None,
    seed: int = 0,
    tol: float | None = None,
) -> CheckReport:
    """Check µ-strong DR-submodularity with respect to ``norm``.

    Two sub-checks are reported:

    - ``hessian``: ∇²_ii f <= -µ and ∇²_ij f <= 0 at sampled points
    - ``definition``: f(x+v) <= f(x) + ⟨∇f(x), v⟩ - (µ/2)‖v‖² for sampled
      ordered pairs, with v taken in both sign directions

    µ = 0 is plain DR-submodularity and delegates to check_dr_submodular.
    """
    if mu < 0:
        raise InvalidParameterError("mu must be non-negative", mu=mu)
    if mu == 0:
        return check_dr_submodular(f, domain, samples, seed, tol)
    samples = config.checker_samples if samples is None else samples
    tol = config.checker_tol if tol is None else tol

    tracker = _Tracker("definition", tol)
    for x, y in ordered_pairs(domain, samples, seed):
        v = y - x
        curvature = 0.5 * mu * _norm(v, norm) ** 2
        fx, fy = f.value(x), f.value(y)
        # v ⪰ 0 from x, then -v ⪯ 0 from y
        tracker.record(fy - fx - f.gradient(x) @ v + curvature, x, y)
        tracker.record(fx - fy + f.gradient(y) @ v + curvature, y, x)

    sub_checks = {"definition": tracker.report()}
    notes = []
    hessian = _hessian_criterion(f, sample_points(domain, samples, seed + 1), "hessian", tol, -mu)
    if hessian is None:
        notes.append("hessian unavailable; definitional check only")
    else:
        sub_checks["hessian"] = hessian
    return _combine("strong_dr", sub_checks, notes)


def check_smoothness(
    f: ObjectiveFunction,
    domain: PolytopeDomain,
    L: float,
    norm: Norm = Norm.L1,
    samples: int | None = None,
    seed: int = 0,
    tol: float | None = None,
) -> CheckReport:
    """Check f(y) - f(x) >= ⟨∇f(x), y - x⟩ - (L/2)‖y - x‖² for x ⪯ y."""
    if L < 0:
        raise InvalidParameterError("L must be non-negative", L=L)
    samples = config.checker_samples if samples is None else samples
    tol = config.checker_tol if tol is None else tol

    tracker = _Tracker("smoothness", tol)
    for x, y in ordered_pairs(domain, samples, seed):
        v = y - x
        lower = f.gradient(x) @ v - 0.5 * L * _norm(v, norm) ** 2
        tracker.record(float(lower - (f.value(y) - f.value(x))), x, y)
    return tracker.report()


def check_monotone(
    f: ObjectiveFunction,
    domain: PolytopeDomain,
    samples: int | None = None,
    seed: int = 0,
    tol: float | None = None,
) -> CheckReport:
    """Check ∇f(x) ⪰ -tol at the origin and at sampled feasible points."""
    samples = config.checker_samples if samples is None else samples
    tol = config.checker_tol if tol is None else tol

    tracker = _Tracker("monotone", tol)
    for x in sample_points(domain, samples, seed):
        tracker.record(float(-f.gradient(x).min()), x)
    return tracker.report()


def check_submodular(
    f: ObjectiveFunction,
    domain: PolytopeDomain,
    samples: int | None = None,
    seed: int = 0,
    tol: float | None = None,
) -> CheckReport:
    """Check continuous submodularity: ∂_i f is antitone in every x_j, j ≠ i.

    Uses off-diagonal Hessian entries when the family provides them, else
    single-coordinate probes.
    """
    samples = config.checker_samples if samples is None else samples
    tol = config.checker_tol if tol is None else tol

    hessian = _hessian_criterion(
        f, sample_points(domain, samples, seed), "submodular", tol, None, off_diagonal_only=True
    )
    if hessian is not None:
        return hessian

    tracker = _Tracker("submodular", tol)
    rng = np.random.default_rng(seed)
    for x, y in axis_pairs(domain, rng, max(_AXIS_BASES, samples // max(domain.dim, 1))):
        moved = int(np.flatnonzero(y != x)[0])
        change = f.gradient(y) - f.gradient(x)
        change[moved] = -np.inf
        tracker.record(float(change.max()), x, y)
    return tracker.report(notes=["hessian unavailable; coordinate probes only"])


def estimate_lipschitz(
    functions: Sequence[ObjectiveFunction],
    domain: PolytopeDomain,
    samples: int = 64,
    seed: int = 0,
    norm: Norm = Norm.L2,
) -> float:
    """Empirical β = max ‖∇f_t(x)‖ over the functions, the origin, samples and vertices.

    When the vertices can be enumerated the value is exact for families whose
    gradient norm is convex in x, such as quadratics.
    """
    points = sample_points(domain, samples, seed)
    vertices = domain.vertices()
    if vertices is not None:
        points = np.vstack([points, vertices])
    order = Norm(norm).order
    return float(max(np.linalg.norm(f.gradient(x), ord=order) for f in functions for x in points))


class FunctionCheckConfig(BaseModel):
    """Document read by ``drsub check-function``."""

    function: FamilySpec
    domain: PolytopeDomain
    mu: float | None = None
    smoothness: float | None = None
    norm: Norm = Norm.L2
    samples: int = Field(default_factory=lambda: config.checker_samples, ge=1)
    seed: int = 0

    @classmethod
    def load(cls, path: Path) -> "FunctionCheckConfig":
        try:
            return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigError(f"Invalid function-check config {path}", errors=e.errors()) from e


def run_checks(check: FunctionCheckConfig) -> dict[str, CheckReport]:
    """Run every checker that applies to the configured function."""
    f = check.function.build()
    if f.dim != check.domain.dim:
        raise InvalidParameterError("function and domain dimensions differ", function=f.dim, domain=check.domain.dim)
    options = {"samples": check.samples, "seed": check.seed}
    reports = {
        "monotone": check_monotone(f, check.domain, **options),
        "submodular": check_submodular(f, check.domain, **options),
        "dr_submodular": check_dr_submodular(f, check.domain, **options),
    }
    if check.mu is not None:
        reports["strong_dr"] = check_strong_dr(f, check.domain, check.mu, check.norm, **options)
    if check.smoothness is not None:
        reports["smoothness"] = check_smoothness(f, check.domain, check.smoothness, check.norm, **options)
    return reports
