"""Utility-function families, their gradient oracles and config specs."""

from dataclasses import dataclass
from enum import StrEnum
from typing import Annotated, Literal, Protocol, Sequence, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, Field

from .domain import PolytopeDomain, as_point
from .errors import DimensionMismatchError, InvalidParameterError

FloatArray = NDArray[np.float64]


@runtime_checkable
class ObjectiveFunction(Protocol):
    """Protocol for differentiable utilities f : R^n -> R."""

    dim: int

    def value(self, x: ArrayLike) -> float:
        """Exact function value at x."""
        ...

    def values(self, X: FloatArray) -> FloatArray:
        """Function values at every row of X."""
        ...

    def gradient(self, x: ArrayLike) -> FloatArray:
        """Exact gradient at x."""
        ...

    def hessian(self, x: ArrayLike) -> FloatArray | None:
        """Exact Hessian at x, or None when the family has none."""
        ...


def _square(matrix: ArrayLike, dim: int | None, name: str) -> FloatArray:
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or (dim is not None and M.shape[0] != dim):
        raise DimensionMismatchError(f"{name} must be a square matrix of size {dim}", shape=list(M.shape))
    return M


class QuadraticUtility:
    """Quadratic utility f(x) = ½xᵀAx + aᵀx + c with symmetric A."""

    family = "quadratic"

    def __init__(
        self,
        A: ArrayLike,
        a: ArrayLike,
        c: float = 0.0,
        *,
        submodular: bool = False,
        normalized: bool = False,
    ):
        """Initialize a quadratic utility.

        Args:
            A: Symmetric Hessian (n x n)
            a: Linear term (n)
            c: Constant term
            submodular: Require off-diagonal entries of A to be <= 0
            normalized: Require f(0) = c = 0
        """
        self.a = np.asarray(a, dtype=float)
        self.dim = self.a.size
        self.A = _square(A, self.dim, "A")
        self.c = float(c)
        if np.abs(self.A - self.A.T).max(initial=0.0) > 1e-12:
            raise InvalidParameterError("A must be symmetric")
        if submodular and self.off_diagonal_max() > 0:
            raise InvalidParameterError(
                "A submodular quadratic needs non-positive off-diagonal entries",
                max_off_diagonal=self.off_diagonal_max(),
            )
        if normalized and self.c != 0.0:
            raise InvalidParameterError("A normalized quadratic needs c = 0", c=self.c)

    def value(self, x: ArrayLike) -> float:
        x = as_point(x, self.dim)
        return float(0.5 * x @ self.A @ x + self.a @ x + self.c)

    def values(self, X: FloatArray) -> FloatArray:
        return 0.5 * np.einsum("ij,jk,ik->i", X, self.A, X) + X @ self.a + self.c

    def gradient(self, x: ArrayLike) -> FloatArray:
        return self.A @ as_point(x, self.dim) + self.a

    def hessian(self, x: ArrayLike) -> FloatArray:
        return self.A

    def off_diagonal_max(self) -> float:
        if self.dim == 1:
            return -np.inf
        mask = ~np.eye(self.dim, dtype=bool)
        return float(self.A[mask].max())

    def smoothness_l1(self) -> float:
        """Smoothness constant w.r.t. ‖·‖₁: max |A_ij| for entrywise non-positive A."""
        return float(np.abs(self.A).max())

    def strong_dr_modulus(self) -> float | None:
        """Largest µ with diag(A) ⪯ -µ, or None when an off-diagonal entry is positive."""
        if self.off_diagonal_max() > 0:
            return None
        return float(-np.diag(self.A).max())


def bilinear_utility(A: ArrayLike) -> QuadraticUtility:
    """Quadratic f(x) = (½x - 1)ᵀAx for a possibly non-symmetric A.

    ½xᵀAx only sees the symmetric part, so the Hessian is (A + Aᵀ)/2, and
    -1ᵀAx = ⟨-Aᵀ1, x⟩ gives the linear term.
    """
    M = _square(A, None, "A")
    return QuadraticUtility((M + M.T) / 2.0, -M.T @ np.ones(M.shape[0]))


class LogDiversitySum:
    """Weighted sum of log-diversity terms sharing one pairwise matrix.

    f(x) = scale Σ_k w_k Σ_i ln(1 + R_ki x_i) + ½ xᵀΘx

    Sums and averages of LogDiversityUtility collapse into this form: the
    log terms are concatenated and the pairwise matrices add up.
    """

    family = "log_diversity"

    def __init__(self, weights: ArrayLike, coefficients: ArrayLike, pair_penalties: ArrayLike, scale: float = 5.0):
        self.weights = np.atleast_2d(np.asarray(weights, dtype=float))
        self.coefficients = np.asarray(coefficients, dtype=float).reshape(-1)
        self.dim = self.weights.shape[1]
        self.pair_penalties = _square(pair_penalties, self.dim, "pair_penalties")
        self.scale = float(scale)
        if self.coefficients.size != self.weights.shape[0]:
            raise DimensionMismatchError("one coefficient per weight row is required")

    def _log_arguments(self, x: FloatArray) -> FloatArray:
        args = 1.0 + self.weights * x
        if np.any(args <= 0):
            raise InvalidParameterError("log argument 1 + R_i x_i must be positive", x=x)
        return args

    def value(self, x: ArrayLike) -> float:
        x = as_point(x, self.dim)
        logs = np.log(self._log_arguments(x)).sum(axis=1)
        return float(self.scale * self.coefficients @ logs + 0.5 * x @ self.pair_penalties @ x)

    def values(self, X: FloatArray) -> FloatArray:
        args = 1.0 + X[:, None, :] * self.weights[None, :, :]
        if np.any(args <= 0):
            raise InvalidParameterError("log argument 1 + R_i x_i must be positive")
        logs = np.log(args).sum(axis=2) @ self.coefficients
        return self.scale * logs + 0.5 * np.einsum("ij,jk,ik->i", X, self.pair_penalties, X)

    def gradient(self, x: ArrayLike) -> FloatArray:
        x = as_point(x, self.dim)
        ratios = self.weights / self._log_arguments(x)
        return self.scale * self.coefficients @ ratios + self.pair_penalties @ x

    def hessian(self, x: ArrayLike) -> FloatArray:
        x = as_point(x, self.dim)
        curvature = (self.weights / self._log_arguments(x)) ** 2
        return np.diag(-self.scale * self.coefficients @ curvature) + self.pair_penalties


class LogDiversityUtility(LogDiversitySum):
    """Movie-recommendation utility 5 Σ_i ln(1 + R_i x_i) + Σ_{i<j} θ_ij x_i x_j.

    θ is stored as a symmetric matrix with zero diagonal, so the pairwise
    sum equals ½xᵀθx and the gradient picks up Σ_{j≠i} θ_ij x_j.
    """

    def __init__(self, weights: ArrayLike, pair_penalties: ArrayLike, scale: float = 5.0):
        R = np.asarray(weights, dtype=float).reshape(-1)
        theta = _square(pair_penalties, R.size, "pair_penalties")
        if np.any(R < 0) or np.any(R > 1):
            raise InvalidParameterError("weights must lie in [0, 1]", weights=R)
        if np.abs(theta - theta.T).max(initial=0.0) > 1e-12 or np.any(np.diag(theta) != 0):
            raise InvalidParameterError("pair_penalties must be symmetric with a zero diagonal")
        if np.any(theta > 0) or np.any(theta < -1):
            raise InvalidParameterError("pair_penalties must lie in [-1, 0]")
        super().__init__(R[None, :], [1.0], theta, scale)

    @property
    def rating_weights(self) -> FloatArray:
        return self.weights[0]


# Scalar concave building blocks for ConcaveNegDepUtility


@dataclass(frozen=True)
class LogTerm:
    """h(x) = ln(1 + w x), w >= 0."""

    w: float

    def __call__(self, x: FloatArray) -> FloatArray:
        return np.log1p(self.w * x)

    def derivative(self, x: FloatArray) -> FloatArray:
        return self.w / (1.0 + self.w * x)

    def second_derivative(self, x: FloatArray) -> FloatArray:
        return -(self.w / (1.0 + self.w * x)) ** 2


@dataclass(frozen=True)
class QuadraticTerm:
    """h(x) = -q x²/2 + p x, q >= 0."""

    q: float
    p: float

    def __call__(self, x: FloatArray) -> FloatArray:
        return -0.5 * self.q * x**2 + self.p * x

    def derivative(self, x: FloatArray) -> FloatArray:
        return -self.q * x + self.p

    def second_derivative(self, x: FloatArray) -> FloatArray:
        return np.full_like(np.asarray(x, dtype=float), -self.q)


@dataclass(frozen=True)
class PowerTerm:
    """h(x) = coef ((x + shift)^gamma - shift^gamma), gamma in (0, 1], shift > 0."""

    gamma: float
    coef: float = 1.0
    shift: float = 1.0

    def __call__(self, x: FloatArray) -> FloatArray:
        return self.coef * ((x + self.shift) ** self.gamma - self.shift**self.gamma)

    def derivative(self, x: FloatArray) -> FloatArray:
        return self.coef * self.gamma * (x + self.shift) ** (self.gamma - 1.0)

    def second_derivative(self, x: FloatArray) -> FloatArray:
        return self.coef * self.gamma * (self.gamma - 1.0) * (x + self.shift) ** (self.gamma - 2.0)


ScalarConcave = LogTerm | QuadraticTerm | PowerTerm


def _check_concave(term: ScalarConcave) -> None:
    match term:
        case LogTerm(w=w) if w < 0:
            raise InvalidParameterError("log term needs w >= 0", w=w)
        case QuadraticTerm(q=q) if q < 0:
            raise InvalidParameterError("quadratic term needs q >= 0", q=q)
        case PowerTerm(gamma=g, coef=c, shift=s) if not (0 < g <= 1) or c < 0 or s <= 0:
            raise InvalidParameterError("power term needs gamma in (0, 1], coef >= 0, shift > 0", gamma=g)


class ConcaveNegDepUtility:
    """Concave functions with negative dependence.

    f(x) = Σ_i h_i(x_i) + Σ_S θ_S Π_{i∈S} x_i with every θ_S <= 0 and
    each S a set of distinct coordinates of size at most ``interaction_order``.
    """

    family = "concave_negdep"

    def __init__(
        self,
        per_coordinate: Sequence[ScalarConcave],
        interactions: dict[tuple[int, ...], float] | None = None,
        interaction_order: int = 2,
    ):
        self.per_coordinate = list(per_coordinate)
        self.dim = len(self.per_coordinate)
        self.interaction_order = interaction_order
        self.interactions = dict(interactions or {})
        if interaction_order < 2:
            raise InvalidParameterError("interaction_order must be >= 2", d=interaction_order)
        for term in self.per_coordinate:
            _check_concave(term)
        for indices, theta in self.interactions.items():
            if theta > 0:
                raise InvalidParameterError("interaction coefficients must be <= 0", indices=indices, theta=theta)
            if len(set(indices)) != len(indices) or not 1 <= len(indices) <= interaction_order:
                raise InvalidParameterError("interaction indices must be distinct and at most d of them", indices=indices)
            if any(not 0 <= i < self.dim for i in indices):
                raise DimensionMismatchError("interaction index out of range", indices=indices)

    def value(self, x: ArrayLike) -> float:
        x = as_point(x, self.dim)
        return float(self.values(x[None, :])[0])

    def values(self, X: FloatArray) -> FloatArray:
        total = np.zeros(X.shape[0])
        for i, h in enumerate(self.per_coordinate):
            total += h(X[:, i])
        for indices, theta in self.interactions.items():
            total += theta * np.prod(X[:, list(indices)], axis=1)
        return total

    def gradient(self, x: ArrayLike) -> FloatArray:
        x = as_point(x, self.dim)
        grad = np.array([h.derivative(x[i]) for i, h in enumerate(self.per_coordinate)], dtype=float)
        for indices, theta in self.interactions.items():
            for position, i in enumerate(indices):
                others = indices[:position] + indices[position + 1:]
                grad[i] += theta * np.prod(x[list(others)])
        return grad

    def hessian(self, x: ArrayLike) -> FloatArray:
        x = as_point(x, self.dim)
        H = np.diag([h.second_derivative(x[i]) for i, h in enumerate(self.per_coordinate)]).astype(float)
        for indices, theta in self.interactions.items():
            for p, i in enumerate(indices):
                for q, j in enumerate(indices):
                    if p == q:
                        continue
                    rest = [k for r, k in enumerate(indices) if r not in (p, q)]
                    H[i, j] += theta * np.prod(x[rest])
        return H


class SumUtility:
    """Weighted sum Σ w_k f_k of arbitrary family members."""

    family = "sum"

    def __init__(self, terms: Sequence[tuple[float, ObjectiveFunction]]):
        if not terms:
            raise InvalidParameterError("a sum needs at least one term")
        self.terms = [(float(w), f) for w, f in terms]
        self.dim = self.terms[0][1].dim
        if any(f.dim != self.dim for _, f in self.terms):
            raise DimensionMismatchError("all terms must share one dimension")

    def value(self, x: ArrayLike) -> float:
        return float(sum(w * f.value(x) for w, f in self.terms))

    def values(self, X: FloatArray) -> FloatArray:
        return sum((w * f.values(X) for w, f in self.terms), np.zeros(X.shape[0]))

    def gradient(self, x: ArrayLike) -> FloatArray:
        return sum((w * f.gradient(x) for w, f in self.terms), np.zeros(self.dim))

    def hessian(self, x: ArrayLike) -> FloatArray | None:
        total = np.zeros((self.dim, self.dim))
        for w, f in self.terms:
            H = f.hessian(x)
            if H is None:
                return None
            total += w * H
        return total


def sum_functions(functions: Sequence[ObjectiveFunction], weights: Sequence[float] | None = None) -> ObjectiveFunction:
    """Materialize Σ w_k f_k as a single function.

    Quadratics collapse into one QuadraticUtility and log-diversity members
    into one LogDiversitySum; mixed families fall back to SumUtility.
    """
    if not functions:
        raise InvalidParameterError("cannot sum an empty sequence of functions")
    w = np.ones(len(functions)) if weights is None else np.asarray(weights, dtype=float)
    if len(functions) == 1 and w[0] == 1.0:
        return functions[0]

    if all(isinstance(f, QuadraticUtility) for f in functions):
        quads: list[QuadraticUtility] = list(functions)  # type: ignore[arg-type]
        A = sum((wk * f.A for wk, f in zip(w, quads)), np.zeros_like(quads[0].A))
        a = sum((wk * f.a for wk, f in zip(w, quads)), np.zeros_like(quads[0].a))
        return QuadraticUtility(A, a, float(sum(wk * f.c for wk, f in zip(w, quads))))

    if all(isinstance(f, LogDiversitySum) for f in functions):
        logs: list[LogDiversitySum] = list(functions)  # type: ignore[arg-type]
        scales = {f.scale for f in logs}
        if len(scales) == 1:
            return LogDiversitySum(
                np.vstack([f.weights for f in logs]),
                np.concatenate([wk * f.coefficients for wk, f in zip(w, logs)]),
                sum((wk * f.pair_penalties for wk, f in zip(w, logs)), np.zeros_like(logs[0].pair_penalties)),
                scale=scales.pop(),
            )

    return SumUtility(list(zip(w.tolist(), functions)))


def average_functions(functions: Sequence[ObjectiveFunction]) -> ObjectiveFunction:
    """Materialize (1/k) Σ f_k; a single function is returned unchanged."""
    if len(functions) == 1:
        return functions[0]
    return sum_functions(functions, [1.0 / len(functions)] * len(functions))


class NoiseCoupling(StrEnum):
    """How the per-round noise matrix N enters the sampled function."""

    # f_t(x) = ½xᵀ(A + N)x + aᵀx with N symmetric
    HESSIAN = "hessian"
    # f_t(x) = (½x - 1)ᵀ(A + N)x, Experiment 3
    BILINEAR = "bilinear"


class NoisyGradientOracle:
    """Unbiased stochastic gradients of a quadratic expected utility.

    Each round t owns one noise realization N^(t) with entries uniform on
    [-ν, ν], drawn from a seed derived from (seed, t). ``realize(t)`` returns
    the sampled function f_t, so the same f_t can be queried at several
    points. Unless ``retain`` is set, realizations older than t - 1 are
    evicted when round t is realized.
    """

    def __init__(
        self,
        matrix: ArrayLike,
        linear: ArrayLike | None = None,
        *,
        noise_scale: float,
        coupling: NoiseCoupling = NoiseCoupling.HESSIAN,
        seed: int = 0,
        retain: bool = False,
    ):
        """Initialize the oracle.

        Args:
            matrix: A (symmetric for the hessian coupling)
            linear: Linear term a (hessian coupling only, default zeros)
            noise_scale: ν >= 0
            coupling: How N enters the sampled functions
            seed: Seed for every noise draw
            retain: Keep every realization instead of evicting old rounds
        """
        if noise_scale < 0:
            raise InvalidParameterError("noise_scale must be non-negative", noise_scale=noise_scale)
        self.coupling = NoiseCoupling(coupling)
        self.matrix = _square(matrix, None, "matrix")
        self.dim = self.matrix.shape[0]
        self.linear = np.zeros(self.dim) if linear is None else np.asarray(linear, dtype=float)
        self.noise_scale = float(noise_scale)
        self.seed = seed
        self.retain = retain
        self.calls = 0
        self._cache: dict[int, QuadraticUtility] = {}
        self._fresh_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))

        if self.coupling is NoiseCoupling.BILINEAR:
            self.expected: QuadraticUtility = bilinear_utility(self.matrix)
        else:
            self.expected = QuadraticUtility(self.matrix, self.linear)

    def _draw_noise(self, rng: np.random.Generator, count: int = 1) -> FloatArray:
        nu = self.noise_scale
        shape = (count, self.dim, self.dim)
        if nu == 0:
            return np.zeros(shape)
        N = rng.uniform(-nu, nu, size=shape)
        if self.coupling is NoiseCoupling.HESSIAN:
            upper = np.triu(N)
            N = upper + np.transpose(np.triu(N, 1), (0, 2, 1))
        return N

    def _function_for(self, N: FloatArray) -> QuadraticUtility:
        if self.coupling is NoiseCoupling.BILINEAR:
            return bilinear_utility(self.matrix + N)
        return QuadraticUtility(self.matrix + N, self.linear)

    def realize(self, t: int) -> QuadraticUtility:
        """Sampled function f_t, drawn once per round and cached."""
        if t not in self._cache:
            rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(0, t)))
            self._cache[t] = self._function_for(self._draw_noise(rng)[0])
            if not self.retain:
                for stale in [s for s in self._cache if s < t - 1]:
                    del self._cache[stale]
        return self._cache[t]

    def stochastic_gradient(self, t: int, x: ArrayLike) -> FloatArray:
        """One draw ∇̃f_t(x): the gradient of the cached realization f_t."""
        self.calls += 1
        return self.realize(t).gradient(x)

    def fresh_gradient(self, x: ArrayLike) -> FloatArray:
        """One gradient at x from an independent noise draw."""
        return self.fresh_gradient_mean(1, x)

    def fresh_gradient_mean(self, count: int, x: ArrayLike) -> FloatArray:
        """Average of ``count`` gradients at x, each with its own noise draw.

        Gradients are affine in N, so the average equals the gradient with
        the averaged noise matrix. Counts ``count`` oracle calls.
        """
        self.calls += count
        N = self._draw_noise(self._fresh_rng, count).mean(axis=0)
        x = as_point(x, self.dim)
        if self.coupling is NoiseCoupling.BILINEAR:
            M = self.matrix + N
            return 0.5 * (M + M.T) @ x - M.T @ np.ones(self.dim)
        return (self.matrix + N) @ x + self.linear

    def retained_gradient_mean(self, t: int, x: ArrayLike) -> FloatArray:
        """Average of ∇f_τ(x) over the realized functions τ = 1..t."""
        if not self.retain:
            raise InvalidParameterError("re-querying past rounds needs retain=True")
        self.calls += t
        return np.mean([self.realize(tau).gradient(x) for tau in range(1, t + 1)], axis=0)

    def sigma_bound(self, domain: PolytopeDomain) -> float:
        """Certified σ with ‖∇̃f_t(x) - ∇f(x)‖₂ <= σ over the domain.

        Every row of the noise acting on x is bounded by ν‖x‖₁, hence
        ‖Nx‖₂ <= ν√n sup‖x‖₁. The bilinear coupling adds the noise -Nᵀ1 of
        the linear term, bounded by ν n √n.
        """
        n = self.dim
        bound = self.noise_scale * np.sqrt(n) * domain.max_l1_norm()
        if self.coupling is NoiseCoupling.BILINEAR:
            bound += self.noise_scale * n * np.sqrt(n)
        return float(bound)


# Config specs


class QuadraticSpec(BaseModel):
    """Config record for a QuadraticUtility."""

    family: Literal["quadratic"] = "quadratic"
    A: list[list[float]]
    a: list[float]
    c: float = 0.0

    def build(self) -> QuadraticUtility:
        return QuadraticUtility(self.A, self.a, self.c)


class LogDiversitySpec(BaseModel):
    """Config record for a LogDiversityUtility."""

    family: Literal["log_diversity"] = "log_diversity"
    weights: list[float]
    pair_penalties: list[list[float]]
    scale: float = 5.0

    def build(self) -> LogDiversityUtility:
        return LogDiversityUtility(self.weights, self.pair_penalties, self.scale)


class ConcaveTermSpec(BaseModel):
    """One scalar concave h_i: ``log`` uses w, ``quadratic`` q and p, ``power`` gamma, coef, shift."""

    kind: Literal["log", "quadratic", "power"]
    w: float = 1.0
    q: float = 1.0
    p: float = 1.0
    gamma: float = 0.5
    coef: float = 1.0
    shift: float = 1.0

    def build(self) -> ScalarConcave:
        match self.kind:
            case "log":
                return LogTerm(self.w)
            case "quadratic":
                return QuadraticTerm(self.q, self.p)
            case _:
                return PowerTerm(self.gamma, self.coef, self.shift)


class InteractionSpec(BaseModel):
    indices: list[int]
    theta: float


class ConcaveNegDepSpec(BaseModel):
    """Config record for a ConcaveNegDepUtility."""

    family: Literal["concave_negdep"] = "concave_negdep"
    terms: list[ConcaveTermSpec]
    interactions: list[InteractionSpec] = Field(default_factory=list)
    interaction_order: int = 2

    def build(self) -> ConcaveNegDepUtility:
        return ConcaveNegDepUtility(
            [term.build() for term in self.terms],
            {tuple(item.indices): item.theta for item in self.interactions},
            self.interaction_order,
        )


FamilySpec = Annotated[QuadraticSpec | LogDiversitySpec | ConcaveNegDepSpec, Field(discriminator="family")]
