"""Experiment configuration, presets and the parallel bench runner."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Awaitable, Callable, Literal, Self, Sequence, TypeVar
import asyncio
import logging
import math

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from .blocks import BlockValidationReport, compute_w0_quadratic, validate_block_strong_dr
from .checks import estimate_lipschitz
from .config import config
from .domain import Norm, PolytopeDomain
from .errors import ConfigError, InvalidParameterError
from .functions import NoiseCoupling, NoisyGradientOracle, ObjectiveFunction, QuadraticUtility, sum_functions
from .learners import (
    alg1_bound,
    alg2_bound,
    blocked_random_order_run,
    blocked_run,
    default_alg1_k,
    run_alg1,
    run_iid,
    run_metafw,
)
from .movielens import ingest_movielens, synthetic_movielens
from .offline import OfflineResult, best_comparator
from .plot import emit_plot
from .streams import AdversarialStream, IidStream, RandomOrderStream, StreamModel
from .trace import ALPHA_OFFLINE, GrowthFit, RegretTrace, file_digest, fit_regret_growth

logger = logging.getLogger(__name__)

R = TypeVar("R")

PresetName = Literal["exp1", "exp2", "exp3"]
AlgorithmName = Literal["alg1", "metafw", "alg1_blocked", "alg1_random_order", "alg2", "alg3", "osfw"]

ADVERSARIAL_ALGORITHMS = {"alg1", "metafw", "alg1_blocked", "alg1_random_order"}
IID_ALGORITHMS = {"alg2", "alg3", "osfw"}

# Modulus handed to Algorithm 1 on the recommendation utilities
EXP1_MU = 1.0
# Half the 1.25 modulus of the Experiment 2 average
EXP2_MU = 0.625


class AlgorithmSpec(BaseModel):
    """One algorithm of an experiment with its parameters."""

    name: AlgorithmName
    label: str | None = None
    K: int | None = Field(default=None, ge=1)
    W: int | None = Field(default=None, ge=1)
    mu: float | None = Field(default=None, gt=0)
    eta: float | None = Field(default=None, gt=0)
    alpha: float = ALPHA_OFFLINE
    fresh: bool = True

    @property
    def id(self) -> str:
        return self.label or self.name


class ComparatorSpec(BaseModel):
    """Offline comparator settings: Frank-Wolfe steps and grid step (n <= 4)."""

    fw_iterations: int = Field(default_factory=lambda: config.comparator_fw_iterations, ge=1)
    grid_step: float | None = Field(default=None, gt=0)


class MovieLensFiles(BaseModel):
    ratings: Path
    movies: Path


class PresetParams(BaseModel):
    """Knobs of the built-in presets."""

    n_movies: int = 17
    budget: float = 4.0
    n_genres: int = 5
    m: int = 2
    n: int = 4
    noise_scale: float = 4.0
    movielens: MovieLensFiles | None = None


class ExperimentConfig(BaseModel):
    """Validated experiment document.

    Either ``preset`` names a built-in generator, or ``domain`` and
    ``stream`` describe the instance explicitly.
    """

    experiment: str
    preset: PresetName | None = None
    horizon: int = Field(default=100, ge=1)
    domain: PolytopeDomain | None = None
    stream: StreamModel | None = None
    algorithms: list[AlgorithmSpec] = Field(min_length=1)
    seeds: list[int] = Field(min_length=1)
    output_dir: Path = Field(default_factory=lambda: config.output_dir)
    comparator: ComparatorSpec = Field(default_factory=ComparatorSpec)
    preset_params: PresetParams = Field(default_factory=PresetParams)

    @model_validator(mode="after")
    def _check_instance(self) -> Self:
        if self.preset is None:
            if self.domain is None or self.stream is None:
                raise ValueError("a config needs a preset or both domain and stream")
            self.horizon = self.stream.horizon
        iid = self.preset == "exp3" or isinstance(self.stream, IidStream)
        allowed = IID_ALGORITHMS if iid else ADVERSARIAL_ALGORITHMS
        unsupported = [spec.name for spec in self.algorithms if spec.name not in allowed]
        if unsupported:
            raise ValueError(f"algorithms {unsupported} do not apply to this stream model")
        labels = [spec.id for spec in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ValueError("algorithm labels must be unique")
        return self

    @classmethod
    def load(cls, path: Path) -> "ExperimentConfig":
        try:
            return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigError(f"Invalid experiment config {path}", errors=e.errors()) from e

    def dump(self, path: Path) -> None:
        Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")


def preset_config(
    name: PresetName,
    seeds: Sequence[int] = tuple(range(10)),
    horizon: int = 100,
    movielens: MovieLensFiles | None = None,
    output_dir: Path | None = None,
) -> ExperimentConfig:
    """Built-in configuration of one of the three experiments."""
    match name:
        case "exp1":
            algorithms = [
                AlgorithmSpec(name="alg1", K=100, mu=EXP1_MU),
                AlgorithmSpec(name="metafw", K=100),
            ]
        case "exp2":
            algorithms = [
                AlgorithmSpec(name="alg1", mu=EXP2_MU),
                AlgorithmSpec(name="alg1_random_order", W=5, mu=EXP2_MU),
            ]
        case "exp3":
            algorithms = [AlgorithmSpec(name="alg2"), AlgorithmSpec(name="alg3"), AlgorithmSpec(name="osfw")]
        case _:
            raise InvalidParameterError(f"unknown preset {name!r}")
    return ExperimentConfig(
        experiment=name,
        preset=name,
        horizon=horizon,
        algorithms=algorithms,
        seeds=list(seeds),
        output_dir=config.output_dir if output_dir is None else output_dir,
        preset_params=PresetParams(movielens=movielens),
    )


# Instance generation


def derived_rng(seed: int, tag: int) -> np.random.Generator:
    """Independent generator per (seed, purpose)."""
    return np.random.default_rng([seed, tag])


def derived_seed(seed: int, tag: int) -> int:
    return int(np.random.SeedSequence([seed, tag]).generate_state(1)[0])


def exp2_functions(rng: np.random.Generator, n: int, T: int) -> list[QuadraticUtility]:
    """Submodular quadratics whose average is strongly DR-submodular.

    Off-diagonal entries are uniform on [-10, 0]; the diagonal is uniform
    on [-10, 0] for the first half of the rounds and on [0, 5] afterwards.
    a⁽ᵗ⁾ = -(A⁽ᵗ⁾)ᵀ1 keeps every gradient A⁽ᵗ⁾(x - 1) non-negative on the box
    wherever the Hessian is non-positive.
    """
    functions = []
    for t in range(T):
        upper = np.triu(rng.uniform(-10.0, 0.0, size=(n, n)), 1)
        A = upper + upper.T
        A[np.diag_indices(n)] = rng.uniform(-10.0, 0.0, n) if t < T // 2 else rng.uniform(0.0, 5.0, n)
        functions.append(QuadraticUtility(A, -A.T @ np.ones(n)))
    return functions


def strongly_dr_quadratics(rng: np.random.Generator, n: int, T: int, mu: float) -> list[QuadraticUtility]:
    """Monotone µ-strongly DR-submodular quadratics on the unit box.

    Diagonal entries are uniform on [-2µ, -µ], off-diagonals on [-1, 0],
    and a = -A1.
    """
    functions = []
    for _ in range(T):
        upper = np.triu(rng.uniform(-1.0, 0.0, size=(n, n)), 1)
        A = upper + upper.T
        A[np.diag_indices(n)] = rng.uniform(-2 * mu, -mu, n)
        functions.append(QuadraticUtility(A, -A @ np.ones(n)))
    return functions


@dataclass
class Instance:
    """Everything the algorithms of one seed share."""

    domain: PolytopeDomain
    comparator: OfflineResult
    horizon: int
    functions: list[ObjectiveFunction] | None = None
    oracle_factory: Callable[[], NoisyGradientOracle] | None = None
    # Seed for algorithms that permute the sequence themselves
    order_seed: int | None = None
    extras: dict[str, Any] = field(default_factory=dict)


def _comparator(cfg: ExperimentConfig, f: ObjectiveFunction, domain: PolytopeDomain) -> OfflineResult:
    return best_comparator(f, domain, cfg.comparator.fw_iterations, cfg.comparator.grid_step)


def _iid_instance(
    cfg: ExperimentConfig,
    domain: PolytopeDomain,
    matrix: np.ndarray,
    linear: np.ndarray | None,
    noise_scale: float,
    coupling: NoiseCoupling,
    seed: int,
    retain: bool = False,
) -> Instance:
    def factory() -> NoisyGradientOracle:
        return NoisyGradientOracle(
            matrix, linear, noise_scale=noise_scale, coupling=coupling, seed=seed, retain=retain
        )

    probe = factory()
    return Instance(
        domain=domain,
        comparator=_comparator(cfg, probe.expected, domain),
        horizon=cfg.horizon,
        oracle_factory=factory,
        extras={"sigma_bound": probe.sigma_bound(domain), "L": probe.expected.smoothness_l1()},
    )


def build_instance(cfg: ExperimentConfig, seed: int) -> Instance:
    """Generate (or load) the instance of one seed."""
    params = cfg.preset_params
    T = cfg.horizon

    if cfg.preset == "exp1":
        if params.movielens is not None:
            extract = ingest_movielens(params.movielens.ratings, params.movielens.movies, params.n_movies, T, seed)
        else:
            extract = synthetic_movielens(params.n_movies, T, params.n_genres, seed)
        domain = PolytopeDomain.budget(params.n_movies, params.budget)
        functions: list[ObjectiveFunction] = list(extract.functions())
        comparator = _comparator(cfg, sum_functions(functions), domain)
        return Instance(domain, comparator, T, functions, extras={"extract": extract.digest()})

    if cfg.preset == "exp2":
        rng = derived_rng(seed, 2)
        domain = PolytopeDomain.random_packing(params.m, params.n, rng)
        functions = list(exp2_functions(rng, params.n, T))
        return Instance(
            domain,
            _comparator(cfg, sum_functions(functions), domain),
            T,
            functions,
            order_seed=derived_seed(seed, 20),
        )

    if cfg.preset == "exp3":
        rng = derived_rng(seed, 3)
        domain = PolytopeDomain.random_packing(params.m, params.n, rng)
        A = rng.uniform(-1.0, 0.0, size=(params.n, params.n))
        return _iid_instance(cfg, domain, A, None, params.noise_scale, NoiseCoupling.BILINEAR, derived_seed(seed, 30))

    assert cfg.domain is not None and cfg.stream is not None
    domain = cfg.domain
    stream = cfg.stream
    if isinstance(stream, IidStream):
        return _iid_instance(
            cfg,
            domain,
            np.asarray(stream.matrix, dtype=float),
            None if stream.linear is None else np.asarray(stream.linear, dtype=float),
            stream.noise_scale,
            stream.coupling,
            derived_seed(seed, stream.seed),
            stream.retain,
        )
    if isinstance(stream, RandomOrderStream):
        # The permutation mixes the run seed with the stream's own seed
        functions = stream.model_copy(update={"seed": derived_seed(seed, stream.seed)}).sequence()
        return Instance(domain, _comparator(cfg, sum_functions(functions), domain), T, functions)
    assert isinstance(stream, AdversarialStream)
    functions = stream.sequence()
    comparator = _comparator(cfg, sum_functions(functions), domain)
    return Instance(domain, comparator, T, functions, order_seed=derived_seed(seed, 42))


def _require_mu(spec: AlgorithmSpec) -> float:
    if spec.mu is None:
        raise InvalidParameterError(f"algorithm {spec.id} needs mu")
    return spec.mu


def run_one(spec: AlgorithmSpec, instance: Instance, seed: int) -> RegretTrace:
    """Run one algorithm on one seed's instance."""
    domain, comparator = instance.domain, instance.comparator
    if spec.name in IID_ALGORITHMS:
        assert instance.oracle_factory is not None
        oracle = instance.oracle_factory()
        trace = run_iid(spec.name, oracle, domain, instance.horizon, spec.alpha, comparator, seed, spec.fresh)
    else:
        functions = instance.functions
        assert functions is not None
        match spec.name:
            case "alg1":
                trace = run_alg1(functions, domain, _require_mu(spec), spec.K, comparator, seed)
            case "metafw":
                trace = run_metafw(functions, domain, spec.K, spec.eta, comparator, seed)
            case "alg1_blocked":
                trace = blocked_run(functions, domain, spec.W or 1, _require_mu(spec), spec.K, comparator, seed=seed)
            case _:
                trace = blocked_random_order_run(
                    functions, domain, spec.W or 1, _require_mu(spec), spec.K, instance.order_seed, comparator
                )
    trace.metadata.params["label"] = spec.id
    return trace


# Summaries


class RunSummary(BaseModel):
    seed: int
    algorithm: str
    final_regret: float
    cumulative_utility: float
    mean_utility: float
    gradient_calls: int | None
    csv: str
    csv_sha256: str


class ExperimentSummary(BaseModel):
    """Content of ``summary.json``."""

    experiment: str
    preset: PresetName | None
    horizon: int
    seeds: list[int]
    runs: list[RunSummary]
    bounds: dict[str, float] = Field(default_factory=dict)
    comparisons: dict[str, Any] = Field(default_factory=dict)
    plot: str | None = None


@dataclass
class ExperimentResult:
    summary: ExperimentSummary
    traces: dict[tuple[int, str], RegretTrace]
    summary_path: Path


def _per_seed(traces: dict[tuple[int, str], RegretTrace], label: str, seeds: Sequence[int]) -> list[RegretTrace] | None:
    if all((seed, label) in traces for seed in seeds):
        return [traces[(seed, label)] for seed in seeds]
    return None


def _utility_gap(trace: RegretTrace) -> float:
    # Σ f_t(x*) - Σ f_t(x_t), which goes negative when the plays beat the comparator
    return float(trace.metadata.comparator_value or 0.0) - trace.cumulative_utility


def _gap_within(gap: float, reference: float, factor: float) -> bool:
    """``gap <= factor * reference``, falling back to ``gap <= reference`` when the reference is not positive."""
    return gap <= factor * reference if reference > 0 else gap <= reference


def compare_runs(traces: dict[tuple[int, str], RegretTrace], seeds: Sequence[int]) -> dict[str, Any]:
    """Cross-algorithm comparisons for whichever algorithm pairs are present."""
    comparisons: dict[str, Any] = {}

    alg1 = _per_seed(traces, "alg1", seeds)
    metafw = _per_seed(traces, "metafw", seeds)
    if alg1 and metafw:
        wins = sum(_gap_within(_utility_gap(a), _utility_gap(b), 0.9) for a, b in zip(alg1, metafw))
        comparisons["alg1_gap_at_most_0.9x_metafw"] = {"seeds": wins, "of": len(seeds)}

    random_order = _per_seed(traces, "alg1_random_order", seeds)
    if alg1 and random_order:
        wins = sum(r.cumulative_utility >= a.cumulative_utility for a, r in zip(alg1, random_order))
        comparisons["random_order_utility_at_least_adversarial"] = {"seeds": wins, "of": len(seeds)}

    iid = {label: _per_seed(traces, label, seeds) for label in ("alg2", "alg3", "osfw")}
    present = {label: runs for label, runs in iid.items() if runs}
    if present:
        means = {}
        for label, runs in present.items():
            values = np.array([trace.mean_utility for trace in runs])
            error = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
            means[label] = {"mean": float(values.mean()), "standard_error": error}
        comparisons["mean_running_average_utility"] = means
        if len(present) == 3:
            strict = sum(
                a.mean_utility > max(b.mean_utility, c.mean_utility)
                for a, b, c in zip(present["alg2"], present["alg3"], present["osfw"])
            )
            comparisons["alg2_strictly_best"] = {"seeds": strict, "of": len(seeds)}
    if iid["alg3"]:
        comparisons["alg3_estimator_decay"] = estimator_decay(iid["alg3"])
    return comparisons


def estimator_decay(traces: Sequence[RegretTrace], start: int = 10) -> dict[str, float]:
    """Mean over seeds of ‖ε_t‖₂·√(t+1) and the slope of its linear fit from ``start`` on."""
    errors = np.array([trace.metadata.params["estimator_errors"] for trace in traces], dtype=float)
    t = np.arange(1, errors.shape[1] + 1)
    scaled = (errors * np.sqrt(t + 1)).mean(axis=0)
    window = t >= start
    slope = float(np.polyfit(t[window], scaled[window], 1)[0]) if window.sum() >= 2 else 0.0
    return {"max_scaled_error": float(scaled.max()), "slope": slope}


def bound_report(cfg: ExperimentConfig, instance: Instance) -> dict[str, float]:
    """Theoretical bounds of the first seed, labeled with their norm."""
    bounds: dict[str, float] = {}
    domain, T = instance.domain, cfg.horizon
    R2, R1 = domain.diameter(Norm.L2), domain.diameter(Norm.L1)
    mus = [spec.mu for spec in cfg.algorithms if spec.name == "alg1" and spec.mu]
    if instance.functions is not None and mus:
        beta = estimate_lipschitz(instance.functions, domain)
        bounds["beta_l2"] = beta
        bounds["alg1_l2"] = alg1_bound(beta, mus[0], R2, T)
        bounds["alg1_l1"] = alg1_bound(beta, mus[0], R1, T)
    if instance.oracle_factory is not None:
        L = float(instance.extras["L"])
        sigma = float(instance.extras["sigma_bound"])
        bounds["sigma_bound"] = sigma
        bounds["alg2_l2"] = alg2_bound(L, R2, T)
        bounds["alg2_l1"] = alg2_bound(L, R1, T)
        bounds["alg3_estimator_l2"] = 4 * (2 * L * R2 + 2 * sigma) * math.sqrt(math.log(80 * T))
    return bounds


async def _limited(semaphore: asyncio.Semaphore, fn: Callable[..., R], *args: Any) -> R:
    async with semaphore:
        return await asyncio.to_thread(fn, *args)


async def gather_limited(calls: Sequence[tuple[Callable[..., R], tuple]], threads: int | None = None) -> list[R]:
    """Run blocking calls in worker threads, at most ``threads`` at once, results in call order."""
    semaphore = asyncio.Semaphore(config.threads if threads is None else threads)
    tasks: list[Awaitable[R]] = [_limited(semaphore, fn, *args) for fn, args in calls]
    return list(await asyncio.gather(*tasks))


async def run_experiment_async(cfg: ExperimentConfig, output_dir: Path | None = None) -> ExperimentResult:
    """Fan out every (seed, algorithm) run and write CSVs, the plot and summary.json."""
    out = (cfg.output_dir if output_dir is None else output_dir) / cfg.experiment
    out.mkdir(parents=True, exist_ok=True)

    instances = await gather_limited([(build_instance, (cfg, seed)) for seed in cfg.seeds])
    jobs = [(seed, spec, instance) for seed, instance in zip(cfg.seeds, instances) for spec in cfg.algorithms]
    results = await gather_limited([(run_one, (spec, instance, seed)) for seed, spec, instance in jobs])

    traces: dict[tuple[int, str], RegretTrace] = {}
    runs = []
    for (seed, spec, _), trace in zip(jobs, results):
        traces[(seed, spec.id)] = trace
        csv_path, _ = trace.write(out, f"seed{seed}_{spec.id}")
        runs.append(
            RunSummary(
                seed=seed,
                algorithm=spec.id,
                final_regret=trace.final_regret,
                cumulative_utility=trace.cumulative_utility,
                mean_utility=trace.mean_utility,
                gradient_calls=trace.metadata.gradient_calls,
                csv=csv_path.name,
                csv_sha256=file_digest(csv_path),
            )
        )
        logger.info("seed %d %s: final regret %.6g", seed, spec.id, trace.final_regret)

    first = cfg.seeds[0]
    style = "average_utility" if cfg.preset == "exp3" or isinstance(cfg.stream, IidStream) else "regret"
    plot_path = emit_plot(
        [traces[(first, spec.id)] for spec in cfg.algorithms],
        out / f"{cfg.experiment}.svg",
        style=style,
        labels=[spec.id for spec in cfg.algorithms],
        title=f"{cfg.experiment} (seed {first})",
    )

    summary = ExperimentSummary(
        experiment=cfg.experiment,
        preset=cfg.preset,
        horizon=cfg.horizon,
        seeds=list(cfg.seeds),
        runs=runs,
        bounds=bound_report(cfg, instances[0]),
        comparisons=compare_runs(traces, cfg.seeds),
        plot=plot_path.name,
    )
    summary_path = out / "summary.json"
    summary_path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    return ExperimentResult(summary, traces, summary_path)


def run_experiment(cfg: ExperimentConfig, output_dir: Path | None = None) -> ExperimentResult:
    return asyncio.run(run_experiment_async(cfg, output_dir))


# Sweeps


class GrowthReport(BaseModel):
    """Regret of Algorithm 1 at several horizons, per seed.

    ``fits`` describe the mean FTL regret of the K sub-learners on their
    strongly concave payoffs, the term Algorithm 1's logarithmic bound is
    built from, and ``pooled`` fits the mean over seeds. ``alpha_regrets``
    keep the final (1 - 1/e)-regret of the played points per seed and
    horizon; it turns negative whenever the plays beat (1 - 1/e)·OPT.
    """

    mu: float
    horizons: list[int]
    seeds: list[int]
    fits: list[GrowthFit]
    pooled: GrowthFit
    alpha_regrets: list[list[float]]
    ratio_cap: float = 1.6
    seeds_positive: int
    seeds_within_ratio: int
    seeds_preferring_log: int
    seeds_within_bound: int
    bounds: dict[str, float] = Field(default_factory=dict)


@dataclass
class _SeedGrowth:
    fit: GrowthFit
    alpha_regrets: list[float]
    bounds: dict[str, float]

    @property
    def within_bound(self) -> bool:
        return all(r <= self.bounds[f"alg1_l2_T{T}"] for T, r in zip(self.fit.horizons, self.fit.regrets))


def _growth_seed(seed: int, horizons: Sequence[int], mu: float, n: int, m: int) -> _SeedGrowth:
    rng = derived_rng(seed, 5)
    domain = PolytopeDomain.random_packing(m, n, rng)
    functions: list[ObjectiveFunction] = list(strongly_dr_quadratics(rng, n, max(horizons), mu))
    regrets, alpha_regrets, bounds = [], [], {}
    for T in horizons:
        prefix = functions[:T]
        trace = run_alg1(prefix, domain, mu, default_alg1_k(T), seed=seed)
        regrets.append(trace.metadata.params["learner_regret"])
        alpha_regrets.append(trace.final_regret)
        beta = estimate_lipschitz(prefix, domain)
        bounds[f"alg1_l2_T{T}"] = alg1_bound(beta, mu, domain.diameter(Norm.L2), T)
    return _SeedGrowth(fit_regret_growth(horizons, regrets), alpha_regrets, bounds)


async def growth_sweep_async(
    horizons: Sequence[int] = (100, 200, 400),
    seeds: Sequence[int] = tuple(range(10)),
    mu: float = 2.0,
    n: int = 4,
    m: int = 2,
) -> GrowthReport:
    """Run Algorithm 1 with K = ⌈T/ln T⌉ on prefixes of one sequence per seed."""
    horizons = sorted(horizons)
    if len(horizons) < 2:
        raise InvalidParameterError("the growth sweep needs at least two horizons")
    if not seeds:
        raise InvalidParameterError("the growth sweep needs at least one seed")
    results = await gather_limited([(_growth_seed, (seed, horizons, mu, n, m)) for seed in seeds])
    fits = [result.fit for result in results]
    cap = 1.6
    pooled = fit_regret_growth(horizons, np.mean([fit.regrets for fit in fits], axis=0))
    return GrowthReport(
        mu=mu,
        horizons=list(horizons),
        seeds=list(seeds),
        fits=fits,
        pooled=pooled,
        alpha_regrets=[result.alpha_regrets for result in results],
        ratio_cap=cap,
        seeds_positive=sum(all(r > 0 for r in fit.regrets) for fit in fits),
        seeds_within_ratio=sum(all(0 < r <= cap for r in fit.ratios) for fit in fits),
        seeds_preferring_log=sum(fit.prefers_log for fit in fits),
        seeds_within_bound=sum(result.within_bound for result in results),
        bounds=results[0].bounds,
    )


def growth_sweep(
    horizons: Sequence[int] = (100, 200, 400),
    seeds: Sequence[int] = tuple(range(10)),
    mu: float = 2.0,
    n: int = 4,
    m: int = 2,
) -> GrowthReport:
    return asyncio.run(growth_sweep_async(horizons, seeds, mu, n, m))


class BlockCheckSummary(BaseModel):
    """Block-size premise check on the Experiment 2 mix."""

    w0: int
    W: int
    delta: float
    report: BlockValidationReport
    power: BlockValidationReport


def validate_blocks(
    trials: int = 10_000,
    delta: float = 0.1,
    seed: int = 0,
    T: int = 100,
    n: int = 4,
    m: int = 2,
    mu: float = 1.25,
    L: float = 10.0,
) -> BlockCheckSummary:
    """Validate blocks of size max(5, min(W₀, T)) and the W = 1 power check."""
    rng = derived_rng(seed, 2)
    # Draw the domain first so the functions match build_instance for exp2
    PolytopeDomain.random_packing(m, n, rng)
    functions = exp2_functions(rng, n, T)
    w0 = compute_w0_quadratic(mu, L, mu / 2, delta, n, T)
    W = max(5, min(w0, T))
    return BlockCheckSummary(
        w0=w0,
        W=W,
        delta=delta,
        report=validate_block_strong_dr(functions, W, mu, trials, seed),
        power=validate_block_strong_dr(functions, 1, mu, trials, seed),
    )
