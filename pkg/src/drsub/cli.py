"""Command-line interface for drsub."""

from functools import wraps
from pathlib import Path
from typing import Any, Callable
import json
import logging
import sys

import click

from .blocks import compute_w0_quadratic, compute_w0_tail
from .checks import FunctionCheckConfig, run_checks
from .config import config
from .errors import DrsubError
from .experiments import (
    ExperimentConfig,
    MovieLensFiles,
    growth_sweep,
    preset_config,
    run_experiment,
    validate_blocks,
)


def _reports_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Turn DrsubError into ``Error: ...`` plus JSON details on stderr, exit 1."""

    @wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except DrsubError as e:
            click.echo(f"Error: {e.message}", err=True)
            click.echo(json.dumps(e.to_dict(), indent=2), err=True)
            sys.exit(1)

    return wrapper


def _parse_ints(value: str) -> list[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from e


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log solver progress at DEBUG level")
def main(verbose: bool) -> None:
    """Online DR-submodular maximization bench.

    Examples:

      # Reproduce the random-order experiment with 10 seeds
      drsub reproduce exp2

      # Recommendation experiment on MovieLens-1M files
      drsub reproduce exp1 --movielens-ratings ratings.dat --movielens-movies movies.dat

      # Block-size threshold
      drsub w0 --mu 1 --L 1 --eps 0.5 --delta 0.1 --n 2 --T 100
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _echo_result(result: Any) -> None:
    summary = result.summary
    click.echo(f"Experiment {summary.experiment}: {len(summary.runs)} runs over {len(summary.seeds)} seeds")
    for run in summary.runs:
        calls = "" if run.gradient_calls is None else f", {run.gradient_calls} gradient calls"
        click.echo(
            f"  seed {run.seed:>3} {run.algorithm:<18} regret {run.final_regret:12.6f}"
            f"  mean utility {run.mean_utility:10.6f}{calls}"
        )
    for name, value in summary.comparisons.items():
        click.echo(f"  {name}: {json.dumps(value)}")
    click.echo(f"Summary: {result.summary_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, path_type=Path), help="Experiment config (JSON)")
@click.option("--seed-override", type=int, help="Run this single seed instead of the configured list")
@click.option("--out", type=click.Path(path_type=Path), help="Output directory (default: from config)")
@_reports_errors
def run(config_path: Path, seed_override: int | None, out: Path | None) -> None:
    """Run an experiment described by a config file."""
    cfg = ExperimentConfig.load(config_path)
    if seed_override is not None:
        cfg = cfg.model_copy(update={"seeds": [seed_override]})
    click.echo(f"Running {cfg.experiment} with {len(cfg.algorithms)} algorithms on {config.threads} threads...")
    _echo_result(run_experiment(cfg, out))


@main.command()
@click.argument("preset", type=click.Choice(["exp1", "exp2", "exp3"]))
@click.option("--movielens-ratings", type=click.Path(exists=True, path_type=Path), help="ratings.dat of MovieLens-1M (exp1)")
@click.option("--movielens-movies", type=click.Path(exists=True, path_type=Path), help="movies.dat of MovieLens-1M (exp1)")
@click.option("--seeds", "n_seeds", type=int, default=10, help="Number of seeds (default: 10)")
@click.option("--T", "horizon", type=int, default=100, help="Horizon (default: 100)")
@click.option("--out", type=click.Path(path_type=Path), help="Output directory (default: results)")
@_reports_errors
def reproduce(
    preset: str,
    movielens_ratings: Path | None,
    movielens_movies: Path | None,
    n_seeds: int,
    horizon: int,
    out: Path | None,
) -> None:
    """Reproduce one of the built-in experiments."""
    if (movielens_ratings is None) != (movielens_movies is None):
        click.echo("Error: --movielens-ratings and --movielens-movies go together", err=True)
        sys.exit(2)
    files = None
    if movielens_ratings is not None and movielens_movies is not None:
        files = MovieLensFiles(ratings=movielens_ratings, movies=movielens_movies)
    elif preset == "exp1":
        click.echo("No MovieLens files given; using a synthetic extract")
    cfg = preset_config(preset, range(n_seeds), horizon, files, out)  # type: ignore[arg-type]
    click.echo(f"Reproducing {preset} (T={horizon}, {n_seeds} seeds)...")
    _echo_result(run_experiment(cfg))


@main.command("check-function")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, path_type=Path), help="Function-check config (JSON)")
@_reports_errors
def check_function(config_path: Path) -> None:
    """Run the property checkers on one function."""
    check = FunctionCheckConfig.load(config_path)
    reports = run_checks(check)
    for name, report in reports.items():
        status = "holds" if report.holds else "FAILS"
        click.echo(f"{name}: {status} (samples {report.samples}, max violation {report.max_violation:.3g})")
        if report.witness is not None:
            click.echo(f"  witness: {report.witness}")
        for note in report.notes:
            click.echo(f"  note: {note}")


@main.command()
@click.option("--mu", type=float, required=True, help="Strong DR-submodularity modulus of the average")
@click.option("--L", "L", type=float, required=True, help="Bound on the Hessian entries")
@click.option("--eps", type=float, help="Deviation ε (default: mu/2)")
@click.option("--delta", type=float, default=0.1, help="Failure probability (default: 0.1)")
@click.option("--n", type=int, required=True, help="Dimension")
@click.option("--T", "T", type=int, required=True, help="Horizon")
@click.option("--tail", is_flag=True, help="Use the branch for ε > 6θL")
@_reports_errors
def w0(mu: float, L: float, eps: float | None, delta: float, n: int, T: int, tail: bool) -> None:
    """Print the block-size threshold W0."""
    epsilon = mu / 2 if eps is None else eps
    value = compute_w0_tail(L, epsilon, delta, n, T) if tail else compute_w0_quadratic(mu, L, epsilon, delta, n, T)
    click.echo(str(value))


@main.command()
@click.option("--T", "horizons", default="100,200,400", help="Comma-separated horizons (default: 100,200,400)")
@click.option("--seeds", "n_seeds", type=int, default=10, help="Number of seeds (default: 10)")
@click.option("--mu", type=float, default=2.0, help="Strong DR-submodularity modulus (default: 2)")
@_reports_errors
def growth(horizons: str, n_seeds: int, mu: float) -> None:
    """Sub-learner regret growth of Algorithm 1 across horizons."""
    report = growth_sweep(_parse_ints(horizons), range(n_seeds), mu)
    for seed, fit, alpha in zip(report.seeds, report.fits, report.alpha_regrets):
        ratios = ", ".join(f"{r:.3f}" for r in fit.ratios)
        shape = "log" if fit.prefers_log else "sqrt"
        click.echo(
            f"seed {seed:>3}: regrets {[round(r, 4) for r in fit.regrets]} ratios [{ratios}] best fit {shape}"
            f" (1-1/e)-regret {[round(r, 2) for r in alpha]}"
        )
    total = len(report.seeds)
    click.echo(f"positive: {report.seeds_positive}/{total} seeds")
    click.echo(f"ratio <= {report.ratio_cap}: {report.seeds_within_ratio}/{total} seeds")
    click.echo(f"log fit preferred: {report.seeds_preferring_log}/{total} seeds")
    click.echo(f"within the FTL bound: {report.seeds_within_bound}/{total} seeds")
    pooled = "log" if report.pooled.prefers_log else "sqrt"
    click.echo(f"mean over seeds: {[round(r, 4) for r in report.pooled.regrets]} best fit {pooled}")


@main.command("validate-blocks")
@click.option("--trials", type=int, default=10_000, help="Random permutations (default: 10000)")
@click.option("--delta", type=float, default=0.1, help="Failure probability (default: 0.1)")
@click.option("--seed", type=int, default=0, help="Seed (default: 0)")
@_reports_errors
def validate_blocks_command(trials: int, delta: float, seed: int) -> None:
    """Monte-Carlo check that block averages stay strongly DR-submodular."""
    summary = validate_blocks(trials, delta, seed)
    click.echo(f"W0 = {summary.w0}, validated W = {summary.W}")
    click.echo(f"violation rate at W={summary.W}: {summary.report.violation_rate:.4f} (delta {summary.delta})")
    click.echo(f"violation rate at W=1: {summary.power.violation_rate:.4f}")
    if not summary.report.premise_holds:
        click.echo("warning: the sampled average does not meet the modulus premise", err=True)


if __name__ == "__main__":
    main()
