"""Configuration management."""

from pathlib import Path
import os

from pydantic import BaseModel, Field


def _threads_from_env() -> int:
    """Worker count from DRSUB_THREADS, falling back to the CPU count."""
    raw = os.environ.get("DRSUB_THREADS", "")
    if raw.strip().isdigit() and int(raw) > 0:
        return int(raw)
    return os.cpu_count() or 1


class Config(BaseModel):
    """Application configuration."""

    # Geometry oracles
    lmo_tol: float = 1e-9
    projection_tol: float = 1e-9
    projection_max_iter: int = 10000
    simplex_max_iter: int = 5000
    vertex_limit: int = 1024
    vertex_candidate_limit: int = 200_000

    # Feasibility tolerance for played points
    feasibility_tol: float = 1e-7

    # Property checkers
    checker_samples: int = 1000
    checker_tol: float = 1e-9

    # Offline comparators
    comparator_fw_iterations: int = 2000
    comparator_grid_step: float = 0.05
    grid_max_dim: int = 4

    # Bench output and parallelism
    output_dir: Path = Path("results")
    threads: int = Field(default_factory=_threads_from_env)


# Global config instance
config = Config()
