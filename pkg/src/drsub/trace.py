"""Regret traces: per-round records, CSV and JSON output, growth fits."""

from pathlib import Path
from typing import Any, Sequence
import csv
import hashlib
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, Field

from .errors import DimensionMismatchError
from .offline import Certificate

FloatArray = NDArray[np.float64]

ALPHA_OFFLINE = 1.0 - 1.0 / math.e
ALPHA_STOCHASTIC = 1.0 / math.e


def compute_regret(utilities: ArrayLike, comparator_values: ArrayLike, alpha: float) -> FloatArray:
    """Running α-regret: α Σ_{s<=t} f_s(x*) - Σ_{s<=t} f_s(x_s).

    Raises:
        DimensionMismatchError: Series of different lengths
    """
    u = np.asarray(utilities, dtype=float)
    c = np.asarray(comparator_values, dtype=float)
    if u.shape != c.shape or u.ndim != 1:
        raise DimensionMismatchError(
            "utilities and comparator values must be equal-length series",
            utilities=list(u.shape),
            comparator=list(c.shape),
        )
    return np.cumsum(alpha * c) - np.cumsum(u)


class TraceRecord(BaseModel):
    """One round of an online run."""

    t: int
    x: list[float]
    utility: float
    expected_utility: float | None = None
    cum_utility: float
    alpha_regret: float


class TraceMetadata(BaseModel):
    """Run description stored in the JSON sidecar."""

    algorithm: str
    alpha: float = ALPHA_OFFLINE
    seed: int | None = None
    comparator: list[float] | None = None
    comparator_value: float | None = None
    certificate: Certificate | None = None
    gradient_calls: int | None = None
    # Ratio the algorithm provably attains, when it differs from alpha
    provable_alpha: float | None = None
    params: dict[str, Any] = Field(default_factory=dict)


class RegretTrace(BaseModel):
    """Per-round records of one run plus its metadata.

    Regret is measured on ``expected_utility`` when present (i.i.d. runs,
    stochastic regret) and on ``utility`` otherwise.
    """

    records: list[TraceRecord]
    metadata: TraceMetadata

    @classmethod
    def build(
        cls,
        plays: Sequence[ArrayLike],
        utilities: ArrayLike,
        comparator_values: ArrayLike,
        metadata: TraceMetadata,
        expected_utilities: ArrayLike | None = None,
    ) -> "RegretTrace":
        """Assemble a trace from the played points and observed values."""
        u = np.asarray(utilities, dtype=float)
        if len(plays) != u.size:
            raise DimensionMismatchError("one play per utility is required", plays=len(plays), utilities=u.size)
        expected = None if expected_utilities is None else np.asarray(expected_utilities, dtype=float)
        regret = compute_regret(u if expected is None else expected, comparator_values, metadata.alpha)
        cumulative = np.cumsum(u)
        records = [
            TraceRecord(
                t=t + 1,
                x=np.asarray(x, dtype=float).tolist(),
                utility=float(u[t]),
                expected_utility=None if expected is None else float(expected[t]),
                cum_utility=float(cumulative[t]),
                alpha_regret=float(regret[t]),
            )
            for t, x in enumerate(plays)
        ]
        return cls(records=records, metadata=metadata)

    @property
    def T(self) -> int:
        return len(self.records)

    @property
    def plays(self) -> FloatArray:
        return np.array([r.x for r in self.records], dtype=float)

    @property
    def utilities(self) -> FloatArray:
        return np.array([r.utility for r in self.records], dtype=float)

    @property
    def expected_utilities(self) -> FloatArray | None:
        if self.records and self.records[0].expected_utility is None:
            return None
        return np.array([r.expected_utility for r in self.records], dtype=float)

    @property
    def regret(self) -> FloatArray:
        return np.array([r.alpha_regret for r in self.records], dtype=float)

    @property
    def final_regret(self) -> float:
        return self.records[-1].alpha_regret

    @property
    def cumulative_utility(self) -> float:
        return self.records[-1].cum_utility

    @property
    def mean_utility(self) -> float:
        """Running-average utility at T, on expected values when available."""
        expected = self.expected_utilities
        return float((self.utilities if expected is None else expected).mean())

    def check_prefix_sums(self, comparator_values: ArrayLike) -> bool:
        """Recompute the cumulative columns and compare them exactly."""
        u = self.utilities
        expected = self.expected_utilities
        regret = compute_regret(u if expected is None else expected, comparator_values, self.metadata.alpha)
        cumulative = np.cumsum(u)
        return bool(
            np.array_equal(cumulative, [r.cum_utility for r in self.records])
            and np.array_equal(regret, self.regret)
        )

    # Output

    def header(self) -> list[str]:
        dim = len(self.records[0].x) if self.records else 0
        columns = ["t", *(f"x_{i}" for i in range(dim)), "utility"]
        if self.expected_utilities is not None:
            columns.append("expected_utility")
        return [*columns, "cum_utility", "alpha_regret"]

    def write_csv(self, path: Path) -> None:
        """Write one row per round; floats use their shortest exact repr."""
        with_expected = self.expected_utilities is not None
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(self.header())
            for r in self.records:
                row = [str(r.t), *(repr(v) for v in r.x), repr(r.utility)]
                if with_expected:
                    row.append(repr(r.expected_utility))
                writer.writerow([*row, repr(r.cum_utility), repr(r.alpha_regret)])

    def write(self, directory: Path, stem: str) -> tuple[Path, Path]:
        """Write ``<stem>.csv`` and the ``<stem>.json`` metadata sidecar."""
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{stem}.csv"
        json_path = directory / f"{stem}.json"
        self.write_csv(csv_path)
        json_path.write_text(self.metadata.model_dump_json(indent=2), encoding="utf-8")
        return csv_path, json_path


def file_digest(path: Path) -> str:
    """SHA-256 of a file, used for determinism checks."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class GrowthFit(BaseModel):
    """Least-squares comparison of R_T ≈ a + b ln T against a + b √T."""

    horizons: list[int]
    regrets: list[float]
    ratios: list[float]
    log_coefficients: tuple[float, float]
    sqrt_coefficients: tuple[float, float]
    log_residual: float
    sqrt_residual: float

    @property
    def prefers_log(self) -> bool:
        return self.log_residual <= self.sqrt_residual


def fit_regret_growth(horizons: Sequence[int], regrets: Sequence[float]) -> GrowthFit:
    """Fit both growth shapes and report residual sums of squares."""
    T = np.asarray(horizons, dtype=float)
    R = np.asarray(regrets, dtype=float)
    if T.shape != R.shape or T.size < 2:
        raise DimensionMismatchError("need at least two (horizon, regret) pairs", horizons=T.size, regrets=R.size)

    def fit(feature: FloatArray) -> tuple[tuple[float, float], float]:
        design = np.column_stack([np.ones_like(feature), feature])
        coefficients, *_ = np.linalg.lstsq(design, R, rcond=None)
        residual = float(np.sum((design @ coefficients - R) ** 2))
        return (float(coefficients[0]), float(coefficients[1])), residual

    log_coefficients, log_residual = fit(np.log(T))
    sqrt_coefficients, sqrt_residual = fit(np.sqrt(T))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = (R[1:] / R[:-1]).tolist()
    return GrowthFit(
        horizons=[int(t) for t in T],
        regrets=R.tolist(),
        ratios=ratios,
        log_coefficients=log_coefficients,
        sqrt_coefficients=sqrt_coefficients,
        log_residual=log_residual,
        sqrt_residual=sqrt_residual,
    )
