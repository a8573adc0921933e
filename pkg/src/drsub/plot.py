"""Regret-curve plots rendered to deterministic SVG."""

from pathlib import Path
from typing import Literal, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import InvalidParameterError  # noqa: E402
from .trace import RegretTrace  # noqa: E402

Style = Literal["regret", "average_utility"]

_YLABELS = {
    "regret": r"$\alpha$-regret",
    "average_utility": "running average utility",
}


def _series(trace: RegretTrace, style: Style) -> np.ndarray:
    if style == "regret":
        return trace.regret
    expected = trace.expected_utilities
    values = trace.utilities if expected is None else expected
    return np.cumsum(values) / np.arange(1, values.size + 1)


def emit_plot(
    traces: Sequence[RegretTrace],
    path: Path,
    style: Style = "regret",
    labels: Sequence[str] | None = None,
    title: str | None = None,
) -> Path:
    """Draw one line per trace against the round index and save it as SVG.

    Output bytes depend only on the inputs: the SVG id salt is fixed and
    the date metadata is dropped.

    Args:
        traces: Runs sharing one horizon T
        path: Destination ``.svg`` file
        style: ``regret`` or ``average_utility``
        labels: Legend entries, default the algorithm ids
        title: Optional axes title

    Returns:
        The written path
    """
    if not traces:
        raise InvalidParameterError("nothing to plot")
    horizons = {trace.T for trace in traces}
    if len(horizons) != 1:
        raise InvalidParameterError("traces must share one horizon", horizons=sorted(horizons))
    labels = [trace.metadata.algorithm for trace in traces] if labels is None else list(labels)
    if len(labels) != len(traces):
        raise InvalidParameterError("one label per trace is required")

    rounds = np.arange(1, horizons.pop() + 1)
    with plt.rc_context({"svg.hashsalt": "drsub", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for trace, label in zip(traces, labels):
            ax.plot(rounds, _series(trace, style), label=label)
        ax.set_xlabel("round")
        ax.set_ylabel(_YLABELS[style])
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
