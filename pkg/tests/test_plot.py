"""Tests for SVG plot output."""

import pytest

from drsub.errors import InvalidParameterError
from drsub.plot import emit_plot
from drsub.trace import RegretTrace, TraceMetadata


def _trace(algorithm, T=5, expected=False):
    utilities = [0.1 * t for t in range(1, T + 1)]
    return RegretTrace.build(
        [[u] for u in utilities],
        utilities,
        [1.0] * T,
        TraceMetadata(algorithm=algorithm),
        expected_utilities=utilities if expected else None,
    )


def test_emit_plot_writes_svg(tmp_path):
    """Test that the figure is written as SVG without a date."""
    path = emit_plot([_trace("alg1"), _trace("metafw")], tmp_path / "plots" / "exp1.svg", title="exp1")
    text = path.read_text()
    assert text.startswith("<?xml")
    assert "<svg" in text
    assert "dc:date" not in text


def test_emit_plot_is_deterministic(tmp_path):
    """Test byte-identical output for identical inputs."""
    traces = [_trace("alg2", expected=True), _trace("osfw", expected=True)]
    first = emit_plot(traces, tmp_path / "a.svg", style="average_utility")
    second = emit_plot(traces, tmp_path / "b.svg", style="average_utility")
    assert first.read_bytes() == second.read_bytes()


def test_emit_plot_rejects_empty(tmp_path):
    """Test that there must be something to plot."""
    with pytest.raises(InvalidParameterError):
        emit_plot([], tmp_path / "empty.svg")


def test_emit_plot_rejects_mixed_horizons(tmp_path):
    """Test that all traces share one horizon."""
    with pytest.raises(InvalidParameterError):
        emit_plot([_trace("a", T=5), _trace("b", T=6)], tmp_path / "mixed.svg")


def test_emit_plot_label_count(tmp_path):
    """Test one label per trace."""
    with pytest.raises(InvalidParameterError):
        emit_plot([_trace("a"), _trace("b")], tmp_path / "labels.svg", labels=["only one"])
