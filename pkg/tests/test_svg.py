"""Tests for the learning-curve SVG writer."""

import pytest

from ophrl.core.errors import ParameterError
from ophrl.core.svg_writer import SVGWriter, emit_svg

CURVE = [(0.0, -50.0), (1.0, -20.0), (2.0, 10.0)]


@pytest.fixture
def writer(tmp_path) -> SVGWriter:
    return SVGWriter(tmp_path / "charts")


def test_one_polyline_per_series(writer) -> None:
    svg = writer.generate_chart_svg([("gtsdt (paper)", CURVE), ("flat", CURVE[:2])], title="cliff")
    assert svg.startswith("<?xml")
    assert svg.count("<polyline") == 2
    assert ">episode</text>" in svg
    assert ">mean return</text>" in svg
    assert ">gtsdt (paper)</text>" in svg


def test_labels_are_escaped(writer) -> None:
    svg = writer.generate_chart_svg([("a<b & c", CURVE)])
    assert "a&lt;b &amp; c" in svg


def test_flat_and_single_point_curves_render(writer) -> None:
    svg = writer.generate_chart_svg([("constant", [(0.0, 5.0), (1.0, 5.0)]), ("dot", [(3.0, 1.0)])])
    assert svg.count("<polyline") == 2
    assert "nan" not in svg


def test_empty_input_is_rejected(writer) -> None:
    with pytest.raises(ParameterError):
        writer.generate_chart_svg([])
    with pytest.raises(ParameterError, match="no points"):
        writer.generate_chart_svg([("empty", [])])


def test_files_are_deterministic(writer, tmp_path) -> None:
    path = writer.write_chart_file("curve", [("fixed_q0", CURVE)], title="bandit")
    assert path == tmp_path / "charts" / "curve.svg"
    other = emit_svg([("fixed_q0", CURVE)], tmp_path / "copy.svg", title="bandit")
    assert path.read_bytes() == other.read_bytes()
