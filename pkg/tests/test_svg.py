import math
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from costeq.cec import CostEquivalentCurve, compute_cec
from costeq.errors import ValidationError
from costeq.isotonic import Flag, MonotoneSample
from costeq.svg import SVG_NS, PlotStyle, dash_array, format_benefit, nice_ticks, render_svg

NS = {"s": SVG_NS}


def samples(xs, ys):
    return [MonotoneSample(x, y) for x, y in zip(xs, ys)]


CONTROL = samples([100, 200, 400], [0.6, 0.7, 0.8])


def polylines(svg):
    root = ET.fromstring(svg)
    return root, root.findall(".//s:polyline", NS)


def points(poly):
    return [tuple(map(float, p.split(","))) for p in poly.get("points").split()]


def distance_to_line(p, a, b):
    (x, y), (x1, y1), (x2, y2) = p, a, b
    return abs((x2 - x1) * (y1 - y) - (x1 - x) * (y2 - y1)) / math.hypot(x2 - x1, y2 - y1)


def diagonal(root):
    (line,) = [e for e in root.iter(f"{{{SVG_NS}}}line") if e.get("class") == "diagonal"]
    return (float(line.get("x1")), float(line.get("y1"))), (float(line.get("x2")), float(line.get("y2")))


def test_well_formed_with_namespace():
    svg = render_svg([compute_cec(CONTROL, CONTROL)])
    root, _ = polylines(svg)
    assert root.tag == f"{{{SVG_NS}}}svg"


@pytest.mark.parametrize("grid", ["auto", "dense"])
@pytest.mark.parametrize("log", [False, True])
def test_identity_lies_on_diagonal(grid, log):
    svg = render_svg([compute_cec(CONTROL, CONTROL, grid)], PlotStyle(log_scale=log))
    root, (poly,) = polylines(svg)
    a, b = diagonal(root)
    assert max(distance_to_line(p, a, b) for p in points(poly)) <= 0.5


def test_two_treatments_two_labels():
    a = compute_cec(CONTROL, samples([50, 100, 200], [0.6, 0.7, 0.8]), label="multitask")
    b = compute_cec(CONTROL, samples([80, 150, 300], [0.6, 0.7, 0.8]), label="sequential")
    _, polys = polylines(render_svg([a, b]))
    assert [p.get("data-label") for p in polys] == ["multitask", "sequential"]
    assert polys[0].get("stroke") != polys[1].get("stroke")


def test_style_labels_override():
    a = compute_cec(CONTROL, CONTROL)
    _, (poly,) = polylines(render_svg([a], PlotStyle(labels=("mine",))))
    assert poly.get("data-label") == "mine"


def test_flagged_segments_are_dashed():
    cec = compute_cec(samples([100, 200], [0.6, 0.8]), samples([100, 200], [0.7, 0.9]), "dense")
    _, (poly,) = polylines(render_svg([cec]))
    assert poly.get("stroke-dasharray")
    assert poly.get("data-flagged").startswith("0,")
    _, (plain,) = polylines(render_svg([cec], PlotStyle(dashed_extrapolation=False)))
    assert plain.get("stroke-dasharray") is None


def test_top_axis_and_diagonal_toggles():
    cec = compute_cec(CONTROL, CONTROL)
    root, _ = polylines(render_svg([cec]))
    labels = [e.text for e in root.iter(f"{{{SVG_NS}}}text") if e.get("class") == "benefit"]
    assert labels == ["60%", "70%", "80%"]
    root, _ = polylines(render_svg([cec], PlotStyle(show_diagonal=False, show_top_axis=False)))
    assert not [e for e in root.iter() if e.get("class") in ("diagonal", "benefit")]


def test_empty_and_bad_style():
    with pytest.raises(ValidationError):
        render_svg([])
    with pytest.raises(ValidationError):
        PlotStyle(width=0)


def test_dash_array_lengths_sum():
    out = dash_array([10, 15, 10], [False, True, False])
    assert len(out) % 2 == 0
    assert sum(out) == pytest.approx(35)
    assert dash_array([7], [False]) == [7, 0.0]


def test_helpers():
    assert format_benefit(0.873) == "87.3%"
    assert format_benefit(2.5) == "2.5"
    assert nice_ticks(0, 10) == [0, 2, 4, 6, 8, 10]


# fuzz: random tables must still produce well-formed XML

flags = st.sampled_from(list(Flag))
label_text = st.text(max_size=12).filter(lambda s: all(c.isprintable() for c in s))


@st.composite
def tables(draw):
    n = draw(st.integers(1, 30))
    grid = sorted(draw(st.lists(st.floats(1, 1e6), min_size=n, max_size=n)))
    costs = sorted(draw(st.lists(st.floats(1, 1e6), min_size=n, max_size=n)))
    benefits = sorted(draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    fl = draw(st.lists(flags, min_size=n, max_size=n))
    return CostEquivalentCurve(tuple(grid), tuple(costs), tuple(benefits), tuple(fl), draw(label_text))


@settings(max_examples=200, deadline=None)
@given(st.lists(tables(), min_size=1, max_size=3), st.booleans())
def test_fuzz_well_formed(curves, log):
    _, polys = polylines(render_svg(curves, PlotStyle(log_scale=log, title="a < b & c")))
    assert len(polys) == len(curves)
