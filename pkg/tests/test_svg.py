import xml.etree.ElementTree as ET

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fueltax.forecast import ACTUAL, PREDICTED, Projection, ProjectionEntry
from fueltax.panel import MonthKey, month_range
from fueltax.svg import Series, line_chart, nice_ticks, projection_chart

NS = "{http://www.w3.org/2000/svg}"


def sample_projection():
    entries = []
    for i, m in enumerate(month_range(MonthKey(2019, 1), MonthKey(2022, 12))):
        entries.append(ProjectionEntry("CA", m, PREDICTED, 1200 + 50 * (i % 12)))
        if m <= MonthKey(2021, 8):
            entries.append(ProjectionEntry("CA", m, ACTUAL, 1190 + 52 * (i % 12)))
    return Projection(entries)


def test_chart_is_well_formed():
    svg = projection_chart(sample_projection(), "CA")
    root = ET.fromstring(svg)
    assert root.tag == NS + "svg"
    paths = root.findall(f".//{NS}path")
    # axes plus one line per series
    assert len(paths) == 3
    assert sum(1 for p in paths if p.get("stroke-dasharray")) == 1
    texts = [t.text for t in root.iter(NS + "text")]
    assert "actual" in texts and "predicted" in texts
    assert {"2019", "2020", "2021", "2022"} <= set(texts)


def test_chart_is_deterministic():
    assert projection_chart(sample_projection(), "CA") == projection_chart(sample_projection(), "CA")


def test_marker_at_last_actual():
    svg = projection_chart(sample_projection(), "CA")
    assert 'stroke-dasharray="2,3"' in svg


def test_escapes_text():
    svg = line_chart('a < b & "c"', [Series("x<y", [0, 1], [0, 1])])
    ET.fromstring(svg)
    assert "&lt;" in svg and "&amp;" in svg


def test_empty_chart():
    root = ET.fromstring(line_chart("nothing", []))
    assert any(t.text == "no data" for t in root.iter(NS + "text"))


@given(st.floats(-1e6, 1e6), st.floats(1e-3, 1e6))
def test_ticks_cover_range(lo, span):
    hi = lo + span
    ticks = nice_ticks(lo, hi)
    assert ticks[0] <= lo + 1e-9 * abs(lo) and ticks[-1] >= hi - 1e-9 * abs(hi)
    assert 2 <= len(ticks) <= 12
    assert ticks == sorted(ticks)


def test_ticks_are_round():
    assert nice_ticks(0, 1000) == [0, 200, 400, 600, 800, 1000]
    assert nice_ticks(3, 3) == pytest.approx([3.0, 3.2, 3.4, 3.6, 3.8, 4.0])
