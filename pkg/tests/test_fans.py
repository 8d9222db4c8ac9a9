import math

import numpy as np
import pytest

from praag.complex_core import SimpleGraph
from praag.fans import (ASCENDING, DESCENDING, FanError, audit_fan, build_fan, closed_form_f,
                        fan_contains, fan_of_powers, finite_difference_degree, log_linear_fit,
                        measure_exp_growth, push_edge, pushed_cell_area, recursion_table,
                        rim_sequence, rim_table_ascending, rim_table_poly)
from praag.log_engine import LogEdge, LogPresentation, preset_exp, preset_poly
from praag.words import Word
from oracles import rim_closed_form, s_rim

# Frozen from a harness run on the shipped LOG (n = 0..10).
EXP_RIMS = [0, 2, 7, 17, 37, 80, 177, 397, 890, 1984, 4405]
EXP_ANCHOR_RIMS = [0, 2, 7, 20, 51, 120, 270, 598, 1324, 2941, 6543]


def test_closed_form_matches_oracle():
    for i in range(4):
        for j in range(i + 1, 5):
            assert [closed_form_f(i, j, n) for n in range(12)] == \
                [rim_closed_form(i, j, n) for n in range(12)]
    with pytest.raises(ValueError):
        closed_form_f(2, 1, 3)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_rim_table_matches_closed_form(d):
    table = rim_table_poly(d, 15)
    for (i, j), row in table.items():
        assert row == [rim_closed_form(i, j, n) for n in range(16)]


def test_recursion_table_boundary():
    t = recursion_table(3, 6)
    assert all(row[0] == 0 for row in t.values())
    assert t[(0, 1)] == list(range(7))


@pytest.mark.parametrize("d", [2, 3])
def test_s_fan_rims(d):
    assert rim_sequence(preset_poly(d), "s", f"a{d}", 12) == [s_rim(d, n) for n in range(13)]


def test_ascending_table():
    t = rim_table_ascending(3, 12)
    assert t.f("s", "a0", 5) == 5 and t.f("a0", "a1", 7) == 7
    assert t.recursion2 == []


def test_fan_stats_and_audit():
    f = fan_of_powers(preset_poly(2), "a0", "a2", 4)
    assert f.height == 4
    assert list(f.layer_sizes) == [rim_closed_form(0, 2, m) for m in range(1, 5)]
    assert f.area == sum(f.layer_sizes)
    assert len(f.vrim) == 2 * f.erim_length
    assert audit_fan(f).ok
    assert f.erim.generators() <= {"x1", "x2"}


def test_ascending_fan_audit():
    f = build_fan(preset_poly(3), Word.parse("a1^-1 a1^-1 a1^-1"), Word.parse("a3^-1 a3^-1 a3^-1"),
                  ASCENDING)
    assert audit_fan(f).ok
    assert f.direction == ASCENDING


def test_fan_preconditions():
    p = preset_poly(2)
    with pytest.raises(FanError):
        build_fan(p, Word.parse("a0^-1"), Word.parse("a1"), DESCENDING)
    with pytest.raises(FanError):
        build_fan(p, Word.parse("q"), Word.parse("a1"), DESCENDING)
    bad = LogPresentation(("x", "y", "z"), (LogEdge("x", "y", "z"), LogEdge("y", "x", "z"),
                                            LogEdge("x", "x", "y")))
    with pytest.raises(FanError):
        fan_of_powers(bad, "x", "y", 2)


def test_exp_preset_rims_frozen():
    pre = preset_exp()
    p = pre.presentation
    assert rim_sequence(p, pre.candidate.src, pre.candidate.dst, 10) == EXP_RIMS
    assert rim_sequence(p, *pre.anchor, 10) == EXP_ANCHOR_RIMS


def test_exp_growth_report():
    pre = preset_exp()
    rep = measure_exp_growth(pre.presentation, pre.candidate.src, pre.candidate.dst, 14)
    assert rep.base > 1 and rep.r_squared >= 0.99
    assert rep.rim_bound_ok and rep.area_bound_ok and rep.monotone
    assert all(r <= rep.C ** n for n, r in enumerate(rep.rims, start=1))


def test_anchor_contains_source_fans():
    pre = preset_exp()
    p, (t, a5) = pre.presentation, pre.anchor
    for j in range(1, 6):
        inner = fan_of_powers(p, pre.candidate.src, pre.candidate.dst, j)
        assert fan_contains(fan_of_powers(p, t, a5, j + 1), inner)
    assert not fan_contains(fan_of_powers(p, t, a5, 1), fan_of_powers(p, "a1", "a3", 3))


def test_log_linear_fit_exact():
    ns = np.arange(1, 10)
    slope, r2 = log_linear_fit(ns, 3.0 ** ns)
    assert math.isclose(slope, math.log(3.0)) and math.isclose(r2, 1.0)


def test_finite_difference_degree():
    assert finite_difference_degree([n ** 3 + 2 for n in range(10)]) == 3
    assert finite_difference_degree([5] * 6) == 0
    assert finite_difference_degree([2 ** n for n in range(8)]) is None


def test_push_edge_graph_context():
    g = SimpleGraph(("a", "b", "c"), (("a", "b"),))
    assert push_edge(g, "a", "b", 3) == Word([("a_b", 1)] * 3)
    assert push_edge(g, "a", "b", -2) == Word([("a_b", -1)] * 2)
    assert pushed_cell_area(g, "a", "b", 5) == 25
    with pytest.raises(FanError):
        push_edge(g, "a", "c", 1)


@pytest.mark.parametrize("d", [2, 3])
def test_pushed_area_degree(d):
    p = preset_poly(d)
    areas = [pushed_cell_area(p, "a0", f"a{d}", h) for h in range(1, 16)]
    assert finite_difference_degree(areas) == d + 1
    assert push_edge(p, "a0", f"a{d}", 3) == fan_of_powers(p, "a0", f"a{d}", 3).erim


def test_pushed_area_exp_bound():
    pre = preset_exp()
    p = pre.presentation
    rep = measure_exp_growth(p, "a1", "a3", 10)
    for h in range(1, 11):
        assert pushed_cell_area(p, "a1", "a3", h) <= rep.C ** (h + 1)
        assert len(push_edge(p, "a1", "a3", -h)) <= rep.C ** h
