import itertools
import json

import networkx as nx
import pytest

from praag.log_engine import (LogEdge, LogError, LogPresentation, _candidate_logs,
                              asc_desc_are_trees, canonical_names, classify_curvature,
                              emit_group_presentation, girth_five_obstruction, load_log,
                              parse_presentation, preset, preset_exp, preset_poly,
                              search_exp_log, validate_exp_log, vertex_link)
from praag.words import Word


def path_graph_edges(d):
    chain = ["s+"] + [f"a{i}+" for i in range(d + 1)]
    return {frozenset(p) for p in zip(chain, chain[1:])}


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_poly_link_shape(d):
    link = vertex_link(preset_poly(d))
    assert link.girth() == 4
    assert classify_curvature(link) == "npc"
    assert asc_desc_are_trees(link) == (True, True)
    assert {frozenset(p) for p in link.pairs("desc")} == path_graph_edges(d)
    star = {frozenset(("a0-", v)) for v in ["s-"] + [f"a{i}-" for i in range(1, d + 1)]}
    assert {frozenset(p) for p in link.pairs("asc")} == star


def test_relators_have_height_zero():
    for r in preset_poly(3).relators():
        assert len(r) == 4 and r.exponent_sum() == 0


def test_relator_format():
    p = LogPresentation(("x", "y", "z"), (LogEdge("x", "y", "z"),))
    assert p.relators() == [Word.parse("z y z^-1 x^-1")]


def test_corner_rule_on_single_edge():
    # e = (x, y, z): desc {z+, y+}, asc {z-, x-}, right {z+, y-}, left {x+, z-}.
    link = vertex_link(LogPresentation(("x", "y", "z"), (LogEdge("x", "y", "z"),)))
    got = {c: {frozenset(p) for p in link.pairs(c)} for c in ("desc", "asc", "right", "left")}
    assert got == {"desc": {frozenset(("z+", "y+"))}, "asc": {frozenset(("z-", "x-"))},
                   "right": {frozenset(("z+", "y-"))}, "left": {frozenset(("x+", "z-"))}}


def test_curvature_failure_detected():
    # Two parallel squares give a 2-cycle in the link.
    p = LogPresentation(("x", "y"), (LogEdge("x", "x", "y"), LogEdge("x", "x", "y")))
    assert classify_curvature(vertex_link(p)) == "fail"


def test_unknown_vertex_rejected():
    with pytest.raises(LogError):
        LogPresentation(("x",), (LogEdge("x", "q", "x"),))


def test_round_trip(tmp_path):
    p = preset_poly(2)
    path = tmp_path / "log.json"
    path.write_text(json.dumps(p.to_dict()))
    assert load_log(path) == p
    gens, rels = parse_presentation(emit_group_presentation(p))
    assert gens == list(p.vertices) and rels == p.relators()


def test_preset_selector():
    assert preset("poly:3") == preset_poly(3)
    assert preset("exp") == preset_exp().presentation
    with pytest.raises(LogError):
        preset("bogus")


def test_girth_five_obstruction_formula():
    assert all(girth_five_obstruction(n) for n in range(3, 40))
    assert not girth_five_obstruction(2)


def test_no_girth_five_log_on_four_vertices_by_brute_force():
    # Every (n-1)-edge LOG on 4 vertices: none has link girth >= 5.
    names = canonical_names(4)
    triples = list(itertools.product(names, repeat=3))
    best = 0
    for combo in itertools.combinations(triples, 3):
        p = LogPresentation(names, tuple(LogEdge(*t) for t in combo))
        best = max(best, vertex_link(p).girth())
    assert best < 5


@pytest.mark.parametrize("n", [5, 6])
def test_exhaustive_girth_five_search_is_empty(n):
    assert next(iter(_candidate_logs(n, 5)), None) is None
    assert search_exp_log(n, use_obstruction=False) is None


def test_search_respects_obstruction_and_range():
    assert search_exp_log(7) is None
    assert search_exp_log(4) is None


def test_shipped_candidate_is_girth_four_with_twin_trees():
    pre = preset_exp()
    rep = validate_exp_log(pre.presentation, pre.candidate.src, pre.candidate.dst, min_girth=4)
    assert rep.valid, rep.failures
    assert rep.girth == 4 and rep.desc_tree and rep.asc_tree and rep.quadruple_edges == []
    assert all(v == 2 for v in rep.distances.values())
    strict = validate_exp_log(pre.presentation, "a1", "a3")
    assert not strict.valid and strict.failures == ["girth is 4, expected 5"]


def test_link_graph_is_simple_for_shipped_candidate():
    g = vertex_link(preset_exp().presentation).graph()
    assert nx.number_of_selfloops(g) == 0
