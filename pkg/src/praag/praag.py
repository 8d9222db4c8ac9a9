"""Perturbed right-angled Artin groups: markings, link assembly, Morse links, presentations.

Each marked edge ``f`` (mark ``d >= 1``) is removed from the RAAG and replaced
by the piece whose vertex link is ``S(link f) * link(*, P_d)``, glued to
``S(K_{Gamma-F})`` along ``S(Sigma_f)``.  LOG vertices of the piece for
``f = (p, q)`` are named ``gen[p,q]``; the two LOG generators playing the
roles of ``p`` and ``q`` are identified with them.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .complex_core import (ComplexError, SimpleGraph, SimplicialComplex, discrete, flag_complex,
                           flag_witness, fullness_witness, join, signed, sphere)
from .homology import CollapseCertificate, HomologyProfile, collapse_tree_to_path, homology
from .log_engine import LogPresentation, preset_exp, preset_poly, vertex_link
from .words import Word, commutator

INF = math.inf


class MarkingError(ValueError):
    """Raised when a marking or assembly fails a check; ``witness`` names the violation."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


def parse_mark(value) -> float:
    if value == "inf" or value == INF:
        return INF
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise MarkingError(f"mark must be a non-negative integer or 'inf', got {value!r}")
    return value


def format_mark(d) -> int | str:
    return "inf" if d == INF else int(d)


Edge = tuple[str, str]


@dataclass(frozen=True)
class Marking:
    graph: SimpleGraph
    marks: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        fixed = {}
        for (p, q), d in dict(self.marks).items():
            oriented = next((e for e in self.graph.edges if set(e) == {p, q}), None)
            if oriented is None:
                raise MarkingError(f"marked edge ({p}, {q}) is not an edge of the graph",
                                   {"invariant": "marked edges exist", "edge": [p, q]})
            fixed[oriented] = parse_mark(d)
        object.__setattr__(self, "marks", fixed)

    def mark(self, edge: Iterable[str]) -> float:
        key = frozenset(edge)
        for e, d in self.marks.items():
            if frozenset(e) == key:
                return d
        return 0

    @property
    def support(self) -> tuple[Edge, ...]:
        """Edges with mark at least 1, in graph order."""
        return tuple(e for e in self.graph.edges if self.mark(e) >= 1)

    @property
    def max_mark(self) -> float:
        return max((self.marks[e] for e in self.support), default=0)

    def to_dict(self) -> dict:
        return {"marks": [{"from": p, "to": q, "d": format_mark(d)}
                          for (p, q), d in self.marks.items()]}

    @classmethod
    def from_dict(cls, graph: SimpleGraph, data: Mapping) -> "Marking":
        return cls(graph, {(m["from"], m["to"]): parse_mark(m["d"]) for m in data.get("marks", [])})


def load_marking(graph: SimpleGraph, path: str | Path) -> Marking:
    return Marking.from_dict(graph, json.loads(Path(path).read_text()))


def edge_link(graph: SimpleGraph, edge: Iterable[str]) -> set[str]:
    """Vertices of ``link(f, K_Gamma)``: the common neighbours of both endpoints."""
    p, q = edge
    return graph.neighbors(p) & graph.neighbors(q)


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    witness: dict | None = None


def check_admissible(m: Marking) -> Admissibility:
    """For distinct marked ``e, f``, the closed edge ``e`` must miss ``link(f)``."""
    F = m.support
    for f in F:
        lk = edge_link(m.graph, f)
        for e in F:
            if e == f:
                continue
            meet = sorted(set(e) & lk)
            if meet:
                return Admissibility(False, {"invariant": "admissible marking", "edge": list(e),
                                             "marked": list(f), "intersection": meet})
    return Admissibility(True)


# --- LOG pieces ---------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """The LOG used for a mark value, with the generators receiving ``tail`` and ``head``."""

    presentation: LogPresentation
    src: str
    dst: str


def piece_for(d) -> Piece:
    if d == INF:
        pre = preset_exp()
        return Piece(pre.presentation, pre.candidate.src, pre.candidate.dst)
    d = int(d)
    if d < 1:
        raise MarkingError(f"no LOG piece for mark {d}")
    return Piece(preset_poly(d), "s", f"a{d}")


def log_name(gen: str, f: Edge) -> str:
    return f"{gen}[{f[0]},{f[1]}]"


def piece_names(piece: Piece, f: Edge) -> dict[str, str]:
    """Generator renaming for the piece glued along ``f``."""
    return {g: (f[0] if g == piece.src else f[1] if g == piece.dst else log_name(g, f))
            for g in piece.presentation.vertices}


def log_link_complex(p: LogPresentation) -> SimplicialComplex:
    link = vertex_link(p)
    if link.girth() < 4:
        raise MarkingError("LOG link is not a simple square-free graph",
                           {"invariant": "link girth >= 4", "girth": link.girth()})
    return link.as_complex()


def quadruple_edges(piece: Piece) -> list[tuple[str, str]]:
    quad = {signed(piece.src, "+"), signed(piece.src, "-"),
            signed(piece.dst, "+"), signed(piece.dst, "-")}
    return [(e.u, e.v) for e in vertex_link(piece.presentation).edges if e.u in quad and e.v in quad]


# --- gluing -------------------------------------------------------------------

@dataclass
class GluingCheck:
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_gluing_hypotheses(k1: SimplicialComplex, l1: SimplicialComplex,
                            k2: SimplicialComplex, phi: Mapping[str, str]) -> GluingCheck:
    """The three hypotheses of the gluing lemma, plus flagness of both sides."""
    out = GluingCheck()
    for name, k in (("K1", k1), ("K2", k2)):
        w = flag_witness(k)
        if w is not None:
            out.failures.append({"invariant": f"{name} is flag", "clique": list(w)})
    if not l1.vertices:
        out.failures.append({"invariant": "L1 non-empty"})
    w = fullness_witness(l1, k1)
    if w is not None:
        out.failures.append({"invariant": "L1 full in K1", "simplex": list(w)})
    images = [phi[v] for v in l1.vertices]
    if len(set(images)) != len(images):
        out.failures.append({"invariant": "phi injective"})
    for f in l1.maximal_faces:
        img = [phi[v] for v in f]
        if img not in k2:
            out.failures.append({"invariant": "phi simplicial", "simplex": sorted(img)})
            break
    image_edges = {frozenset(phi[v] for v in e) for e in l1.faces(1)}
    targets = set(images)
    for u, v in k2.faces(1):
        if u in targets and v in targets and frozenset((u, v)) not in image_edges:
            out.failures.append({"invariant": "phi(L1) 1-skeleton full in K2", "edge": [u, v]})
            break
    return out


def glue(k1: SimplicialComplex, l1: SimplicialComplex, k2: SimplicialComplex,
         phi: Mapping[str, str]) -> SimplicialComplex:
    """``K1`` and ``K2`` glued along ``phi: L1 -> K2``; glued vertices keep their ``K1`` names."""
    back = {phi[v]: v for v in l1.vertices}
    clash = (set(k2.vertices) - set(back)) & set(k1.vertices)
    if clash:
        raise ComplexError(f"labels {sorted(clash)} occur on both sides of the gluing")
    return k1.union(k2.relabel(back))


@dataclass
class PerturbedLink:
    marking: Marking
    complex: SimplicialComplex
    base: SimplicialComplex
    pieces: dict[Edge, SimplicialComplex]
    gluing_maps: dict[Edge, dict[str, str]]
    checks: dict[str, bool]

    def report(self) -> dict:
        return {"f_vector": self.complex.f_vector(), "flag": self.checks.get("flag", False),
                "checks": self.checks,
                "marked": [{"from": p, "to": q, "d": format_mark(self.marking.mark((p, q)))}
                           for p, q in self.pieces]}


def _require(cond: bool, message: str, witness: dict) -> None:
    if not cond:
        raise MarkingError(message, witness)


def assemble_perturbed_link(m: Marking, order: Iterable[Edge] | None = None) -> PerturbedLink:
    adm = check_admissible(m)
    _require(adm.ok, "marking is not admissible", adm.witness or {})
    F = tuple(order) if order is not None else tuple(sorted(m.support))
    g = m.graph
    K = flag_complex(g)
    K_minus = flag_complex(g.without_edges(F))
    base = sphere(K_minus)
    current = base
    checks: dict[str, bool] = {}
    pieces, maps = {}, {}
    for f in F:
        tag = f"{f[0]}-{f[1]}"
        lk = K.link(f)
        sigma = join(lk, discrete(f))
        s_sigma = sphere(sigma)
        w = fullness_witness(sigma, K_minus)
        _require(w is None, f"Sigma_f not full for {f}", {"invariant": "Sigma_f full", "simplex": w})
        piece = piece_for(m.mark(f))
        quad = quadruple_edges(piece)
        _require(not quad, f"receiving quadruple spans edges for {f}",
                 {"invariant": "quadruple independence", "edges": quad})
        checks[f"quadruple_independent[{tag}]"] = True
        names = {g_: log_name(g_, f) for g_ in piece.presentation.vertices}
        log_link = log_link_complex(piece.presentation).relabel(
            {signed(v, s): signed(names[v], s) for v in piece.presentation.vertices for s in "+-"})
        target = join(sphere(lk), log_link)
        phi = {v: v for v in s_sigma.vertices}
        for s in "+-":
            phi[signed(f[0], s)] = signed(names[piece.src], s)
            phi[signed(f[1], s)] = signed(names[piece.dst], s)
        hyp = check_gluing_hypotheses(current, s_sigma, target, phi)
        _require(hyp.ok, f"gluing hypotheses fail for {f}", hyp.failures[0] if hyp.failures else {})
        checks[f"gluing_hypotheses[{tag}]"] = True
        current = glue(current, s_sigma, target, phi)
        pieces[f] = target
        maps[f] = phi
    w = flag_witness(current)
    _require(w is None, "assembled link is not flag", {"invariant": "flag", "clique": w})
    checks["flag"] = True
    w = fullness_witness(base, current)
    checks["base_full"] = w is None
    return PerturbedLink(m, current, base, pieces, maps, checks)


def subdivided_graph(g: SimpleGraph, f: Edge, midpoint: str) -> SimpleGraph:
    """``Gamma'`` for a degree-one edge: ``f`` removed and ``midpoint`` joined to ``f`` and ``link(f)``."""
    lk = edge_link(g, f)
    rest = g.without_edges([f])
    new_edges = [(f[0], midpoint), (midpoint, f[1])] + [(x, midpoint) for x in sorted(lk)]
    return SimpleGraph(rest.vertices + (midpoint,), rest.edges + tuple(new_edges))


# --- Morse links ----------------------------------------------------------------

@dataclass
class PerturbedMorseLinks:
    descending: SimplicialComplex
    ascending: SimplicialComplex
    certificates: dict[tuple[Edge, str], CollapseCertificate]
    explicit_descending: SimplicialComplex
    explicit_ascending: SimplicialComplex
    trees: dict[tuple[Edge, str], SimplicialComplex] = field(default_factory=dict)

    def certificates_verified(self) -> bool:
        return all(c.verify(self.trees[key]) for key, c in self.certificates.items())

    def profiles(self, max_dim: int = 3) -> dict[str, HomologyProfile]:
        return {"desc": homology(self.descending, max_dim), "asc": homology(self.ascending, max_dim)}


def _signed_part(k: SimplicialComplex, sign: str) -> SimplicialComplex:
    return k.induced([v for v in k.vertices if v.endswith(sign)])


def _tree_complex(p: LogPresentation, sign: str) -> SimplicialComplex:
    link = vertex_link(p)
    corner = "desc" if sign == "+" else "asc"
    verts = [signed(v, sign) for v in p.vertices]
    return SimplicialComplex.from_faces([{v} for v in verts] +
                                        [{e.u, e.v} for e in link.edges if e.corner == corner], verts)


def explicit_morse_link(m: Marking, sign: str) -> SimplicialComplex:
    """``K_Gamma`` with each ``star(f)`` replaced by ``link(f) * T_f``, labelled by ``sign``."""
    K = flag_complex(m.graph)
    out = K
    for f in sorted(m.support):
        out = out.remove_open_star(f)
    out = out.relabel({v: signed(v, sign) for v in K.vertices})
    for f in sorted(m.support):
        piece = piece_for(m.mark(f))
        names = piece_names(piece, f)
        tree = _tree_complex(piece.presentation, sign).relabel(
            {signed(g, sign): signed(n, sign) for g, n in names.items()})
        lk = K.link(f).relabel({v: signed(v, sign) for v in K.link(f).vertices})
        out = out.union(join(lk, tree))
    return out


def perturbed_morse_links(m: Marking) -> PerturbedMorseLinks:
    pl = assemble_perturbed_link(m)
    desc = _signed_part(pl.complex, "+")
    asc = _signed_part(pl.complex, "-")
    certs, trees = {}, {}
    for f in sorted(m.support):
        piece = piece_for(m.mark(f))
        for sign in "+-":
            tree = trees[(f, sign)] = _tree_complex(piece.presentation, sign)
            certs[(f, sign)] = collapse_tree_to_path(tree, signed(piece.src, sign),
                                                     signed(piece.dst, sign))
    return PerturbedMorseLinks(desc, asc, certs, explicit_morse_link(m, "+"),
                               explicit_morse_link(m, "-"), trees)


# --- presentations ------------------------------------------------------------

def praag_presentation(m: Marking) -> tuple[list[str], list[Word]]:
    adm = check_admissible(m)
    _require(adm.ok, "marking is not admissible", adm.witness or {})
    g = m.graph
    F = tuple(sorted(m.support))
    gens = list(g.vertices)
    rels: list[Word] = []
    seen: set[Word] = set()

    def add(w: Word) -> None:
        if w not in seen:
            seen.add(w)
            rels.append(w)

    for p, q in g.without_edges(F).edges:
        add(commutator(p, q))
    for f in F:
        piece = piece_for(m.mark(f))
        names = piece_names(piece, f)
        gens += [names[v] for v in piece.presentation.vertices if names[v] not in gens]
        for r in piece.presentation.relators():
            add(r.rename(names))
        for x in sorted(edge_link(g, f)):
            for v in piece.presentation.vertices:
                add(commutator(x, names[v]))
    for r in rels:
        if r.exponent_sum() != 0:
            raise AssertionError(f"relator {r} has nonzero height")
    return gens, rels


def emit_praag_presentation(m: Marking) -> str:
    gens, rels = praag_presentation(m)
    return "\n".join(["generators: " + " ".join(gens)] + [str(r) for r in rels]) + "\n"


# --- presets ------------------------------------------------------------------

ORTHOPLEX_EDGE: Edge = ("a", "b")
ORTHOPLEX_CYCLE = ("x", "z", "y", "w")


def preset_orthoplex() -> tuple[SimpleGraph, Edge, tuple[str, ...]]:
    """The 1-orthoplex ``Delta``: an edge ``(a, b)`` coned over ``C`` and two points ``u, v``."""
    others = ("u", "v", "x", "y", "z", "w")
    verts = ("a", "b") + others
    edges = [ORTHOPLEX_EDGE]
    for p in others:
        edges += [(p, "a"), (p, "b")]
    c = ORTHOPLEX_CYCLE
    edges += [(c[i], c[(i + 1) % 4]) for i in range(4)]
    return SimpleGraph(verts, tuple(edges)), ORTHOPLEX_EDGE, ORTHOPLEX_CYCLE


def double_graph(g: SimpleGraph, shared: Iterable[str], suffix: str = "'") -> SimpleGraph:
    """Two copies of ``g`` glued along the full subgraph on ``shared``."""
    keep = set(shared)
    ren = {v: v if v in keep else v + suffix for v in g.vertices}
    verts = list(g.vertices) + [ren[v] for v in g.vertices if v not in keep]
    edges = list(g.edges) + [(ren[p], ren[q]) for p, q in g.edges if not (p in keep and q in keep)]
    return SimpleGraph(tuple(verts), tuple(edges))


def preset_double(d) -> tuple[SimpleGraph, Marking]:
    """``Sigma``: two orthoplexes glued along ``C``, both interior edges marked ``d > 1``."""
    d = parse_mark(d)
    if d <= 1:
        raise MarkingError(f"the double needs d > 1, got {format_mark(d)}",
                           {"invariant": "d > 1", "d": format_mark(d)})
    delta, e, c = preset_orthoplex()
    sigma = double_graph(delta, c)
    e2 = (e[0] + "'", e[1] + "'")
    return sigma, Marking(sigma, {e: d, e2: d})


def orthoplex_marking(d) -> Marking:
    delta, e, _ = preset_orthoplex()
    return Marking(delta, {e: parse_mark(d)})
