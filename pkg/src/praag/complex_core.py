"""Finite graphs and simplicial complexes.

Complexes are stored by their maximal faces; every query that needs the
full face poset derives it on demand.  Vertex labels are strings, and the
sphere construction names the doubled vertices ``"v+"`` and ``"v-"``.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import networkx as nx


class ComplexError(ValueError):
    """Raised when a graph or complex violates its structural invariants."""


class SignedVertex(NamedTuple):
    base: str
    sign: str

    def __str__(self) -> str:
        return f"{self.base}{self.sign}"

    @classmethod
    def parse(cls, label: str) -> "SignedVertex":
        if not label or label[-1] not in "+-":
            raise ComplexError(f"not a signed vertex label: {label!r}")
        return cls(label[:-1], label[-1])


def signed(base: str, sign: str) -> str:
    if sign not in ("+", "-"):
        raise ComplexError(f"sign must be '+' or '-', got {sign!r}")
    return f"{base}{sign}"


@dataclass(frozen=True)
class SimpleGraph:
    """A finite simple graph whose edges remember an orientation.

    ``edges`` holds ``(tail, head)`` pairs; two edges on the same unordered
    pair are parallel and rejected, as are loops.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise ComplexError("duplicate vertex labels")
        known = set(self.vertices)
        seen: set[frozenset[str]] = set()
        for tail, head in self.edges:
            if tail not in known or head not in known:
                raise ComplexError(f"edge ({tail}, {head}) uses an undeclared vertex")
            if tail == head:
                raise ComplexError(f"loop at {tail}")
            key = frozenset((tail, head))
            if key in seen:
                raise ComplexError(f"parallel edge on {{{tail}, {head}}}")
            seen.add(key)

    @property
    def edge_set(self) -> frozenset[frozenset[str]]:
        return frozenset(frozenset(e) for e in self.edges)

    def has_edge(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.edge_set

    def neighbors(self, v: str) -> set[str]:
        out = set()
        for tail, head in self.edges:
            if tail == v:
                out.add(head)
            elif head == v:
                out.add(tail)
        return out

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def without_edges(self, removed: Iterable[Iterable[str]]) -> "SimpleGraph":
        drop = {frozenset(e) for e in removed}
        return SimpleGraph(self.vertices, tuple(e for e in self.edges if frozenset(e) not in drop))

    def relabel(self, mapping: Mapping[str, str]) -> "SimpleGraph":
        m = lambda v: mapping.get(v, v)  # noqa: E731
        return SimpleGraph(tuple(m(v) for v in self.vertices),
                           tuple((m(a), m(b)) for a, b in self.edges))

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [{"from": a, "to": b} for a, b in self.edges]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SimpleGraph":
        return cls(tuple(data["vertices"]), tuple((e["from"], e["to"]) for e in data["edges"]))


def _maximal(faces: Iterable[frozenset[str]]) -> frozenset[frozenset[str]]:
    # Largest first so that a face only needs checking against bigger ones.
    ordered = sorted(set(faces), key=len, reverse=True)
    kept: list[frozenset[str]] = []
    for f in ordered:
        if not any(f <= g for g in kept if len(g) > len(f)):
            kept.append(f)
    return frozenset(kept)


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """A finite abstract simplicial complex given by its maximal faces."""

    vertices: tuple[str, ...]
    maximal_faces: frozenset[frozenset[str]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise ComplexError("duplicate vertex labels")
        known = set(verts)
        faces = [frozenset(f) for f in self.maximal_faces]
        for f in faces:
            if not f:
                continue
            if not f <= known:
                raise ComplexError(f"face {sorted(f)} uses undeclared vertices")
        used = set().union(*faces) if faces else set()
        faces += [frozenset([v]) for v in verts if v not in used]
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "maximal_faces", _maximal(f for f in faces if f))

    @classmethod
    def from_faces(cls, faces: Iterable[Iterable[str]], vertices: Iterable[str] | None = None
                   ) -> "SimplicialComplex":
        faces = [frozenset(f) for f in faces]
        if vertices is None:
            seen: dict[str, None] = {}
            for f in faces:
                for v in sorted(f):
                    seen.setdefault(v)
            vertices = tuple(seen)
        return cls(tuple(vertices), frozenset(faces))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and self.maximal_faces == other.maximal_faces

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.maximal_faces))

    def __contains__(self, simplex: Iterable[str]) -> bool:
        s = frozenset(simplex)
        if not s:
            return True
        return any(s <= f for f in self.maximal_faces)

    @property
    def dimension(self) -> int:
        return max((len(f) - 1 for f in self.maximal_faces), default=-1)

    def _order(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def faces(self, dim: int) -> list[tuple[str, ...]]:
        """All ``dim``-simplices as vertex tuples sorted by vertex order."""
        order = self._order()
        out: set[tuple[str, ...]] = set()
        for f in self.maximal_faces:
            if len(f) < dim + 1:
                continue
            ordered = sorted(f, key=order.__getitem__)
            out.update(itertools.combinations(ordered, dim + 1))
        return sorted(out, key=lambda s: [order[v] for v in s])

    def f_vector(self) -> list[int]:
        return [len(self.faces(k)) for k in range(self.dimension + 1)]

    def simplices(self) -> list[tuple[str, ...]]:
        return [s for k in range(self.dimension + 1) for s in self.faces(k)]

    def one_skeleton(self) -> SimpleGraph:
        return SimpleGraph(self.vertices, tuple(self.faces(1)))

    def induced(self, verts: Iterable[str]) -> "SimplicialComplex":
        """Full subcomplex spanned by ``verts``."""
        keep = set(verts)
        unknown = keep - set(self.vertices)
        if unknown:
            raise ComplexError(f"unknown vertices {sorted(unknown)}")
        return SimplicialComplex(tuple(v for v in self.vertices if v in keep),
                                 frozenset(f & keep for f in self.maximal_faces))

    def link(self, simplex: Iterable[str]) -> "SimplicialComplex":
        s = frozenset(simplex)
        faces = [f - s for f in self.maximal_faces if s <= f]
        verts = set().union(*faces) if faces else set()
        return SimplicialComplex(tuple(v for v in self.vertices if v in verts),
                                 frozenset(f for f in faces if f))

    def closed_star(self, simplex: Iterable[str]) -> "SimplicialComplex":
        s = frozenset(simplex)
        faces = [f for f in self.maximal_faces if s <= f]
        verts = set().union(*faces) if faces else set()
        return SimplicialComplex(tuple(v for v in self.vertices if v in verts), frozenset(faces))

    def remove_open_star(self, simplex: Iterable[str]) -> "SimplicialComplex":
        """Delete every simplex containing ``simplex``.

        Other vertices stay, even if isolated; a 0-simplex takes its vertex with it.
        """
        s = frozenset(simplex)
        faces: set[frozenset[str]] = set()
        for f in self.maximal_faces:
            if s <= f:
                faces.update(f - {v} for v in s)
            else:
                faces.add(f)
        verts = tuple(v for v in self.vertices if len(s) != 1 or v not in s)
        return SimplicialComplex(verts, frozenset(x for x in faces if x and not s <= x))

    def relabel(self, mapping: Mapping[str, str]) -> "SimplicialComplex":
        m = lambda v: mapping.get(v, v)  # noqa: E731
        new = tuple(m(v) for v in self.vertices)
        if len(set(new)) != len(new):
            raise ComplexError("relabeling is not injective")
        return SimplicialComplex(new, frozenset(frozenset(m(v) for v in f) for f in self.maximal_faces))

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        verts = list(self.vertices) + [v for v in other.vertices if v not in set(self.vertices)]
        return SimplicialComplex(tuple(verts), self.maximal_faces | other.maximal_faces)

    def is_flag(self) -> bool:
        return flag_witness(self) is None

    def to_dict(self) -> dict:
        order = self._order()
        faces = sorted((sorted(f, key=order.__getitem__) for f in self.maximal_faces),
                       key=lambda f: (len(f), [order[v] for v in f]))
        return {"vertices": list(self.vertices), "maximal_faces": faces}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SimplicialComplex":
        return cls(tuple(data["vertices"]), frozenset(frozenset(f) for f in data["maximal_faces"]))


def flag_complex(g: SimpleGraph) -> SimplicialComplex:
    """Clique complex of ``g``."""
    cliques = nx.find_cliques(g.to_networkx()) if g.vertices else []
    return SimplicialComplex(g.vertices, frozenset(frozenset(c) for c in cliques))


def flag_witness(k: SimplicialComplex) -> tuple[str, ...] | None:
    """A clique of the 1-skeleton that is not a simplex, or None if ``k`` is flag."""
    g = k.one_skeleton().to_networkx()
    order = k._order()
    for clique in nx.find_cliques(g):
        if clique not in k:
            return tuple(sorted(clique, key=order.__getitem__))
    return None


def is_full(sub: SimplicialComplex, ambient: SimplicialComplex) -> bool:
    unknown = set(sub.vertices) - set(ambient.vertices)
    if unknown:
        raise ComplexError(f"subcomplex uses unknown vertices {sorted(unknown)}")
    keep = set(sub.vertices)
    return all((f & keep) in sub for f in ambient.maximal_faces if f & keep)


def fullness_witness(sub: SimplicialComplex, ambient: SimplicialComplex) -> tuple[str, ...] | None:
    keep = set(sub.vertices)
    order = ambient._order()
    for f in ambient.maximal_faces:
        s = f & keep
        if s and s not in sub:
            return tuple(sorted(s, key=order.__getitem__))
    return None


def sphere(k: SimplicialComplex) -> SimplicialComplex:
    """Double every vertex into ``v+``/``v-``; each partition of a simplex spans one."""
    verts = tuple(signed(v, s) for v in k.vertices for s in "+-")
    faces = set()
    for f in k.maximal_faces:
        ordered = sorted(f)
        for signs in itertools.product("+-", repeat=len(ordered)):
            faces.add(frozenset(signed(v, s) for v, s in zip(ordered, signs)))
    return SimplicialComplex(verts, frozenset(faces))


def inclusion(k: SimplicialComplex, positive: Iterable[str]) -> dict[str, str]:
    """The embedding of ``k`` into ``sphere(k)`` sending ``positive`` up and the rest down."""
    pos = set(positive)
    unknown = pos - set(k.vertices)
    if unknown:
        raise ComplexError(f"unknown vertices {sorted(unknown)}")
    return {v: signed(v, "+" if v in pos else "-") for v in k.vertices}


def projection(k: SimplicialComplex) -> dict[str, str]:
    return {signed(v, s): v for v in k.vertices for s in "+-"}


def fold(k: SimplicialComplex, positive: Iterable[str]) -> dict[str, str]:
    """Vertex map of the retraction of ``sphere(k)`` onto the copy of ``k`` picked by ``positive``."""
    iota = inclusion(k, positive)
    return {sv: iota[v] for sv, v in projection(k).items()}


def image(k: SimplicialComplex, vertex_map: Mapping[str, str]) -> SimplicialComplex:
    faces = frozenset(frozenset(vertex_map[v] for v in f) for f in k.maximal_faces)
    seen: dict[str, None] = {}
    for v in k.vertices:
        seen.setdefault(vertex_map[v])
    return SimplicialComplex(tuple(seen), faces)


def is_simplicial(vertex_map: Mapping[str, str], source: SimplicialComplex,
                  target: SimplicialComplex) -> bool:
    return all(frozenset(vertex_map[v] for v in f) in target for f in source.maximal_faces)


def compose(outer: Mapping[str, str], inner: Mapping[str, str]) -> dict[str, str]:
    return {v: outer[w] for v, w in inner.items()}


def join(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    clash = set(a.vertices) & set(b.vertices)
    if clash:
        raise ComplexError(f"join operands share labels {sorted(clash)}")
    if not a.vertices:
        return b
    if not b.vertices:
        return a
    faces = frozenset(f | g for f in a.maximal_faces for g in b.maximal_faces)
    return SimplicialComplex(a.vertices + b.vertices, faces)


def point(label: str) -> SimplicialComplex:
    return SimplicialComplex((label,))


def discrete(labels: Iterable[str]) -> SimplicialComplex:
    return SimplicialComplex(tuple(labels))


def girth(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> float:
    """Length of a shortest cycle in a multigraph; ``math.inf`` for forests.

    Loops count as cycles of length 1 and a repeated pair as a 2-cycle.
    """
    verts = list(vertices)
    adj: dict[str, list[tuple[str, int]]] = {v: [] for v in verts}
    pair_count: dict[frozenset[str], int] = {}
    for idx, (u, v) in enumerate(edges):
        if u == v:
            return 1
        key = frozenset((u, v))
        pair_count[key] = pair_count.get(key, 0) + 1
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    if any(c > 1 for c in pair_count.values()):
        return 2
    best = float("inf")
    for root in verts:
        dist = {root: 0}
        via = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y, idx in adj[x]:
                if idx == via[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    via[y] = idx
                    queue.append(y)
    return best


def graph_girth(g: SimpleGraph) -> float:
    return girth(g.vertices, g.edges)


def load_graph(path: str | Path) -> SimpleGraph:
    return SimpleGraph.from_dict(json.loads(Path(path).read_text()))


def load_complex(path: str | Path) -> SimplicialComplex:
    return SimplicialComplex.from_dict(json.loads(Path(path).read_text()))
