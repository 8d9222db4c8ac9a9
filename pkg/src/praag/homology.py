"""Integral simplicial homology and small topological certificates."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .complex_core import SimplicialComplex, ComplexError
from .words import Word

DEFAULT_SIMPLEX_LIMIT = 50_000


class DimensionOverflow(RuntimeError):
    pass


class CollapseError(ValueError):
    pass


def smith_diagonal(matrix: list[list[int]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix, in divisibility order.

    Pivots are chosen by smallest absolute value; arithmetic uses Python ints.
    """
    a = [list(row) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag: list[int] = []
    t = 0
    while t < min(rows, cols):
        pivot = None
        for i in range(t, rows):
            row = a[i]
            for j in range(t, cols):
                v = row[j]
                if v and (pivot is None or abs(v) < pivot[0]):
                    pivot = (abs(v), i, j)
                    if pivot[0] == 1:
                        break
            if pivot is not None and pivot[0] == 1:
                break
        if pivot is None:
            break
        _, i, j = pivot
        a[t], a[i] = a[i], a[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
        p = a[t][t]
        clean = True
        for i in range(t + 1, rows):
            ri = a[i]
            if ri[t]:
                q = ri[t] // p
                rt = a[t]
                for j in range(t, cols):
                    if rt[j]:
                        ri[j] -= q * rt[j]
                if ri[t]:
                    clean = False
        for j in range(t + 1, cols):
            if a[t][j]:
                q = a[t][j] // p
                for i in range(t, rows):
                    if a[i][t]:
                        a[i][j] -= q * a[i][t]
                if a[t][j]:
                    clean = False
        if not clean:
            continue  # a smaller remainder now exists; pick it as the next pivot
        bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p), None)
        if bad is not None:
            rt, rb = a[t], a[bad]
            for j in range(t, cols):
                rt[j] += rb[j]
            continue
        diag.append(abs(p))
        t += 1
    return diag


@dataclass(frozen=True)
class ChainComplex:
    """Simplicial chain complex; ``boundaries[k]`` maps k-chains to (k-1)-chains."""

    bases: tuple[tuple[tuple[str, ...], ...], ...]
    boundaries: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def of(cls, k: SimplicialComplex, limit: int = DEFAULT_SIMPLEX_LIMIT) -> "ChainComplex":
        f = k.f_vector()
        if sum(f) > limit:
            raise DimensionOverflow(f"complex has {sum(f)} simplices, limit is {limit}")
        bases = tuple(tuple(k.faces(d)) for d in range(len(f)))
        bounds = []
        for d, basis in enumerate(bases):
            if d == 0:
                bounds.append(())
                continue
            index = {s: i for i, s in enumerate(bases[d - 1])}
            mat = [[0] * len(basis) for _ in bases[d - 1]]
            for col, s in enumerate(basis):
                for pos in range(len(s)):
                    mat[index[s[:pos] + s[pos + 1:]]][col] = -1 if pos % 2 else 1
            bounds.append(tuple(tuple(row) for row in mat))
        return cls(bases, tuple(bounds))

    def boundary_squares_vanish(self) -> bool:
        for d in range(2, len(self.bases)):
            outer = np.array(self.boundaries[d - 1], dtype=np.int64)
            inner = np.array(self.boundaries[d], dtype=np.int64)
            if outer.size and inner.size and np.any(outer @ inner):
                return False
        return True


@dataclass(frozen=True)
class HomologyProfile:
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]
    euler: int
    f_vector: tuple[int, ...] = field(default=())

    @property
    def reduced_betti(self) -> tuple[int, ...]:
        if not self.betti or self.betti[0] == 0:
            return self.betti
        return (self.betti[0] - 1,) + self.betti[1:]

    def to_dict(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion],
                "euler": self.euler}


def homology(k: SimplicialComplex, max_dim: int | None = None,
             limit: int = DEFAULT_SIMPLEX_LIMIT) -> HomologyProfile:
    """Unreduced integral homology in dimensions ``0..max_dim``.

    Everything up to the dimension of ``k`` is computed so that the Euler
    characteristic check covers the whole complex; output is then truncated
    or zero-padded to ``max_dim``.
    """
    if max_dim is not None and max_dim < 0:
        raise ValueError("max_dim must be non-negative")
    chains = ChainComplex.of(k, limit)
    if not chains.boundary_squares_vanish():
        raise AssertionError("boundary of boundary is nonzero")
    top = len(chains.bases)
    invariants = [smith_diagonal([list(r) for r in chains.boundaries[d]]) if d else []
                  for d in range(top)] + [[]]
    betti, torsion = [], []
    for d in range(top):
        rank_here = len(invariants[d])
        rank_above = len(invariants[d + 1])
        betti.append(len(chains.bases[d]) - rank_here - rank_above)
        torsion.append(tuple(x for x in invariants[d + 1] if x > 1))
    f = tuple(len(b) for b in chains.bases)
    euler = sum((-1) ** d * n for d, n in enumerate(f))
    if euler != sum((-1) ** d * b for d, b in enumerate(betti)):
        raise AssertionError("Euler characteristic mismatch")
    if max_dim is not None:
        betti = (betti + [0] * (max_dim + 1))[: max_dim + 1]
        torsion = (torsion + [()] * (max_dim + 1))[: max_dim + 1]
    return HomologyProfile(tuple(betti), tuple(torsion), euler, f)


@dataclass(frozen=True)
class CollapseCertificate:
    """Elementary collapses ``(free_face, coface)`` applied in order."""

    steps: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    target: SimplicialComplex

    def replay(self, k: SimplicialComplex) -> SimplicialComplex:
        return replay_collapses(k, self.steps)

    def verify(self, k: SimplicialComplex) -> bool:
        try:
            return self.replay(k) == self.target
        except CollapseError:
            return False


def replay_collapses(k: SimplicialComplex, steps) -> SimplicialComplex:
    faces = {frozenset(s) for s in k.simplices()}
    verts = list(k.vertices)
    for free, coface in steps:
        free, coface = frozenset(free), frozenset(coface)
        if free not in faces or coface not in faces:
            raise CollapseError(f"step {sorted(free)} < {sorted(coface)} refers to missing faces")
        if not (free < coface and len(coface) == len(free) + 1):
            raise CollapseError(f"{sorted(coface)} is not a codimension-one coface of {sorted(free)}")
        cofaces = [g for g in faces if free < g]
        if cofaces != [coface]:
            raise CollapseError(f"{sorted(free)} is not free")
        faces -= {free, coface}
        if len(free) == 1:
            verts.remove(next(iter(free)))
    return SimplicialComplex(tuple(verts), frozenset(faces))


def tree_path(t: SimplicialComplex, a: str, b: str) -> list[str]:
    g = t.one_skeleton().to_networkx()
    return nx.shortest_path(g, a, b)


def _check_tree(t: SimplicialComplex) -> None:
    if t.dimension > 1:
        raise ComplexError("not a tree: has 2-simplices")
    g = t.one_skeleton().to_networkx()
    if not nx.is_tree(g):
        raise ComplexError("not a tree")


def collapse_tree_to_path(t: SimplicialComplex, a: str, b: str) -> CollapseCertificate:
    """Leaf deletions reducing the tree ``t`` onto its geodesic from ``a`` to ``b``."""
    _check_tree(t)
    for v in (a, b):
        if v not in t.vertices:
            raise ComplexError(f"{v} is not a vertex of the tree")
    path = tree_path(t, a, b)
    keep = set(path)
    adj = {v: set() for v in t.vertices}
    for u, v in t.faces(1):
        adj[u].add(v)
        adj[v].add(u)
    order = {v: i for i, v in enumerate(t.vertices)}
    steps = []
    while True:
        leaves = sorted((v for v in adj if v not in keep and len(adj[v]) == 1), key=order.get)
        if not leaves:
            break
        for leaf in leaves:
            (nbr,) = adj[leaf]
            edge = tuple(sorted((leaf, nbr), key=order.get))
            steps.append(((leaf,), edge))
            adj[nbr].discard(leaf)
            del adj[leaf]
    target = SimplicialComplex(tuple(v for v in t.vertices if v in keep),
                               frozenset(frozenset(e) for e in zip(path, path[1:])))
    cert = CollapseCertificate(tuple(steps), target)
    if not cert.verify(t):
        raise CollapseError("collapse certificate failed to replay")
    return cert


class Pi1Result(enum.Enum):
    PROVEN_TRIVIAL = "proven_trivial"
    UNKNOWN = "unknown"


def edge_path_presentation(k: SimplicialComplex) -> tuple[list[str], list[Word]]:
    """Generators and relators of the edge-path group relative to a BFS spanning tree."""
    g = k.one_skeleton().to_networkx()
    if not nx.is_connected(g):
        raise ComplexError("complex is not connected")
    root = k.vertices[0]
    tree = {frozenset(e) for e in nx.bfs_edges(g, root)}
    gens = {}
    for u, v in k.faces(1):
        if frozenset((u, v)) not in tree:
            gens[(u, v)] = f"g{len(gens)}"

    def letter(u: str, v: str) -> list[tuple[str, int]]:
        if (u, v) in gens:
            return [(gens[(u, v)], 1)]
        if (v, u) in gens:
            return [(gens[(v, u)], -1)]
        return []

    relators = []
    for u, v, w in k.faces(2):
        r = Word(letter(u, v) + letter(v, w) + letter(w, u)).cyclically_reduced()
        if r:
            relators.append(r)
    return list(gens.values()), relators


def _eliminate_once(gens: list[str], rels: list[Word]) -> bool:
    """One Tietze pass: drop trivial relators, then eliminate one generator."""
    rels[:] = [r for r in (r.cyclically_reduced() for r in rels) if r]
    best = None
    for ri, r in enumerate(rels):
        counts: dict[str, int] = {}
        for g, _ in r:
            counts[g] = counts.get(g, 0) + 1
        for g, c in counts.items():
            if c == 1 and (best is None or len(r) < best[0]):
                best = (len(r), ri, g)
    if best is None:
        return False
    _, ri, g = best
    r = rels.pop(ri)
    pos = next(i for i, (h, _) in enumerate(r) if h == g)
    exp = r[pos][1]
    # r = A g^e B = 1  =>  g^e = A^-1 B^-1
    rest = Word(r[:pos]).inverse() + Word(r[pos + 1:]).inverse()
    value = rest if exp == 1 else rest.inverse()
    rels[:] = [w.substitute({g: value}).cyclically_reduced() for w in rels]
    gens.remove(g)
    return True


def bounded_pi1_trivial(k: SimplicialComplex, budget: int = 10_000) -> Pi1Result:
    """Try to show ``k`` is simply connected by Tietze moves on its edge-path group.

    Returns ``UNKNOWN`` whenever the bounded search does not kill every
    generator; first-homology obstructions short-circuit to ``UNKNOWN``.
    """
    h = homology(k, 1)
    if h.betti[0] != 1 or h.betti[1] > 0 or h.torsion[1]:
        return Pi1Result.UNKNOWN
    gens, rels = edge_path_presentation(k)
    for _ in range(budget):
        if not gens:
            return Pi1Result.PROVEN_TRIVIAL
        if not _eliminate_once(gens, rels):
            break
    return Pi1Result.PROVEN_TRIVIAL if not gens else Pi1Result.UNKNOWN
