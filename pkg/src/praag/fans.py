"""Fan diagrams between monotone words, rim tables, and the pushing map.

A fan is built top-down (descending) or bottom-up (ascending) from its apex.
Layer ``m`` is the bottom row of height-1 fans in the sub-fan spanned by the
last ``m`` letters, so ``|erim(Fan(u_m, v_m))|`` is the size of layer ``m``.
Layers are stored as numpy arrays of cell codes; words are only materialized
on request.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import networkx as nx
import numpy as np

from .complex_core import SimpleGraph, signed
from .log_engine import LogPresentation, vertex_link
from .words import Word, prefixes

DESCENDING = "descending"
ASCENDING = "ascending"


class FanError(ValueError):
    pass


def _direction(direction: str) -> str:
    if direction in ("descending", "desc", "+"):
        return DESCENDING
    if direction in ("ascending", "asc", "-"):
        return ASCENDING
    raise FanError(f"unknown direction {direction!r}")


class FanEngine:
    """Height-1 fan tables for one LOG and one direction.

    For each ordered pair ``(x, y)`` of generators the height-1 fan is read
    off the unique path from ``x`` to ``y`` in the descending (or ascending)
    link.  A cell is recorded as ``(first, second, square, sign)``; its vertex
    rim is ``first^-1 second`` when descending and ``first second^-1`` when
    ascending, and its edge rim is ``x_square^sign``.
    """

    def __init__(self, p: LogPresentation, direction: str = DESCENDING):
        self.presentation = p
        self.direction = _direction(direction)
        self.index = {v: i for i, v in enumerate(p.vertices)}
        V = len(p.vertices)
        corner = "desc" if self.direction == DESCENDING else "asc"
        mark = "+" if self.direction == DESCENDING else "-"
        link = vertex_link(p)
        g = nx.MultiGraph()
        g.add_nodes_from(signed(v, mark) for v in p.vertices)
        for e in link.edges:
            if e.corner == corner:
                g.add_edge(e.u, e.v, square=e.square)
        if not (nx.is_connected(g) and g.number_of_edges() == V - 1):
            raise FanError(f"{self.direction} link is not a tree; fans are undefined")
        self._graph = g
        cells: list[list[tuple[int, int, int, int]]] = []
        for x in p.vertices:
            for y in p.vertices:
                cells.append(self._height_one(x, y, mark) if x != y else [])
        lens = np.array([len(c) for c in cells], dtype=np.int64)
        self.lengths = lens
        self.starts = np.concatenate(([0], np.cumsum(lens)[:-1])).astype(np.int64)
        flat = [cell for block in cells for cell in block] or [(0, 0, 0, 0)]
        arr = np.array(flat, dtype=np.int64)
        self.first, self.second, self.square, self.sign = (arr[:, k].copy() for k in range(4))
        self.num_vertices = V

    def _height_one(self, x: str, y: str, mark: str) -> list[tuple[int, int, int, int]]:
        p = self.presentation
        path = nx.shortest_path(self._graph, signed(x, mark), signed(y, mark))
        out = []
        desc = self.direction == DESCENDING
        for a, b in zip(path, path[1:]):
            (data,) = self._graph.get_edge_data(a, b).values()
            k = data["square"]
            e = p.edges[k]
            partner = e.tail if desc else e.head
            lam = e.label
            if a[:-1] == lam:
                first, second, sign = partner, lam, (1 if desc else -1)
            else:
                first, second, sign = lam, partner, (-1 if desc else 1)
            out.append((self.index[first], self.index[second], k, sign))
        return out

    def height_one_length(self, x: str, y: str) -> int:
        return int(self.lengths[self.index[x] * self.num_vertices + self.index[y]])

    def max_height_one_length(self) -> int:
        return int(self.lengths.max()) if self.lengths.size else 0

    def layers(self, g: list[int], h: list[int]) -> Iterator[np.ndarray]:
        """Yield cell-index arrays for layers ``1..n`` of ``Fan(g, h)``.

        ``g`` and ``h`` are generator indices ordered from the far end to the apex.
        """
        n = len(g)
        V = self.num_vertices
        cells = np.empty(0, dtype=np.int64)
        for m in range(1, n + 1):
            k = n - m
            if cells.size:
                left = np.concatenate(([g[k]], self.second[cells]))
                right = np.concatenate((self.first[cells], [h[k]]))
            else:
                left = np.array([g[k]], dtype=np.int64)
                right = np.array([h[k]], dtype=np.int64)
            pid = left * V + right
            lens = self.lengths[pid]
            total = int(lens.sum())
            if total:
                offsets = np.cumsum(lens) - lens
                cells = np.repeat(self.starts[pid] - offsets, lens) + np.arange(total, dtype=np.int64)
            else:
                cells = np.empty(0, dtype=np.int64)
            yield cells

    def layer_sizes(self, g: list[int], h: list[int]) -> list[int]:
        return [int(c.size) for c in self.layers(g, h)]

    def cells_to_words(self, cells: np.ndarray) -> tuple[Word, Word]:
        names = self.presentation.vertices
        desc = self.direction == DESCENDING
        v_letters: list[tuple[str, int]] = []
        e_letters: list[tuple[str, int]] = []
        for c in cells.tolist():
            f, s = names[self.first[c]], names[self.second[c]]
            if desc:
                v_letters += [(f, -1), (s, 1)]
            else:
                v_letters += [(f, 1), (s, -1)]
            e_letters.append((f"x{self.square[c]}", int(self.sign[c])))
        return Word(v_letters), Word(e_letters)


@lru_cache(maxsize=64)
def engine(p: LogPresentation, direction: str = DESCENDING) -> FanEngine:
    return FanEngine(p, _direction(direction))


@dataclass(frozen=True, eq=False)
class Fan:
    u: Word
    v: Word
    direction: str
    layer_sizes: tuple[int, ...]
    bottom: np.ndarray
    _engine: FanEngine

    @property
    def height(self) -> int:
        return len(self.u)

    @property
    def area(self) -> int:
        return sum(self.layer_sizes)

    @property
    def erim_length(self) -> int:
        return self.layer_sizes[-1] if self.layer_sizes else 0

    @property
    def vrim(self) -> Word:
        return self._engine.cells_to_words(self.bottom)[0]

    @property
    def erim(self) -> Word:
        return self._engine.cells_to_words(self.bottom)[1]

    def cells(self) -> list[tuple[str, str, int, int]]:
        e = self._engine
        names = e.presentation.vertices
        return [(names[e.first[c]], names[e.second[c]], int(e.square[c]), int(e.sign[c]))
                for c in self.bottom.tolist()]

    def stats(self) -> dict:
        return {"height": self.height, "direction": self.direction, "area": self.area,
                "erim_length": self.erim_length, "vrim_length": 2 * self.erim_length,
                "layer_sizes": list(self.layer_sizes)}


def _letters(p: LogPresentation, w: Word, direction: str) -> list[str]:
    want = 1 if direction == DESCENDING else -1
    for g, e in w:
        if g not in p.vertices:
            raise FanError(f"unknown generator {g}")
        if e != want:
            raise FanError(f"{direction} fans need {'positive' if want == 1 else 'negative'} words")
    return [g for g, _ in w]


def build_fan(p: LogPresentation, u: Word, v: Word, direction: str = DESCENDING) -> Fan:
    """The fan between ``u`` and ``v``; both words end at the apex.

    Descending fans take positive words, ascending fans negative ones.
    """
    direction = _direction(direction)
    if len(u) != len(v):
        raise FanError(f"words have unequal lengths {len(u)} and {len(v)}")
    eng = engine(p, direction)
    g = [eng.index[x] for x in _letters(p, u, direction)]
    h = [eng.index[x] for x in _letters(p, v, direction)]
    sizes, last = [], np.empty(0, dtype=np.int64)
    for cells in eng.layers(g, h):
        sizes.append(int(cells.size))
        last = cells
    return Fan(Word(u), Word(v), direction, tuple(sizes), last, eng)


def power_word(gen: str, n: int, direction: str = DESCENDING) -> Word:
    sign = 1 if _direction(direction) == DESCENDING else -1
    return Word([(gen, sign)] * n)


def fan_of_powers(p: LogPresentation, a: str, b: str, n: int, direction: str = DESCENDING) -> Fan:
    return build_fan(p, power_word(a, n, direction), power_word(b, n, direction), direction)


def rim_sequence(p: LogPresentation, a: str, b: str, max_n: int,
                 direction: str = DESCENDING) -> list[int]:
    """``[|erim(Fan(a^n, b^n))| for n in 0..max_n]`` from a single construction."""
    if max_n <= 0:
        return [0]
    return [0] + list(fan_of_powers(p, a, b, max_n, direction).layer_sizes)


def area_sequence(p: LogPresentation, a: str, b: str, max_n: int,
                  direction: str = DESCENDING) -> list[int]:
    """``[area(Fan(a^n, b^n)) for n in 0..max_n]``; areas are prefix sums of rim lengths."""
    rims = rim_sequence(p, a, b, max_n, direction)
    return list(np.cumsum(np.array(rims, dtype=object)))


@dataclass(frozen=True)
class FanAudit:
    vrim_reduced: bool
    erim_reduced: bool
    rim_ratio: bool
    levels_injective: bool

    @property
    def ok(self) -> bool:
        return self.vrim_reduced and self.erim_reduced and self.rim_ratio and self.levels_injective


def audit_fan(fan: Fan) -> FanAudit:
    """Reduced rims, ``|vrim| = 2|erim|`` and level injectivity for every sub-fan.

    The vertices of a sub-fan's bottom row at one height are the base point
    times successive prefixes of that sub-fan's edge rim, an element of the
    free kernel; they are distinct exactly when no reduced prefix repeats.
    """
    eng = fan._engine
    g = [eng.index[x] for x, _ in fan.u]
    h = [eng.index[x] for x, _ in fan.v]
    vr = er = ratio = inj = True
    for cells in eng.layers(g, h):
        vrim, erim = eng.cells_to_words(cells)
        vr &= vrim.is_reduced()
        er &= erim.is_reduced()
        ratio &= len(vrim) == 2 * len(erim)
        seen = list(prefixes(erim))
        inj &= len(set(seen)) == len(seen)
    return FanAudit(vr, er, ratio, inj)


# --- the polynomial family -------------------------------------------------

def closed_form_f(i: int, j: int, n: int) -> int:
    if not 0 <= i < j:
        raise ValueError("need 0 <= i < j")
    if n < 0:
        raise ValueError("need n >= 0")
    if n == 0:
        return 0
    return sum(math.comb(n + k - 1, n - 1) for k in range(i + 1, j + 1))


class TableMismatch(AssertionError):
    pass


def recursion_table(d: int, max_n: int) -> dict[tuple[int, int], list[int]]:
    """``f_{i,j}(n)`` from the recursion ``f_{i,j}(n) = f_{i,j-1}(n) + f_{0,j}(n-1) + 1``."""
    f = {(i, j): [0] * (max_n + 1) for i in range(d + 1) for j in range(d + 1)}
    for n in range(1, max_n + 1):
        for j in range(1, d + 1):
            for i in range(j):
                f[(i, j)][n] = f[(i, j - 1)][n] + f[(0, j)][n - 1] + 1
    return {(i, j): f[(i, j)] for i in range(d + 1) for j in range(i + 1, d + 1)}


def constructed_table(p: LogPresentation, pairs, max_n: int,
                      direction: str = DESCENDING) -> dict:
    return {(x, y): rim_sequence(p, x, y, max_n, direction) for x, y in pairs}


def rim_table_poly(d: int, max_n: int) -> dict[tuple[int, int], list[int]]:
    """Descending rim lengths ``f_{i,j}(0..max_n)`` for the degree-``d`` preset.

    Built by explicit fan construction and checked against the recursion;
    any disagreement raises :class:`TableMismatch`.
    """
    from .log_engine import preset_poly
    if d < 1 or max_n < 0:
        raise ValueError("need d >= 1 and max_n >= 0")
    p = preset_poly(d)
    built = {(i, j): rim_sequence(p, f"a{i}", f"a{j}", max_n)
             for i in range(d + 1) for j in range(i + 1, d + 1)}
    rec = recursion_table(d, max_n)
    for key, row in built.items():
        if row != rec[key]:
            n = next(k for k, (a, b) in enumerate(zip(row, rec[key])) if a != b)
            raise TableMismatch(f"f_{key}({n}): construction {row[n]} vs recursion {rec[key][n]}")
    return built


@dataclass
class AscendingTable:
    d: int
    max_n: int
    values: dict[tuple[str, str], list[int]]
    recursion2: list[dict]

    def f(self, x: str, y: str, n: int) -> int:
        return self.values[(x, y)][n]


def _asc_name(x) -> str:
    return "s" if x == "s" else f"a{x}"


def rim_table_ascending(d: int, max_n: int) -> AscendingTable:
    """Ascending rim lengths for every ordered pair of distinct generators of the preset.

    Asserts the first-order recursions (``f_s,i = n + f_0,i`` and
    ``f_0,i+1(n) = 1 + f_i,i+1(n-1)``) with the base values.  The two-term
    recursion for ``f_i,k`` is only compared; mismatches land in ``recursion2``.
    """
    from .log_engine import preset_poly
    p = preset_poly(d)
    gens = p.vertices
    vals = {(x, y): rim_sequence(p, x, y, max_n, ASCENDING) for x in gens for y in gens if x != y}
    f = lambda x, y, n: vals[(_asc_name(x), _asc_name(y))][n]  # noqa: E731
    problems = []
    for n in range(1, max_n + 1):
        if f("s", 0, n) != n:
            problems.append(f"f_s,0({n}) = {f('s', 0, n)}")
        if f(0, 1, n) != n:
            problems.append(f"f_0,1({n}) = {f(0, 1, n)}")
        for i in range(1, d + 1):
            if f("s", i, n) != n + f(0, i, n):
                problems.append(f"f_s,{i}({n}) = {f('s', i, n)}")
        for i in range(d):
            if n >= 1 and f(0, i + 1, n) != 1 + f(i, i + 1, n - 1):
                problems.append(f"f_0,{i + 1}({n}) = {f(0, i + 1, n)}")
    if max_n >= 1:
        for i in range(1, d + 1):
            for k in range(1, d + 1):
                if i != k and f(i, k, 1) != 2:
                    problems.append(f"f_{i},{k}(1) = {f(i, k, 1)}")
    if problems:
        raise TableMismatch("; ".join(problems[:5]))
    rec2 = []
    for i in range(1, d + 1):
        for k in range(i + 1, d + 1):
            for n in range(2, max_n + 1):
                want = 2 + f(i - 1, i, n - 1) + f(k - 1, k, n - 1)
                got = f(i, k, n)
                if got != want:
                    rec2.append({"i": i, "k": k, "n": n, "constructed": got, "recursion": want})
    return AscendingTable(d, max_n, vals, rec2)


def finite_difference_degree(values) -> int | None:
    """Smallest ``k`` such that the ``(k+1)``-th difference vanishes; ``None`` if none does."""
    diff = [int(v) for v in values]
    for k in range(len(diff)):
        if all(x == 0 for x in diff):
            return k - 1
        if len(diff) < 2:
            return None
        diff = [b - a for a, b in zip(diff, diff[1:])]
    return None


# --- exponential growth ------------------------------------------------------

@dataclass(frozen=True)
class GrowthReport:
    rims: tuple[int, ...]
    areas: tuple[int, ...]
    base: float
    r_squared: float
    window: tuple[int, int]
    C: int
    rim_bound_ok: bool
    area_bound_ok: bool
    monotone: bool

    def to_dict(self) -> dict:
        return {"rims": list(self.rims), "areas": list(self.areas), "base": self.base,
                "r_squared": self.r_squared, "window": list(self.window), "C": self.C,
                "rim_bound_ok": self.rim_bound_ok, "area_bound_ok": self.area_bound_ok,
                "monotone": self.monotone}


def log_linear_fit(ns, values) -> tuple[float, float]:
    """Slope of ``log(values)`` against ``ns`` and the coefficient of determination."""
    x = np.asarray(ns, dtype=float)
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), max(0.0, min(1.0, r2))


def measure_exp_growth(p: LogPresentation, src: str, dst: str, max_n: int) -> GrowthReport:
    if max_n < 4:
        raise ValueError("max_n must be at least 4")
    rims = rim_sequence(p, src, dst, max_n)[1:]
    if any(b < a for a, b in zip(rims, rims[1:])):
        raise FanError(f"rim sequence is not monotone: {rims}")
    areas = list(np.cumsum(np.array(rims, dtype=object)))
    lo = max_n // 2
    ns = list(range(lo, max_n + 1))
    slope, r2 = log_linear_fit(ns, rims[lo - 1:])
    C = engine(p, DESCENDING).max_height_one_length()
    rim_ok = all(r <= C ** n for n, r in enumerate(rims, start=1))
    area_ok = all(a <= C ** (n + 1) for n, a in enumerate(areas, start=1))
    return GrowthReport(tuple(rims), tuple(int(a) for a in areas), math.exp(slope), r2,
                        (lo, max_n), C, rim_ok, area_ok, True)


# --- pushing -----------------------------------------------------------------

def _composite(a: str, b: str) -> str:
    return f"{a}_{b}"


def push_edge(context: LogPresentation | SimpleGraph, a: str, b: str, H: int) -> Word:
    """Level-0 image of the link 1-cell joining ``a`` and ``b`` at height ``H``.

    With a graph context the pair must be an edge and commutes, so the image
    is ``|H|`` copies of the composite letter ``a_b`` (meaning ``a b^-1``),
    inverted below level 0.  With a LOG context it is the edge rim of
    ``Fan(a^|H|, b^|H|)``, descending for ``H > 0`` and ascending for ``H < 0``.
    """
    if isinstance(context, SimpleGraph):
        if not context.has_edge(a, b):
            raise FanError(f"{a} and {b} are not adjacent")
        return Word([(_composite(a, b), 1 if H > 0 else -1)] * abs(H))
    if a not in context.vertices or b not in context.vertices:
        raise FanError(f"{a} and {b} are not both generators of the LOG")
    if a == b:
        raise FanError("a link 1-cell needs two distinct generators")
    if H == 0:
        return Word()
    direction = DESCENDING if H > 0 else ASCENDING
    return fan_of_powers(context, a, b, abs(H), direction).erim


def pushed_cell_area(context: LogPresentation | SimpleGraph, a: str, b: str, H: int) -> int:
    """Area of the level-0 image of a link 2-cell whose perturbed edge is ``(a, b)``.

    A commuting triple projects a flat triangle of area ``H^2``; a LOG pair
    projects the vertical fan, whose area is kept.
    """
    if isinstance(context, SimpleGraph):
        if not context.has_edge(a, b):
            raise FanError(f"{a} and {b} are not adjacent")
        return H * H
    if a not in context.vertices or b not in context.vertices or a == b:
        raise FanError(f"({a}, {b}) is not a pair of distinct LOG generators")
    if H == 0:
        return 0
    direction = DESCENDING if H > 0 else ASCENDING
    return fan_of_powers(context, a, b, abs(H), direction).area


def fan_contains(outer: Fan, inner: Fan) -> bool:
    """True if some layer of ``inner`` sits contiguously inside the matching layer of ``outer``.

    Layer ``m`` of ``inner`` is compared with layer ``m + (outer.height - inner.height)``.
    """
    shift = outer.height - inner.height
    if shift < 0:
        return False
    oe, ie = outer._engine, inner._engine
    og = [oe.index[x] for x, _ in outer.u]
    oh = [oe.index[x] for x, _ in outer.v]
    ig = [ie.index[x] for x, _ in inner.u]
    ih = [ie.index[x] for x, _ in inner.v]
    o_layers = list(oe.layers(og, oh))
    for m, cells in enumerate(ie.layers(ig, ih), start=1):
        target = _codes(oe, o_layers[m + shift - 1])
        pattern = _codes(ie, cells)
        if not _contains(target, pattern):
            return False
    return True


def _codes(eng: FanEngine, cells: np.ndarray) -> list[tuple[int, int]]:
    return list(zip(eng.square[cells].tolist(), eng.sign[cells].tolist()))


def _contains(hay: list, needle: list) -> bool:
    if not needle:
        return True
    n = len(needle)
    return any(hay[i:i + n] == needle for i in range(len(hay) - n + 1))


def exp_growth_prefilter(p: LogPresentation, src: str, dst: str,
                         growth_n: int = 8, min_ratio: float = 1.8) -> bool:
    """``Fan(src^n, dst^n)`` still grows by ``min_ratio`` per step at ``n = growth_n``."""
    r = rim_sequence(p, src, dst, growth_n)
    return r[growth_n] >= min_ratio * r[growth_n - 1]


def exp_anchor_accept(cand, depth: int = 4) -> bool:
    """``Fan(t^(j+1), a5^(j+1))`` contains ``Fan(a1^j, a3^j)`` layer by layer for ``j <= depth``."""
    p = cand.presentation
    return all(fan_contains(fan_of_powers(p, "t", "a5", j + 1), fan_of_powers(p, cand.src, cand.dst, j))
               for j in range(1, depth + 1))
