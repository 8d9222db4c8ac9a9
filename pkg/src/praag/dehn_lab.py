"""Area and perimeter accounting for the diagram families F'_n, P_n, Q_n, R_n and the tent T_n.

Units: fan areas are counted in triangles of the level set, so a square of
``F_n`` counts 2 and ``F'_n`` (the fan with its bottom half-squares cut off)
has ``2 area(F_n) - |erim(F_n)|``.  A corridor along ``L`` level-0 edges
counts ``L``.  Tent cells are counted one per cell.

``R_n`` is the grid of cells ``O_{i,j}`` with ``|i| + |j| <= n``; the cell
``O_{i,j}`` carries a copy of ``P_h`` with ``h = n - |i| - |j|``.  Row ``j``
is a copy of ``Q_{n-|j|}``.  Grid neighbours with ``h, h' >= 1`` are joined
by a corridor of length ``2 min(h, h')``: tau-corridors (``x_a``/``y_b``)
within a row, zeta/omega-corridors between rows.
"""
from __future__ import annotations

import csv
import io
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from functools import lru_cache
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .fans import finite_difference_degree, rim_sequence
from .log_engine import preset_exp, preset_poly
from .words import Word

INF = math.inf
FAMILIES = ("F'", "P", "Q", "R", "T")
CSV_COLUMNS = ("family", "d", "n", "perimeter", "area", "fans", "corridors")


class DehnError(ValueError):
    pass


def _check_d(d, allow_inf: bool = True) -> None:
    if d == INF:
        if not allow_inf:
            raise DehnError("this family needs finite d")
        return
    if not isinstance(d, int) or d <= 1:
        raise DehnError(f"d must be an integer > 1 or inf, got {d!r}")


def d_label(d) -> str:
    return "inf" if d == INF else str(d)


def parse_d(text: str):
    if text == "inf":
        return INF
    try:
        return int(text)
    except ValueError as exc:
        raise DehnError(f"bad d value {text!r}") from exc


@dataclass(frozen=True)
class DiagramStats:
    family: str
    n: int
    d: object
    perimeter: int
    area: int
    fans: int
    corridors: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DehnError(f"unknown family {self.family!r}")
        if self.perimeter < 0 or self.area < 0:
            raise DehnError("perimeter and area must be non-negative")
        if self.fans + self.corridors != self.area:
            raise DehnError("breakdown does not sum to the area")

    def row(self) -> dict:
        return {"family": self.family, "d": d_label(self.d), "n": self.n,
                "perimeter": self.perimeter, "area": self.area, "fans": self.fans,
                "corridors": self.corridors}


# --- fans F_n ----------------------------------------------------------------

def anchor(d) -> tuple:
    """LOG, and the pair whose fan is ``F_n``."""
    if d == INF:
        pre = preset_exp()
        return pre.presentation, pre.anchor[0], pre.anchor[1]
    return preset_poly(d), "s", f"a{d}"


@lru_cache(maxsize=32)
def _fan_rims(d, max_n: int) -> tuple[int, ...]:
    p, a, b = anchor(d)
    return tuple(rim_sequence(p, a, b, max_n))


def fan_tables(d, max_n: int) -> tuple[list[int], list[int]]:
    """``(|erim(F_m)|, area(F_m))`` in squares for ``m = 0..max_n``."""
    rims = list(_fan_rims(d, max_n))
    return rims, [int(x) for x in np.cumsum(np.array(rims, dtype=object))]


def p_areas(d, max_n: int) -> list[int]:
    """``area(P_m)`` in triangles for ``m = 0..max_n``."""
    rims, areas = fan_tables(d, max_n)
    return [2 * (2 * a - r) for r, a in zip(rims, areas)]


@dataclass(frozen=True)
class FanPrimeStats:
    n: int
    fan_area: int
    removed: int
    area: int


def build_fan_prime(d, n: int) -> FanPrimeStats:
    _check_d(d)
    rims, areas = fan_tables(d, n)
    removed = rims[n]
    return FanPrimeStats(n, areas[n], removed, 2 * areas[n] - removed)


def build_Pn(d, n: int) -> DiagramStats:
    _check_d(d)
    if n < 1:
        raise DehnError("n must be at least 1")
    area = p_areas(d, n)[n]
    return DiagramStats("P", n, d, 4 * n, area, area, 0)


def f_prime_stats(d, n: int) -> DiagramStats:
    fp = build_fan_prime(d, n)
    return DiagramStats("F'", n, d, 2 * n + fp.removed, fp.area, fp.area, 0)


# --- grid assembly -------------------------------------------------------------

@dataclass(frozen=True)
class Corridor:
    kind: str          # "x_a", "y_b", "zeta" or "omega"
    level: str         # "Q" or "R"
    position: float    # hyperplane coordinate along the crossing axis
    line: int          # row (for Q-level) or column (for R-level)
    length: int


def _row_letter(a: int) -> str:
    # Letter on the step between columns a and a+1, read outward from column 0.
    if a >= 0:
        return "y" if a % 2 == 0 else "x"
    return "x" if (-a - 1) % 2 == 0 else "y"


def _col_letter(j: int) -> str:
    if j >= 0:
        return "z" if j % 2 == 0 else "w"
    return "w" if (-j - 1) % 2 == 0 else "z"


def row_corridors(m: int, row: int = 0) -> list[Corridor]:
    """tau-corridors of ``Q_m``: columns ``i`` with ``|i| <= m``, cell height ``m - |i|``."""
    out = []
    for i in range(-m, m):
        a, b = i, i + 1
        h = min(m - abs(a), m - abs(b))
        if h < 1:
            continue
        letter = _row_letter(a)
        kind = "x_a" if letter == "x" else "y_b"
        out.append(Corridor(kind, "Q", i + 0.5, row, 2 * h))
    return out


def grid_corridors(n: int) -> list[Corridor]:
    out = []
    for j in range(-n, n + 1):
        out += row_corridors(n - abs(j), j)
    for i in range(-n, n + 1):
        for j in range(-n, n):
            a, b = j, j + 1
            h = min(n - abs(i) - abs(a), n - abs(i) - abs(b))
            if h < 1:
                continue
            letter = _col_letter(a)
            out.append(Corridor("zeta" if letter == "z" else "omega", "R", j + 0.5, i, 2 * h))
    return out


def build_Qn(d, n: int) -> DiagramStats:
    _check_d(d, allow_inf=False)
    if n < 1:
        raise DehnError("n must be at least 1")
    P = p_areas(d, n)
    fans = P[n] + 2 * sum(P[k] for k in range(1, n))
    corr = sum(c.length for c in row_corridors(n))
    return DiagramStats("Q", n, d, 4 * n, fans + corr, fans, corr)


def build_Rn(d, n: int) -> DiagramStats:
    _check_d(d)
    if n < 2 or n % 2:
        raise DehnError("R_n is only defined for even n >= 2")
    P = p_areas(d, n)
    fans = sum(P[n - abs(i) - abs(j)] for i in range(-n, n + 1)
               for j in range(-n + abs(i), n - abs(i) + 1))
    corr = sum(c.length for c in grid_corridors(n))
    return DiagramStats("R", n, d, len(boundary_word(n)), fans + corr, fans, corr)


@dataclass(frozen=True)
class SeparationCertificate:
    pairs: int
    tags: int
    rows_ok: bool
    columns_ok: bool

    @property
    def ok(self) -> bool:
        return self.pairs == self.tags and self.rows_ok and self.columns_ok


def separation_certificate(n: int) -> SeparationCertificate:
    """Each grid-adjacent pair of non-empty cells gets its own separating tag.

    Within a row the tau hyperplanes sit at distinct positions; within a
    column so do the zeta/omega hyperplanes.  Tags are ``(level, position, line)``.
    """
    cs = grid_corridors(n)
    tags = {(c.level, c.position, c.line) for c in cs}
    rows_ok = all(len({c.position for c in cs if c.level == "Q" and c.line == j}) ==
                  sum(1 for c in cs if c.level == "Q" and c.line == j) for j in range(-n, n + 1))
    cols_ok = all(len({c.position for c in cs if c.level == "R" and c.line == i}) ==
                  sum(1 for c in cs if c.level == "R" and c.line == i) for i in range(-n, n + 1))
    return SeparationCertificate(len(cs), len(tags), rows_ok, cols_ok)


def tent_stats(n: int) -> DiagramStats:
    if n < 1:
        raise DehnError("n must be at least 1")
    area = 4 * (n * (n + 1) // 2)
    return DiagramStats("T", n, None, 4 * n, area, area, 0)


# --- the loop l_n ---------------------------------------------------------------

COMPOSITES = {"alpha_z": ("z", "a"), "beta_z": ("z", "b"), "alpha_w": ("w", "a"), "beta_w": ("w", "b")}


def alternating(k: int, a: tuple[str, int], b: tuple[str, int]) -> Word:
    return Word([a if i % 2 == 0 else b for i in range(k)])


def boundary_word(n: int) -> Word:
    """``l_n`` in the composite letters ``alpha_z = z a^-1`` and so on."""
    if n % 2:
        raise DehnError("l_n is only defined for even n")
    az, bz, aw, bw = ("alpha_z", 1), ("beta_z", 1), ("alpha_w", 1), ("beta_w", 1)
    inv = lambda x: (x[0], -x[1])  # noqa: E731
    return (alternating(n, inv(bz), inv(aw)) + alternating(n, bw, az)
            + alternating(n, inv(aw), inv(bz)) + alternating(n, az, bw))


def expand_composites(w: Word) -> Word:
    out: list[tuple[str, int]] = []
    for g, e in w:
        top, bottom = COMPOSITES[g]
        piece = [(top, 1), (bottom, -1)]
        out += piece if e == 1 else [(bottom, 1), (top, -1)]
    return Word(out)


# --- sequences and fits ------------------------------------------------------------

def family_sequence(family: str, d, max_n: int) -> list[DiagramStats]:
    if family == "P":
        return [build_Pn(d, n) for n in range(1, max_n + 1)]
    if family == "F'":
        return [f_prime_stats(d, n) for n in range(1, max_n + 1)]
    if family == "Q":
        return [build_Qn(d, n) for n in range(1, max_n + 1)]
    if family == "R":
        return [build_Rn(d, n) for n in range(2, max_n + 1, 2)]
    if family == "T":
        return [tent_stats(n) for n in range(1, max_n + 1)]
    raise DehnError(f"unknown family {family!r}")


@dataclass(frozen=True)
class GrowthFit:
    model: str
    value: float       # exponent (power) or base (exponential)
    slope: float
    window: tuple[int, int]
    r_squared: float

    def to_dict(self) -> dict:
        return {"model": self.model, "value": self.value, "slope": self.slope,
                "window": list(self.window), "r_squared": self.r_squared}


def fit_growth(stats: Sequence[DiagramStats], model: str = "power") -> GrowthFit:
    """Least squares on the upper half of ``n``: ``log area`` against ``log n`` or ``n``."""
    if model not in ("power", "exp"):
        raise DehnError(f"unknown model {model!r}")
    if len(stats) < 6:
        raise DehnError("need at least 6 data points")
    pts = sorted((s.n, s.area) for s in stats)
    upper = pts[len(pts) // 2:]
    ns = np.array([p[0] for p in upper], dtype=float)
    areas = [p[1] for p in upper]
    if len(set(ns)) < 2:
        raise DehnError("degenerate input: all n equal")
    if min(areas) <= 0:
        raise DehnError("areas in the fit window must be positive")
    y = np.log(np.array(areas, dtype=float))
    x = np.log(ns) if model == "power" else ns
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - float((resid ** 2).sum()) / ss_tot))
    slope = float(slope)
    if abs(slope) < 1e-12:
        slope = 0.0
    value = slope if model == "power" else math.exp(slope)
    return GrowthFit(model, value, slope, (int(ns[0]), int(ns[-1])), r2)


def area_degree(stats: Sequence[DiagramStats]) -> int | None:
    """Exact polynomial degree of ``area`` over the (equally spaced) ``n`` values."""
    return finite_difference_degree([s.area for s in sorted(stats, key=lambda s: s.n)])


# --- export ---------------------------------------------------------------------

def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def to_csv(stats: Iterable[DiagramStats]) -> str:
    buf = io.StringIO()
    buf.write(f"# praag {_version()}\n")
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for s in stats:
        w.writerow(s.row())
    return buf.getvalue()


def from_csv(text: str) -> list[DiagramStats]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        d = None if row["d"] in ("", "None") else parse_d(row["d"])
        out.append(DiagramStats(row["family"], int(row["n"]), d, int(row["perimeter"]),
                                int(row["area"]), int(row["fans"]), int(row["corridors"])))
    return out


def export(stats: Sequence[DiagramStats], path: str | Path, fmt: str = "csv",
           fit: GrowthFit | None = None) -> None:
    if fmt == "csv":
        Path(path).write_text(to_csv(stats))
    elif fmt == "svg":
        Path(path).write_text(to_svg(stats, fit))
    else:
        raise DehnError(f"unknown format {fmt!r}")


def to_svg(stats: Sequence[DiagramStats], fit: GrowthFit | None = None,
           width: int = 480, height: int = 360) -> str:
    """Log-log scatter (one polyline per family) with an optional fitted line."""
    pts = [(s.family, math.log(s.n), math.log(s.area)) for s in stats if s.n > 0 and s.area > 0]
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width), height=str(height))
    if pts:
        xs = [p[1] for p in pts]
        ys = [p[2] for p in pts]
        x0, x1 = min(xs), max(xs) or 1.0
        y0, y1 = min(ys), max(ys)
        sx = lambda x: 40 + (x - x0) / ((x1 - x0) or 1.0) * (width - 60)  # noqa: E731
        sy = lambda y: height - 30 - (y - y0) / ((y1 - y0) or 1.0) * (height - 60)  # noqa: E731
        for fam in sorted({p[0] for p in pts}):
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for f, x, y in pts if f == fam)
            ET.SubElement(svg, "polyline", points=coords, fill="none", stroke="black",
                          **{"data-family": fam})
        if fit is not None and fit.model == "power":
            ys_fit = [p[2] for p in pts]
            xa, xb = x0, x1
            mid_x = sum(xs) / len(xs)
            mid_y = sum(ys_fit) / len(ys_fit)
            ya = mid_y + fit.slope * (xa - mid_x)
            yb = mid_y + fit.slope * (xb - mid_x)
            ET.SubElement(svg, "line", x1=f"{sx(xa):.2f}", y1=f"{sy(ya):.2f}", x2=f"{sx(xb):.2f}",
                          y2=f"{sy(yb):.2f}", stroke="gray", **{"stroke-dasharray": "4 2"})
    ET.SubElement(svg, "text", x="10", y="15").text = "log area vs log n"
    return ET.tostring(svg, encoding="unicode") + "\n"
