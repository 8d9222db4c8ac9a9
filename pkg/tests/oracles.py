"""Independent reference computations used by the tests (no package imports)."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction


def brute_cliques(vertices, edges):
    """Every clique of the graph, by subset enumeration."""
    adj = {frozenset(e) for e in edges}
    out = []
    for r in range(1, len(vertices) + 1):
        for s in itertools.combinations(vertices, r):
            if all(frozenset(p) in adj for p in itertools.combinations(s, 2)):
                out.append(frozenset(s))
    return out


def rank_q(rows):
    """Rank over the rationals by Gaussian elimination on Fractions."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, cols = 0, len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def betti_q(faces_by_dim):
    """Rational Betti numbers from explicit sorted face lists."""
    top = len(faces_by_dim)
    ranks = [0] * (top + 1)
    for d in range(1, top):
        idx = {s: i for i, s in enumerate(faces_by_dim[d - 1])}
        rows = [[0] * len(faces_by_dim[d]) for _ in faces_by_dim[d - 1]]
        for col, s in enumerate(faces_by_dim[d]):
            for pos in range(len(s)):
                rows[idx[s[:pos] + s[pos + 1:]]][col] = (-1) ** pos
        ranks[d] = rank_q(rows) if rows and rows[0] else 0
    return [len(faces_by_dim[d]) - ranks[d] - ranks[d + 1] for d in range(top)]


def det(m):
    m = [[Fraction(x) for x in r] for r in m]
    n, sign, out = len(m), 1, Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        out *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return int(sign * out)


def determinantal_divisors(m):
    """gcd of all k x k minors for k = 1..rank."""
    rows, cols = len(m), len(m[0]) if m else 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = math.gcd(g, det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g)
    return out


def rim_closed_form(i, j, n):
    return 0 if n == 0 else sum(math.comb(n + k - 1, n - 1) for k in range(i + 1, j + 1))


def s_rim(d, n):
    """Rim of Fan(s^n, a_d^n) in the degree-d preset: n + f_{0,d}(n)."""
    return n + rim_closed_form(0, d, n)


def p_area_oracle(d, h):
    """Area of P_h in triangles: two copies of F'_h, F'_h = 2 area(F_h) - rim(F_h)."""
    area = sum(s_rim(d, m) for m in range(h + 1))
    return 2 * (2 * area - s_rim(d, h))


def r_area_oracle(d, n):
    """R_n by counting cells per L1 shell and corridors per row, independently of the grid code."""
    cells = p_area_oracle(d, n) + sum(4 * k * p_area_oracle(d, n - k) for k in range(1, n + 1))
    # In a row of half-width m the pairs at outer distance k (both sides) have corridor 2(m-k).
    row = lambda m: sum(2 * 2 * (m - k) for k in range(1, m))  # noqa: E731
    horizontal = sum(row(n - abs(j)) for j in range(-n, n + 1))
    return cells + 2 * horizontal
