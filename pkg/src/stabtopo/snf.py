"""Exact Smith normal form over the integers.

Dense matrices are lists of lists of Python ints. ``smith_normal_form``
tracks the unimodular transforms; ``invariant_factors`` is the fast path for
large sparse boundary matrices where only the diagonal matters.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

IntegerMatrix = list[list[int]]


def zeros(rows: int, cols: int) -> IntegerMatrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> IntegerMatrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def matmul(a: IntegerMatrix, b: IntegerMatrix) -> IntegerMatrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        for k in range(inner):
            aik = row[k]
            if aik:
                bk = b[k]
                oi = out[i]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += aik * bk[j]
    return out


def det(m: IntegerMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass
class SNFResult:
    D: IntegerMatrix
    U: IntegerMatrix
    V: IntegerMatrix
    rank: int

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def invariant_factors(self) -> list[int]:
        return self.diagonal[: self.rank]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SNFResult:
    """Return D, U, V with U*A*V = D diagonal, d1 | d2 | ..., U and V unimodular.

    Pivots on the smallest nonzero magnitude in the active block.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        if q:
            rd, rs = D[dst], D[src]
            for j in range(n):
                if rs[j]:
                    rd[j] -= q * rs[j]
            ud, us = U[dst], U[src]
            for j in range(m):
                if us[j]:
                    ud[j] -= q * us[j]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        if q:
            for row in D:
                if row[src]:
                    row[dst] -= q * row[src]
            for row in V:
                if row[src]:
                    row[dst] -= q * row[src]

    def negate_row(i):
        D[i] = [-x for x in D[i]]
        U[i] = [-x for x in U[i]]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero magnitude in the block D[t:, t:]
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, D[i][t] // p)
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, D[t][j] // p)
                    if D[t][j]:
                        dirty = True
            if dirty:
                # a remainder smaller than the pivot exists; move it to the pivot slot
                best = None
                for i in range(t + 1, m):
                    v = D[i][t]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, "r")
                for j in range(t + 1, n):
                    v = D[t][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), j, "c")
                if best[2] == "r":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                continue
            # row and column cleared; enforce divisibility of the remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)  # row_t += row_bad, then reduce again
        if D[t][t] < 0:
            negate_row(t)
        t += 1
    return SNFResult(D, U, V, t)


def invariant_factors(
    columns: Sequence[dict[int, int]], nrows: int
) -> list[int]:
    """Nonzero Smith invariants of a sparse matrix given column-wise.

    ``columns[j]`` maps row index to entry. Unit pivots are eliminated
    sparsely first (boundary matrices are mostly of this kind); the
    remaining block, if any, goes through dense ``smith_normal_form``.
    """
    cols = [dict(c) for c in columns if c]
    rows: dict[int, set[int]] = {}
    for j, c in enumerate(cols):
        for i in c:
            rows.setdefault(i, set()).add(j)
    alive = set(range(len(cols)))
    units = 0
    changed = True
    while changed:
        changed = False
        for j in sorted(alive, key=lambda j: len(cols[j])):
            if j not in alive:
                continue
            col = cols[j]
            if not col:
                alive.discard(j)
                continue
            piv = None
            for i, v in col.items():
                if v in (1, -1) and (piv is None or len(rows[i]) < len(rows[piv])):
                    piv = i
            if piv is None:
                continue
            p = col[piv]
            # clear row `piv` from every other column using column j
            for k in list(rows[piv]):
                if k == j:
                    continue
                ck = cols[k]
                q = ck[piv] * p  # p = +-1 so division is exact
                for i, v in col.items():
                    nv = ck.get(i, 0) - q * v
                    if nv:
                        if i not in ck:
                            rows.setdefault(i, set()).add(k)
                        ck[i] = nv
                    elif i in ck:
                        del ck[i]
                        rows[i].discard(k)
                if not ck:
                    alive.discard(k)
            # row piv now only meets column j; drop both
            for i in col:
                rows[i].discard(j)
            rows.pop(piv, None)
            alive.discard(j)
            cols[j] = {}
            units += 1
            changed = True
    rest = [cols[j] for j in sorted(alive) if cols[j]]
    if not rest:
        return [1] * units
    row_ids = sorted({i for c in rest for i in c})
    pos = {r: k for k, r in enumerate(row_ids)}
    dense = zeros(len(row_ids), len(rest))
    for j, c in enumerate(rest):
        for i, v in c.items():
            dense[pos[i]][j] = v
    res = smith_normal_form(dense)
    return [1] * units + res.invariant_factors


def determinantal_divisors(A: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors from gcds of k-by-k minors (brute force, small matrices)."""
    from itertools import combinations

    m = len(A)
    n = len(A[0]) if m else 0
    out = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, det([[A[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out
