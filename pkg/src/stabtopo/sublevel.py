"""Lyapunov sublevel sets: boundary extraction, filled triangulation, decrease checks.

Boundaries use marching squares in the plane and marching tetrahedra (Kuhn
split of each grid cube) in space. Crossing points on grid edges are refined
by bisection on V - c. Boundary orientation: S lies to the left of each
planar loop, and triangle normals point out of S.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complexes import SimplicialComplex, build_complex
from .degree import CERTIFIED, HEURISTIC, DegreeResult, mapping_degree, winding_number
from .expr import CompiledScalar, Node, derivative, parse_expression, sum_nodes, mul, default_vars
from .fields import LoopCycle, SphereCycle, VectorFieldSpec
from .interval import Interval, IntervalBox


class SublevelError(ValueError):
    pass


@dataclass
class LyapunovSpec:
    V: Node | str
    c: float
    box: IntervalBox

    def __post_init__(self):
        self.box = IntervalBox(self.box)
        self.n = self.box.dim
        self.variables = default_vars(self.n)
        if isinstance(self.V, str):
            self.V = parse_expression(self.V, self.variables)
        if not self.c > 0:
            raise SublevelError("level c must be positive")
        self.compiled = CompiledScalar(self.V, self.variables)

    def __call__(self, p) -> float:
        return self.compiled.f(p)

    def decrease_expr(self, G: VectorFieldSpec) -> Node:
        """dV . G as an expression."""
        if G.n != self.n:
            raise SublevelError("field and Lyapunov function dimensions differ")
        return sum_nodes([mul(derivative(self.V, v), g) for v, g in zip(self.variables, G.components)])


# ---------------------------------------------------------------------------
# Grid sampling
# ---------------------------------------------------------------------------

class _Grid:
    def __init__(self, spec: LyapunovSpec, resolution: int):
        if resolution < 2:
            raise SublevelError("resolution must be at least 2")
        self.spec = spec
        self.res = resolution
        self.axes = [np.linspace(iv.lo, iv.hi, resolution + 1) for iv in spec.box]
        shape = (resolution + 1,) * spec.n
        self.values = np.empty(shape)
        f = spec.compiled.f
        for idx in itertools.product(range(resolution + 1), repeat=spec.n):
            self.values[idx] = f(self.point(idx))
        self.inside = self.values <= spec.c

    def point(self, idx) -> np.ndarray:
        return np.array([self.axes[k][i] for k, i in enumerate(idx)])

    def check_compact(self) -> None:
        n = self.spec.n
        for k in range(n):
            for side in (0, self.res):
                sl = [slice(None)] * n
                sl[k] = side
                if np.any(self.inside[tuple(sl)]):
                    raise SublevelError(
                        "sublevel set reaches the domain box boundary (S not compactly contained)"
                    )

    def crossing(self, a, b, iters: int = 40) -> np.ndarray:
        """Point on segment a-b with V = c; a inside, b outside."""
        pa, pb = self.point(a), self.point(b)
        f, c = self.spec.compiled.f, self.spec.c
        lo, hi = 0.0, 1.0
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if f(pa + mid * (pb - pa)) <= c:
                lo = mid
            else:
                hi = mid
        return pa + 0.5 * (lo + hi) * (pb - pa)


def _kuhn_simplices(n: int):
    """Vertex offsets of the n! simplices of the Kuhn split of a unit cube."""
    out = []
    for perm in itertools.permutations(range(n)):
        v = [0] * n
        simplex = [tuple(v)]
        for axis in perm:
            v[axis] = 1
            simplex.append(tuple(v))
        out.append(simplex)
    return out


# ---------------------------------------------------------------------------
# Boundary
# ---------------------------------------------------------------------------

@dataclass
class SublevelBoundary:
    n: int
    loops: list[LoopCycle] = field(default_factory=list)
    mesh: SphereCycle | None = None
    resolution: int = 0
    regular: bool = False

    @property
    def cycles(self) -> list:
        return list(self.loops) if self.n == 2 else ([self.mesh] if self.mesh is not None else [])

    @property
    def vertex_count(self) -> int:
        if self.n == 2:
            return sum(len(lp.points) for lp in self.loops)
        return len(self.mesh.vertices)

    def vertices(self) -> np.ndarray:
        if self.n == 2:
            return np.vstack([lp.points for lp in self.loops])
        return self.mesh.vertices

    def to_complex(self) -> SimplicialComplex:
        if self.n == 3:
            return self.mesh.to_complex()
        simplices, coords, base = [], [], 0
        for lp in self.loops:
            m = len(lp.points)
            simplices += [(base + i, base + (i + 1) % m) for i in range(m)]
            coords += lp.points.tolist()
            base += m
        return build_complex(simplices, coords)

    def degree(self, G: VectorFieldSpec) -> DegreeResult:
        """Degree of G/|G| on the oriented boundary (summed over components)."""
        if self.n == 3:
            return mapping_degree(G, self.mesh)
        parts = [winding_number(G, lp) for lp in self.loops]
        ok = all(p.certified for p in parts)
        return DegreeResult(
            sum(p.degree for p in parts),
            CERTIFIED if ok else HEURISTIC,
            min((p.min_norm for p in parts), default=0.0) if ok else 0.0,
            sum(p.resolution for p in parts),
            sum(p.raw for p in parts),
        )


def _is_regular(spec: LyapunovSpec, grid: _Grid, depth: int = 3) -> bool:
    """Interval check that grad V does not vanish on cells meeting V = c."""
    comp = spec.compiled
    stack = [(c, 0) for c in spec.box.grid(grid.res)]
    while stack:
        cell, d = stack.pop()
        r = comp.range(cell)
        if r is not None and not r.contains(spec.c):
            continue
        try:
            g = comp.grad_interval(cell)
        except ArithmeticError:
            return False
        if any(not gi.contains_zero() for gi in g):
            continue
        if d >= depth:
            return False
        parts = [cell]
        for axis in range(cell.dim):
            parts = [h for p in parts for h in p.bisect(axis)]
        stack.extend((p, d + 1) for p in parts)
    return True


def extract_sublevel_boundary(spec: LyapunovSpec, resolution: int = 64) -> SublevelBoundary:
    """Oriented boundary of S = {V <= c} on a uniform grid over ``spec.box``."""
    grid = _Grid(spec, resolution)
    grid.check_compact()
    if spec.n == 2:
        out = SublevelBoundary(2, loops=_march_squares(grid), resolution=resolution)
    elif spec.n == 3:
        out = SublevelBoundary(3, mesh=_march_tets(grid), resolution=resolution)
    else:
        raise SublevelError("boundary extraction supports n = 2, 3")
    if not out.cycles or out.vertex_count == 0:
        raise SublevelError("empty sublevel set at this resolution")
    out.regular = _is_regular(spec, grid)
    return out


def _march_squares(grid: _Grid) -> list[LoopCycle]:
    res = grid.res
    ins = grid.inside
    points: dict[frozenset, np.ndarray] = {}
    nxt: dict[frozenset, frozenset] = {}

    def crossing_key(a, b):
        key = frozenset((a, b))
        if key not in points:
            inner, outer = (a, b) if ins[a] else (b, a)
            points[key] = grid.crossing(inner, outer)
        return key

    for i in range(res):
        for j in range(res):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            flags = [bool(ins[c]) for c in corners]
            if all(flags) or not any(flags):
                continue
            cross = []  # (key, leaving) in counter-clockwise order
            for k in range(4):
                a, b = corners[k], corners[(k + 1) % 4]
                if flags[k] != flags[(k + 1) % 4]:
                    cross.append((crossing_key(a, b), flags[k]))
            L = len(cross)
            centre_in = True
            if L == 4:
                centre = grid.point((i, j)) + 0.5 * np.array(
                    [grid.axes[0][1] - grid.axes[0][0], grid.axes[1][1] - grid.axes[1][0]]
                )
                centre_in = grid.spec.compiled.f(centre) <= grid.spec.c
            for k, (key, leaving) in enumerate(cross):
                if leaving:
                    tgt = cross[(k + 1) % L] if centre_in else cross[(k - 1) % L]
                    nxt[key] = tgt[0]
    loops = []
    seen: set[frozenset] = set()
    for start in sorted(nxt, key=lambda k: tuple(sorted(k))):
        if start in seen:
            continue
        chain, k = [], start
        while k not in seen:
            seen.add(k)
            chain.append(points[k])
            k = nxt[k]
        if k != start:
            raise SublevelError("marching squares produced an open contour")
        loops.append(LoopCycle(np.array(chain)))
    return loops


def _march_tets(grid: _Grid) -> SphereCycle:
    res = grid.res
    ins = grid.inside
    index: dict[frozenset, int] = {}
    verts: list[np.ndarray] = []
    tris: list[tuple[int, int, int]] = []
    offsets = _kuhn_simplices(3)

    def vid(a, b):
        key = frozenset((a, b))
        if key not in index:
            inner, outer = (a, b) if ins[a] else (b, a)
            index[key] = len(verts)
            verts.append(grid.crossing(inner, outer))
        return index[key]

    def emit(tri, direction):
        p = [verts[t] for t in tri]
        normal = np.cross(p[1] - p[0], p[2] - p[0])
        if float(np.dot(normal, direction)) < 0:
            tri = (tri[0], tri[2], tri[1])
        tris.append(tri)

    for base in itertools.product(range(res), repeat=3):
        cube = [tuple(b + o for b, o in zip(base, off)) for off in itertools.product((0, 1), repeat=3)]
        flags = [bool(ins[c]) for c in cube]
        if all(flags) or not any(flags):
            continue
        for simplex in offsets:
            tet = [tuple(b + o for b, o in zip(base, off)) for off in simplex]
            inner = [v for v in tet if ins[v]]
            outer = [v for v in tet if not ins[v]]
            if not inner or not outer:
                continue
            direction = np.mean([grid.point(v) for v in outer], axis=0) - np.mean(
                [grid.point(v) for v in inner], axis=0
            )
            if len(inner) == 1:
                a = inner[0]
                emit(tuple(vid(a, o) for o in outer), direction)
            elif len(outer) == 1:
                d = outer[0]
                emit(tuple(vid(i, d) for i in inner), direction)
            else:
                (a, b), (c, d) = inner, outer
                q = [vid(a, c), vid(a, d), vid(b, d), vid(b, c)]
                emit((q[0], q[1], q[2]), direction)
                emit((q[0], q[2], q[3]), direction)
    return SphereCycle(np.array(verts), np.array(tris, dtype=int), check=False)


# ---------------------------------------------------------------------------
# Filled region
# ---------------------------------------------------------------------------

def filled_region(spec: LyapunovSpec, resolution: int = 32) -> SimplicialComplex:
    """Simplices of the Kuhn-triangulated grid with every vertex in S."""
    grid = _Grid(spec, resolution)
    grid.check_compact()
    n = spec.n
    size = resolution + 1
    offsets = _kuhn_simplices(n)
    top, used = [], set()

    def flat(idx):
        f = 0
        for i in idx:
            f = f * size + i
        return f

    for base in itertools.product(range(resolution), repeat=n):
        for simplex in offsets:
            verts = [tuple(b + o for b, o in zip(base, off)) for off in simplex]
            if all(grid.inside[v] for v in verts):
                ids = tuple(flat(v) for v in verts)
                top.append(ids)
                used.update(zip(ids, verts))
    if not top:
        raise SublevelError("sublevel set contains no grid simplex; raise the resolution")
    coords = {i: tuple(grid.point(v)) for i, v in used}
    return build_complex(top, coords)


@dataclass
class SublevelRegion:
    spec: LyapunovSpec
    boundary: SublevelBoundary
    filled: SimplicialComplex


def sublevel_region(spec: LyapunovSpec, resolution: int | None = None, fill_resolution: int | None = None) -> SublevelRegion:
    if resolution is None:
        resolution = 64 if spec.n == 2 else 16
    if fill_resolution is None:
        fill_resolution = min(resolution, 32 if spec.n == 2 else 12)
    return SublevelRegion(
        spec, extract_sublevel_boundary(spec, resolution), filled_region(spec, fill_resolution)
    )


# ---------------------------------------------------------------------------
# Decrease certificates
# ---------------------------------------------------------------------------

@dataclass
class DecreaseReport:
    certified: bool
    worst_bound: float
    cells: int
    inconclusive: int = 0
    counterexample: list[float] | None = None
    band: tuple[float, float] = (0.0, 0.0)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.certified

    def as_dict(self) -> dict:
        return {
            "certified": self.certified,
            "worst_upper_bound": self.worst_bound,
            "cells": self.cells,
            "inconclusive_cells": self.inconclusive,
            "counterexample": self.counterexample,
            "band": list(self.band),
            "reason": self.reason,
        }


InwardResult = DecreaseReport


def _certify_negative(
    dot: CompiledScalar,
    V: CompiledScalar,
    lo: float,
    hi: float,
    box: IntervalBox,
    resolution: int,
    depth_cap: int,
    budget: int,
) -> DecreaseReport:
    """Certify dot < 0 wherever lo <= V <= hi, by adaptive interval subdivision.

    Cells are split until they reach the grid scale ``box/resolution``
    unless already certified; below that scale up to ``depth_cap`` further
    halvings are allowed before a cell counts as inconclusive.
    """
    target = [w / resolution for w in box.widths]
    worst = -math.inf
    cells = 0
    inconclusive = 0
    stack = [(box, 0)]
    while stack:
        cell, extra = stack.pop()
        cells += 1
        if cells > budget:
            return DecreaseReport(False, worst, cells, inconclusive + len(stack) + 1, band=(lo, hi), reason="cell budget exhausted")
        r = V.range(cell)
        if r is not None and (r.hi < lo or r.lo > hi):
            continue
        d = dot.range(cell)
        if d is not None and d.hi < 0:
            worst = max(worst, d.hi)
            continue
        centre = cell.mid
        try:
            vc, dc = V.f(centre), dot.f(centre)
        except ArithmeticError:
            vc, dc = math.nan, math.nan
        if lo <= vc <= hi and dc >= 0:
            return DecreaseReport(False, worst, cells, inconclusive, list(centre), (lo, hi), "dV.G >= 0 at a sample point")
        coarse = any(w > t * (1 + 1e-12) for w, t in zip(cell.widths, target))
        if not coarse:
            if extra >= depth_cap:
                inconclusive += 1
                continue
            extra += 1
        parts = [cell]
        for axis in range(cell.dim):
            parts = [h for p in parts for h in p.bisect(axis)]
        stack.extend((p, extra) for p in parts)
    ok = inconclusive == 0
    return DecreaseReport(ok, worst, cells, inconclusive, band=(lo, hi), reason="" if ok else "inconclusive cells")


def verify_lyapunov(
    spec: LyapunovSpec,
    G: VectorFieldSpec,
    eps: float | None = None,
    resolution: int = 32,
    depth_cap: int = 8,
    budget: int = 400000,
) -> DecreaseReport:
    """Certify dV.G < 0 on the annulus eps <= V <= c (eps defaults to c/100)."""
    if eps is None:
        eps = spec.c / 100.0
    dot = CompiledScalar(spec.decrease_expr(G), spec.variables)
    return _certify_negative(dot, spec.compiled, eps, spec.c, spec.box, resolution, depth_cap, budget)


def inward_check(
    G: VectorFieldSpec,
    boundary: SublevelBoundary,
    spec: LyapunovSpec,
    depth_cap: int = 8,
    budget: int = 400000,
) -> DecreaseReport:
    """Certify dV.G < 0 on a one-cell tube around the level set V = c."""
    dot = CompiledScalar(spec.decrease_expr(G), spec.variables)
    res = boundary.resolution or 32
    return _certify_negative(dot, spec.compiled, spec.c, spec.c, spec.box, res, depth_cap, budget)
