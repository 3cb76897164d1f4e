"""Certified winding numbers and mapping degrees of vector fields on cycles.

A segment (triangle) is certified when the field's Lipschitz bound times its
length (diameter) is below the field's norm at a vertex: the image then stays
in the open half-space around that vertex value, so the principal-value angle
step (solid angle) of the vertex images equals the true contribution. Cells
that fail the test are bisected up to a depth cap, after which the result is
reported as heuristic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .expr import CompiledScalar, Node, norm_lower
from .fields import LoopCycle, SphereCycle, VectorFieldSpec
from .interval import Interval, IntervalBox

CERTIFIED = "certified"
HEURISTIC = "heuristic"
DEFAULT_DEPTH_CAP = 12


class ZeroOnCycleError(ValueError):
    def __init__(self, point):
        point = tuple(float(x) for x in point)
        super().__init__(f"field vanishes on the cycle at {point}")
        self.point = point


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    status: str
    min_norm: float
    resolution: int
    raw: float = 0.0

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "status": self.status,
            "min_norm_bound": self.min_norm,
            "cells": self.resolution,
        }


def _point_box(p) -> list[Interval]:
    return [Interval.point(float(x)) for x in p]


def _hull_box(points) -> list[Interval]:
    pts = np.asarray(points, float)
    return [Interval(float(lo), float(hi)) for lo, hi in zip(pts.min(axis=0), pts.max(axis=0))]


def _vertex_norm_lower(field_: VectorFieldSpec, p) -> float:
    enc = field_.enclosure(_point_box(p))
    return 0.0 if enc is None else norm_lower(enc)


def winding_number(
    field_: VectorFieldSpec, loop: LoopCycle, depth_cap: int = DEFAULT_DEPTH_CAP
) -> DegreeResult:
    """Winding number of a planar field along an oriented closed polyline."""
    if field_.n != 2:
        raise DimensionError("winding_number needs a planar field")
    smooth = field_.smooth
    total = 0.0
    all_ok = True
    margin = math.inf
    cells = 0
    values: dict[tuple[float, float], np.ndarray] = {}

    def value(p) -> np.ndarray:
        key = (float(p[0]), float(p[1]))
        if key not in values:
            try:
                v = field_(key)
            except ArithmeticError:
                raise ZeroOnCycleError(key) from None
            if not np.all(np.isfinite(v)) or (v[0] == 0.0 and v[1] == 0.0):
                raise ZeroOnCycleError(key)
            values[key] = v
        return values[key]

    stack = [(p, q, 0) for p, q in loop.segments()][::-1]
    while stack:
        p, q, depth = stack.pop()
        fp, fq = value(p), value(q)
        ok = False
        if smooth:
            lip = field_.lipschitz(_hull_box([p, q]))
            length = float(np.hypot(*(q - p)))
            m = _vertex_norm_lower(field_, p)
            slack = m - lip * length * (1 + 1e-9)
            if slack > 0:
                ok = True
                margin = min(margin, slack)
        if not ok and depth < depth_cap:
            mid = 0.5 * (p + q)
            stack.append((mid, q, depth + 1))
            stack.append((p, mid, depth + 1))
            continue
        if not ok:
            all_ok = False
        cells += 1
        cross = fp[0] * fq[1] - fp[1] * fq[0]
        dot = fp[0] * fq[0] + fp[1] * fq[1]
        total += math.atan2(cross, dot)
    raw = total / (2 * math.pi)
    deg = int(round(raw))
    status = CERTIFIED if all_ok and abs(raw - deg) < 1e-6 else HEURISTIC
    return DegreeResult(deg, status, margin if all_ok else 0.0, cells, raw)


def solid_angle(a, b, c) -> float:
    """Signed solid angle of the spherical triangle spanned by unit vectors a, b, c."""
    num = float(np.dot(a, np.cross(b, c)))
    den = 1.0 + float(np.dot(a, b) + np.dot(b, c) + np.dot(c, a))
    return 2.0 * math.atan2(num, den)


def mapping_degree(
    field_: VectorFieldSpec, sphere: SphereCycle, depth_cap: int = DEFAULT_DEPTH_CAP
) -> DegreeResult:
    """Degree of x -> F(x)/|F(x)| on an oriented closed triangle mesh in R^3."""
    if field_.n != 3:
        if field_.n > 3:
            raise DimensionError("certified degrees are limited to n <= 3")
        raise DimensionError("mapping_degree needs a field on R^3")
    smooth = field_.smooth
    total = 0.0
    all_ok = True
    margin = math.inf
    cells = 0
    values: dict[tuple, np.ndarray] = {}

    def unit(p) -> np.ndarray:
        key = tuple(float(x) for x in p)
        if key not in values:
            try:
                v = field_(key)
            except ArithmeticError:
                raise ZeroOnCycleError(key) from None
            nv = float(np.linalg.norm(v))
            if not math.isfinite(nv) or nv == 0.0:
                raise ZeroOnCycleError(key)
            values[key] = v / nv
        return values[key]

    V = sphere.vertices
    coords: dict[tuple, np.ndarray] = {}

    def key(p) -> tuple:
        k = tuple(float(x) for x in p)
        coords.setdefault(k, np.asarray(k))
        return k

    # edges split anywhere in the refinement, mapped to their midpoint
    split: dict[frozenset, tuple] = {}
    leaves: list[tuple[tuple, tuple, tuple]] = []
    stack = [(key(V[a]), key(V[b]), key(V[c]), 0) for a, b, c in sphere.triangles][::-1]
    while stack:
        ka, kb, kc, depth = stack.pop()
        a, b, c = coords[ka], coords[kb], coords[kc]
        unit(a)
        unit(b)
        unit(c)
        ok = False
        if smooth:
            lip = field_.lipschitz(_hull_box([a, b, c]))
            reach = max(np.linalg.norm(b - a), np.linalg.norm(c - a))
            m = _vertex_norm_lower(field_, a)
            slack = m - lip * float(reach) * (1 + 1e-9)
            if slack > 0:
                ok = True
                margin = min(margin, slack)
        if not ok and depth < depth_cap:
            kab, kbc, kca = key(0.5 * (a + b)), key(0.5 * (b + c)), key(0.5 * (c + a))
            split[frozenset((ka, kb))] = kab
            split[frozenset((kb, kc))] = kbc
            split[frozenset((kc, ka))] = kca
            for tri in ((ka, kab, kca), (kb, kbc, kab), (kc, kca, kbc), (kab, kbc, kca)):
                stack.append((*tri, depth + 1))
            continue
        if not ok:
            all_ok = False
        leaves.append((ka, kb, kc))

    def expand(p, q) -> list:
        mid = split.get(frozenset((p, q)))
        if mid is None:
            return [p]
        return expand(p, mid) + expand(mid, q)

    for ka, kb, kc in leaves:
        ring = expand(ka, kb) + expand(kb, kc) + expand(kc, ka)
        if len(ring) == 3:
            total += solid_angle(unit(coords[ka]), unit(coords[kb]), unit(coords[kc]))
            cells += 1
            continue
        # hanging vertices from finer neighbours: fan the leaf from its centroid
        centre = (coords[ka] + coords[kb] + coords[kc]) / 3.0
        uc = unit(centre)
        for i in range(len(ring)):
            p, q = ring[i], ring[(i + 1) % len(ring)]
            total += solid_angle(uc, unit(coords[p]), unit(coords[q]))
            cells += 1
    raw = total / (4 * math.pi)
    deg = int(round(raw))
    status = CERTIFIED if all_ok and abs(raw - deg) < 1e-6 else HEURISTIC
    return DegreeResult(deg, status, margin if all_ok else 0.0, cells, raw)


def cycle_degree(field_: VectorFieldSpec, cycle, depth_cap: int = DEFAULT_DEPTH_CAP) -> DegreeResult:
    if isinstance(cycle, LoopCycle):
        return winding_number(field_, cycle, depth_cap)
    if isinstance(cycle, SphereCycle):
        return mapping_degree(field_, cycle, depth_cap)
    raise TypeError(f"unsupported cycle {type(cycle).__name__}")


def coincidence_number(a: VectorFieldSpec, b: VectorFieldSpec, loop: LoopCycle) -> tuple[int, str]:
    """Oriented coincidence count of the circle maps a/|a| and b/|b| on ``loop``."""
    da = winding_number(a, loop)
    db = winding_number(b, loop)
    status = CERTIFIED if da.certified and db.certified else HEURISTIC
    return db.degree - da.degree, status


@dataclass(frozen=True)
class BoundaryClass:
    """Class of a field along a boundary loop in H_1 of the punctured tangent bundle.

    Under T R^2 = R^2 x R^2 the group is Z (base loop) + Z (fiber winding).
    """

    base: int
    fiber: int
    status: str

    def in_span_of(self, other: "BoundaryClass") -> bool:
        """Whether this class lies in Z * other."""
        if other.base == 0 and other.fiber == 0:
            return self.base == 0 and self.fiber == 0
        if other.base == 0:
            return self.base == 0 and self.fiber % other.fiber == 0
        if self.base % other.base:
            return False
        k = self.base // other.base
        return self.fiber == k * other.fiber


def boundary_class_pair(field_: VectorFieldSpec, loop: LoopCycle) -> BoundaryClass:
    d = winding_number(field_, loop)
    return BoundaryClass(1, d.degree, d.status)


# ---------------------------------------------------------------------------
# Homotopy through nowhere-zero fields
# ---------------------------------------------------------------------------

@dataclass
class HomotopyCertificate:
    certified: bool
    cells: int
    reason: str = ""
    refusal_cell: list | None = None

    def __bool__(self) -> bool:
        return self.certified


def _dot_lower(w: np.ndarray, enc: Sequence[Interval]) -> float:
    acc = Interval(0.0, 0.0)
    for wi, ei in zip(w, enc):
        acc = acc + Interval.point(float(wi)) * ei
    return acc.lo


def homotopy_nonvanishing(
    F: VectorFieldSpec,
    G: VectorFieldSpec,
    cells: Iterable[IntervalBox],
    depth_cap: int = 8,
) -> HomotopyCertificate:
    """Certify t*F + (1-t)*G != 0 for all t in [0,1] on every cell.

    Sufficient condition per cell: the enclosures of F and G lie in a common
    open half-space {v : w.v > 0}. Failure is a refusal, not a disproof.
    """
    if F.n != G.n:
        raise DimensionError("fields of different dimension")
    count = 0
    stack = [(IntervalBox(c), 0) for c in cells][::-1]
    while stack:
        cell, depth = stack.pop()
        ef, eg = F.enclosure(cell), G.enclosure(cell)
        c = cell.mid
        try:
            f, g = F(c), G(c)
        except ArithmeticError:
            return HomotopyCertificate(False, count, "field undefined in cell", cell.to_list())
        nf, ng = float(np.linalg.norm(f)), float(np.linalg.norm(g))
        if nf == 0.0 or ng == 0.0:
            return HomotopyCertificate(False, count, "a field vanishes in the cell", cell.to_list())
        w = f / nf + g / ng
        if ef is not None and eg is not None and np.linalg.norm(w) > 1e-12:
            if _dot_lower(w, ef) > 0 and _dot_lower(w, eg) > 0:
                count += 1
                continue
        if depth >= depth_cap or np.linalg.norm(w) <= 1e-12:
            return HomotopyCertificate(
                False, count, "no common half-space found for F and G", cell.to_list()
            )
        axis = int(np.argmax(cell.widths))
        left, right = cell.bisect(axis)
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    return HomotopyCertificate(True, count)


def cells_in_band(
    V: Node | CompiledScalar,
    lo: float,
    hi: float,
    box: IntervalBox,
    resolution: int,
) -> list[IntervalBox]:
    """Grid cells of ``box`` whose V-enclosure meets [lo, hi]."""
    if not isinstance(V, CompiledScalar):
        from .expr import default_vars

        V = CompiledScalar(V, default_vars(box.dim))
    out = []
    for cell in box.grid(resolution):
        r = V.range(cell)
        if r is None or (r.hi >= lo and r.lo <= hi):
            out.append(cell)
    return out
