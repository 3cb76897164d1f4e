"""Zeros of vector fields, their indices, and the Poincare-Hopf audit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .degree import DegreeResult, cycle_degree, ZeroOnCycleError, DimensionError, CERTIFIED
from .fields import VectorFieldSpec, box_loop, box_surface
from .interval import Interval, IntervalBox
from .solve import UNIQUE, krawczyk


@dataclass
class ZeroCertificate:
    box: IntervalBox
    certified: bool
    index: int | None = None
    index_status: str = ""
    cells: int = 0

    def as_dict(self) -> dict:
        return {
            "box": self.box.to_list(),
            "certified": self.certified,
            "index": self.index,
            "index_status": self.index_status,
        }


def _excludes_zero(enc: Sequence[Interval] | None) -> bool:
    return enc is not None and any(not e.contains_zero() for e in enc)


def _face_adjacent(a: IntervalBox, b: IntervalBox) -> bool:
    touching = 0
    for x, y in zip(a, b):
        lo, hi = max(x.lo, y.lo), min(x.hi, y.hi)
        if lo > hi:
            return False
        if lo == hi:
            touching += 1
    return touching <= 1


def _clusters(cells: list[IntervalBox]) -> list[list[IntervalBox]]:
    parent = list(range(len(cells)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # sweep along the first axis to avoid an all-pairs comparison
    order = sorted(range(len(cells)), key=lambda i: cells[i][0].lo)
    active: list[int] = []
    for i in order:
        active = [j for j in active if cells[j][0].hi >= cells[i][0].lo]
        for j in active:
            if _face_adjacent(cells[i], cells[j]):
                parent[find(i)] = find(j)
        active.append(i)
    groups: dict[int, list[IntervalBox]] = {}
    for i in range(len(cells)):
        groups.setdefault(find(i), []).append(cells[i])
    return sorted(groups.values(), key=lambda g: min(c.lo for c in g))


def _hull(cells: list[IntervalBox]) -> IntervalBox:
    dim = cells[0].dim
    return IntervalBox(
        [(min(c[k].lo for c in cells), max(c[k].hi for c in cells)) for k in range(dim)]
    )


def locate_zeros(
    field_: VectorFieldSpec,
    box: IntervalBox,
    resolution: int = 8,
    refine: int = 4,
    budget: int = 50000,
) -> list[ZeroCertificate]:
    """Enclose the zeros of ``field_`` in ``box``.

    Grid cells on which some component provably keeps a sign are dropped;
    survivors are bisected ``refine`` more times, clustered by face
    adjacency, and each cluster hull (inflated by half a cell) is tested
    with Krawczyk plus the boundary degree.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    box = IntervalBox(box)
    cells = [c for c in box.grid(resolution) if not _excludes_zero(field_.enclosure(c))]
    for _ in range(refine):
        nxt = []
        for c in cells:
            parts = [c]
            for axis in range(c.dim):
                parts = [h for p in parts for h in p.bisect(axis)]
            nxt.extend(p for p in parts if not _excludes_zero(field_.enclosure(p)))
        if len(nxt) > budget:
            break
        cells = nxt
    if not cells:
        return []
    groups = _clusters(cells)
    half = 0.5 * max(cells[0].widths)
    hulls = [_hull(g) for g in groups]
    inflated = [h.inflate(half) for h in hulls]
    out = []
    for i, (g, h) in enumerate(zip(groups, hulls)):
        cand = inflated[i]
        if any(cand.intersects(inflated[j]) for j in range(len(hulls)) if j != i):
            cand = h
        out.append(_certify_cluster(field_, cand, len(g)))
    return out


def _certify_cluster(field_: VectorFieldSpec, cand: IntervalBox, ncells: int) -> ZeroCertificate:
    res = krawczyk(field_.enclosure_strict, field_.jacobian_strict, cand)
    unique = res.status == UNIQUE
    try:
        deg = _box_degree(field_, cand)
    except ZeroOnCycleError:
        return ZeroCertificate(cand, False, None, "zero on box boundary", ncells)
    certified = unique and deg.certified and abs(deg.degree) == 1
    return ZeroCertificate(cand, certified, deg.degree, deg.status, ncells)


def _box_degree(field_: VectorFieldSpec, box: IntervalBox) -> DegreeResult:
    if field_.n == 2:
        return cycle_degree(field_, box_loop(box, per_side=4))
    if field_.n == 3:
        return cycle_degree(field_, box_surface(box, per_side=2))
    raise DimensionError("indices are limited to n = 2, 3")


def field_index(field_: VectorFieldSpec, zero: ZeroCertificate) -> DegreeResult:
    """Index of an isolated zero as the degree of the field on its box boundary.

    Certified boxes are pairwise disjoint, so the box boundary avoids every
    other zero box.
    """
    return _box_degree(field_, zero.box)


# ---------------------------------------------------------------------------
# Poincare-Hopf
# ---------------------------------------------------------------------------

@dataclass
class PoincareHopfAudit:
    status: str  # "pass", "fail" or "inconclusive"
    index_sum: int | None
    euler: int | None
    expected: int | None
    zeros: list[ZeroCertificate] = field(default_factory=list)
    boundary_degree: int | None = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "index_sum": self.index_sum,
            "euler": self.euler,
            "expected": self.expected,
            "boundary_degree": self.boundary_degree,
            "zeros": [z.as_dict() for z in self.zeros],
            "reason": self.reason,
        }


def poincare_hopf_audit(field_: VectorFieldSpec, region, resolution: int = 8) -> PoincareHopfAudit:
    """Check sum of indices = (-1)^n chi(S) for a field pointing into S.

    ``region`` is a :class:`~stabtopo.sublevel.SublevelRegion` (the sublevel
    set, its oriented boundary, and its filled triangulation). For n = 2 the
    sign is +1; an inward field in R^3 has index sum -chi.
    """
    from .homology import homology_profile
    from .sublevel import inward_check

    n = field_.n
    inward = inward_check(field_, region.boundary, region.spec)
    if not inward:
        return PoincareHopfAudit("inconclusive", None, None, None, reason=f"inward check: {inward.reason}")
    euler = homology_profile(region.filled).euler
    expected = (-1) ** n * euler
    zeros = locate_zeros(field_, region.spec.box, resolution=resolution)
    inside = []
    V = region.spec.compiled
    for z in zeros:
        r = V.range(z.box)
        if r is not None and r.lo > region.spec.c:
            continue  # provably outside S
        if r is None or r.hi >= region.spec.c:
            return PoincareHopfAudit(
                "inconclusive", None, euler, expected, zeros, reason="zero box meets the boundary of S"
            )
        inside.append(z)
    if any(not z.certified for z in inside):
        return PoincareHopfAudit(
            "inconclusive", None, euler, expected, inside, reason="uncertified zero cluster"
        )
    total = sum(z.index for z in inside)
    bdeg = region.boundary.degree(field_)
    status = "pass" if total == expected else "fail"
    return PoincareHopfAudit(status, total, euler, expected, inside, bdeg.degree if bdeg.certified else None)
