"""Vector fields given by expressions, and the cycles degrees are evaluated on."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complexes import SimplicialComplex, build_complex, fundamental_cycle
from .expr import (
    CompiledScalar,
    Node,
    RangeBound,
    default_vars,
    free_vars,
    norm_upper,
    parse_expression,
    to_text,
)
from .interval import DomainViolation, Interval, IntervalBox


class FieldError(ValueError):
    pass


class VectorFieldSpec:
    """An n-component field in the variables x1..xn."""

    def __init__(self, components: Sequence[Node | str], n: int | None = None, name: str = ""):
        if n is None:
            n = len(components)
        self.n = n
        self.variables = default_vars(n)
        comps = [
            parse_expression(c, self.variables) if isinstance(c, str) else c for c in components
        ]
        if len(comps) != n:
            raise FieldError(f"expected {n} components, got {len(comps)}")
        for c in comps:
            extra = free_vars(c) - set(self.variables)
            if extra:
                raise FieldError(f"component uses variables outside x1..x{n}: {sorted(extra)}")
        self.components: list[Node] = comps
        self.name = name
        self._compiled = [CompiledScalar(c, self.variables) for c in comps]

    @property
    def smooth(self) -> bool:
        return all(c.smooth for c in self._compiled)

    def __call__(self, p: Sequence[float]) -> np.ndarray:
        return np.array([c.f(p) for c in self._compiled], dtype=float)

    def enclosure(self, box: Sequence[Interval]) -> list[Interval] | None:
        try:
            return [c.fi(box) for c in self._compiled]
        except DomainViolation:
            return None

    def jacobian_interval(self, box: Sequence[Interval]) -> list[list[Interval]] | None:
        try:
            return [c.grad_interval(box) for c in self._compiled]
        except DomainViolation:
            return None

    # raising variants, for solvers that handle DomainViolation themselves
    def enclosure_strict(self, box: Sequence[Interval]) -> list[Interval]:
        return [c.fi(box) for c in self._compiled]

    def jacobian_strict(self, box: Sequence[Interval]) -> list[list[Interval]]:
        return [c.grad_interval(box) for c in self._compiled]

    def jacobian(self, p: Sequence[float]) -> np.ndarray:
        return np.array([c.grad_float(p) for c in self._compiled], dtype=float)

    def lipschitz(self, box: Sequence[Interval]) -> float:
        """Upper bound on the operator norm of the Jacobian over ``box`` (Frobenius)."""
        jac = self.jacobian_interval(box)
        if jac is None:
            return math.inf
        return norm_upper([e for row in jac for e in row])

    def component_bounds(self, box: IntervalBox) -> list[RangeBound]:
        return [c.range_and_lipschitz(box) for c in self._compiled]

    def texts(self) -> list[str]:
        return [to_text(c) for c in self.components]

    def __repr__(self) -> str:
        return f"VectorFieldSpec({self.texts()!r})"


# ---------------------------------------------------------------------------
# Cycles
# ---------------------------------------------------------------------------

@dataclass
class LoopCycle:
    """Closed oriented polyline in the plane (last vertex joins the first)."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise FieldError("loop points must be an (N, 2) array")
        if len(self.points) < 3:
            raise FieldError("a loop needs at least three vertices")
        nxt = np.roll(self.points, -1, axis=0)
        if np.any(np.all(nxt == self.points, axis=1)):
            raise FieldError("consecutive loop vertices must be distinct")

    dim = 2

    def reversed(self) -> "LoopCycle":
        return LoopCycle(self.points[::-1].copy())

    def segments(self):
        pts = self.points
        for i in range(len(pts)):
            yield pts[i], pts[(i + 1) % len(pts)]

    def to_complex(self) -> SimplicialComplex:
        n = len(self.points)
        return build_complex([(i, (i + 1) % n) for i in range(n)], self.points.tolist())


@dataclass
class SphereCycle:
    """Oriented closed triangle mesh in R^3 (vertices, triangles)."""

    vertices: np.ndarray
    triangles: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=int)
        if self.check:
            K = self.to_complex()
            chain = fundamental_cycle(K)
            if any(c != 1 for c in chain.coeffs.values()):
                raise FieldError("sphere mesh triangles are not coherently oriented")

    dim = 3

    def reversed(self) -> "SphereCycle":
        return SphereCycle(self.vertices.copy(), self.triangles[:, [0, 2, 1]].copy(), check=False)

    def to_complex(self) -> SimplicialComplex:
        return build_complex([tuple(t) for t in self.triangles.tolist()], self.vertices.tolist())


def circle_loop(center=(0.0, 0.0), radius: float = 1.0, n: int = 64, clockwise: bool = False) -> LoopCycle:
    t = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    if clockwise:
        t = -t
    pts = np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])
    return LoopCycle(pts)


def box_loop(box: IntervalBox, per_side: int = 4) -> LoopCycle:
    """Counter-clockwise boundary of a planar box."""
    (x0, x1), (y0, y1) = (box[0].lo, box[0].hi), (box[1].lo, box[1].hi)
    pts = []
    for i in range(per_side):
        pts.append((x0 + (x1 - x0) * i / per_side, y0))
    for i in range(per_side):
        pts.append((x1, y0 + (y1 - y0) * i / per_side))
    for i in range(per_side):
        pts.append((x1 - (x1 - x0) * i / per_side, y1))
    for i in range(per_side):
        pts.append((x0, y1 - (y1 - y0) * i / per_side))
    return LoopCycle(np.array(pts))


_ICO_T = (1 + 5 ** 0.5) / 2


def icosphere(subdivisions: int = 2, center=(0.0, 0.0, 0.0), radius: float = 1.0) -> SphereCycle:
    """Outward-oriented geodesic sphere mesh."""
    t = _ICO_T
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    vs = [np.array(v, float) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = vs[a] + vs[b]
                vs.append(m / np.linalg.norm(m))
                cache[key] = len(vs) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    V = np.array(vs) * radius + np.asarray(center, float)
    return SphereCycle(V, np.array(faces), check=subdivisions <= 2)


def box_surface(box: IntervalBox, per_side: int = 2) -> SphereCycle:
    """Outward-oriented triangulated boundary of a 3-box."""
    lo = np.array(box.lo)
    hi = np.array(box.hi)
    verts: list[tuple[float, float, float]] = []
    index: dict[tuple[int, int, int], int] = {}
    m = per_side

    def vid(i, j, k):
        key = (i, j, k)
        if key not in index:
            index[key] = len(verts)
            verts.append(tuple(lo + (hi - lo) * np.array([i, j, k]) / m))
        return index[key]

    tris = []
    for axis in range(3):
        a1, a2 = [a for a in range(3) if a != axis]
        for side in (0, m):
            for p in range(m):
                for q in range(m):
                    quad = []
                    for dp, dq in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        c = [0, 0, 0]
                        c[axis], c[a1], c[a2] = side, p + dp, q + dq
                        quad.append(vid(*c))
                    a, b, cc, d = quad
                    t1, t2 = (a, b, cc), (a, cc, d)
                    # orient so the normal points away from the box
                    e1 = np.subtract(verts[b], verts[a])
                    e2 = np.subtract(verts[cc], verts[a])
                    normal = np.cross(e1, e2)
                    outward = 1.0 if side == m else -1.0
                    if normal[axis] * outward < 0:
                        t1, t2 = (a, cc, b), (a, d, cc)
                    tris += [t1, t2]
    return SphereCycle(np.array(verts), np.array(tris), check=False)


def _mono(var: str, e: int) -> str:
    return "" if e == 0 else var if e == 1 else f"{var}^{e}"


def complex_power_field(k: int) -> VectorFieldSpec:
    """Field (Re, Im) of z**k for k >= 0 and of conj(z)**|k| for k < 0."""
    if k == 0:
        return VectorFieldSpec(["1", "0"], name="z^0")
    s = 1 if k > 0 else -1
    m = abs(k)
    re_terms, im_terms = [], []
    # (x1 + i*s*x2)^m = sum_j C(m,j) x1^(m-j) (i*s*x2)^j
    for j in range(m + 1):
        c = math.comb(m, j) * s ** j * (1 if j % 4 in (0, 1) else -1)
        factors = [_mono("x1", m - j), _mono("x2", j)]
        factors = [f for f in factors if f]
        if abs(c) != 1:
            factors.insert(0, str(abs(c)))
        term = "*".join(factors) or "1"
        (re_terms if j % 2 == 0 else im_terms).append(("+" if c > 0 else "-", term))

    def join(terms):
        if not terms:
            return "0"
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sg, t in terms[1:]:
            out += f" {sg} {t}"
        return out

    return VectorFieldSpec([join(re_terms), join(im_terms)], name=f"z^{k}")
