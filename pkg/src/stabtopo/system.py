"""Control systems f(x, u), target sets, and fiber-level bounds."""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complexes import SimplicialComplex, build_complex, connected_components, fundamental_cycle
from .expr import CompiledScalar, Node, add, const, default_vars, mul, norm_lower, parse_expression, sum_nodes
from .homology import homology_profile
from .interval import DomainViolation, Interval, IntervalBox
from .solve import exclude

TRIVIAL_VECTOR = "trivial_vector"
VECTOR_BUNDLE = "vector_bundle_declared"
FIBER_SAMPLED = "fiber_sampled"
BUNDLE_KINDS = (TRIVIAL_VECTOR, VECTOR_BUNDLE, FIBER_SAMPLED)


class SystemError_(ValueError):
    pass


class ControlError(SystemError_):
    pass


@dataclass
class ControlSystemSpec:
    """f(x, u) over R^n with controls (or fiber parameters) u1..um in a box.

    For ``fiber_sampled`` systems u is the fiber parameter (e.g. an angle)
    and the norm constraints of the fiber hold by construction of f.
    """

    name: str
    n: int
    dynamics: list
    control_box: IntervalBox
    bundle_kind: str = TRIVIAL_VECTOR
    orientable_state: bool = True
    description: str = ""

    def __post_init__(self):
        if self.bundle_kind not in BUNDLE_KINDS:
            raise SystemError_(f"unknown bundle_kind {self.bundle_kind!r}")
        self.control_box = IntervalBox(self.control_box)
        self.m = self.control_box.dim
        self.state_vars = default_vars(self.n)
        self.control_vars = default_vars(self.m, "u")
        self.variables = self.state_vars + self.control_vars
        if len(self.dynamics) != self.n:
            raise SystemError_(f"dynamics: expected {self.n} components, got {len(self.dynamics)}")
        self.exprs: list[Node] = [
            parse_expression(d, self.variables) if isinstance(d, str) else d for d in self.dynamics
        ]
        self.compiled = [CompiledScalar(e, self.variables) for e in self.exprs]
        if self.bundle_kind == TRIVIAL_VECTOR:
            if not self.control_box.contains([0.0] * self.m):
                raise SystemError_("trivial_vector systems need u = 0 in the control box")
            try:
                self.evaluate(np.zeros(self.n), np.zeros(self.m))
            except ArithmeticError as exc:
                raise SystemError_(f"dynamics undefined on the zero section: {exc}") from None

    def evaluate(self, x: Sequence[float], u: Sequence[float]) -> np.ndarray:
        z = list(map(float, x)) + list(map(float, u))
        return np.array([c.f(z) for c in self.compiled])

    def enclosure(self, box: Sequence[Interval]) -> list[Interval] | None:
        try:
            return [c.fi(box) for c in self.compiled]
        except DomainViolation:
            return None

    def texts(self) -> list[str]:
        from .expr import to_text

        return [to_text(e) for e in self.exprs]

    @property
    def smooth(self) -> bool:
        return all(c.smooth for c in self.compiled)

    def relabel(self, bundle_kind: str) -> "ControlSystemSpec":
        return ControlSystemSpec(
            self.name, self.n, list(self.exprs), self.control_box, bundle_kind, self.orientable_state, self.description
        )


def evaluate_dynamics(sys: ControlSystemSpec, x: Sequence[float], u: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    """f(x, u); u must lie in the declared control (or parameter) box."""
    if len(x) != sys.n or len(u) != sys.m:
        raise ControlError(f"expected x in R^{sys.n} and u in R^{sys.m}")
    for iv, ui in zip(sys.control_box, u):
        if not (iv.lo - tol <= ui <= iv.hi + tol):
            raise ControlError(f"control {list(u)} outside the control box {sys.control_box.to_list()}")
    return sys.evaluate(x, u)


# ---------------------------------------------------------------------------
# Fiber norm bounds
# ---------------------------------------------------------------------------

@dataclass
class FiberBound:
    bound: float
    boxes: int
    sampled_min: float

    def as_dict(self) -> dict:
        return {"lower_bound": self.bound, "boxes": self.boxes, "sampled_min": self.sampled_min}


def fiber_min_norm(sys: ControlSystemSpec, region: IntervalBox, budget: int = 4000, tol: float = 1e-3) -> FiberBound:
    """Certified lower bound on |f(x, u)| over x in ``region``, u in the fiber.

    Best-first refinement of the (x, u) box with the smallest enclosure
    norm; stops when the bound is within ``tol`` of a sampled value or the
    box budget runs out. 0 is returned when nothing positive is provable.
    """
    root = IntervalBox(region).product(sys.control_box)
    sampled = math.inf

    def lower(box):
        enc = sys.enclosure(box)
        return 0.0 if enc is None else norm_lower(enc)

    def sample(box):
        try:
            return float(np.linalg.norm(sys.evaluate(box.mid[: sys.n], box.mid[sys.n:])))
        except ArithmeticError:
            return math.inf

    counter = itertools.count()
    heap = [(lower(root), next(counter), root)]
    sampled = sample(root)
    boxes = 1
    while heap and boxes < budget:
        lb, _, box = heap[0]
        if sampled - lb <= tol * max(1.0, sampled) or sampled == 0.0:
            break
        heapq.heappop(heap)
        axis = _norm_axis(sys, box)
        for half in box.bisect(axis):
            heapq.heappush(heap, (lower(half), next(counter), half))
            sampled = min(sampled, sample(half))
            boxes += 1
    bound = heap[0][0] if heap else 0.0
    return FiberBound(max(0.0, bound), boxes, sampled)


def _norm_axis(sys: ControlSystemSpec, box: IntervalBox) -> int:
    widths = np.array(box.widths)
    score = np.zeros_like(widths)
    for c in sys.compiled:
        try:
            g = c.grad_interval(box)
        except DomainViolation:
            return int(np.argmax(widths))
        score += np.array([gi.mag for gi in g]) * widths
    if not np.any(score > 0):
        score = widths
    return int(np.argmax(score))


# ---------------------------------------------------------------------------
# Image avoidance
# ---------------------------------------------------------------------------

@dataclass
class AvoidanceCertificate:
    direction: list[float]
    region: list
    proved: bool
    boxes: int
    reason: str = ""

    def as_dict(self) -> dict:
        return {
            "kind": "ray",
            "direction": self.direction,
            "region": self.region,
            "proved": self.proved,
            "boxes": self.boxes,
            "reason": self.reason,
        }


def _complement_basis(d: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(np.column_stack([d] + [np.eye(len(d))[:, i] for i in range(len(d))]))
    return q[:, 1 : len(d)].T


def ray_constraints(sys: ControlSystemSpec, direction: Sequence[float]):
    """Constraints for f(x, u) = t * direction with t > 0."""
    d = np.asarray(direction, float)
    if np.linalg.norm(d) == 0:
        raise SystemError_("ray direction must be nonzero")
    d = d / np.linalg.norm(d)
    axis = [i for i in range(len(d)) if d[i] != 0]
    cons = []
    if len(axis) == 1:
        # coordinate ray: keep constants exact
        k = axis[0]
        for i, e in enumerate(sys.exprs):
            if i != k:
                cons.append((e, Interval(0.0, 0.0)))
        sign = 1.0 if d[k] > 0 else -1.0
        cons.append((mul(const(sign), sys.exprs[k]) if sign < 0 else sys.exprs[k], Interval(5e-324, 1e308)))
        return cons
    for w in _complement_basis(d):
        cons.append((sum_nodes([mul(const(float(wi)), e) for wi, e in zip(w, sys.exprs) if wi]), Interval(0.0, 0.0)))
    cons.append((sum_nodes([mul(const(float(di)), e) for di, e in zip(d, sys.exprs) if di]), Interval(5e-324, 1e308)))
    return cons


def certify_ray_avoidance(
    sys: ControlSystemSpec,
    region: IntervalBox,
    direction: Sequence[float],
    depth_cap: int = 12,
    contract: bool = True,
) -> AvoidanceCertificate:
    """Prove that f(x, u) never lies on the open ray R_{>0} * direction.

    The image of f over region x controls then sits in R^n minus a ray,
    which is contractible, so every cycle of Sigma has degree 0.
    """
    box = IntervalBox(region).product(sys.control_box)
    res = exclude(ray_constraints(sys, direction), sys.variables, box, depth_cap=depth_cap, contract=contract)
    return AvoidanceCertificate(
        [float(x) for x in direction], IntervalBox(region).to_list(), res.excluded, res.boxes, res.reason
    )


# ---------------------------------------------------------------------------
# Target sets
# ---------------------------------------------------------------------------

POINT = "point"
TRIANGULATED = "triangulated"
HYPERSURFACE = "hypersurface"


@dataclass
class TargetSet:
    variant: str
    neighborhood: IntervalBox
    point: list[float] | None = None
    complex: SimplicialComplex | None = None
    _chi: int | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.variant not in (POINT, TRIANGULATED, HYPERSURFACE):
            raise SystemError_(f"unknown target variant {self.variant!r}")
        self.neighborhood = IntervalBox(self.neighborhood)
        if self.variant == POINT and self.point is None:
            raise SystemError_("point target needs coordinates")
        if self.variant == HYPERSURFACE:
            if self.complex is None:
                raise SystemError_("hypersurface target needs a mesh")
            fundamental_cycle(self.complex)

    @property
    def n(self) -> int:
        return self.neighborhood.dim

    @property
    def dim(self) -> int:
        if self.variant == POINT:
            return 0
        return self.complex.dim

    @classmethod
    def at_point(cls, point: Sequence[float], radius: float = 1.0) -> "TargetSet":
        p = [float(x) for x in point]
        return cls(POINT, IntervalBox([(x - radius, x + radius) for x in p]), point=p)


def chi_of_target(A: TargetSet) -> int:
    if A.variant == POINT:
        return 1
    if A.complex is None:
        raise SystemError_("target has no triangulation")
    if A._chi is None:
        A._chi = homology_profile(A.complex).euler
    return A._chi


@dataclass
class FilledDomain:
    complex: SimplicialComplex
    euler: int
    resolution: int


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def bounded_domain(A: TargetSet, resolution: int | None = None) -> FilledDomain:
    """Compact domain M_A bounded by a closed connected hypersurface A.

    Interior cells of a pixel/voxel grid are found by ray-casting parity; the
    union of interior cells is triangulated (Kuhn split) and its Euler
    characteristic taken from homology.
    """
    if A.variant != HYPERSURFACE:
        raise SystemError_("bounded_domain needs a hypersurface target")
    K = A.complex
    n = A.n
    if K.dim != n - 1:
        raise SystemError_(f"hypersurface in R^{n} must be {n - 1}-dimensional")
    if len(connected_components(K)) != 1:
        raise SystemError_("hypersurface must be a single closed connected component")
    if resolution is None:
        resolution = 48 if n == 2 else 14
    pts = np.array([K.coords[v] for v in K.vertices])
    idx = {v: i for i, v in enumerate(K.vertices)}
    cells = [[idx[v] for v in s] for s in K.top_simplices()]
    if n == 2:
        for (i, a), (j, b) in itertools.combinations(enumerate(cells), 2):
            if set(a) & set(b):
                continue
            if _segments_cross(pts[a[0]], pts[a[1]], pts[b[0]], pts[b[1]]):
                raise SystemError_("hypersurface is not embedded (edges cross)")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    pad = 0.05 * (hi - lo).max()
    lo, hi = lo - pad, hi + pad
    h = (hi - lo) / resolution
    centres = np.stack(
        np.meshgrid(*[lo[k] + h[k] * (np.arange(resolution) + 0.5) for k in range(n)], indexing="ij"), -1
    ).reshape(-1, n)
    # a slightly skewed ray avoids passing through mesh vertices
    ray = np.array([1.0, 0.1234567891, 0.0678901234][:n])
    inside = _parity(centres, pts, cells, ray)
    flags = inside.reshape((resolution,) * n)
    from .sublevel import _kuhn_simplices

    size = resolution + 2  # vertex grid with one cell of margin
    offsets = _kuhn_simplices(n)
    top = []

    def flat(v):
        f = 0
        for i in v:
            f = f * size + i
        return f

    for cell in zip(*np.nonzero(flags)):
        for simplex in offsets:
            top.append(tuple(flat(tuple(c + o for c, o in zip(cell, off))) for off in simplex))
    if not top:
        raise SystemError_("no interior cells found; raise the resolution")
    filled = build_complex(top)
    return FilledDomain(filled, homology_profile(filled).euler, resolution)


def _parity(centres: np.ndarray, pts: np.ndarray, cells, ray: np.ndarray) -> np.ndarray:
    count = np.zeros(len(centres), dtype=int)
    n = pts.shape[1]
    for c in cells:
        P = pts[c]
        if n == 2:
            a, b = P
            # solve centre + t*ray = a + s*(b - a), t > 0, 0 <= s < 1
            M = np.array([[ray[0], a[0] - b[0]], [ray[1], a[1] - b[1]]])
            det = np.linalg.det(M)
            if abs(det) < 1e-300:
                continue
            rhs = a[None, :] - centres
            inv = np.linalg.inv(M)
            ts = rhs @ inv.T
            hit = (ts[:, 0] > 0) & (ts[:, 1] >= 0) & (ts[:, 1] < 1)
        else:
            a, b, cc = P
            e1, e2 = b - a, cc - a
            pvec = np.cross(ray, e2)
            det = float(np.dot(e1, pvec))
            if abs(det) < 1e-300:
                continue
            tvec = centres - a
            u = tvec @ pvec / det
            q = np.cross(tvec, e1)
            v = q @ ray / det
            t = q @ e2 / det
            hit = (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 0)
        count += hit
    return count % 2 == 1
