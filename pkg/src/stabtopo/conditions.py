"""Checkers for the topological necessary conditions, and the implication audit.

Every checker returns a :class:`ConditionVerdict`. ``Holds`` is scoped to
what was tested (target grid, field family, supplied cycles); ``Fails``
carries a witness that ``recheck_witness`` can re-verify with a different
method; ``Unknown`` names what was missing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .degree import ZeroOnCycleError, cycle_degree
from .expr import Node, parse_expression, substitute, sub, to_text, default_vars
from .fields import LoopCycle, SphereCycle, VectorFieldSpec, circle_loop, icosphere
from .interval import Interval, IntervalBox
from .solve import certify_solution, exclude
from .sublevel import LyapunovSpec, extract_sublevel_boundary, inward_check, verify_lyapunov
from .system import (
    FIBER_SAMPLED,
    HYPERSURFACE,
    TRIVIAL_VECTOR,
    VECTOR_BUNDLE,
    ControlSystemSpec,
    TargetSet,
    bounded_domain,
    certify_ray_avoidance,
    chi_of_target,
    fiber_min_norm,
    ray_constraints,
)

HOLDS = "Holds"
FAILS = "Fails"
UNKNOWN = "Unknown"

DEFAULT_DELTA = 0.1
DEFAULT_RESOLUTION = 32
DEFAULT_DEPTH_CAP = 12


class ValidationError(RuntimeError):
    """Reference field could not be validated as stabilizing."""


@dataclass
class ConditionVerdict:
    condition: str
    status: str
    certificate: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    @property
    def witness(self):
        return self.certificate.get("witness")

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "status": self.status,
            "certificate": self.certificate,
            "parameters": self.parameters,
        }


# ---------------------------------------------------------------------------
# Brockett
# ---------------------------------------------------------------------------

def brockett_targets(n: int, delta: float, resolution: int) -> list[tuple[float, ...]]:
    """Probe targets first (+-delta/2 e_i, then +-delta e_i), then a ball grid."""
    out: list[tuple[float, ...]] = []
    for scale in (0.5, 1.0):
        for i in range(n):
            for s in (1.0, -1.0):
                v = [0.0] * n
                v[i] = s * scale * delta
                out.append(tuple(v))
    k = max(3, resolution // 8 + 1)
    axis = np.linspace(-delta, delta, k)
    seen = set(out)
    for idx in np.ndindex(*(k,) * n):
        v = tuple(float(axis[i]) for i in idx)
        if math.sqrt(sum(x * x for x in v)) <= delta * (1 + 1e-12) and v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _target_constraints(sys: ControlSystemSpec, v: Sequence[float]):
    return [(e, Interval.point(float(t))) for e, t in zip(sys.exprs, v)]


def check_brockett(
    sys: ControlSystemSpec,
    A: TargetSet,
    delta: float = DEFAULT_DELTA,
    resolution: int = DEFAULT_RESOLUTION,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    seed: int = 0,
) -> ConditionVerdict:
    """f(x, u) = v solvable over N_A x U for every tested |v| <= delta."""
    params = {"delta": delta, "resolution": resolution, "depth_cap": depth_cap, "neighborhood": A.neighborhood.to_list()}
    if sys.bundle_kind == FIBER_SAMPLED:
        return ConditionVerdict(
            "brockett", UNKNOWN, {"reason": "Brockett's condition is stated for vector-bundle controls"}, params
        )
    domain = A.neighborhood.product(sys.control_box)
    rng = np.random.default_rng(seed)
    targets = brockett_targets(sys.n, delta, resolution)
    solved = []
    unresolved = []
    for v in targets:
        res = certify_solution(sys.exprs, v, sys.variables, domain, rng=rng)
        if res.solved:
            solved.append({"target": list(v), "solution_box": res.box})
            continue
        ex = exclude(_target_constraints(sys, v), sys.variables, domain, depth_cap=depth_cap, budget=5000)
        if ex.excluded:
            witness = {
                "kind": "unreachable_target",
                "target": list(v),
                "region": domain.to_list(),
                "variables": list(sys.variables),
                "boxes": ex.boxes,
            }
            return ConditionVerdict(
                "brockett",
                FAILS,
                {"witness": witness, "targets_tested": len(solved) + len(unresolved) + 1},
                params,
            )
        unresolved.append(list(v))
    if not unresolved:
        return ConditionVerdict(
            "brockett",
            HOLDS,
            {
                "scope": "every target of the tested grid is certified reachable",
                "targets_tested": len(targets),
                "sample_solutions": solved[:3],
            },
            params,
        )
    return ConditionVerdict(
        "brockett",
        UNKNOWN,
        {"reason": "targets neither solved nor excluded", "unresolved": unresolved[:10], "targets_tested": len(targets)},
        params,
    )


# ---------------------------------------------------------------------------
# Adversary
# ---------------------------------------------------------------------------

def default_family(sys: ControlSystemSpec) -> str:
    return "probe" if sys.bundle_kind == FIBER_SAMPLED else "constant"


def check_adversary(
    sys: ControlSystemSpec,
    A: TargetSet,
    delta: float = DEFAULT_DELTA,
    family: str | None = None,
    fields: Sequence[VectorFieldSpec] = (),
    resolution: int = DEFAULT_RESOLUTION,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    seed: int = 0,
) -> ConditionVerdict:
    family = family or default_family(sys)
    params = {"delta": delta, "family": family, "resolution": resolution, "neighborhood": A.neighborhood.to_list()}
    if family == "constant":
        if sys.bundle_kind == FIBER_SAMPLED:
            raise ValueError("fiber_sampled systems support only the probe and fields families")
        b = check_brockett(sys, A, delta, resolution, depth_cap, seed)
        cert = dict(b.certificate)
        cert["delegated_to"] = "brockett"
        return ConditionVerdict("adversary", b.status, cert, params)
    if family == "probe":
        fb = fiber_min_norm(sys, A.neighborhood)
        if fb.bound > delta:
            witness = {
                "kind": "fiber_disjoint",
                "lower_bound": fb.bound,
                "delta": delta,
                "region": A.neighborhood.to_list(),
                "adversary": "every field with |F| <= delta over the region",
            }
            return ConditionVerdict("adversary", FAILS, {"witness": witness, "fiber": fb.as_dict()}, params)
        return ConditionVerdict(
            "adversary", UNKNOWN, {"reason": "fiber norm bound does not exceed delta", "fiber": fb.as_dict()}, params
        )
    if family == "fields":
        return _adversary_fields(sys, A, fields, params, depth_cap, seed)
    raise ValueError(f"unknown adversary family {family!r}")


def _adversary_fields(sys, A, fields, params, depth_cap, seed) -> ConditionVerdict:
    if not fields:
        raise ValueError("fields family needs at least one adversary field")
    domain = A.neighborhood.product(sys.control_box)
    rng = np.random.default_rng(seed)
    defeated, unresolved = [], []
    for F in fields:
        if F.n != sys.n:
            raise ValueError("adversary field dimension differs from the state dimension")
        exprs = [sub(e, g) for e, g in zip(sys.exprs, F.components)]
        res = certify_solution(exprs, [0.0] * sys.n, sys.variables, domain, rng=rng)
        if res.solved:
            defeated.append({"field": F.texts(), "match_box": res.box})
            continue
        ex = exclude([(e, Interval(0.0, 0.0)) for e in exprs], sys.variables, domain, depth_cap=depth_cap, budget=5000)
        if ex.excluded:
            witness = {"kind": "unmatched_field", "field": F.texts(), "region": domain.to_list(), "variables": list(sys.variables)}
            return ConditionVerdict("adversary", FAILS, {"witness": witness}, params)
        unresolved.append(F.texts())
    if not unresolved:
        return ConditionVerdict(
            "adversary", HOLDS, {"scope": "every supplied adversary field is matched", "matches": defeated}, params
        )
    return ConditionVerdict("adversary", UNKNOWN, {"reason": "fields neither matched nor excluded", "unresolved": unresolved}, params)


# ---------------------------------------------------------------------------
# Image subgroups (Coron, Mansouri)
# ---------------------------------------------------------------------------

@dataclass
class CycleSpec:
    """A state cycle paired with a control (or fiber-parameter) section u(x)."""

    cycle: LoopCycle | SphereCycle
    section: list
    label: str = ""


@dataclass
class SubgroupImage:
    d: int
    contributions: list = field(default_factory=list)
    rejected: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"d": self.d, "contributions": self.contributions, "rejected": self.rejected}


def closed_loop_field(sys: ControlSystemSpec, section: Sequence) -> VectorFieldSpec:
    sec = [parse_expression(s, sys.state_vars) if isinstance(s, str) else s for s in section]
    if len(sec) != sys.m:
        raise ValueError(f"section needs {sys.m} components")
    mapping = dict(zip(sys.control_vars, sec))
    return VectorFieldSpec([substitute(e, mapping) for e in sys.exprs])


def _section_in_box(sys: ControlSystemSpec, section_field: VectorFieldSpec | None, sec_nodes, pts) -> bool:
    from .expr import compile_float

    fs = [compile_float(s, sys.state_vars) for s in sec_nodes]
    for p in pts:
        for f, iv in zip(fs, sys.control_box):
            try:
                val = f(p)
            except ArithmeticError:
                return False
            if not (iv.lo - 1e-12 <= val <= iv.hi + 1e-12):
                return False
    return True


def coron_image_subgroup(sys: ControlSystemSpec, cycles: Sequence[CycleSpec]) -> SubgroupImage:
    """gcd of the certified degrees of pi_2 o f(x, u(x)) over the given cycles.

    This is a lower bound for the image of f_* on H_{n-1}: the true image
    contains the returned subgroup dZ.
    """
    degrees = []
    contributions, rejected = [], []
    for cs in cycles:
        label = cs.label or type(cs.cycle).__name__
        sec_nodes = [parse_expression(s, sys.state_vars) if isinstance(s, str) else s for s in cs.section]
        pts = cs.cycle.points if isinstance(cs.cycle, LoopCycle) else cs.cycle.vertices
        if not _section_in_box(sys, None, sec_nodes, pts):
            rejected.append({"cycle": label, "reason": "section leaves the control box"})
            continue
        F = closed_loop_field(sys, sec_nodes)
        try:
            deg = cycle_degree(F, cs.cycle)
        except ZeroOnCycleError as exc:
            rejected.append({"cycle": label, "reason": f"not in Sigma: {exc}"})
            continue
        entry = {"cycle": label, "section": [to_text(s) for s in sec_nodes], "degree": deg.degree, "status": deg.status}
        contributions.append(entry)
        if deg.certified:
            degrees.append(abs(deg.degree))
    d = reduce(math.gcd, degrees, 0)
    return SubgroupImage(d, contributions, rejected)


def random_cycles(sys: ControlSystemSpec, A: TargetSet, count: int = 20, seed: int = 0) -> list[CycleSpec]:
    """Seeded random circles/spheres in N_A with random affine sections.

    Every second cycle is centred on a point target with a linear section
    vanishing there, which picks up the linearization's degree. Candidates
    whose closed-loop field comes close to zero on the cycle are redrawn,
    so that every accepted cycle lies in Sigma with some margin.
    """
    rng = np.random.default_rng(seed)
    N = A.neighborhood
    n = sys.n
    centre0 = np.array(A.point if A.point is not None else N.mid, float)
    half = min(N.widths) / 2
    out: list[CycleSpec] = []
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        radius = half * rng.uniform(0.2, 0.5)
        centre = centre0 + rng.uniform(-0.3, 0.3, n) * half
        anchored = A.point is not None and tries % 2 == 0
        if anchored:
            centre = centre0
        if n == 2:
            cyc = circle_loop(tuple(centre), radius, n=48)
            pts = cyc.points
            probe = circle_loop(tuple(centre), radius, n=192).points
        elif n == 3:
            cyc = icosphere(1, tuple(centre), radius)
            pts = cyc.vertices
            probe = icosphere(3, tuple(centre), radius).vertices
        else:
            raise ValueError("random cycles are available for n = 2, 3")
        if not all(N.contains(p) for p in pts):
            continue
        a = rng.normal(0.0, 1.0, sys.m) * (0.0 if anchored else 1.0)
        B = rng.normal(0.0, 1.0, (sys.m, n))
        if sys.bundle_kind != FIBER_SAMPLED:
            # scale the section into the control box on the cycle
            vals = np.array([a + B @ (p - centre) for p in pts])
            lim = np.array([min(abs(iv.lo), abs(iv.hi)) for iv in sys.control_box])
            scale = float(np.min(lim / np.maximum(np.max(np.abs(vals), axis=0), 1e-12)))
            a, B = a * min(1.0, 0.9 * scale), B * min(1.0, 0.9 * scale)
        section = []
        for j in range(sys.m):
            terms = [f"{float(a[j])!r}"] + [f"{float(B[j, k])!r}*(x{k + 1} - {float(centre[k])!r})" for k in range(n)]
            section.append(" + ".join(terms).replace("+ -", "- "))
        try:
            fv = np.array([sys.evaluate(p, a + B @ (p - centre)) for p in probe])
        except ArithmeticError:
            continue
        norms = np.linalg.norm(fv, axis=1)
        if norms.min() < 0.05 * max(norms.max(), 1e-300):
            continue
        if anchored and not _regular_linearization(sys, centre, B):
            continue
        out.append(CycleSpec(cyc, section, f"random#{len(out)} r={radius:.3f}"))
    return out


def _regular_linearization(sys: ControlSystemSpec, centre, B, h: float = 1e-6) -> bool:
    """Closed-loop Jacobian at the centre is well conditioned (central differences)."""
    n = sys.n
    cols = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        try:
            fp = sys.evaluate(centre + e, B @ e)
            fm = sys.evaluate(centre - e, -B @ e)
        except ArithmeticError:
            return False
        cols.append((fp - fm) / (2 * h))
    J = np.array(cols).T
    sv = np.linalg.svd(J, compute_uv=False)
    return bool(np.all(np.isfinite(sv)) and sv[-1] > 1e-3 * max(sv[0], 1e-300))


def _chi_star(A: TargetSet) -> tuple[int, str]:
    if A.variant == HYPERSURFACE:
        return bounded_domain(A).euler, "chi(M_A)"
    return chi_of_target(A), "chi(A)"


def _subgroup_verdict(name, chi, chi_label, img: SubgroupImage, avoidance, params) -> ConditionVerdict:
    cert = {"chi_star": chi, "chi_kind": chi_label, "image": img.as_dict()}
    if chi == 0:
        cert["scope"] = "chi* = 0, the required subgroup is trivial"
        return ConditionVerdict(name, HOLDS, cert, params)
    if img.d != 0 and chi % img.d == 0:
        cert["scope"] = "dZ from the supplied cycles contains chi* Z"
        return ConditionVerdict(name, HOLDS, cert, params)
    if avoidance is not None and avoidance.proved:
        cert["witness"] = dict(avoidance.as_dict(), kind="ray_avoidance")
        cert["reason"] = "image of f misses a ray, so the image subgroup is 0"
        return ConditionVerdict(name, FAILS, cert, params)
    cert["reason"] = "cycles only bound the image subgroup from below"
    return ConditionVerdict(name, UNKNOWN, cert, params)


def _avoidance(sys, A, direction, depth_cap):
    if direction is None:
        return None
    return certify_ray_avoidance(sys, A.neighborhood, direction, depth_cap=depth_cap)


def check_coron(
    sys: ControlSystemSpec,
    A: TargetSet,
    cycles: Sequence[CycleSpec],
    avoidance_direction: Sequence[float] | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    image: SubgroupImage | None = None,
) -> ConditionVerdict:
    """f_* onto H_{n-1}(R^n - 0) = Z, i.e. d = 1 on some supplied cycles."""
    img = image if image is not None else coron_image_subgroup(sys, cycles)
    params = {"cycles": len(cycles), "avoidance_direction": avoidance_direction}
    cert = {"image": img.as_dict()}
    if img.d == 1:
        cert["scope"] = "a supplied cycle has degree +-1 (or the degrees are coprime)"
        return ConditionVerdict("coron", HOLDS, cert, params)
    av = _avoidance(sys, A, avoidance_direction, depth_cap)
    if av is not None and av.proved:
        cert["witness"] = dict(av.as_dict(), kind="ray_avoidance")
        return ConditionVerdict("coron", FAILS, cert, params)
    cert["reason"] = "no degree +-1 cycle found and no avoidance certificate"
    return ConditionVerdict("coron", UNKNOWN, cert, params)


def check_mansouri(
    sys: ControlSystemSpec,
    A: TargetSet,
    cycles: Sequence[CycleSpec],
    avoidance_direction: Sequence[float] | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    image: SubgroupImage | None = None,
) -> ConditionVerdict:
    chi, label = _chi_star(A)
    img = image if image is not None else coron_image_subgroup(sys, cycles)
    av = None if (chi == 0 or (img.d and chi % img.d == 0)) else _avoidance(sys, A, avoidance_direction, depth_cap)
    params = {"cycles": len(cycles), "avoidance_direction": avoidance_direction}
    return _subgroup_verdict("mansouri", chi, label, img, av, params)


# ---------------------------------------------------------------------------
# Homology condition, Euclidean form
# ---------------------------------------------------------------------------

def check_homology_euclidean(
    sys: ControlSystemSpec,
    A: TargetSet,
    G_ref: VectorFieldSpec,
    lyapunov: LyapunovSpec,
    cycles: Sequence[CycleSpec],
    avoidance_direction: Sequence[float] | None = None,
    resolution: int | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    image: SubgroupImage | None = None,
) -> ConditionVerdict:
    """Compare G_ref's boundary class chi* Z with the image subgroup of f.

    G_ref is validated first: dV.G_ref < 0 on eps <= V <= c and inward at
    V = c. The left side is cross-checked by the degrees of G_ref on the
    components of the boundary of S: their gcd must equal |chi*|.
    """
    n = sys.n
    if n not in (2, 3):
        raise ValueError("the homology check is implemented for n = 2, 3")
    if resolution is None:
        resolution = 64 if n == 2 else 16
    lyap = verify_lyapunov(lyapunov, G_ref)
    if not lyap:
        raise ValidationError(f"Lyapunov decrease not certified: {lyap.reason}")
    boundary = extract_sublevel_boundary(lyapunov, resolution)
    inward = inward_check(G_ref, boundary, lyapunov)
    if not inward:
        raise ValidationError(f"reference field not certified inward: {inward.reason}")
    chi, label = _chi_star(A)
    comps = []
    for cyc in boundary_components(boundary):
        d = cycle_degree(G_ref, cyc)
        comps.append({"degree": d.degree, "status": d.status})
    left = reduce(math.gcd, [abs(c["degree"]) for c in comps], 0)
    consistent = all(c["status"] == "certified" for c in comps) and left == abs(chi)
    img = image if image is not None else coron_image_subgroup(sys, cycles)
    params = {
        "level": lyapunov.c,
        "resolution": resolution,
        "cycles": len(cycles),
        "avoidance_direction": avoidance_direction,
    }
    if not consistent:
        return ConditionVerdict(
            "homology",
            UNKNOWN,
            {
                "reason": "boundary degrees of G_ref do not reproduce chi*",
                "chi_star": chi,
                "boundary_degrees": comps,
            },
            params,
        )
    av = None if (chi == 0 or (img.d and chi % img.d == 0)) else _avoidance(sys, A, avoidance_direction, depth_cap)
    v = _subgroup_verdict("homology", chi, label, img, av, params)
    v.certificate["left_side"] = {
        "generator": left,
        "boundary_degrees": comps,
        "lyapunov": lyap.as_dict(),
        "inward": inward.as_dict(),
    }
    return v


def boundary_components(boundary) -> list:
    """Connected components of an extracted boundary as separate cycles."""
    if boundary.n == 2:
        return list(boundary.loops)
    mesh = boundary.mesh
    parent = list(range(len(mesh.vertices)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b, c in mesh.triangles:
        for x, y in ((a, b), (b, c)):
            rx, ry = find(int(x)), find(int(y))
            if rx != ry:
                parent[rx] = ry
    groups: dict[int, list] = {}
    for t in mesh.triangles:
        groups.setdefault(find(int(t[0])), []).append(t)
    out = []
    for tris in groups.values():
        tris = np.array(tris)
        used = np.unique(tris)
        remap = {int(v): i for i, v in enumerate(used)}
        out.append(
            SphereCycle(mesh.vertices[used], np.vectorize(remap.get)(tris), check=False)
        )
    return out


# ---------------------------------------------------------------------------
# Implication audit
# ---------------------------------------------------------------------------

@dataclass
class AuditInstance:
    name: str
    system: ControlSystemSpec
    target: TargetSet
    G_ref: VectorFieldSpec
    lyapunov: LyapunovSpec
    cycles: list
    avoidance_direction: list | None = None
    delta: float = DEFAULT_DELTA
    adversary_family: str | None = None


def run_all(inst: AuditInstance, resolution: int = DEFAULT_RESOLUTION, depth_cap: int = DEFAULT_DEPTH_CAP, seed: int = 0) -> dict[str, ConditionVerdict]:
    sys, A = inst.system, inst.target
    img = coron_image_subgroup(sys, inst.cycles)
    out = {
        "brockett": check_brockett(sys, A, inst.delta, resolution, depth_cap, seed),
        "adversary": check_adversary(sys, A, inst.delta, inst.adversary_family, resolution=resolution, depth_cap=depth_cap, seed=seed),
        "coron": check_coron(sys, A, inst.cycles, inst.avoidance_direction, depth_cap, img),
        "mansouri": check_mansouri(sys, A, inst.cycles, inst.avoidance_direction, depth_cap, img),
    }
    try:
        out["homology"] = check_homology_euclidean(
            sys, A, inst.G_ref, inst.lyapunov, inst.cycles, inst.avoidance_direction, depth_cap=depth_cap, image=img
        )
    except ValidationError as exc:
        out["homology"] = ConditionVerdict("homology", UNKNOWN, {"reason": f"reference field not validated: {exc}"})
    return out


@dataclass
class AuditReport:
    verdicts: dict
    contradictions: list
    independence_witnesses: list
    inconclusive: list
    coron_brockett_flags: list

    @property
    def flags(self) -> list:
        return self.contradictions + self.coron_brockett_flags

    def as_dict(self) -> dict:
        return {
            "instances": {k: {c: v.as_dict() for c, v in vs.items()} for k, vs in self.verdicts.items()},
            "contradictions": self.contradictions,
            "coron_brockett_flags": self.coron_brockett_flags,
            "independence_witnesses": self.independence_witnesses,
            "inconclusive": self.inconclusive,
        }


def audit_implications(
    instances: Sequence[AuditInstance],
    resolution: int = DEFAULT_RESOLUTION,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    seed: int = 0,
) -> AuditReport:
    """Run every checker and look for certified violations of the implications.

    Gate (vector-bundle controls, orientable state, chi* != 0): homology
    Holds together with adversary Fails contradicts the theorem and is a
    toolkit failure. The same pair on a fiber_sampled system is an
    independence witness. Coron Holds with Brockett Fails is flagged for
    trivial_vector systems.
    """
    verdicts, contradictions, witnesses, inconclusive, cb = {}, [], [], [], []
    for inst in instances:
        v = run_all(inst, resolution, depth_cap, seed)
        verdicts[inst.name] = v
        sys = inst.system
        chi, _ = _chi_star(inst.target)
        hs, ad = v["homology"].status, v["adversary"].status
        if UNKNOWN in (hs, ad):
            inconclusive.append({"instance": inst.name, "homology": hs, "adversary": ad})
        pair = hs == HOLDS and ad == FAILS
        if pair and sys.bundle_kind in (TRIVIAL_VECTOR, VECTOR_BUNDLE) and sys.orientable_state and chi != 0:
            contradictions.append(
                {"instance": inst.name, "bundle_kind": sys.bundle_kind, "homology": hs, "adversary": ad, "chi_star": chi}
            )
        elif pair and sys.bundle_kind == FIBER_SAMPLED:
            witnesses.append({"instance": inst.name, "homology": hs, "adversary": ad})
        if sys.bundle_kind == TRIVIAL_VECTOR and v["coron"].status == HOLDS and v["brockett"].status == FAILS:
            cb.append({"instance": inst.name, "coron": HOLDS, "brockett": FAILS})
    return AuditReport(verdicts, contradictions, witnesses, inconclusive, cb)


# ---------------------------------------------------------------------------
# Witness re-verification
# ---------------------------------------------------------------------------

def recheck_witness(sys: ControlSystemSpec, witness: dict, depth_cap: int = 24) -> bool:
    """Re-verify a Fails witness without the HC4 contractor (forward bounds only)."""
    kind = witness.get("kind")
    if kind == "unreachable_target":
        region = IntervalBox(witness["region"])
        cons = _target_constraints(sys, witness["target"])
        return exclude(cons, sys.variables, region, depth_cap=depth_cap, budget=200000, contract=False).excluded
    if kind == "ray_avoidance":
        # open rays are out of reach of forward bounds alone; rerun the
        # contraction with the constraints reversed and plain bisection
        box = IntervalBox(witness["region"]).product(sys.control_box)
        cons = list(reversed(ray_constraints(sys, witness["direction"])))
        return exclude(cons, sys.variables, box, depth_cap=depth_cap, budget=200000, widest=True).excluded
    if kind == "fiber_disjoint":
        fb = fiber_min_norm(sys, IntervalBox(witness["region"]), budget=20000)
        return fb.bound > witness["delta"]
    if kind == "unmatched_field":
        F = VectorFieldSpec(witness["field"])
        exprs = [sub(e, g) for e, g in zip(sys.exprs, F.components)]
        cons = [(e, Interval(0.0, 0.0)) for e in exprs]
        return exclude(cons, sys.variables, IntervalBox(witness["region"]), depth_cap=depth_cap, budget=200000, contract=False).excluded
    raise ValueError(f"unknown witness kind {kind!r}")
