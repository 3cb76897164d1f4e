"""Built-in instances with documented expected verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conditions import AuditInstance, CycleSpec, random_cycles
from .fields import VectorFieldSpec, circle_loop
from .interval import IntervalBox
from .sublevel import LyapunovSpec
from .system import FIBER_SAMPLED, HYPERSURFACE, TRIVIAL_VECTOR, ControlSystemSpec, TargetSet


@dataclass
class CatalogEntry:
    name: str
    description: str
    expected: dict
    instance: AuditInstance
    parameters: dict = field(default_factory=dict)


def brockett_integrator(seed: int = 0, cycles: int = 20) -> CatalogEntry:
    box = IntervalBox.cube(-2.0, 2.0, 2)
    sys = ControlSystemSpec(
        "brockett_integrator", 3, ["u1", "u2", "u1*x2 - u2*x1"], box,
        description="nonholonomic integrator x' = (u1, u2, u1 x2 - u2 x1)",
    )
    A = TargetSet.at_point([0.0, 0.0, 0.0], radius=2.0)
    inst = AuditInstance(
        sys.name, sys, A,
        VectorFieldSpec(["-x1", "-x2", "-x3"]),
        LyapunovSpec("x1^2 + x2^2 + x3^2", 1.0, A.neighborhood),
        random_cycles(sys, A, cycles, seed),
        avoidance_direction=[0.0, 0.0, 1.0],
    )
    expected = {"brockett": "Fails", "adversary": "Fails", "coron": "Fails", "mansouri": "Fails", "homology": "Fails"}
    return CatalogEntry(sys.name, "Brockett's nonholonomic integrator; the image of f misses the punctured z-axis", expected, inst)


def example5_circle_bundle() -> CatalogEntry:
    sys = ControlSystemSpec(
        "example5_circle_bundle", 2, ["cos(u1)", "sin(u1)"], [(-math.pi, math.pi)],
        bundle_kind=FIBER_SAMPLED,
        description="controls are unit tangent vectors, parametrized by their angle u1",
    )
    A = TargetSet.at_point([0.0, 0.0], radius=1.0)
    outward = CycleSpec(circle_loop((0.0, 0.0), 0.5, n=64), ["atan2(x2, x1)"], "circle r=0.5, outward angle")
    inst = AuditInstance(
        sys.name, sys, A,
        VectorFieldSpec(["-x1", "-x2"]),
        LyapunovSpec("x1^2 + x2^2", 0.25, A.neighborhood),
        [outward],
        delta=0.9,
        adversary_family="probe",
    )
    expected = {"homology": "Holds", "adversary": "Fails", "coron": "Holds", "mansouri": "Holds", "brockett": "Unknown"}
    return CatalogEntry(sys.name, "circle bundle of unit-norm tangent vectors over the plane", expected, inst, {"delta": 0.9})


def single_integrator_2d() -> CatalogEntry:
    sys = ControlSystemSpec("single_integrator_2d", 2, ["u1", "u2"], IntervalBox.cube(-1.0, 1.0, 2),
                            description="x' = u")
    A = TargetSet.at_point([0.0, 0.0], radius=1.0)
    inst = AuditInstance(
        sys.name, sys, A,
        VectorFieldSpec(["-x1", "-x2"]),
        LyapunovSpec("x1^2 + x2^2", 0.5, A.neighborhood),
        [CycleSpec(circle_loop((0.0, 0.0), 0.5, n=48), ["x1", "x2"], "circle r=0.5, u = x")],
        delta=0.5,
    )
    expected = {c: "Holds" for c in ("brockett", "adversary", "coron", "mansouri", "homology")}
    return CatalogEntry(sys.name, "single integrator in the plane", expected, inst, {"delta": 0.5})


def circle_target_mansouri() -> CatalogEntry:
    sys = ControlSystemSpec("circle_target_mansouri", 2, ["u1", "u2"], IntervalBox.cube(-1.0, 1.0, 2),
                            description="x' = u stabilizing the unit circle")
    loop = circle_loop((0.0, 0.0), 1.0, n=64)
    A = TargetSet(HYPERSURFACE, IntervalBox.cube(-2.0, 2.0, 2), complex=loop.to_complex())
    G = VectorFieldSpec(["(1 - x1^2 - x2^2)*x1", "(1 - x1^2 - x2^2)*x2"])
    inst = AuditInstance(
        sys.name, sys, A, G,
        LyapunovSpec("(x1^2 + x2^2 - 1)^2", 0.2, A.neighborhood),
        [CycleSpec(circle_loop((0.0, 0.0), 1.5, n=64), ["0.5*x1", "0.5*x2"], "circle r=1.5, u = x/2")],
    )
    expected = {c: "Holds" for c in ("brockett", "adversary", "coron", "mansouri", "homology")}
    return CatalogEntry(sys.name, "unit circle target; hypersurface clause with chi(M_A) = chi(disk) = 1", expected, inst)


_BUILDERS = {
    "brockett_integrator": brockett_integrator,
    "example5_circle_bundle": example5_circle_bundle,
    "single_integrator_2d": single_integrator_2d,
    "circle_target_mansouri": circle_target_mansouri,
}


def catalog_names() -> list[str]:
    return list(_BUILDERS)


def get_entry(name: str, seed: int = 0) -> CatalogEntry:
    if name not in _BUILDERS:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(_BUILDERS)}")
    if name == "brockett_integrator":
        return brockett_integrator(seed)
    return _BUILDERS[name]()


def catalog_list(seed: int = 0) -> list[dict]:
    out = []
    for name in _BUILDERS:
        e = get_entry(name, seed)
        out.append({"name": name, "description": e.description, "expected": e.expected})
    return out


def random_trivial_system(rng: np.random.Generator, index: int) -> AuditInstance:
    """Random planar system f = M x + B u + quadratic terms, A = origin."""
    n, m = 2, int(rng.integers(1, 3))
    M = rng.normal(0, 1, (n, n)).round(3)
    B = rng.normal(0, 1, (n, m)).round(3)
    q = rng.normal(0, 0.3, n).round(3)
    dyn = []
    for i in range(n):
        terms = [f"{float(M[i, j])!r}*x{j + 1}" for j in range(n)] + [f"{float(B[i, k])!r}*u{k + 1}" for k in range(m)]
        terms.append(f"{float(q[i])!r}*x1*x2")
        dyn.append(" + ".join(terms))
    sys = ControlSystemSpec(f"random_{index:02d}", n, dyn, IntervalBox.cube(-2.0, 2.0, m))
    A = TargetSet.at_point([0.0, 0.0], radius=1.0)
    cycles = random_cycles(sys, A, 6, seed=int(rng.integers(0, 2**31)))
    return AuditInstance(
        sys.name, sys, A,
        VectorFieldSpec(["-x1", "-x2"]),
        LyapunovSpec("x1^2 + x2^2", 0.5, A.neighborhood),
        cycles,
    )


def audit_corpus(random_count: int = 20, seed: int = 0) -> list[AuditInstance]:
    inst = [get_entry(name, seed).instance for name in _BUILDERS]
    rng = np.random.default_rng(seed)
    inst += [random_trivial_system(rng, i) for i in range(random_count)]
    return inst
