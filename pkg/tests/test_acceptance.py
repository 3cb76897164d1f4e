"""Acceptance criteria 1-10; each test prints and records one pass/fail line."""
import dataclasses
import functools
import time

import numpy as np

from conftest import ACCEPTANCE
from corpus import ph_corpus
from stabtopo.catalog import catalog_names, get_entry
from stabtopo.complexes import build_complex
from stabtopo.conditions import (
    FAILS,
    HOLDS,
    audit_implications,
    check_adversary,
    check_brockett,
    check_homology_euclidean,
    check_mansouri,
    coron_image_subgroup,
    recheck_witness,
    run_all,
)
from stabtopo.degree import mapping_degree, winding_number
from stabtopo.fields import VectorFieldSpec, circle_loop, complex_power_field, icosphere
from stabtopo.homology import homology_profile
from stabtopo.sublevel import sublevel_region
from stabtopo.system import TRIVIAL_VECTOR, VECTOR_BUNDLE
from stabtopo.zeros import poincare_hopf_audit
import test_conditions
import test_degree
from test_homology import corpus20, torus7
from test_snf import check_snf, oracle_factors


def criterion(k):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException as exc:
                ACCEPTANCE[k] = (False, f"{type(exc).__name__}: {exc}"[:160])
                print(f"criterion {k}: FAIL")
                raise
            ACCEPTANCE[k] = (True, detail)
            print(f"criterion {k}: PASS {detail}")

        return inner

    return wrap


@criterion(1)
def test_c01_example5():
    t0 = time.perf_counter()
    e = get_entry("example5_circle_bundle").instance
    h = check_homology_euclidean(e.system, e.target, e.G_ref, e.lyapunov, e.cycles)
    a = check_adversary(e.system, e.target, delta=0.9, family="probe")
    dt = time.perf_counter() - t0
    assert h.status == HOLDS and h.certificate["image"]["d"] == 1 and h.certificate["chi_star"] == 1
    assert a.status == FAILS and a.witness["kind"] == "fiber_disjoint"
    assert a.witness["lower_bound"] >= 0.99
    assert dt < 10
    return f"homology Holds (d=1, chi*=1), adversary Fails (|f| >= {a.witness['lower_bound']:.4f}), {dt:.1f}s"


@criterion(2)
def test_c02_brockett_integrator():
    t0 = time.perf_counter()
    e = get_entry("brockett_integrator", seed=0).instance
    b = check_brockett(e.system, e.target, delta=0.1, resolution=32)
    img = coron_image_subgroup(e.system, e.cycles)
    m = check_mansouri(e.system, e.target, e.cycles, avoidance_direction=[0.0, 0.0, 1.0], image=img)
    dt = time.perf_counter() - t0
    assert e.system.control_box.to_list() == [[-2.0, 2.0]] * 2 and e.target.neighborhood.to_list() == [[-2.0, 2.0]] * 3
    assert b.status == FAILS
    v = b.witness["target"]
    assert v[0] == 0.0 and v[1] == 0.0 and v[2] != 0.0
    assert recheck_witness(e.system, b.witness)
    assert len(e.cycles) == 20 and img.d == 0
    assert m.status == FAILS and m.witness["kind"] == "ray_avoidance"
    assert dt < 30
    return f"brockett Fails at v={v}, d=0 over 20 cycles, mansouri Fails, {dt:.1f}s"


@criterion(3)
def test_c03_single_integrator():
    t0 = time.perf_counter()
    e = get_entry("single_integrator_2d").instance
    assert e.delta == 0.5
    v = run_all(e)
    dt = time.perf_counter() - t0
    assert {k: x.status for k, x in v.items()} == {k: HOLDS for k in v} and len(v) == 5
    assert dt < 10
    return f"all five Holds, {dt:.1f}s"


@criterion(4)
def test_c04_homology_engine():
    point = homology_profile(build_complex([(0,)]))
    tet = homology_profile(build_complex([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]))
    torus = homology_profile(torus7())
    assert point.euler == 1
    assert tet.betti == (1, 0, 1) and tet.euler == 2
    assert torus.betti == (1, 2, 1) and torus.euler == 0
    corpus = corpus20()
    ok = sum(homology_profile(K).euler == sum((-1) ** k * f for k, f in enumerate(K.f_vector)) for K in corpus)
    assert ok == len(corpus) == 20
    return "point 1, S^2 (1,0,1), T^2 (1,2,1), Euler-Poincare 20/20"


@criterion(5)
def test_c05_snf_suite():
    rng = np.random.default_rng(5)
    n3 = 0
    for _ in range(200):
        r, c = rng.integers(1, 7, size=2)
        A = rng.integers(-9, 10, size=(r, c)).tolist()
        res = check_snf(A)
        if r == c == 3:
            n3 += 1
            assert res.invariant_factors == oracle_factors(A)
    for _ in range(50):
        A = rng.integers(-9, 10, size=(3, 3)).tolist()
        assert check_snf(A).invariant_factors == oracle_factors(A)
        n3 += 1
    return f"200 random matrices, {n3} 3x3 oracle agreements"


@criterion(6)
def test_c06_degree_suite():
    for k in range(-3, 4):
        d = winding_number(complex_power_field(k), circle_loop(n=64))
        assert d.certified and d.degree == k
    S = icosphere(1)
    ident = mapping_degree(VectorFieldSpec(["x1", "x2", "x3"]), S)
    anti = mapping_degree(VectorFieldSpec(["-x1", "-x2", "-x3"]), S)
    assert (ident.degree, anti.degree) == (1, -1) and ident.certified and anti.certified
    test_degree.test_homotopy_invariance_on_100_certified_pairs()
    return "z^k winding = k for k in -3..3, sphere degrees 1/-1, 100 homotopy pairs"


@criterion(7)
def test_c07_poincare_hopf():
    cases = ph_corpus()
    labels = [c[0] for c in cases]
    assert len(cases) == 20 and "disk sink" in labels and any(l.startswith("annulus") for l in labels)
    passed = 0
    for label, G, V, chi in cases:
        a = poincare_hopf_audit(G, sublevel_region(V))
        assert a.status == "pass", label
        assert a.euler == chi and a.index_sum == (-1) ** V.n * chi
        passed += 1
    return f"{passed}/20 audits pass (disk chi=1, annulus chi=0, balls)"


@criterion(8)
def test_c08_lemma6():
    test_conditions.test_lemma6_boundary_classes()
    return "10/10 instances: F -> (1, 0), G -> (1, 1), G not in Z*F"


@criterion(9)
def test_c09_implication_audit(corpus_audit, corpus):
    assert len(corpus) == len(catalog_names()) + 20
    assert corpus_audit.contradictions == []
    assert corpus_audit.coron_brockett_flags == []
    assert [w["instance"] for w in corpus_audit.independence_witnesses] == ["example5_circle_bundle"]
    e = get_entry("example5_circle_bundle").instance
    bad = dataclasses.replace(e, system=e.system.relabel(VECTOR_BUNDLE), adversary_family=None, name="mislabeled")
    rep = audit_implications([bad])
    assert len(rep.flags) == 1
    return f"{len(corpus)} instances, 0 contradictions, example5 independence witness, mislabel -> 1 flag"


@criterion(10)
def test_c10_remark1_specialization():
    n = 0
    for name in catalog_names():
        inst = get_entry(name).instance
        if inst.system.bundle_kind != TRIVIAL_VECTOR:
            continue
        b = check_brockett(inst.system, inst.target, inst.delta)
        a = check_adversary(inst.system, inst.target, inst.delta, family="constant")
        assert a.status == b.status and a.witness == b.witness
        n += 1
    assert n == 3
    return f"constant-family adversary == brockett on {n} trivial-bundle entries"


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))
