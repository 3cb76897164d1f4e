import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from stabtopo.catalog import get_entry
from stabtopo.conditions import (
    FAILS,
    HOLDS,
    ValidationError,
    brockett_targets,
    check_adversary,
    check_brockett,
    check_homology_euclidean,
    check_mansouri,
    coron_image_subgroup,
    random_cycles,
    recheck_witness,
)
from stabtopo.degree import boundary_class_pair
from stabtopo.fields import VectorFieldSpec
from stabtopo.homology import homology_profile
from stabtopo.interval import IntervalBox
from stabtopo.sublevel import LyapunovSpec, inward_check, sublevel_region, verify_lyapunov
from stabtopo.system import TRIVIAL_VECTOR, TargetSet


def test_brockett_targets_start_with_axis_probes():
    t = brockett_targets(2, 0.2, 32)
    assert t[:4] == [(0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1)]
    assert all(np.hypot(*v) <= 0.2 + 1e-15 for v in t)


@pytest.fixture(scope="module")
def brockett():
    return get_entry("brockett_integrator").instance


def test_brockett_fails_and_witness_is_monotone_in_delta(brockett):
    base = check_brockett(brockett.system, brockett.target, 0.1)
    assert base.status == FAILS
    w = base.witness
    for d in (0.2, 0.5):
        v = check_brockett(brockett.system, brockett.target, d)
        assert v.status == FAILS
        # the smaller-delta witness stays inside the larger ball and still re-checks
        assert np.linalg.norm(w["target"]) <= d
        assert recheck_witness(brockett.system, w)


def test_brockett_holds_is_monotone_downward():
    e = get_entry("single_integrator_2d").instance
    for d in (0.5, 0.25, 0.1):
        assert check_brockett(e.system, e.target, d).status == HOLDS


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000))
def test_gcd_monotonicity_when_appending_cycles(seed):
    e = get_entry("single_integrator_2d").instance
    cyc = random_cycles(e.system, e.target, 6, seed=seed)
    prev = None
    for k in range(1, len(cyc) + 1):
        d = coron_image_subgroup(e.system, cyc[:k]).d
        if prev is not None:
            assert prev % d == 0 if d else prev == 0
        prev = d


def test_coron_implies_mansouri_on_corpus(corpus_audit):
    for name, v in corpus_audit.verdicts.items():
        if v["coron"].status == HOLDS:
            assert v["mansouri"].status == HOLDS, name


def test_remark1_specialization_on_trivial_instances(corpus):
    for inst in corpus:
        if inst.system.bundle_kind != TRIVIAL_VECTOR:
            continue
        b = check_brockett(inst.system, inst.target, inst.delta)
        a = check_adversary(inst.system, inst.target, inst.delta, family="constant")
        assert a.status == b.status
        assert a.witness == b.witness


def test_degree_chi_consistency_on_validated_triples(corpus_audit):
    seen = 0
    for name, v in corpus_audit.verdicts.items():
        cert = v["homology"].certificate
        if "left_side" in cert:
            seen += 1
            assert cert["left_side"]["generator"] == abs(cert["chi_star"])
    assert seen >= 4


def test_every_corpus_witness_rechecks(corpus, corpus_audit):
    systems = {inst.name: inst.system for inst in corpus}
    n = 0
    for name, v in corpus_audit.verdicts.items():
        for verdict in v.values():
            if verdict.status == FAILS:
                assert recheck_witness(systems[name], verdict.witness), (name, verdict.condition)
                n += 1
    assert n >= 6


def test_homology_refuses_unvalidated_reference_field():
    e = get_entry("single_integrator_2d").instance
    with pytest.raises(ValidationError):
        check_homology_euclidean(e.system, e.target, VectorFieldSpec(["-x2", "x1"]), e.lyapunov, e.cycles)


def test_adversary_fields_family():
    e = get_entry("single_integrator_2d").instance
    good = check_adversary(e.system, e.target, 0.5, family="fields", fields=[VectorFieldSpec(["0.1*x1", "0.2"])])
    assert good.status == HOLDS
    far = check_adversary(e.system, e.target, 0.5, family="fields", fields=[VectorFieldSpec(["3", "0"])])
    assert far.status == FAILS and recheck_witness(e.system, far.witness)


def test_mansouri_with_zero_euler_target_holds_trivially():
    from stabtopo.fields import circle_loop
    from stabtopo.system import TRIANGULATED

    e = get_entry("single_integrator_2d").instance
    A = TargetSet(TRIANGULATED, IntervalBox.cube(-2, 2, 2), complex=circle_loop(n=16).to_complex())
    assert check_mansouri(e.system, A, []).status == HOLDS


def lemma6_instances():
    """Nowhere-zero F and inward G on the unit disk (chi(S) = 1)."""
    rng = np.random.default_rng(6)
    out = []
    for _ in range(10):
        c = rng.normal(0, 1, 2)
        c /= np.linalg.norm(c)
        L = rng.normal(0, 0.2, (2, 2))
        F = VectorFieldSpec([f"{float(c[i])!r} + {float(L[i, 0])!r}*x1 + {float(L[i, 1])!r}*x2" for i in range(2)])
        w = float(rng.uniform(-2, 2))
        G = VectorFieldSpec([f"-x1 - {w!r}*x2", f"{w!r}*x1 - x2"])
        out.append((F, G))
    return out


def test_lemma6_boundary_classes():
    V = LyapunovSpec("x1^2 + x2^2", 1.0, IntervalBox.cube(-2, 2, 2))
    region = sublevel_region(V)
    assert homology_profile(region.filled).euler == 1
    loop = region.boundary.loops[0]
    for F, G in lemma6_instances():
        assert verify_lyapunov(V, G) and inward_check(G, region.boundary, V)
        cf, cg = boundary_class_pair(F, loop), boundary_class_pair(G, loop)
        assert (cf.base, cf.fiber) == (1, 0) and cf.status == "certified"
        assert (cg.base, cg.fiber) == (1, 1) and cg.status == "certified"
        assert not cg.in_span_of(cf)


def test_mislabel_gate_raises_one_flag():
    from stabtopo.conditions import audit_implications
    from stabtopo.system import VECTOR_BUNDLE

    e = get_entry("example5_circle_bundle").instance
    bad = dataclasses.replace(e, system=e.system.relabel(VECTOR_BUNDLE), adversary_family=None, name="mislabeled")
    rep = audit_implications([bad])
    assert len(rep.flags) == 1 and rep.contradictions[0]["instance"] == "mislabeled"
