import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from corpus import ph_corpus
from stabtopo.fields import VectorFieldSpec
from stabtopo.homology import homology_profile
from stabtopo.interval import IntervalBox
from stabtopo.sublevel import (
    LyapunovSpec,
    SublevelError,
    extract_sublevel_boundary,
    filled_region,
    inward_check,
    sublevel_region,
    verify_lyapunov,
)
from stabtopo.zeros import field_index, locate_zeros, poincare_hopf_audit

DISK = LyapunovSpec("x1^2 + x2^2", 1.0, IntervalBox.cube(-2, 2, 2))


def test_circle_boundary_lies_on_the_level_set():
    b = extract_sublevel_boundary(DISK, 64)
    assert len(b.loops) == 1
    r = np.linalg.norm(b.vertices(), axis=1)
    assert np.max(np.abs(r - 1.0)) < 1e-9


def test_boundary_orientation_is_counterclockwise():
    lp = extract_sublevel_boundary(DISK, 32).loops[0]
    x, y = lp.points[:, 0], lp.points[:, 1]
    area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert area > 3.0


def test_annulus_has_two_boundary_components():
    ring = LyapunovSpec("(x1^2 + x2^2 - 1)^2", 0.25, IntervalBox.cube(-2, 2, 2))
    b = extract_sublevel_boundary(ring, 64)
    assert len(b.loops) == 2
    assert homology_profile(filled_region(ring, 32)).betti[:2] == (1, 1)


def test_sphere_boundary_and_ball():
    ball = LyapunovSpec("x1^2 + x2^2 + x3^2", 1.0, IntervalBox.cube(-2, 2, 3))
    b = extract_sublevel_boundary(ball, 12)
    assert homology_profile(b.to_complex()).euler == 2
    assert homology_profile(filled_region(ball, 10)).euler == 1


def test_sublevel_set_touching_the_box_is_rejected():
    with pytest.raises(SublevelError):
        extract_sublevel_boundary(LyapunovSpec("x1^2 + x2^2", 9.0, IntervalBox.cube(-2, 2, 2)))


def test_decrease_certificate_and_counterexample():
    assert verify_lyapunov(DISK, VectorFieldSpec(["-x1", "-x2"])).certified
    rot = verify_lyapunov(DISK, VectorFieldSpec(["-x2", "x1"]))
    assert not rot.certified
    out = verify_lyapunov(DISK, VectorFieldSpec(["x1", "x2"]))
    assert not out.certified and out.counterexample is not None
    p = np.array(out.counterexample)
    assert p @ p <= 1.0 + 1e-12


def test_inward_check():
    b = extract_sublevel_boundary(DISK, 32)
    assert inward_check(VectorFieldSpec(["-x1 + x2", "-x1 - x2"]), b, DISK)
    assert not inward_check(VectorFieldSpec(["x1", "x2"]), b, DISK)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 1.5), st.floats(0.3, 1.5), st.floats(-0.4, 0.4))
def test_ellipse_boundary_degree_of_gradient_flow(a, b, s):
    V = LyapunovSpec(f"{a!r}*x1^2 + {b!r}*x2^2 + {s!r}*x1*x2", 0.5, IntervalBox.cube(-3, 3, 2))
    G = VectorFieldSpec([f"-(2*{a!r}*x1 + {s!r}*x2)", f"-(2*{b!r}*x2 + {s!r}*x1)"])
    bd = extract_sublevel_boundary(V, 48)
    d = bd.degree(G)
    assert d.certified and d.degree == 1


def test_zero_location_and_indices():
    F = VectorFieldSpec(["x1^2 - 0.25", "x2"])
    zs = locate_zeros(F, IntervalBox.cube(-1, 1, 2))
    assert len(zs) == 2 and all(z.certified for z in zs)
    idx = sorted(field_index(F, z).degree for z in zs)
    assert idx == [-1, 1]
    assert locate_zeros(VectorFieldSpec(["1", "x1"]), IntervalBox.cube(-1, 1, 2)) == []


def test_degenerate_zero_is_not_certified_but_indexed():
    F = VectorFieldSpec(["x1^2 - x2^2", "2*x1*x2"])
    zs = locate_zeros(F, IntervalBox.cube(-1, 1, 2))
    assert len(zs) == 1 and not zs[0].certified
    assert field_index(F, zs[0]).degree == 2


@pytest.mark.parametrize("label,G,V,chi", ph_corpus(), ids=[c[0] for c in ph_corpus()])
def test_poincare_hopf_corpus(label, G, V, chi):
    region = sublevel_region(V)
    audit = poincare_hopf_audit(G, region)
    assert audit.status == "pass", audit.reason
    assert audit.euler == chi
    assert audit.index_sum == (-1) ** V.n * chi


def test_poincare_hopf_rejects_outward_field():
    audit = poincare_hopf_audit(VectorFieldSpec(["x1", "x2"]), sublevel_region(DISK))
    assert audit.status != "pass"
