import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from stabtopo.degree import (
    DimensionError,
    ZeroOnCycleError,
    homotopy_nonvanishing,
    mapping_degree,
    winding_number,
)
from stabtopo.fields import VectorFieldSpec, box_loop, circle_loop, complex_power_field, icosphere
from stabtopo.interval import IntervalBox


@pytest.mark.parametrize("k", range(-3, 4))
def test_complex_power_winding(k):
    d = winding_number(complex_power_field(k), circle_loop(n=64))
    assert d.certified and d.degree == k


def test_orientation_reversal_negates_winding():
    F = complex_power_field(2)
    assert winding_number(F, circle_loop(n=64).reversed()).degree == -2


def test_winding_on_square_loop_matches_circle():
    F = VectorFieldSpec(["x1^2 - x2^2 - 0.1", "2*x1*x2"])
    assert winding_number(F, box_loop(IntervalBox.cube(-1, 1, 2))).degree == 2


def test_sphere_degrees():
    S = icosphere(1)
    assert mapping_degree(VectorFieldSpec(["x1", "x2", "x3"]), S).degree == 1
    assert mapping_degree(VectorFieldSpec(["-x1", "-x2", "-x3"]), S).degree == -1
    assert mapping_degree(VectorFieldSpec(["x1", "x2", "-x3"]), S).degree == -1
    off = icosphere(1, center=(3.0, 0.0, 0.0))
    assert mapping_degree(VectorFieldSpec(["x1", "x2", "x3"]), off).degree == 0


def test_suspended_power_map_degree():
    # (Re z^2, Im z^2, x3) has degree 2 around the origin
    F = VectorFieldSpec(["x1^2 - x2^2", "2*x1*x2", "x3"])
    d = mapping_degree(F, icosphere(2))
    assert d.degree == 2


def test_zero_on_cycle_is_reported():
    with pytest.raises(ZeroOnCycleError):
        winding_number(VectorFieldSpec(["x1 - 1", "x2"]), circle_loop(n=16))


def test_dimension_errors():
    with pytest.raises(DimensionError):
        winding_number(VectorFieldSpec(["x1", "x2", "x3"]), circle_loop())
    with pytest.raises(DimensionError):
        mapping_degree(VectorFieldSpec(["x1", "x2"]), icosphere(0))


def random_pair(rng):
    """A planar field and a perturbation of it, as expression strings."""
    k = int(rng.integers(-2, 3))
    base = complex_power_field(k).texts()
    a = rng.normal(0, 0.6, (2, 3))
    b = a + rng.normal(0, 0.2, (2, 3))

    def comp(c, coef):
        return f"{c} + {coef[0]!r} + {coef[1]!r}*x1 + {coef[2]!r}*x2".replace("+ -", "- ")

    F = VectorFieldSpec([comp(base[i], [float(x) for x in a[i]]) for i in range(2)])
    G = VectorFieldSpec([comp(base[i], [float(x) for x in b[i]]) for i in range(2)])
    return F, G


def test_homotopy_invariance_on_100_certified_pairs():
    rng = np.random.default_rng(2024)
    loop = circle_loop(n=48)
    cells = [IntervalBox([(min(p[0], q[0]), max(p[0], q[0])), (min(p[1], q[1]), max(p[1], q[1]))])
             for p, q in loop.segments()]
    certified = 0
    tries = 0
    seen = set()
    while certified < 100 and tries < 1000:
        tries += 1
        F, G = random_pair(rng)
        try:
            dF, dG = winding_number(F, loop), winding_number(G, loop)
        except ZeroOnCycleError:
            continue
        if not (dF.certified and dG.certified):
            continue
        if homotopy_nonvanishing(F, G, cells):
            assert dF.degree == dG.degree
            seen.add(dF.degree)
            certified += 1
    assert certified == 100
    assert len(seen) >= 3


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 2.0))
def test_linear_field_winding_is_sign_of_determinant(a, b, r):
    # M = [[1, a], [b, 1]]; the only zero is the origin
    det = 1 - a * b
    if abs(det) < 0.05:
        return
    F = VectorFieldSpec([f"x1 + {a!r}*x2", f"{b!r}*x1 + x2"])
    d = winding_number(F, circle_loop(n=64, radius=r))
    if d.certified:
        assert d.degree == int(np.sign(det))
