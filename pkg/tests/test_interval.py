import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from stabtopo.interval import DomainViolation, Interval, IntervalBox, add_rd, add_ru

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def interval_st():
    return st.tuples(finite, finite).map(lambda t: Interval(min(t), max(t)))


@given(finite, finite)
def test_directed_addition_brackets_exact_sum(a, b):
    exact = Fraction(a) + Fraction(b)
    assert Fraction(add_rd(a, b)) <= exact <= Fraction(add_ru(a, b))


@given(interval_st(), interval_st(), st.floats(0, 1), st.floats(0, 1))
def test_arithmetic_contains_pointwise_results(X, Y, s, t):
    x = X.lo + s * (X.hi - X.lo)
    y = Y.lo + t * (Y.hi - Y.lo)
    x = min(max(x, X.lo), X.hi)
    y = min(max(y, Y.lo), Y.hi)
    fx, fy = Fraction(x), Fraction(y)
    for res, exact in ((X + Y, fx + fy), (X - Y, fx - fy), (X * Y, fx * fy)):
        assert Fraction(res.lo) <= exact <= Fraction(res.hi)


@given(interval_st(), st.floats(0, 1))
def test_elementary_functions_enclose(X, s):
    x = min(max(X.lo + s * (X.hi - X.lo), X.lo), X.hi)
    assert X.sin().contains(math.sin(x))
    assert X.cos().contains(math.cos(x))
    assert X.abs().contains(abs(x))
    if X.lo >= 0:
        assert X.sqrt().contains(math.sqrt(x))


def test_sqrt_of_negative_interval_is_a_domain_violation():
    with pytest.raises(DomainViolation):
        Interval(-2.0, -1.0).sqrt()


def test_division_by_interval_containing_zero():
    with pytest.raises(DomainViolation):
        Interval(1.0, 2.0) / Interval(-1.0, 1.0)


def test_box_helpers():
    B = IntervalBox([(0, 1), (-2, 2)])
    assert B.dim == 2 and B.mid == (0.5, 0.0)
    L, R = B.bisect(1)
    assert L.hi[1] == 0.0 == R.lo[1]
    assert B.contains([0.5, 1.0]) and not B.contains([2.0, 0.0])
    assert B.product(IntervalBox([(3, 4)])).dim == 3
    assert len(list(B.grid(4))) == 16
