import math

import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

from stabtopo.expr import (
    CompiledScalar,
    Contractor,
    ExprSyntaxError,
    UndeclaredVariableError,
    derivative,
    evaluate,
    is_smooth,
    parse_expression,
    to_text,
)
from stabtopo.interval import Interval, IntervalBox

VARS = ["x1", "x2"]

leaf = st.one_of(st.sampled_from(VARS), st.integers(-3, 3).map(str), st.sampled_from(["0.5", "1.25"]))


def _grow(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(children, st.integers(2, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        children.map(lambda c: f"-{c}"),
    )


expressions = st.recursive(leaf, _grow, max_leaves=8)
points = st.tuples(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))


@given(expressions, points)
def test_print_parse_roundtrip_preserves_values(text, p):
    node = parse_expression(text, VARS)
    again = parse_expression(to_text(node), VARS)
    env = dict(zip(VARS, p))
    a, b = evaluate(node, env), evaluate(again, env)
    assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


@given(expressions, points, st.floats(0.0, 0.3))
def test_interval_evaluation_encloses_float_evaluation(text, p, r):
    cs = CompiledScalar(parse_expression(text, VARS), VARS)
    box = IntervalBox([(p[0] - r, p[0] + r), (p[1] - r, p[1] + r)])
    rng = cs.range(box)
    assert rng is not None and rng.contains(cs.f(list(p)))


@settings(max_examples=60)
@given(expressions, points)
def test_symbolic_derivative_matches_central_difference(text, p):
    node = parse_expression(text, VARS)
    d = derivative(node, "x1")
    h = 1e-6
    f = lambda x: evaluate(node, {"x1": x, "x2": p[1]})
    fd = (f(p[0] + h) - f(p[0] - h)) / (2 * h)
    exact = evaluate(d, dict(zip(VARS, p)))
    assert math.isclose(exact, fd, rel_tol=1e-4, abs_tol=1e-4 * (1 + abs(f(p[0]))))


@given(expressions, points, st.floats(0.01, 0.5))
def test_contractor_never_removes_a_solution(text, p, r):
    node = parse_expression(text, VARS)
    v = evaluate(node, dict(zip(VARS, p)))
    assume(math.isfinite(v))
    target = Interval(v - 1e-9 * (1 + abs(v)), v + 1e-9 * (1 + abs(v)))
    box = IntervalBox([(p[0] - r, p[0] + r), (p[1] - r, p[1] + r)])
    out = Contractor([(node, target)], VARS).contract(box)
    assert out is not None
    assert all(iv.contains(x) for iv, x in zip(out, p))


def test_precedence_and_unary_minus():
    n = parse_expression("-x1^2 + 2*x2", VARS)
    assert evaluate(n, {"x1": 3.0, "x2": 1.0}) == -7.0
    # left associative: (2^3)^2
    assert evaluate(parse_expression("2^3^2"), {}) == 64.0


def test_syntax_error_reports_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse_expression("x1 + * x2", VARS)
    assert exc.value.position == 5


def test_undeclared_variable():
    with pytest.raises(UndeclaredVariableError) as exc:
        parse_expression("x1 + y", VARS)
    assert exc.value.name == "y"


def test_smoothness_flags():
    assert is_smooth(parse_expression("sin(x1)*x2", VARS))
    assert not is_smooth(parse_expression("abs(x1)", VARS))
    # the angle only enters through periodic functions
    assert is_smooth(parse_expression("cos(atan2(x2, x1))", VARS))
    assert not is_smooth(parse_expression("atan2(x2, x1)", VARS))
