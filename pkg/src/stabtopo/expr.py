"""Closed-form scalar expressions in state/control variables.

Grammar (whitespace insignificant, left associative)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INT)*
    atom    := NUMBER | NAME | FUNC '(' expr ')' | 'atan2' '(' expr ',' expr ')'
             | '(' expr ')'

``FUNC`` is one of sin, cos, sqrt, abs. ``atan2`` is accepted so that angle
sections of circle-bundle systems can be written down; it is only treated
as smooth when it sits directly inside sin or cos, where the branch cut is
invisible.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .interval import DomainViolation, Interval, IntervalBox, atan2_interval

UNARY_FUNCS = ("sin", "cos", "sqrt", "abs")


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UndeclaredVariableError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"undeclared variable {name!r}")
        self.name = name


class EvaluationError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class Node:
    __slots__ = ()
    prec = 5

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    arg: Node
    prec = 3


@dataclass(frozen=True)
class Func(Node):
    name: str  # sin, cos, sqrt, abs; 'sgn' is internal (derivative of abs)
    arg: Node


@dataclass(frozen=True)
class Atan2(Node):
    y: Node
    x: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def prec(self) -> int:  # type: ignore[override]
        return 1 if self.op in "+-" else 2


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exp: int
    prec = 4


ExprAST = Node

ZERO = Const(0.0)
ONE = Const(1.0)


def const(v: float) -> Node:
    v = float(v)
    return Neg(Const(-v)) if v < 0 else Const(v)


def _is_const(n: Node, v: float | None = None) -> bool:
    return isinstance(n, Const) and (v is None or n.value == v)


def add(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    return BinOp("/", a, b)


def neg(a: Node) -> Node:
    if _is_const(a, 0.0):
        return ZERO
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a: Node, k: int) -> Node:
    if k == 0:
        return ONE
    if k == 1:
        return a
    return Pow(a, k)


def sum_nodes(nodes: Sequence[Node]) -> Node:
    out: Node = ZERO
    for n in nodes:
        out = add(out, n)
    return out


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, declared: frozenset[str] | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.declared = declared

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value or kind == "end":
            what = "end of input" if kind == "end" else repr(v)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", pos, self.text)

    def parse(self) -> Node:
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {v!r}", pos, self.text)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, v, pos = self.take()
            if kind != "num" or not re.fullmatch(r"\d+", v):
                raise ExprSyntaxError("exponent must be an integer literal", pos, self.text)
            node = Pow(node, sign * int(v))
        return node

    def atom(self) -> Node:
        kind, v, pos = self.take()
        if kind == "num":
            return Const(float(v))
        if kind == "name":
            if v in UNARY_FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(v, arg)
            if v == "atan2":
                self.expect("(")
                y = self.expr()
                self.expect(",")
                x = self.expr()
                self.expect(")")
                return Atan2(y, x)
            if self.declared is not None and v not in self.declared:
                raise UndeclaredVariableError(v)
            return Var(v)
        if v == "(":
            node = self.expr()
            k2, v2, p2 = self.peek()
            if v2 != ")":
                raise ExprSyntaxError("unmatched parenthesis", pos, self.text)
            self.take()
            return node
        what = "end of input" if kind == "end" else repr(v)
        raise ExprSyntaxError(f"unexpected {what}", pos, self.text)


def parse_expression(text: str, declared_vars: Sequence[str] | None = None) -> Node:
    """Parse ``text``; names outside ``declared_vars`` raise UndeclaredVariableError."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, text)
    declared = frozenset(declared_vars) if declared_vars is not None else None
    return _Parser(text, declared).parse()


def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(node: Node) -> str:
    if isinstance(node, Const):
        s = _fmt_num(node.value)
        return f"({s})" if node.value < 0 else s
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        if node.arg.prec < 3:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Atan2):
        return f"atan2({to_text(node.y)}, {to_text(node.x)})"
    if isinstance(node, Pow):
        b = to_text(node.base)
        if node.base.prec < 5:
            b = f"({b})"
        return f"{b}^{node.exp}"
    if isinstance(node, BinOp):
        p = node.prec
        left = to_text(node.left)
        if node.left.prec < p:
            left = f"({left})"
        right = to_text(node.right)
        if node.right.prec <= p:
            right = f"({right})"
        sep = f" {node.op} " if node.op in "+-" else node.op
        return f"{left}{sep}{right}"
    raise TypeError(f"unknown node {node!r}")


def free_vars(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Const):
        return set()
    out: set[str] = set()
    for c in children(node):
        out |= free_vars(c)
    return out


def children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, (Neg, Func)):
        return (node.arg,)
    if isinstance(node, Atan2):
        return (node.y, node.x)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Pow):
        return (node.base,)
    return ()


def substitute(node: Node, mapping: Mapping[str, Node]) -> Node:
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, mapping))
    if isinstance(node, Func):
        return Func(node.name, substitute(node.arg, mapping))
    if isinstance(node, Atan2):
        return Atan2(substitute(node.y, mapping), substitute(node.x, mapping))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, mapping), node.exp)
    raise TypeError(node)


def is_smooth(node: Node, _parent: str | None = None) -> bool:
    """False when the expression uses abs or an atan2 not wrapped in sin/cos."""
    if isinstance(node, Func) and node.name in ("abs", "sgn"):
        return False
    if isinstance(node, Atan2) and _parent not in ("sin", "cos"):
        return False
    tag = node.name if isinstance(node, Func) else None
    return all(is_smooth(c, tag) for c in children(node))


# ---------------------------------------------------------------------------
# Point evaluation
# ---------------------------------------------------------------------------

def evaluate(node: Node, bindings: Mapping[str, float]) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        try:
            return float(bindings[node.name])
        except KeyError:
            raise EvaluationError(f"missing binding for {node.name!r}") from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, bindings)
    if isinstance(node, BinOp):
        a = evaluate(node.left, bindings)
        b = evaluate(node.right, bindings)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            raise EvaluationError("division by zero")
        return a / b
    if isinstance(node, Pow):
        b = evaluate(node.base, bindings)
        if node.exp < 0 and b == 0.0:
            raise EvaluationError("division by zero")
        return b ** node.exp
    if isinstance(node, Func):
        a = evaluate(node.arg, bindings)
        return _FLOAT_FUNCS[node.name](a)
    if isinstance(node, Atan2):
        y, x = evaluate(node.y, bindings), evaluate(node.x, bindings)
        if x == 0.0 and y == 0.0:
            raise EvaluationError("atan2 at the origin")
        return math.atan2(y, x)
    raise TypeError(node)


def _fsqrt(a: float) -> float:
    if a < 0:
        raise EvaluationError("sqrt of a negative number")
    return math.sqrt(a)


def _fsgn(a: float) -> float:
    return (a > 0) - (a < 0)


_FLOAT_FUNCS = {"sin": math.sin, "cos": math.cos, "sqrt": _fsqrt, "abs": abs, "sgn": _fsgn}


def compile_float(node: Node, variables: Sequence[str]) -> Callable[[Sequence[float]], float]:
    """Closure evaluating ``node`` on a positional tuple ordered like ``variables``."""
    index = {v: i for i, v in enumerate(variables)}

    def build(n: Node):
        if isinstance(n, Const):
            c = n.value
            return lambda p: c
        if isinstance(n, Var):
            if n.name not in index:
                raise EvaluationError(f"missing binding for {n.name!r}")
            i = index[n.name]
            return lambda p: p[i]
        if isinstance(n, Neg):
            f = build(n.arg)
            return lambda p: -f(p)
        if isinstance(n, BinOp):
            f, g = build(n.left), build(n.right)
            if n.op == "+":
                return lambda p: f(p) + g(p)
            if n.op == "-":
                return lambda p: f(p) - g(p)
            if n.op == "*":
                return lambda p: f(p) * g(p)

            def _div(p):
                d = g(p)
                if d == 0.0:
                    raise EvaluationError("division by zero")
                return f(p) / d
            return _div
        if isinstance(n, Pow):
            f, k = build(n.base), n.exp
            if k < 0:
                def _negpow(p):
                    b = f(p)
                    if b == 0.0:
                        raise EvaluationError("division by zero")
                    return b ** k
                return _negpow
            return lambda p: f(p) ** k
        if isinstance(n, Func):
            f, fn = build(n.arg), _FLOAT_FUNCS[n.name]
            return lambda p: fn(f(p))
        if isinstance(n, Atan2):
            fy, fx = build(n.y), build(n.x)

            def _atan2(p):
                y, x = fy(p), fx(p)
                if x == 0.0 and y == 0.0:
                    raise EvaluationError("atan2 at the origin")
                return math.atan2(y, x)
            return _atan2
        raise TypeError(n)

    return build(node)


# ---------------------------------------------------------------------------
# Interval evaluation
# ---------------------------------------------------------------------------

def _isgn(a: Interval) -> Interval:
    if a.lo > 0:
        return Interval(1.0, 1.0)
    if a.hi < 0:
        return Interval(-1.0, -1.0)
    return Interval(-1.0, 1.0)


_IV_FUNCS = {
    "sin": Interval.sin,
    "cos": Interval.cos,
    "sqrt": Interval.sqrt,
    "abs": Interval.abs,
    "sgn": _isgn,
}


def compile_interval(node: Node, variables: Sequence[str]) -> Callable[[Sequence[Interval]], Interval]:
    """Closure evaluating an enclosure of ``node`` over a box.

    Raises :class:`DomainViolation` if the box leaves the expression's domain.
    """
    index = {v: i for i, v in enumerate(variables)}

    def build(n: Node):
        if isinstance(n, Const):
            c = Interval.point(n.value)
            return lambda b: c
        if isinstance(n, Var):
            if n.name not in index:
                raise EvaluationError(f"missing binding for {n.name!r}")
            i = index[n.name]
            return lambda b: b[i]
        if isinstance(n, Neg):
            f = build(n.arg)
            return lambda b: -f(b)
        if isinstance(n, BinOp):
            f, g = build(n.left), build(n.right)
            if n.op == "+":
                return lambda b: f(b) + g(b)
            if n.op == "-":
                return lambda b: f(b) - g(b)
            if n.op == "*":
                return lambda b: f(b) * g(b)
            return lambda b: f(b) / g(b)
        if isinstance(n, Pow):
            f, k = build(n.base), n.exp
            return lambda b: f(b) ** k
        if isinstance(n, Func):
            f, fn = build(n.arg), _IV_FUNCS[n.name]
            return lambda b: fn(f(b))
        if isinstance(n, Atan2):
            fy, fx = build(n.y), build(n.x)
            return lambda b: atan2_interval(fy(b), fx(b))
        raise TypeError(n)

    return build(node)


def interval_eval(node: Node, box: Mapping[str, Interval]) -> Interval:
    names = sorted(box)
    return compile_interval(node, names)([box[k] for k in names])


# ---------------------------------------------------------------------------
# Derivatives, range and Lipschitz bounds
# ---------------------------------------------------------------------------

def derivative(node: Node, var: str) -> Node:
    """Symbolic partial derivative with trivial 0/1 folding only."""
    d = derivative
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.name == var else ZERO
    if isinstance(node, Neg):
        return neg(d(node.arg, var))
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = d(a, var), d(b, var)
        if node.op == "+":
            return add(da, db)
        if node.op == "-":
            return sub(da, db)
        if node.op == "*":
            return add(mul(da, b), mul(a, db))
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if isinstance(node, Pow):
        db = d(node.base, var)
        if _is_const(db, 0.0):
            return ZERO
        return mul(mul(const(node.exp), power(node.base, node.exp - 1)), db)
    if isinstance(node, Func):
        da = d(node.arg, var)
        if _is_const(da, 0.0):
            return ZERO
        if node.name == "sin":
            return mul(Func("cos", node.arg), da)
        if node.name == "cos":
            return neg(mul(Func("sin", node.arg), da))
        if node.name == "sqrt":
            return div(da, mul(Const(2.0), Func("sqrt", node.arg)))
        if node.name == "abs":
            return mul(Func("sgn", node.arg), da)
        if node.name == "sgn":
            return ZERO
    if isinstance(node, Atan2):
        y, x = node.y, node.x
        dy, dx = d(y, var), d(x, var)
        num = sub(mul(x, dy), mul(y, dx))
        if _is_const(num, 0.0):
            return ZERO
        return div(num, add(power(x, 2), power(y, 2)))
    raise TypeError(node)


def gradient(node: Node, variables: Sequence[str]) -> list[Node]:
    return [derivative(node, v) for v in variables]


def default_vars(n: int, prefix: str = "x") -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(n)]


@dataclass(frozen=True)
class RangeBound:
    """Enclosure of values and gradient-norm bound of an expression on a box.

    ``value`` is None (and ``lipschitz`` infinite) when the box leaves the
    expression's domain; downstream checkers treat that as decertifying.
    """

    value: Interval | None
    lipschitz: float
    heuristic: bool = False

    @property
    def bounded(self) -> bool:
        return self.value is not None and math.isfinite(self.lipschitz)


def norm_upper(components: Sequence[Interval]) -> float:
    """Upper bound on the Euclidean norm of any vector in the product box."""
    acc = Interval(0.0, 0.0)
    for c in components:
        m = Interval.point(c.mag)
        acc = acc + m * m
    return acc.sqrt().hi


def norm_lower(components: Sequence[Interval]) -> float:
    """Lower bound on the Euclidean norm of any vector in the product box."""
    acc = Interval(0.0, 0.0)
    for c in components:
        m = Interval.point(c.mig)
        acc = acc + m * m
    return acc.sqrt().lo


class CompiledScalar:
    """An expression with cached float, interval and gradient closures."""

    def __init__(self, node: Node, variables: Sequence[str]):
        self.node = node
        self.variables = list(variables)
        self.smooth = is_smooth(node)
        self.f = compile_float(node, self.variables)
        self.fi = compile_interval(node, self.variables)
        self._grad_nodes = None
        self._gi = None
        self._gf = None

    @property
    def grad_nodes(self) -> list[Node]:
        if self._grad_nodes is None:
            self._grad_nodes = gradient(self.node, self.variables)
        return self._grad_nodes

    def grad_interval(self, box: Sequence[Interval]) -> list[Interval]:
        if self._gi is None:
            self._gi = [compile_interval(g, self.variables) for g in self.grad_nodes]
        return [g(box) for g in self._gi]

    def grad_float(self, p: Sequence[float]) -> list[float]:
        if self._gf is None:
            self._gf = [compile_float(g, self.variables) for g in self.grad_nodes]
        return [g(p) for g in self._gf]

    def range(self, box: Sequence[Interval]) -> Interval | None:
        try:
            return self.fi(box)
        except DomainViolation:
            return None

    def range_and_lipschitz(self, box: Sequence[Interval]) -> RangeBound:
        try:
            value = self.fi(box)
            grads = self.grad_interval(box)
        except DomainViolation:
            return RangeBound(None, math.inf, not self.smooth)
        return RangeBound(value, norm_upper(grads), not self.smooth)


def range_and_lipschitz(
    ast: Node, box: IntervalBox | Sequence, variables: Sequence[str] | None = None
) -> RangeBound:
    """Enclose the range of ``ast`` over ``box`` and bound its gradient norm.

    ``variables`` names the box coordinates in order (default x1..xn).
    """
    if not isinstance(box, IntervalBox):
        box = IntervalBox(box)
    if variables is None:
        variables = default_vars(box.dim)
    return CompiledScalar(ast, variables).range_and_lipschitz(box)


# ---------------------------------------------------------------------------
# Constraint propagation (HC4-revise)
# ---------------------------------------------------------------------------

class _Empty(Exception):
    pass


def _meet(a: Interval, b: Interval) -> Interval:
    r = a.intersect(b)
    if r is None:
        raise _Empty
    return r


def _nth_root_hull(z: Interval, k: int) -> Interval:
    """Enclosure of {x : x**k in z} for k >= 2."""

    def sroot(v: float, up: bool) -> float:
        r = math.copysign(abs(v) ** (1.0 / k), v)
        slack = abs(r) * 1e-12 + 1e-300
        return r + slack if up else r - slack

    if k % 2 == 1:
        return Interval(sroot(z.lo, False), sroot(z.hi, True))
    if z.hi < 0:
        raise _Empty
    r = sroot(z.hi, True)
    return Interval(-r, r)


class Contractor:
    """Forward-backward interval propagation for constraints ``expr in target``.

    The contraction is sound: no point of the box satisfying every
    constraint is removed.
    """

    def __init__(self, constraints: Sequence[tuple[Node, Interval]], variables: Sequence[str]):
        self.constraints = list(constraints)
        self.variables = list(variables)
        self.index = {v: i for i, v in enumerate(variables)}

    def contract(self, box: Sequence[Interval], max_passes: int = 8) -> list[Interval] | None:
        dom = list(box)
        for _ in range(max_passes):
            before = list(dom)
            try:
                for node, target in self.constraints:
                    self._revise(node, target, dom)
            except (_Empty, DomainViolation):
                return None
            if all(
                a.lo == b.lo and a.hi == b.hi for a, b in zip(before, dom)
            ):
                break
        return dom

    def _revise(self, node: Node, target: Interval, dom: list[Interval]) -> None:
        tree = self._forward(node, dom)
        self._backward(node, tree, target, dom)

    def _forward(self, n: Node, dom):
        # returns (interval, child_trees)
        if isinstance(n, Const):
            return (Interval.point(n.value), ())
        if isinstance(n, Var):
            return (dom[self.index[n.name]], ())
        if isinstance(n, Neg):
            c = self._forward(n.arg, dom)
            return (-c[0], (c,))
        if isinstance(n, BinOp):
            a = self._forward(n.left, dom)
            b = self._forward(n.right, dom)
            x, y = a[0], b[0]
            if n.op == "+":
                v = x + y
            elif n.op == "-":
                v = x - y
            elif n.op == "*":
                v = x * y
            else:
                v = x / y
            return (v, (a, b))
        if isinstance(n, Pow):
            c = self._forward(n.base, dom)
            return (c[0] ** n.exp, (c,))
        if isinstance(n, Func):
            c = self._forward(n.arg, dom)
            return (_IV_FUNCS[n.name](c[0]), (c,))
        if isinstance(n, Atan2):
            a = self._forward(n.y, dom)
            b = self._forward(n.x, dom)
            return (atan2_interval(a[0], b[0]), (a, b))
        raise TypeError(n)

    def _backward(self, n: Node, tree, target: Interval, dom) -> None:
        val = _meet(tree[0], target)
        if isinstance(n, Const):
            return
        if isinstance(n, Var):
            i = self.index[n.name]
            dom[i] = _meet(dom[i], val)
            return
        kids = tree[1]
        if isinstance(n, Neg):
            self._backward(n.arg, kids[0], -val, dom)
            return
        if isinstance(n, BinOp):
            x, y = kids[0][0], kids[1][0]
            if n.op == "+":
                nx, ny = val - y, val - x
            elif n.op == "-":
                nx, ny = val + y, x - val
            elif n.op == "*":
                nx = val / y if not y.contains_zero() else x
                ny = val / x if not x.contains_zero() else y
            else:
                nx = val * y
                ny = x / val if not val.contains_zero() else y
            nx = _meet(x, nx)
            ny = _meet(y, ny)
            self._backward(n.left, kids[0], nx, dom)
            self._backward(n.right, kids[1], ny, dom)
            return
        if isinstance(n, Pow):
            base = kids[0][0]
            k = n.exp
            nb = base
            if k >= 2:
                nb = _meet(base, _nth_root_hull(val, k))
            self._backward(n.base, kids[0], nb, dom)
            return
        if isinstance(n, Func):
            arg = kids[0][0]
            na = arg
            if n.name == "sqrt":
                if val.hi < 0:
                    raise _Empty
                na = _meet(arg, Interval(max(val.lo, 0.0), val.hi) ** 2)
            elif n.name == "abs":
                na = _meet(arg, Interval(-val.hi, val.hi))
            self._backward(n.arg, kids[0], na, dom)
            return
        if isinstance(n, Atan2):
            self._backward(n.y, kids[0], kids[0][0], dom)
            self._backward(n.x, kids[1], kids[1][0], dom)
            return
        raise TypeError(n)
