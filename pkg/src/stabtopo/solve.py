"""Certified solving and exclusion for square and underdetermined systems.

``krawczyk`` proves existence and uniqueness of a zero in a box;
``exclude`` proves that a constraint system has no solution in a box by
HC4 contraction plus bisection; ``certify_solution`` combines least-squares
Newton with a Krawczyk test on a square sub-system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .expr import CompiledScalar, Contractor, Node, substitute, const
from .interval import DomainViolation, Interval, IntervalBox

UNIQUE = "unique"
EMPTY = "empty"
UNKNOWN = "unknown"


@dataclass
class KrawczykResult:
    status: str
    box: IntervalBox | None
    iterations: int = 0


def _imatvec(M, v):
    out = []
    for row in M:
        acc = Interval(0.0, 0.0)
        for a, b in zip(row, v):
            acc = acc + a * b
        out.append(acc)
    return out


def krawczyk(
    F: Callable[[Sequence[Interval]], list[Interval]],
    J: Callable[[Sequence[Interval]], list[list[Interval]]],
    box: Sequence[Interval],
    iterations: int = 8,
) -> KrawczykResult:
    """Krawczyk operator K(X) = m - Y F(m) + (I - Y J(X)) (X - m).

    K(X) inside the interior of X proves a unique zero in X; an empty
    K(X) & X proves there is none.
    """
    X = IntervalBox(box)
    n = X.dim
    for it in range(1, iterations + 1):
        m = [Interval.point(c) for c in X.mid]
        try:
            Fm = F(m)
            JX = J(X)
            Jm = J(m)
        except DomainViolation:
            return KrawczykResult(UNKNOWN, X, it)
        A = np.array([[e.mid for e in row] for row in Jm], dtype=float)
        if not np.all(np.isfinite(A)):
            return KrawczykResult(UNKNOWN, X, it)
        try:
            Yf = np.linalg.inv(A)
        except np.linalg.LinAlgError:
            return KrawczykResult(UNKNOWN, X, it)
        if not np.all(np.isfinite(Yf)):
            return KrawczykResult(UNKNOWN, X, it)
        Y = [[Interval.point(float(y)) for y in row] for row in Yf]
        YJ = [[sum((Y[i][k] * JX[k][j] for k in range(n)), Interval(0.0, 0.0)) for j in range(n)] for i in range(n)]
        R = [[(Interval.point(1.0 if i == j else 0.0) - YJ[i][j]) for j in range(n)] for i in range(n)]
        d = [xi - mi for xi, mi in zip(X, m)]
        YF = _imatvec(Y, Fm)
        RD = _imatvec(R, d)
        K = [m[i] - YF[i] + RD[i] for i in range(n)]
        if all(k.interior_of(x) for k, x in zip(K, X)):
            return KrawczykResult(UNIQUE, IntervalBox(K), it)
        meet = [k.intersect(x) for k, x in zip(K, X)]
        if any(v is None for v in meet):
            return KrawczykResult(EMPTY, None, it)
        new = IntervalBox(meet)
        if all(a.lo == b.lo and a.hi == b.hi for a, b in zip(new, X)):
            break
        X = new
    return KrawczykResult(UNKNOWN, X, iterations)


# ---------------------------------------------------------------------------
# Exclusion by branch and bound
# ---------------------------------------------------------------------------

@dataclass
class ExclusionResult:
    excluded: bool
    boxes: int
    undecided: list | None = None
    reason: str = ""


def exclude(
    constraints: Sequence[tuple[Node, Interval]],
    variables: Sequence[str],
    box: IntervalBox,
    depth_cap: int = 12,
    budget: int = 20000,
    contract: bool = True,
    widest: bool = False,
) -> ExclusionResult:
    """Prove that no point of ``box`` satisfies every ``expr in target``.

    ``depth_cap`` bounds the number of bisections per axis. With
    ``contract=False`` only forward interval evaluation is used, which
    gives a weaker re-check of a contraction-based proof; ``widest``
    replaces the smear heuristic by plain widest-axis bisection.
    """
    ctr = Contractor(constraints, variables)
    evals = [(CompiledScalar(node, variables), target) for node, target in constraints]
    max_depth = depth_cap * len(variables)
    stack: list[tuple[IntervalBox, int]] = [(IntervalBox(box), 0)]
    count = 0
    while stack:
        cell, depth = stack.pop()
        count += 1
        if count > budget:
            return ExclusionResult(False, count, cell.to_list(), "box budget exhausted")
        if contract:
            dom = ctr.contract(cell)
            if dom is None:
                continue
            cell = IntervalBox(dom)
        else:
            gone = False
            for cs, target in evals:
                r = cs.range(cell)
                if r is not None and r.intersect(target) is None:
                    gone = True
                    break
            if gone:
                continue
        if depth >= max_depth:
            return ExclusionResult(False, count, cell.to_list(), "depth cap reached")
        axis = int(np.argmax(cell.widths)) if widest else _smear_axis(evals, cell)
        left, right = cell.bisect(axis)
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    return ExclusionResult(True, count)


def _smear_axis(evals, cell: IntervalBox) -> int:
    widths = np.array(cell.widths)
    score = np.zeros_like(widths)
    for cs, _ in evals:
        try:
            g = cs.grad_interval(cell)
        except DomainViolation:
            return int(np.argmax(widths))
        score = np.maximum(score, np.array([gi.mag for gi in g]) * widths)
    if not np.any(score > 0):
        score = widths.copy()
    score[widths == 0] = -1.0
    return int(np.argmax(score))


# ---------------------------------------------------------------------------
# Existence for f(z) = v with more unknowns than equations
# ---------------------------------------------------------------------------

@dataclass
class SolveResult:
    solved: bool
    point: list[float] | None = None
    box: list | None = None
    fixed: dict = field(default_factory=dict)
    reason: str = ""


def _newton_ls(fs, grads, z0, lo, hi, iters=40):
    z = np.array(z0, float)
    for _ in range(iters):
        r = np.array([f(z) for f in fs])
        if not np.all(np.isfinite(r)):
            return None
        if np.linalg.norm(r) < 1e-14:
            break
        Jm = np.array([g(z) for g in grads])
        step, *_ = np.linalg.lstsq(Jm, -r, rcond=None)
        z = np.clip(z + step, lo, hi)
    return z


def certify_solution(
    exprs: Sequence[Node],
    targets: Sequence[float],
    variables: Sequence[str],
    box: IntervalBox,
    seeds: int = 6,
    rng: np.random.Generator | None = None,
    radius: float = 1e-6,
) -> SolveResult:
    """Find and certify some z in ``box`` with exprs(z) = targets.

    Approximate solutions come from least-squares Newton. A square
    subsystem is formed by freezing the variables least useful for
    conditioning (QR with column pivoting) and Krawczyk is run on a small
    box around the approximation, which must lie inside ``box``.
    """
    n = len(exprs)
    eqs = [CompiledScalar(e, variables) for e in exprs]
    fs = [lambda z, c=c, t=t: c.f(z) - t for c, t in zip(eqs, targets)]
    grads = [lambda z, c=c: np.array(c.grad_float(z)) for c in eqs]
    lo, hi = np.array(box.lo), np.array(box.hi)
    rng = rng or np.random.default_rng(0)
    starts = [np.array(box.mid)] + [lo + (hi - lo) * rng.random(len(lo)) for _ in range(seeds - 1)]
    from scipy.linalg import qr

    last = "no Newton convergence"
    for z0 in starts:
        try:
            z = _newton_ls(fs, grads, z0, lo, hi)
        except (ArithmeticError, ValueError):
            continue
        if z is None:
            continue
        if np.linalg.norm([f(z) for f in fs]) > 1e-9:
            continue
        Jm = np.array([g(z) for g in grads])
        _, _, piv = qr(Jm, pivoting=True, mode="economic")
        free = sorted(int(p) for p in piv[:n])
        frozen = {variables[j]: float(z[j]) for j in range(len(variables)) if j not in free}
        sub = [substitute(e, {k: const(v) for k, v in frozen.items()}) for e in exprs]
        fv = [variables[j] for j in free]
        comp = [CompiledScalar(e, fv) for e in sub]
        tgt = [Interval.point(float(t)) for t in targets]

        def F(X, comp=comp):
            return [c.fi(X) - t for c, t in zip(comp, tgt)]

        def J(X, comp=comp):
            return [c.grad_interval(X) for c in comp]

        r = radius * (1.0 + float(np.max(np.abs(z))))
        local = IntervalBox([(z[j] - r, z[j] + r) for j in free])
        sub_box = IntervalBox([box[j] for j in free])
        res = krawczyk(F, J, local)
        if res.status == UNIQUE and res.box.subset_of(sub_box):
            frozen_ok = all(box[j].contains(z[j]) for j in range(len(variables)) if j not in free)
            if frozen_ok:
                full = []
                k = 0
                for j in range(len(variables)):
                    if j in free:
                        full.append([res.box[k].lo, res.box[k].hi])
                        k += 1
                    else:
                        full.append([float(z[j]), float(z[j])])
                return SolveResult(True, [float(x) for x in z], full, frozen)
        last = f"Krawczyk test {res.status}"
    return SolveResult(False, reason=last)
