"""Closed real intervals with directed rounding.

Every elementary operation returns an interval containing the exact real
result. Sums, products, quotients and square roots use error-free
transformations (TwoSum / Dekker's TwoProduct) so the enclosure is widened
by one ulp only on the side where rounding actually lost information; exact
results, zeros in particular, stay exact. Transcendental functions are
widened by a couple of ulps on both sides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1
_BIG = 1e290


class DomainViolation(ArithmeticError):
    """An operation was applied outside its domain somewhere in an interval."""


def _up(x: float) -> float:
    return math.nextafter(x, INF)


def _down(x: float) -> float:
    return math.nextafter(x, -INF)


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add_rd(a: float, b: float) -> float:
    s = a + b
    if math.isinf(s) or math.isnan(s):
        return s
    return _down(s) if _two_sum_err(a, b, s) < 0 else s


def add_ru(a: float, b: float) -> float:
    s = a + b
    if math.isinf(s) or math.isnan(s):
        return s
    return _up(s) if _two_sum_err(a, b, s) > 0 else s


def _mul_dir(a: float, b: float, up: bool) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isinf(p) or math.isnan(p):
        return p
    if abs(a) > _BIG or abs(b) > _BIG or abs(p) > _BIG or abs(p) < 1e-280:
        return _up(p) if up else _down(p)
    e = _two_prod_err(a, b, p)
    if up:
        return _up(p) if e > 0 else p
    return _down(p) if e < 0 else p


def _div_dir(a: float, b: float, up: bool) -> float:
    if a == 0.0:
        return 0.0
    q = a / b
    if math.isinf(q) or math.isnan(q) or q == 0.0:
        return (_up(q) if up else _down(q)) if not math.isnan(q) else q
    if abs(a) > _BIG or abs(b) > _BIG or abs(q) > _BIG or abs(q) < 1e-280:
        return _up(q) if up else _down(q)
    # sign of (exact a/b - q) equals sign of (a - q*b) / b
    p = q * b
    r = (a - p) - _two_prod_err(q, b, p)
    if r == 0.0:
        return q
    above = (r > 0) == (b > 0)
    if up:
        return _up(q) if above else q
    return q if above else _down(q)


def _sqrt_dir(a: float, up: bool) -> float:
    r = math.sqrt(a)
    if r == 0.0 or math.isinf(r):
        return r
    p = r * r
    e = _two_prod_err(r, r, p)
    # compare exact r*r = p + e with a
    d = (p - a) + e
    if d == 0.0:
        return r
    if up:
        return r if d > 0 else _up(r)
    return _down(r) if d > 0 else r


def _widen(lo: float, hi: float, ulps: int = 2) -> tuple[float, float]:
    for _ in range(ulps):
        lo, hi = _down(lo), _up(hi)
    return lo, hi


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: float) -> "Interval":
        x = float(x)
        return Interval(x, x)

    @staticmethod
    def hull(*xs: float) -> "Interval":
        return Interval(min(xs), max(xs))

    # -- queries ---------------------------------------------------------
    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def mag(self) -> float:
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        """Smallest absolute value in the interval."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def interior_of(self, other: "Interval") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def union_hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def bisect(self) -> tuple["Interval", "Interval"]:
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)

    # -- arithmetic ------------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        o = _coerce(other)
        return Interval(add_rd(self.lo, o.lo), add_ru(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = _coerce(other)
        return Interval(add_rd(self.lo, -o.hi), add_ru(self.hi, -o.lo))

    def __rsub__(self, other) -> "Interval":
        return _coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = _coerce(other)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        if a == b == 0.0 or c == d == 0.0:
            return Interval(0.0, 0.0)
        pairs = ((a, c), (a, d), (b, c), (b, d))
        lo = min(_mul_dir(x, y, False) for x, y in pairs)
        hi = max(_mul_dir(x, y, True) for x, y in pairs)
        return Interval(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = _coerce(other)
        if o.contains_zero():
            raise DomainViolation("division by an interval containing zero")
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        pairs = ((a, c), (a, d), (b, c), (b, d))
        lo = min(_div_dir(x, y, False) for x, y in pairs)
        hi = max(_div_dir(x, y, True) for x, y in pairs)
        return Interval(lo, hi)

    def __rtruediv__(self, other) -> "Interval":
        return _coerce(other) / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int):
            raise TypeError("only integer exponents are supported")
        if k == 0:
            return Interval(1.0, 1.0)
        if k < 0:
            return Interval(1.0, 1.0) / (self ** (-k))
        if k == 1:
            return self
        if k % 2 == 1:
            return Interval(_pow_dir(self.lo, k, False), _pow_dir(self.hi, k, True))
        return Interval(_pow_dir(self.mig, k, False), _pow_dir(self.mag, k, True))

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise DomainViolation("sqrt of an interval reaching below zero")
        return Interval(_sqrt_dir(self.lo, False), _sqrt_dir(self.hi, True))

    def abs(self) -> "Interval":
        return Interval(self.mig, self.mag)

    def sin(self) -> "Interval":
        return _trig(self, math.sin, math.pi / 2)

    def cos(self) -> "Interval":
        return _trig(self, math.cos, 0.0)

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


def _pow_dir(x: float, k: int, up: bool) -> float:
    # x**k for k >= 1 with directed rounding through repeated products;
    # for negative x and odd k the rounding direction flips per factor.
    if x == 0.0:
        return 0.0
    if x > 0:
        r = x
        for _ in range(k - 1):
            r = _mul_dir(r, x, up)
        return r
    return -_pow_dir(-x, k, not up)


def _trig(x: Interval, fn, phase: float) -> Interval:
    # maxima of fn at phase + 2*pi*j, minima at phase + pi + 2*pi*j
    if x.width >= 2 * math.pi or math.isinf(x.width):
        return Interval(-1.0, 1.0)
    vals = [fn(x.lo), fn(x.hi)]
    lo, hi = min(vals), max(vals)
    lo, hi = _widen(lo, hi, 2)
    twopi = 2 * math.pi
    # a little slack on the critical-point test keeps this conservative
    j0 = math.floor((x.lo - phase) / twopi - 1e-9)
    j1 = math.ceil((x.hi - phase) / twopi + 1e-9)
    for j in range(j0, j1 + 1):
        cmax = phase + twopi * j
        cmin = cmax + math.pi
        if x.lo - 1e-12 <= cmax <= x.hi + 1e-12:
            hi = 1.0
        if x.lo - 1e-12 <= cmin <= x.hi + 1e-12:
            lo = -1.0
    return Interval(max(lo, -1.0), min(hi, 1.0))


def atan2_interval(y: Interval, x: Interval) -> Interval:
    """Enclosure of the principal angle atan2(y, x) in [-pi, pi]."""
    if x.contains_zero() and y.contains_zero():
        raise DomainViolation("atan2 at the origin")
    if x.lo <= 0.0 and y.contains_zero():
        # box meets the branch cut on the negative x-axis
        return Interval(_down(-math.pi), _up(math.pi))
    corners = [math.atan2(yy, xx) for yy in (y.lo, y.hi) for xx in (x.lo, x.hi)]
    lo, hi = _widen(min(corners), max(corners), 2)
    # atan2 is monotone along each edge except where the box straddles an axis
    if x.lo > 0.0 and y.contains_zero():
        lo, hi = min(lo, 0.0), max(hi, 0.0)
    return Interval(lo, hi)


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(float(x))


class IntervalBox(tuple):
    """A finite axis-aligned box, one :class:`Interval` per coordinate."""

    def __new__(cls, intervals: Iterable):
        ivs = []
        for iv in intervals:
            if not isinstance(iv, Interval):
                lo, hi = iv
                iv = Interval(float(lo), float(hi))
            if math.isinf(iv.lo) or math.isinf(iv.hi):
                raise ValueError("box bounds must be finite")
            ivs.append(iv)
        return super().__new__(cls, ivs)

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "IntervalBox":
        return cls([(lo, hi)] * dim)

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def lo(self) -> tuple[float, ...]:
        return tuple(iv.lo for iv in self)

    @property
    def hi(self) -> tuple[float, ...]:
        return tuple(iv.hi for iv in self)

    @property
    def mid(self) -> tuple[float, ...]:
        return tuple(iv.mid for iv in self)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(iv.width for iv in self)

    @property
    def diameter(self) -> float:
        return math.sqrt(sum(w * w for w in self.widths))

    def contains(self, p: Sequence[float]) -> bool:
        return all(iv.contains(x) for iv, x in zip(self, p))

    def subset_of(self, other: "IntervalBox") -> bool:
        return all(a.subset_of(b) for a, b in zip(self, other))

    def intersects(self, other: "IntervalBox") -> bool:
        return all(a.intersect(b) is not None for a, b in zip(self, other))

    def bisect(self, axis: int) -> tuple["IntervalBox", "IntervalBox"]:
        a, b = self[axis].bisect()
        left = list(self)
        right = list(self)
        left[axis], right[axis] = a, b
        return IntervalBox(left), IntervalBox(right)

    def inflate(self, r: float) -> "IntervalBox":
        return IntervalBox([(iv.lo - r, iv.hi + r) for iv in self])

    def product(self, other: "IntervalBox") -> "IntervalBox":
        return IntervalBox(list(self) + list(other))

    def grid(self, resolution: int) -> Iterator["IntervalBox"]:
        """Uniform subdivision into ``resolution`` cells per axis."""
        import itertools

        edges = []
        for iv in self:
            step = iv.width / resolution
            pts = [iv.lo + i * step for i in range(resolution)] + [iv.hi]
            edges.append([(pts[i], pts[i + 1]) for i in range(resolution)])
        for cell in itertools.product(*edges):
            yield IntervalBox(cell)

    def to_list(self) -> list[list[float]]:
        return [[iv.lo, iv.hi] for iv in self]
