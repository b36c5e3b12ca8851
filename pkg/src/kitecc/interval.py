"""Closed binary64 intervals with directed (outward) rounding.

Every endpoint is produced by the native float operation followed by an exact
error term (TwoSum / Dekker TwoProduct).  When the error is nonzero the
endpoint is stepped one ulp with ``math.nextafter`` in the safe direction, so
results are the correctly rounded-outward bounds and exact operations stay
exact.  Where the error term cannot be trusted (overflow, deep underflow) both
endpoints are stepped unconditionally.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "DomainError",
    "Interval",
    "Box",
    "as_interval",
    "intersect",
    "hull",
    "contains",
    "midpoint",
    "width",
    "bisect",
    "sqrt",
    "pow_int",
]

_INF = math.inf
_SPLIT = 134217729.0  # 2**27 + 1
_SPLIT_MAX = 1e290
_TINY = 1e-280
_MAX = 1.7976931348623157e308


class DomainError(ArithmeticError):
    """Operation undefined somewhere on its interval argument.

    The prover treats this as "undecided on this box, subdivide".
    """


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _prod_err(a: float, b: float, p: float) -> float:
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add_down(a: float, b: float) -> float:
    s = a + b
    if s - s != 0.0:  # inf or nan
        return -_MAX if s == _INF and a != _INF and b != _INF else s
    return _down(s) if _sum_err(a, b, s) < 0.0 else s


def add_up(a: float, b: float) -> float:
    s = a + b
    if s - s != 0.0:
        return _MAX if s == -_INF and a != -_INF and b != -_INF else s
    return _up(s) if _sum_err(a, b, s) > 0.0 else s


def _mul_err_sign(a: float, b: float, p: float) -> float | None:
    """Sign carrier of (a*b - p), or None when it cannot be computed exactly."""
    if a == 0.0 or b == 0.0:
        return 0.0
    ap = abs(p)
    if ap == _INF or abs(a) == _INF or abs(b) == _INF:
        return None
    if ap < _TINY:
        # splitting is inexact near underflow: take the exact sign instead
        r = Fraction(a) * Fraction(b) - Fraction(p)
        return 0.0 if r == 0 else math.copysign(1.0, r)
    if abs(a) > _SPLIT_MAX or abs(b) > _SPLIT_MAX:
        return None
    return _prod_err(a, b, p)


def mul_down(a: float, b: float) -> float:
    p = a * b
    e = _mul_err_sign(a, b, p)
    if e is None:
        if p == _INF and abs(a) != _INF and abs(b) != _INF:
            return _MAX
        return _down(p)
    return _down(p) if e < 0.0 else p


def mul_up(a: float, b: float) -> float:
    p = a * b
    e = _mul_err_sign(a, b, p)
    if e is None:
        if p == -_INF and abs(a) != _INF and abs(b) != _INF:
            return -_MAX
        return _up(p)
    return _up(p) if e > 0.0 else p


def _div_err_sign(a: float, b: float, q: float) -> float | None:
    """Sign of (a/b - q) as a float carrier, None when not exactly computable."""
    if a == 0.0:
        return 0.0
    aq = abs(q)
    if aq == _INF or abs(a) == _INF or abs(b) == _INF or b == 0.0:
        return None
    if aq < _TINY:
        r = Fraction(a) / Fraction(b) - Fraction(q)
        return 0.0 if r == 0 else math.copysign(1.0, r)
    if abs(b) > _SPLIT_MAX or abs(q) > _SPLIT_MAX:
        return None
    p = q * b
    r = (a - p) - _prod_err(q, b, p)
    return r if b > 0.0 else -r


def div_down(a: float, b: float) -> float:
    q = a / b
    e = _div_err_sign(a, b, q)
    if e is None:
        return _down(q)
    return _down(q) if e < 0.0 else q


def div_up(a: float, b: float) -> float:
    q = a / b
    e = _div_err_sign(a, b, q)
    if e is None:
        return _up(q)
    return _up(q) if e > 0.0 else q


def _sqrt_err_sign(x: float, s: float) -> float | None:
    if x == 0.0:
        return 0.0
    if x < _TINY or x > _SPLIT_MAX:
        return None
    p = s * s
    return (x - p) - _prod_err(s, s, p)


def sqrt_down(x: float) -> float:
    s = math.sqrt(x)
    e = _sqrt_err_sign(x, s)
    if e is None:
        return max(0.0, _down(s))
    return _down(s) if e < 0.0 else s


def sqrt_up(x: float) -> float:
    if x == _INF:
        return _INF
    s = math.sqrt(x)
    e = _sqrt_err_sign(x, s)
    if e is None:
        return _up(s)
    return _up(s) if e > 0.0 else s


def _pow_down_nonneg(x: float, n: int) -> float:
    r = 1.0
    for _ in range(n):
        r = mul_down(r, x)
    return r


def _pow_up_nonneg(x: float, n: int) -> float:
    r = 1.0
    for _ in range(n):
        r = mul_up(r, x)
    return r


class Interval:
    """Closed interval ``[lo, hi]`` of binary64 numbers.

    Instances are treated as immutable.  Python floats and ints mix freely
    with intervals and are taken as exact thin intervals.
    """

    __slots__ = ("lo", "hi")
    # numpy arrays on the left defer to our reflected operators
    __array_ufunc__ = None

    level = 0

    def __init__(self, lo, hi=None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if not lo <= hi:
            raise ValueError(f"invalid interval [{lo!r}, {hi!r}]")
        self.lo = lo
        self.hi = hi

    # -- construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, lo: float, hi: float) -> "Interval":
        obj = object.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    @classmethod
    def from_value(cls, x) -> "Interval":
        """Tightest interval around a float, int, Fraction or decimal string."""
        if isinstance(x, Interval):
            return x
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            f = float(x)
            if isinstance(x, int) and int(f) != x:
                return cls._raw(_down(f), _up(f))
            return cls._raw(f, f)
        from fractions import Fraction

        q = Fraction(x)
        f = float(q)
        lo = f if Fraction(f) <= q else _down(f)
        hi = f if Fraction(f) >= q else _up(f)
        return cls._raw(lo, hi)

    # -- basic queries ----------------------------------------------------------

    def mid(self) -> float:
        if self.lo == self.hi:
            return self.lo
        m = 0.5 * self.lo + 0.5 * self.hi
        if math.isinf(self.lo) or math.isinf(self.hi):
            return 0.0 if self.lo < 0.0 < self.hi else (self.lo if math.isfinite(self.lo) else self.hi)
        return min(max(m, self.lo), self.hi)

    def width(self) -> float:
        return add_up(self.hi, -self.lo)

    def rad(self) -> float:
        return 0.5 * self.width()

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def interior_contains(self, x: "Interval") -> bool:
        return self.lo < x.lo and x.hi < self.hi

    def is_thin(self) -> bool:
        return self.lo == self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __eq__(self, other):
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        if isinstance(other, (int, float)):
            return self.lo == self.hi == other
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        return f"[{self.lo!r}, {self.hi!r}]"

    # -- arithmetic -------------------------------------------------------------

    def __neg__(self):
        # + 0.0 turns -0.0 into 0.0
        return Interval._raw(-self.hi + 0.0, -self.lo + 0.0)

    def __pos__(self):
        return self

    def __add__(self, o):
        if isinstance(o, Interval):
            return Interval._raw(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
        if isinstance(o, (int, float)):
            o = float(o)
            return Interval._raw(add_down(self.lo, o), add_up(self.hi, o))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Interval):
            return Interval._raw(add_down(self.lo, -o.hi), add_up(self.hi, -o.lo))
        if isinstance(o, (int, float)):
            o = float(o)
            return Interval._raw(add_down(self.lo, -o), add_up(self.hi, -o))
        return NotImplemented

    def __rsub__(self, o):
        if isinstance(o, (int, float)):
            o = float(o)
            return Interval._raw(add_down(o, -self.hi), add_up(o, -self.lo))
        return NotImplemented

    def __mul__(self, o):
        if isinstance(o, Interval):
            a, b, c, d = self.lo, self.hi, o.lo, o.hi
        elif isinstance(o, (int, float)):
            c = d = float(o)
            a, b = self.lo, self.hi
        else:
            return NotImplemented
        if a >= 0.0:
            if c >= 0.0:
                return Interval._raw(mul_down(a, c), mul_up(b, d))
            if d <= 0.0:
                return Interval._raw(mul_down(b, c), mul_up(a, d))
            return Interval._raw(mul_down(b, c), mul_up(b, d))
        if b <= 0.0:
            if c >= 0.0:
                return Interval._raw(mul_down(a, d), mul_up(b, c))
            if d <= 0.0:
                return Interval._raw(mul_down(b, d), mul_up(a, c))
            return Interval._raw(mul_down(a, d), mul_up(a, c))
        if c >= 0.0:
            return Interval._raw(mul_down(a, d), mul_up(b, d))
        if d <= 0.0:
            return Interval._raw(mul_down(b, c), mul_up(a, c))
        lo = min(mul_down(a, d), mul_down(b, c))
        hi = max(mul_up(a, c), mul_up(b, d))
        return Interval._raw(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, (int, float)):
            o = Interval._raw(float(o), float(o))
        elif not isinstance(o, Interval):
            return NotImplemented
        c, d = o.lo, o.hi
        if c <= 0.0 <= d:
            raise DomainError(f"division by interval containing zero {o}")
        a, b = self.lo, self.hi
        if c > 0.0:
            if a >= 0.0:
                return Interval._raw(div_down(a, d), div_up(b, c))
            if b <= 0.0:
                return Interval._raw(div_down(a, c), div_up(b, d))
            return Interval._raw(div_down(a, c), div_up(b, c))
        if a >= 0.0:
            return Interval._raw(div_down(b, d), div_up(a, c))
        if b <= 0.0:
            return Interval._raw(div_down(b, c), div_up(a, d))
        return Interval._raw(div_down(b, d), div_up(a, d))

    def __rtruediv__(self, o):
        if isinstance(o, (int, float)):
            return Interval._raw(float(o), float(o)) / self
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return pow_int(self, n)

    def sqrt(self) -> "Interval":
        """Square root with the argument clamped to ``[0, inf)`` first."""
        if self.hi < 0.0:
            raise DomainError(f"sqrt of negative interval {self}")
        lo = 0.0 if self.lo <= 0.0 else sqrt_down(self.lo)
        return Interval._raw(lo, sqrt_up(self.hi))

    def recip(self) -> "Interval":
        return 1.0 / self

    # -- set operations ---------------------------------------------------------

    def intersect(self, o: "Interval") -> "Interval | None":
        lo = max(self.lo, o.lo)
        hi = min(self.hi, o.hi)
        if lo > hi:
            return None
        return Interval._raw(lo, hi)

    def hull(self, o: "Interval") -> "Interval":
        return Interval._raw(min(self.lo, o.lo), max(self.hi, o.hi))

    def inflate(self, rel: float, abs_: float = 0.0) -> "Interval":
        r = rel * self.width() + abs_
        return Interval._raw(add_down(self.lo, -r), add_up(self.hi, r))

    def split(self, at: float | None = None) -> tuple["Interval", "Interval"]:
        m = self.mid() if at is None else at
        return Interval._raw(self.lo, m), Interval._raw(m, self.hi)

    def to_json(self) -> list[float]:
        return [self.lo, self.hi]

    @classmethod
    def from_json(cls, pair: Sequence[float]) -> "Interval":
        return cls(pair[0], pair[1])


def as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.from_value(x)


def pow_int(x, n: int):
    """Integer power; even powers of sign-straddling intervals start at 0."""
    if not isinstance(x, Interval):
        if hasattr(x, "pow_int"):
            return x.pow_int(n)
        return x**n
    if n == 0:
        return Interval._raw(1.0, 1.0)
    if n < 0:
        if x.lo <= 0.0 <= x.hi:
            raise DomainError(f"negative power of interval containing zero {x}")
        return 1.0 / pow_int(x, -n)
    lo, hi = x.lo, x.hi
    if lo >= 0.0:
        return Interval._raw(_pow_down_nonneg(lo, n), _pow_up_nonneg(hi, n))
    if hi <= 0.0:
        if n % 2 == 0:
            return Interval._raw(_pow_down_nonneg(-hi, n), _pow_up_nonneg(-lo, n))
        return Interval._raw(-_pow_up_nonneg(-lo, n), -_pow_down_nonneg(-hi, n))
    if n % 2 == 0:
        return Interval._raw(0.0, _pow_up_nonneg(max(-lo, hi), n))
    return Interval._raw(-_pow_up_nonneg(-lo, n), _pow_up_nonneg(hi, n))


def sqrt(x):
    """Generic square root: intervals, AD types, floats and numpy arrays."""
    if isinstance(x, (int, float)):
        return math.sqrt(x)
    if hasattr(x, "sqrt"):
        return x.sqrt()
    import numpy as np

    return np.sqrt(x)


def intersect(a: Interval, b: Interval) -> Interval | None:
    return a.intersect(b)


def hull(a: Interval, b: Interval) -> Interval:
    return a.hull(b)


def contains(a: Interval, x) -> bool:
    return a.contains(x)


def midpoint(a: Interval) -> float:
    return a.mid()


def width(a: Interval) -> float:
    return a.width()


class Box(tuple):
    """Fixed-length tuple of intervals: the search-region unit."""

    def __new__(cls, dims: Iterable):
        items = tuple(as_interval(d) if not isinstance(d, Interval) else d for d in dims)
        if not items:
            raise ValueError("a box needs at least one dimension")
        return super().__new__(cls, items)

    @classmethod
    def from_bounds(cls, bounds: Iterable[Sequence[float]]) -> "Box":
        return cls(Interval(lo, hi) for lo, hi in bounds)

    @classmethod
    def point(cls, xs: Iterable[float]) -> "Box":
        return cls(Interval(x) for x in xs)

    def mid(self) -> tuple[float, ...]:
        return tuple(iv.mid() for iv in self)

    def widths(self) -> tuple[float, ...]:
        return tuple(iv.width() for iv in self)

    def max_width(self) -> float:
        return max(self.widths())

    def volume(self) -> float:
        v = 1.0
        for w in self.widths():
            v *= w
        return v

    def contains(self, other) -> bool:
        if isinstance(other, Box):
            return all(a.contains(b) for a, b in zip(self, other))
        return all(a.contains(x) for a, x in zip(self, other))

    def interior_contains(self, other: "Box") -> bool:
        return all(a.interior_contains(b) for a, b in zip(self, other))

    def intersect(self, other: "Box") -> "Box | None":
        out = []
        for a, b in zip(self, other):
            c = a.intersect(b)
            if c is None:
                return None
            out.append(c)
        return Box(out)

    def hull(self, other: "Box") -> "Box":
        return Box(a.hull(b) for a, b in zip(self, other))

    def inflate(self, rel: float, abs_: float = 0.0) -> "Box":
        return Box(iv.inflate(rel, abs_) for iv in self)

    def split_dim(self, scale: Sequence[float] | None = None) -> int:
        """Dimension of largest width relative to ``scale`` (ties: lowest index).

        Without ``scale`` plain widths are compared; the prover passes the
        initial domain widths so anisotropic domains split evenly.
        """
        best, best_w = 0, -1.0
        for i, iv in enumerate(self):
            w = iv.width() if scale is None else iv.width() / scale[i]
            if w > best_w:
                best, best_w = i, w
        return best

    def bisect(self, dim: int | None = None, scale: Sequence[float] | None = None) -> tuple["Box", "Box"]:
        k = self.split_dim(scale) if dim is None else dim
        left, right = self[k].split()
        return (
            Box(self[:k] + (left,) + self[k + 1 :]),
            Box(self[:k] + (right,) + self[k + 1 :]),
        )

    def grid(self, parts: int | Sequence[int]) -> list["Box"]:
        """Uniform grid; cell faces are shared exactly between neighbours."""
        if isinstance(parts, int):
            parts = [parts] * len(self)
        axes = []
        for iv, n in zip(self, parts):
            edges = [iv.lo] + [iv.lo + (iv.hi - iv.lo) * k / n for k in range(1, n)] + [iv.hi]
            axes.append([Interval._raw(edges[k], edges[k + 1]) for k in range(n)])
        return [Box(combo) for combo in itertools.product(*axes)]

    def key(self) -> tuple[float, ...]:
        return tuple(x for iv in self for x in (iv.lo, iv.hi))

    def to_json(self) -> list[list[float]]:
        return [iv.to_json() for iv in self]

    @classmethod
    def from_json(cls, data) -> "Box":
        return cls(Interval.from_json(p) for p in data)

    def __repr__(self):
        return "Box(" + ", ".join(str(iv) for iv in self) + ")"


def bisect(box: Box) -> tuple[Box, Box]:
    return box.bisect()
