"""Forward-mode and Taylor-mode differentiation over generic scalars.

``DualVec`` carries a value and a gradient; ``TaylorJet`` carries truncated
Taylor coefficients of ``t -> F(x0 + t v)``.  Coefficients may be any scalar
that supports ``+ - * /`` (floats, ``Interval``, or another AD type), so the
two types nest: a ``DualVec`` whose coefficients are ``DualVec`` gives second
derivatives, a ``TaylorJet`` over ``DualVec`` gives mixed parameter/direction
derivatives.  Each AD value records its nesting ``level`` so that mixed
arithmetic always lifts the shallower operand into the deeper one.

System functions throughout the package take a sequence of scalars and
return a list of scalars; they are written once and evaluated with whichever
scalar type the caller passes in.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .interval import DomainError, Interval, as_interval, pow_int, sqrt

SystemFn = Callable[[Sequence], list]


def level(x) -> int:
    return getattr(x, "level", 0)


def zero_like(*xs):
    """Exact zero of the deepest scalar type among ``xs``."""
    deepest = max(xs, key=level)
    return deepest * 0.0 if level(deepest) > 0 or not isinstance(deepest, (int, float)) else 0.0


def base_value(x):
    """Innermost (level-0) value of a possibly nested AD scalar."""
    while True:
        if isinstance(x, DualVec):
            x = x.val
        elif isinstance(x, TaylorJet):
            x = x.c[0]
        else:
            return x


def base_lo(x) -> float:
    v = base_value(x)
    return v.lo if isinstance(v, Interval) else float(np.min(v))


class DualVec:
    """Value plus gradient with respect to a fixed list of variables."""

    __slots__ = ("val", "grad", "level")
    # numpy arrays on the left defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, val, grad):
        self.val = val
        self.grad = tuple(grad)
        self.level = level(val) + 1

    @classmethod
    def variables(cls, values: Sequence) -> list["DualVec"]:
        n = len(values)
        return [cls(v, tuple(1.0 if j == i else 0.0 for j in range(n))) for i, v in enumerate(values)]

    def _same(self, o) -> bool:
        lv = level(o)
        if lv > self.level:
            return False
        if lv == self.level:
            if not isinstance(o, DualVec) or len(o.grad) != len(self.grad):
                raise TypeError("incompatible AD operands at the same nesting level")
            return True
        return False

    def __add__(self, o):
        if level(o) > self.level:
            return o.__radd__(self)
        if self._same(o):
            return DualVec(self.val + o.val, [x + y for x, y in zip(self.grad, o.grad)])
        return DualVec(self.val + o, self.grad)

    def __radd__(self, o):
        return DualVec(o + self.val, self.grad)

    def __sub__(self, o):
        if level(o) > self.level:
            return o.__rsub__(self)
        if self._same(o):
            return DualVec(self.val - o.val, [x - y for x, y in zip(self.grad, o.grad)])
        return DualVec(self.val - o, self.grad)

    def __rsub__(self, o):
        return DualVec(o - self.val, [-x for x in self.grad])

    def __neg__(self):
        return DualVec(-self.val, [-x for x in self.grad])

    def __pos__(self):
        return self

    def __mul__(self, o):
        if level(o) > self.level:
            return o.__rmul__(self)
        if self._same(o):
            a, b = self.val, o.val
            return DualVec(a * b, [_fma(a, y, x * b) for x, y in zip(self.grad, o.grad)])
        return DualVec(self.val * o, [_scale(x, o) for x in self.grad])

    def __rmul__(self, o):
        return DualVec(o * self.val, [_scale(x, o) for x in self.grad])

    def __truediv__(self, o):
        if level(o) > self.level:
            return o.__rtruediv__(self)
        if self._same(o):
            b = o.val
            q = self.val / b
            inv = 1.0 / b
            return DualVec(q, [(x - q * y) * inv for x, y in zip(self.grad, o.grad)])
        inv = 1.0 / o
        return DualVec(self.val * inv, [_scale(x, inv) for x in self.grad])

    def __rtruediv__(self, o):
        inv = 1.0 / self.val
        q = o * inv
        return DualVec(q, [-(q * x) * inv for x in self.grad])

    def __pow__(self, n):
        return self.pow_int(n)

    def pow_int(self, n: int):
        if n == 0:
            return DualVec(1.0, [0.0] * len(self.grad))
        if n < 0:
            return 1.0 / self.pow_int(-n)
        if n == 1:
            return self
        p = pow_int(self.val, n - 1)
        d = n * p
        return DualVec(p * self.val, [x * d for x in self.grad])

    def sqrt(self):
        if base_lo(self.val) <= 0.0:
            raise DomainError("derivative of sqrt unbounded at 0")
        s = sqrt(self.val)
        h = 0.5 / s
        return DualVec(s, [x * h for x in self.grad])

    def __repr__(self):
        return f"DualVec({self.val!r}, {list(self.grad)!r})"


def _scale(x, c):
    if isinstance(x, float) and x == 0.0:
        return 0.0
    return x * c


def _fma(a, y, xb):
    # a*y + x*b with exact-zero shortcuts (seeded gradients are mostly 0.0)
    if isinstance(y, float) and y == 0.0:
        return xb
    if isinstance(xb, float) and xb == 0.0:
        return a * y
    return a * y + xb


class TaylorJet:
    """Truncated Taylor coefficients ``c[k] = F^(k)(0) / k!``."""

    __slots__ = ("c", "level")
    # numpy arrays on the left defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.c = tuple(coeffs)
        self.level = max(level(x) for x in self.c) + 1

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def derivative(self, k: int):
        """k-th derivative ``d^k/dt^k F(x0 + t v)`` at t = 0."""
        f = 1
        for i in range(2, k + 1):
            f *= i
        return self.c[k] * float(f)

    def _same(self, o) -> bool:
        lv = level(o)
        if lv == self.level:
            if not isinstance(o, TaylorJet) or len(o.c) != len(self.c):
                raise TypeError("incompatible AD operands at the same nesting level")
            return True
        return False

    def __add__(self, o):
        if level(o) > self.level:
            return o.__radd__(self)
        if self._same(o):
            return TaylorJet([x + y for x, y in zip(self.c, o.c)])
        return TaylorJet((self.c[0] + o,) + self.c[1:])

    def __radd__(self, o):
        return TaylorJet((o + self.c[0],) + self.c[1:])

    def __sub__(self, o):
        if level(o) > self.level:
            return o.__rsub__(self)
        if self._same(o):
            return TaylorJet([x - y for x, y in zip(self.c, o.c)])
        return TaylorJet((self.c[0] - o,) + self.c[1:])

    def __rsub__(self, o):
        return TaylorJet([o - self.c[0]] + [-x for x in self.c[1:]])

    def __neg__(self):
        return TaylorJet([-x for x in self.c])

    def __pos__(self):
        return self

    def __mul__(self, o):
        if level(o) > self.level:
            return o.__rmul__(self)
        if self._same(o):
            a, b = self.c, o.c
            out = []
            for k in range(len(a)):
                acc = 0.0
                for i in range(k + 1):
                    acc = _fma(a[i], b[k - i], acc)
                out.append(acc)
            return TaylorJet(out)
        return TaylorJet([_scale(x, o) for x in self.c])

    def __rmul__(self, o):
        return TaylorJet([_scale(x, o) for x in self.c])

    def __truediv__(self, o):
        if level(o) > self.level:
            return o.__rtruediv__(self)
        if self._same(o):
            return _jet_div(self.c, o.c)
        inv = 1.0 / o
        return TaylorJet([_scale(x, inv) for x in self.c])

    def __rtruediv__(self, o):
        return _jet_div((o,) + (0.0,) * (len(self.c) - 1), self.c)

    def __pow__(self, n):
        return self.pow_int(n)

    def pow_int(self, n: int):
        if n < 0:
            return 1.0 / self.pow_int(-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            return TaylorJet((1.0,) + (0.0,) * (len(self.c) - 1))
        return result

    def sqrt(self):
        a = self.c
        if len(a) > 1 and base_lo(a[0]) <= 0.0:
            raise DomainError("Taylor coefficients of sqrt unbounded at 0")
        s0 = sqrt(a[0])
        s = [s0]
        if len(a) > 1:
            inv = 0.5 / s0
            for k in range(1, len(a)):
                acc = a[k]
                for j in range(1, k):
                    acc = acc - s[j] * s[k - j]
                s.append(acc * inv)
        return TaylorJet(s)

    def __repr__(self):
        return f"TaylorJet({list(self.c)!r})"


def _jet_div(a, b) -> TaylorJet:
    inv = 1.0 / b[0]
    q = []
    for k in range(len(a)):
        acc = a[k]
        for j in range(1, k + 1):
            if isinstance(b[j], float) and b[j] == 0.0:
                continue
            acc = acc - b[j] * q[k - j]
        q.append(acc * inv)
    return TaylorJet(q)


class IntervalMatrix:
    """Rectangular matrix of intervals (rows of ``Interval``)."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = [[as_interval(x) for x in r] for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("IntervalMatrix must be rectangular and non-empty")
        self.rows = rows

    @classmethod
    def from_float(cls, a) -> "IntervalMatrix":
        return cls([[Interval(float(x)) for x in r] for r in np.asarray(a, dtype=float)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def mid(self) -> np.ndarray:
        return np.array([[x.mid() for x in r] for r in self.rows])

    def contains(self, a) -> bool:
        a = np.asarray(a, dtype=float)
        return all(x.contains(float(a[i, j])) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def matvec(self, v: Sequence) -> list[Interval]:
        out = []
        for r in self.rows:
            acc = Interval(0.0)
            for x, y in zip(r, v):
                acc = acc + x * y
            out.append(acc)
        return out

    def vecmat(self, w: Sequence) -> list[Interval]:
        """Row vector times matrix: ``w^T A``."""
        n, m = self.shape
        out = []
        for j in range(m):
            acc = Interval(0.0)
            for i in range(n):
                acc = acc + w[i] * self.rows[i][j]
            out.append(acc)
        return out

    def left_mul_float(self, c) -> "IntervalMatrix":
        """``C @ self`` for a float matrix ``C``."""
        c = np.asarray(c, dtype=float)
        n, m = self.shape
        out = []
        for i in range(c.shape[0]):
            row = []
            for j in range(m):
                acc = Interval(0.0)
                for k in range(n):
                    acc = acc + float(c[i, k]) * self.rows[k][j]
                row.append(acc)
            out.append(row)
        return IntervalMatrix(out)

    def __repr__(self):
        return "IntervalMatrix(" + repr([[str(x) for x in r] for r in self.rows]) + ")"


def _grad_of(y, lv: int, n: int) -> list:
    if isinstance(y, DualVec) and y.level == lv:
        return list(y.grad)
    return [0.0] * n


def jacobian_values(f: SystemFn, x: Sequence) -> tuple[list, list[list]]:
    """Values and Jacobian of ``f`` at ``x`` with whatever scalar type ``x`` holds."""
    n = len(x)
    xs = DualVec.variables(list(x))
    lv = xs[0].level
    ys = f(xs)
    vals = [y.val if isinstance(y, DualVec) and y.level == lv else y for y in ys]
    return vals, [_grad_of(y, lv, n) for y in ys]


def jacobian(f: SystemFn, box: Sequence) -> IntervalMatrix:
    """Interval enclosure of the Jacobian of ``f`` over ``box``."""
    _, rows = jacobian_values(f, [as_interval(b) for b in box])
    return IntervalMatrix(rows)


def directional_jet(f: SystemFn, x0: Sequence, v: Sequence, order: int = 3) -> list[TaylorJet]:
    """Taylor jets of each component of ``t -> f(x0 + t v)`` up to ``order``."""
    if not 1 <= order <= 3:
        raise ValueError("order must be 1, 2 or 3")
    pad = (0.0,) * (order - 1)
    xs = [TaylorJet((a, b) + pad) for a, b in zip(x0, v)]
    lv = xs[0].level
    out = []
    for y in f(xs):
        if isinstance(y, TaylorJet) and y.level == lv:
            out.append(y)
        else:
            out.append(TaylorJet((y,) + (0.0,) * order))
    return out


def param_derivative(f: Callable, x0: Sequence, mu0) -> list:
    """Enclosure of ``dF/dmu`` at ``(x0, mu0)`` for ``f(x, mu)``."""
    mu = DualVec(mu0, (1.0,))
    out = []
    for y in f(list(x0), mu):
        if isinstance(y, DualVec) and y.level == mu.level:
            out.append(y.grad[0])
        else:
            out.append(Interval(0.0) if isinstance(mu0, Interval) else 0.0)
    return out
