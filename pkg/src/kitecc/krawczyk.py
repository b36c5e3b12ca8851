"""Krawczyk operator on a single box.

``K(x0, X) = x0 - C F(x0) + (I - C DF(X)) (X - x0)`` with ``x0`` the box
midpoint and ``C`` a floating approximate inverse of ``mid DF(X)``.  Every
zero of F in X lies in K; ``K`` inside the interior of X proves exactly one
zero; ``K`` disjoint from X proves none.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .autodiff import IntervalMatrix, SystemFn, jacobian
from .interval import Box, DomainError, Interval


class Verdict(str, Enum):
    UNIQUE_ZERO = "UniqueZero"
    NO_ZERO = "NoZero"
    CONTRACTED = "Contracted"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


class SingularMatrix(ArithmeticError):
    pass


@dataclass
class KrawczykResult:
    verdict: Verdict
    k_box: Box | None
    x0: tuple
    C: np.ndarray | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": str(self.verdict),
            "k_box": None if self.k_box is None else self.k_box.to_json(),
            "x0": list(self.x0),
            "C": None if self.C is None else self.C.tolist(),
            "reason": self.reason,
        }


def make_preconditioner(J) -> np.ndarray:
    """Approximate inverse of the midpoint matrix (LU with partial pivoting)."""
    m = J.mid() if isinstance(J, IntervalMatrix) else np.asarray(J, dtype=float)
    if not np.all(np.isfinite(m)):
        raise SingularMatrix("non-finite midpoint Jacobian")
    try:
        c = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.all(np.isfinite(c)) or np.linalg.cond(m) > 1e15:
        raise SingularMatrix("midpoint Jacobian numerically singular")
    return c


def krawczyk_operator(f: SystemFn, box: Box, J: IntervalMatrix | None = None,
                      C: np.ndarray | None = None) -> tuple[Box, tuple, np.ndarray]:
    n = len(box)
    x0 = box.mid()
    fx0 = f([Interval(v) for v in x0])
    if len(fx0) != n:
        raise ValueError(f"system has {len(fx0)} equations for {n} unknowns")
    if J is None:
        J = jacobian(f, box)
    if C is None:
        C = make_preconditioner(J)
    rows = J.rows
    dx = [box[j] - x0[j] for j in range(n)]
    out = []
    for i in range(n):
        ci = [float(C[i, k]) for k in range(n)]
        acc = Interval(x0[i])
        for k in range(n):
            acc = acc - ci[k] * fx0[k]
        for j in range(n):
            # entry (I - C J)_ij
            mij = Interval(1.0 if i == j else 0.0)
            for k in range(n):
                mij = mij - ci[k] * rows[k][j]
            acc = acc + mij * dx[j]
        out.append(acc)
    return Box(out), x0, C


def krawczyk_step(f: SystemFn, box: Box) -> KrawczykResult:
    box = Box(box)
    x0 = box.mid()
    try:
        k_box, x0, C = krawczyk_operator(f, box)
    except DomainError as exc:
        return KrawczykResult(Verdict.UNKNOWN, None, x0, None, f"domain: {exc}")
    except SingularMatrix as exc:
        return KrawczykResult(Verdict.UNKNOWN, None, x0, None, f"singular: {exc}")
    if any(not (np.isfinite(k.lo) and np.isfinite(k.hi)) for k in k_box):
        return KrawczykResult(Verdict.UNKNOWN, k_box, x0, C, "overflow")
    if box.intersect(k_box) is None:
        return KrawczykResult(Verdict.NO_ZERO, k_box, x0, C)
    if box.interior_contains(k_box):
        return KrawczykResult(Verdict.UNIQUE_ZERO, k_box, x0, C)
    return KrawczykResult(Verdict.CONTRACTED, k_box, x0, C)


def refine(f: SystemFn, box: Box, target_width: float = 1e-12, max_iter: int = 60) -> Box:
    """Shrink a box known to hold exactly one zero by iterating ``X <- K(X) & X``.

    Every zero in X lies in K(X), so each intersection still contains the
    zero regardless of later verdicts.  Stops at ``target_width`` or when the
    width improves by less than 1% in an iteration.
    """
    cur = Box(box)
    w = cur.max_width()
    for _ in range(max_iter):
        if w <= target_width:
            break
        try:
            k_box, _, _ = krawczyk_operator(f, cur)
        except (DomainError, SingularMatrix):
            break
        nxt = cur.intersect(k_box)
        if nxt is None:
            raise ArithmeticError("refinement lost the zero: box did not hold a certified zero")
        nw = nxt.max_width()
        cur = nxt
        if nw > 0.99 * w:
            break
        w = nw
    return cur


@dataclass
class LocalCertificate:
    """Result of certifying a zero near an approximate solution."""

    box: Box                       # box on which uniqueness was proven
    enclosure: Box                 # refined enclosure of the zero
    iterations: int = 0
    history: list = field(default_factory=list)


def certify_near(f: SystemFn, x_approx: Sequence[float], radius: float | Sequence[float] = 1e-8,
                 max_iter: int = 12, target_width: float = 1e-12) -> LocalCertificate | None:
    """Epsilon-inflation around an approximate zero; None when no proof is found."""
    x_approx = [float(v) for v in x_approx]
    if np.isscalar(radius):
        radius = [radius * max(1.0, abs(v)) for v in x_approx]
    box = Box([Interval(v - r, v + r) for v, r in zip(x_approx, radius)])
    for it in range(max_iter):
        res = krawczyk_step(f, box)
        if res.verdict is Verdict.UNIQUE_ZERO:
            enc = refine(f, box.intersect(res.k_box), target_width)
            return LocalCertificate(box, enc, it + 1)
        if res.verdict in (Verdict.NO_ZERO, Verdict.UNKNOWN) and res.k_box is None:
            return None
        if res.verdict is Verdict.NO_ZERO:
            return None
        k = res.k_box
        # next trial box: K widened a little, never smaller than the current one
        box = box.hull(k).inflate(0.1, 1e-300) if k.max_width() > box.max_width() else k.inflate(0.5, 1e-15)
        if box.max_width() > 1e3 * max(radius):
            return None
    return None
