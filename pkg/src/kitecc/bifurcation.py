"""Rigorous classification of simple-eigenvalue bifurcation points.

For ``F(x, mu) = 0`` with a simple zero eigenvalue of ``DF`` (right null
vector ``v``, left null vector ``w``) the four test quantities

    t1 = w.F_mu,  t2 = w.(DF_mu v),  t3 = w.D2F(v, v),  t4 = w.D3F(v, v, v)

decide between fold, transcritical and pitchfork.  Each is an interval
enclosure.  A quantity is treated as zero only when its enclosure is exactly
``[0, 0]`` or when a reflection symmetry forces it to vanish; mere
containment of 0 is never enough.

``w`` is oriented so that ``t2 > 0`` whenever ``t2`` excludes 0; with that
orientation a pitchfork is supercritical (branches for ``mu > mu0``) iff
``t4 < 0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .autodiff import DualVec, IntervalMatrix, TaylorJet, directional_jet, jacobian, param_derivative
from .interval import Box, Interval, as_interval


class Kind(str, Enum):
    FOLD = "Fold"
    TRANSCRITICAL = "Transcritical"
    PITCHFORK_SUPER = "PitchforkSuper"
    PITCHFORK_SUB = "PitchforkSub"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


class NotRankDeficient(ArithmeticError):
    pass


def _dot(a: Sequence, b: Sequence) -> Interval:
    acc = Interval(0.0)
    for x, y in zip(a, b):
        acc = acc + as_interval(x) * as_interval(y)
    return acc


def _is_exact_zero(t: Interval) -> bool:
    return t.lo == 0.0 and t.hi == 0.0


def _excludes_zero(t: Interval) -> bool:
    return t.lo > 0.0 or t.hi < 0.0


def _all_contain_zero(vec) -> bool:
    return all(as_interval(y).contains(0.0) for y in vec)


def _closed_form_2x2(J: IntervalMatrix):
    j11, j12, j21, j22 = J[0, 0], J[0, 1], J[1, 0], J[1, 1]
    v = [-j12, j11]
    w = [-j21, j11]
    if _is_exact_zero(j11) and _is_exact_zero(j12):
        v = [-j22, j21]
    if _is_exact_zero(j11) and _is_exact_zero(j21):
        w = [-j22, j12]
    return v, w


def _normalize_exact(vec):
    # only used for degenerate closed forms; exact scaling by a power of two is
    # not required, a thin division keeps rigor
    mags = [max(abs(x.lo), abs(x.hi)) for x in vec]
    k = int(np.argmax(mags))
    s = vec[k].mid()
    return [x / s for x in vec]


def null_vectors(J: IntervalMatrix) -> tuple[list[Interval], list[Interval]]:
    """Right and left null vectors of a (nearly) singular interval matrix.

    1x1: ``v = w = 1``.  2x2: ``v = (-j12, j11)``, ``w = (-j21, j11)`` (second
    row/column when the first vanishes).  Larger: floating SVD estimates,
    inflated until ``J v`` and ``w^T J`` enclose 0 componentwise.
    """
    n, m = J.shape
    if n != m:
        raise ValueError("null_vectors needs a square matrix")
    if n == 1:
        if not J[0, 0].contains(0.0):
            raise NotRankDeficient("1x1 entry excludes 0")
        one = [Interval(1.0)]
        return one, list(one)
    if n == 2:
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if not det.contains(0.0):
            raise NotRankDeficient(f"determinant enclosure {det} excludes 0")
        v, w = _closed_form_2x2(J)
        if all(_is_exact_zero(x) for x in v) or all(_is_exact_zero(x) for x in w):
            raise NotRankDeficient("matrix is zero; null space not one-dimensional")
        if (_is_exact_zero(J[0, 0]) and _is_exact_zero(J[0, 1])) or (
            _is_exact_zero(J[0, 0]) and _is_exact_zero(J[1, 0])
        ):
            v, w = _normalize_exact(v), _normalize_exact(w)
        return v, w
    A = J.mid()
    U, s, Vt = np.linalg.svd(A)
    if s[-1] > 1e-6 * s[0] or (n > 1 and s[-2] < 1e-6 * s[0]):
        raise NotRankDeficient(f"singular values {s[-2]:.3e}, {s[-1]:.3e} do not show a simple zero")
    v = _orient(Vt[-1])
    w = _orient(U[:, -1])
    return _inflate_null(J, v, right=True), _inflate_null(J, w, right=False)


def _orient(u: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(u)))
    return u if u[k] > 0 else -u


def _inflate_null(J: IntervalMatrix, u: np.ndarray, right: bool) -> list[Interval]:
    prod = J.matvec if right else J.vecmat
    vec = [Interval(float(x)) for x in u]
    res = prod(vec)
    if _all_contain_zero(res):
        return vec
    n = len(u)
    rowsum = []
    for i in range(n):
        if right:
            rowsum.append(sum(J[i, j].mag() for j in range(n)))
        else:
            rowsum.append(sum(J[j, i].mag() for j in range(n)))
    eps = 2.0 * max(r.mag() for r in res) / max(min(rowsum), 1e-300)
    for _ in range(8):
        vec = [Interval(float(x)).inflate(0.0, eps) for x in u]
        if _all_contain_zero(prod(vec)):
            return vec
        eps *= 4.0
    raise NotRankDeficient("could not enclose a null vector")


@dataclass
class Reflection:
    """Involution ``x -> R x`` with ``F(R x) = S F(x)``; R, S flip the listed indices."""

    odd_coords: tuple[int, ...]
    odd_rows: tuple[int, ...]

    def act(self, x: Sequence, odd: Sequence[int]) -> list:
        return [-xi if i in odd else xi for i, xi in enumerate(x)]


@dataclass
class BifurcationReport:
    point: Box
    mu: Interval
    J: IntervalMatrix
    v: list
    w: list
    t1: Interval
    t2: Interval
    t3: Interval
    t4: Interval
    kind: Kind
    structural_zeros: dict = field(default_factory=dict)
    symmetry_certificate: dict | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": str(self.kind),
            "point": self.point.to_json(),
            "mu": self.mu.to_json(),
            "J": [[x.to_json() for x in r] for r in self.J.rows],
            "v": [as_interval(x).to_json() for x in self.v],
            "w": [as_interval(x).to_json() for x in self.w],
            "t1": self.t1.to_json(),
            "t2": self.t2.to_json(),
            "t3": self.t3.to_json(),
            "t4": self.t4.to_json(),
            "structural_zeros": self.structural_zeros,
            "symmetry_certificate": self.symmetry_certificate,
            "notes": self.notes,
        }


def decide(t1: Interval, t2: Interval, t3: Interval, t4: Interval,
           zero_t1: bool = False, zero_t3: bool = False) -> Kind:
    """Classification table; ``t2`` is assumed oriented positive when nonzero."""
    z1 = zero_t1 or _is_exact_zero(t1)
    z3 = zero_t3 or _is_exact_zero(t3)
    if _excludes_zero(t1) and _excludes_zero(t3):
        return Kind.FOLD
    if z1 and _excludes_zero(t2) and _excludes_zero(t3):
        return Kind.TRANSCRITICAL
    if z1 and _excludes_zero(t2) and z3 and _excludes_zero(t4):
        return Kind.PITCHFORK_SUPER if t4.hi < 0.0 else Kind.PITCHFORK_SUB
    return Kind.INCONCLUSIVE


def mixed_derivative(f: Callable, x0: Sequence, v: Sequence, mu0) -> list:
    """``d/dmu (DF(x0, mu) v)`` at ``mu0`` via a Taylor jet over dual numbers."""
    xs = [TaylorJet((DualVec(a, (0.0,)), DualVec(b, (0.0,)))) for a, b in zip(x0, v)]
    mu = DualVec(mu0, (1.0,))
    out = []
    for y in f(xs, mu):
        c1 = y.c[1] if isinstance(y, TaylorJet) else 0.0
        out.append(c1.grad[0] if isinstance(c1, DualVec) else Interval(0.0))
    return out


def _test_quantities(f, point: Box, mu: Interval, v, w):
    fmu = param_derivative(f, list(point), mu)
    t1 = _dot(w, fmu)
    t2 = _dot(w, mixed_derivative(f, list(point), v, mu))
    jets = directional_jet(lambda x: f(x, mu), list(point), v, 3)
    t3 = _dot(w, [j.derivative(2) for j in jets])
    t4 = _dot(w, [j.derivative(3) for j in jets])
    return t1, t2, t3, t4


def _check_equivariance(f, sym: Reflection, point: Box, mu: Interval, samples: int, seed: int) -> bool:
    """Sampled check that ``F(R x) = S F(x)``: enclosures must overlap."""
    rng = random.Random(seed)
    for _ in range(samples):
        x = [Interval(iv.mid() + rng.uniform(-0.05, 0.05)) for iv in point]
        lhs = f(sym.act(x, sym.odd_coords), mu)
        rhs = sym.act(f(x, mu), sym.odd_rows)
        if any(as_interval(p).intersect(as_interval(q)) is None for p, q in zip(lhs, rhs)):
            return False
    return True


def classify(f: Callable, point: Box, mu: Interval, symmetry: Reflection | None = None,
             samples: int = 25, seed: int = 0) -> BifurcationReport:
    """Classify the bifurcation of ``f(x, mu) = 0`` at a certified solution enclosure."""
    point = Box(point)
    mu = as_interval(mu)
    J = jacobian(lambda x: f(x, mu), point)
    notes = []
    sym_cert = None
    zero_t1 = zero_t3 = False
    if symmetry is None:
        v, w = null_vectors(J)
    else:
        v, w, sym_cert = _symmetric_null_vectors(f, J, point, mu, symmetry, samples, seed)
        zero_t1 = zero_t3 = sym_cert["valid"]
        if not sym_cert["valid"]:
            notes.append("symmetry certificate failed; no structural zeros used")
    t1, t2, t3, t4 = _test_quantities(f, point, mu, v, w)
    if t2.hi < 0.0:
        w = [-x for x in w]
        t1, t2, t3, t4 = -t1, -t2, -t3, -t4
        notes.append("w negated so that t2 > 0")
    kind = decide(t1, t2, t3, t4, zero_t1, zero_t3)
    structural = {"t1": zero_t1, "t3": zero_t3}
    return BifurcationReport(point, mu, J, v, w, t1, t2, t3, t4, kind, structural, sym_cert, notes)


def _symmetric_null_vectors(f, J: IntervalMatrix, point: Box, mu: Interval, sym: Reflection,
                            samples: int, seed: int):
    """Null vectors supported on the reflection-odd block.

    At a symmetric point the Jacobian splits into odd and even blocks.  When
    the odd block is 2x2 and singular and the even block is regular, ``v`` is
    odd (``R v = -v``) and ``w`` is odd (``S w = -w``); ``F_mu`` and
    ``D2F(v, v)`` are even, so ``t1`` and ``t3`` vanish identically.
    """
    n = len(point)
    oc, orow = list(sym.odd_coords), list(sym.odd_rows)
    ec = [i for i in range(n) if i not in oc]
    er = [i for i in range(n) if i not in orow]
    odd = IntervalMatrix([[J[i, j] for j in oc] for i in orow])
    even = IntervalMatrix([[J[i, j] for j in ec] for i in er])
    vo, wo = null_vectors(odd)
    v = [Interval(0.0)] * n
    w = [Interval(0.0)] * n
    for k, j in enumerate(oc):
        v[j] = vo[k]
    for k, i in enumerate(orow):
        w[i] = wo[k]
    symmetric_point = all(_is_exact_zero(point[j]) for j in oc)
    cross_zero = all(J[i, j].contains(0.0) for i in orow for j in ec) and all(
        J[i, j].contains(0.0) for i in er for j in oc
    )
    even_regular = _regular(even)
    equivariant = _check_equivariance(f, sym, point, mu, samples, seed)
    valid = symmetric_point and cross_zero and even_regular and equivariant
    cert = {
        "odd_coords": oc,
        "odd_rows": orow,
        "point_on_fixed_subspace": symmetric_point,
        "w_even_entries_exact_zero": all(_is_exact_zero(w[i]) for i in er),
        "v_even_entries_exact_zero": all(_is_exact_zero(v[j]) for j in ec),
        "off_diagonal_blocks_contain_zero": cross_zero,
        "even_block_regular": even_regular,
        "equivariance_samples": samples,
        "equivariance_ok": equivariant,
        "valid": valid,
    }
    return v, w, cert


def _regular(M: IntervalMatrix) -> bool:
    """Interval matrix regularity via a Krawczyk-style contraction test ``||I - C M|| < 1``."""
    try:
        C = np.linalg.inv(M.mid())
    except np.linalg.LinAlgError:
        return False
    n = M.shape[0]
    CM = M.left_mul_float(C)
    norm = 0.0
    for i in range(n):
        row = Interval(0.0)
        for j in range(n):
            e = Interval(1.0 if i == j else 0.0) - CM[i, j]
            row = row + Interval(e.mag())
        norm = max(norm, row.hi)
    return norm < 1.0
