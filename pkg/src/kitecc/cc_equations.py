"""Equations of the symmetric concave kite and of the planar 4-body problem.

Bodies 1 and 2 sit at (-1, 0) and (1, 0) with unit mass; bodies 3 and 4
carry mass ``m`` and lie on the y-axis in the symmetric family, at heights
``sa = sqrt(a^2 - 1)`` and ``sb = sqrt(b^2 - 1)`` where ``a = r13`` and
``b = r14``.  Every function is written against a generic scalar so the same
code runs on floats, ``Interval``, ``DualVec`` and ``TaylorJet``.

Notation used below: ``d = sa - sb``, ``x = sa (a^3-8)/a^6``,
``x1 = d^3 + a^3``, ``y = sb (b^3-8)/b^6``, ``y1 = d^3 + b^3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .autodiff import DualVec, base_lo, level, zero_like
from .interval import Box, DomainError, Interval, pow_int, sqrt

# rigorous constants
SQRT2 = Interval(2.0).sqrt()
SQRT3 = Interval(3.0).sqrt()
TWO_OVER_SQRT3 = 2.0 / SQRT3
ONE_OVER_SQRT3 = 1.0 / SQRT3
# upper end of the admissible b-range: sqrt(2) (sqrt(3) + 1)
B_TILDE_MAX = SQRT2 * (SQRT3 + 1.0)

# derivative evaluations need a >= 1 + DELTA (the square root is not
# differentiable at a = 1)
DELTA = 1e-9

I_A = Interval(1.0, 2.0)
I_B = Interval(SQRT2.lo, 2.5)
I_B_TILDE = Interval(SQRT2.lo, B_TILDE_MAX.hi)
DOMAIN_D = Box([I_A, I_B])
DOMAIN_D0 = Box.from_bounds([(1.1, 1.2), (2.0, 2.1)])
EXCLUSION_REGION = Box([I_A, Interval(2.5, B_TILDE_MAX.hi)])


def root_minus_one(x):
    """``sqrt(x^2 - 1)``, refusing to differentiate near ``x = 1``."""
    if level(x) > 0 and base_lo(x) < 1.0 + DELTA:
        raise DomainError("derivative of sqrt(x^2-1) is unbounded near x = 1")
    return sqrt(x * x - 1.0)


def _inv(x):
    if isinstance(x, float) and x == 0.0:
        raise DomainError("division by zero")
    return 1.0 / x


# --- symmetric kite: core formulas in (a, b, sa, sb) -------------------------

def _g1_g2_core(a, b, sa, sb, m):
    d = sa - sb
    inv_d2 = _inv(pow_int(d, 2))
    a3 = pow_int(a, 3)
    b3 = pow_int(b, 3)
    g1 = m * (inv_d2 + d / b3) - sa * (8.0 - a3) / (4.0 * a3)
    g2 = m * (inv_d2 + d / a3) + sb * (8.0 - b3) / (4.0 * b3)
    return g1, g2


def _aux_core(a, b, sa, sb):
    d = sa - sb
    d2 = pow_int(d, 2)
    d3 = pow_int(d, 3)
    a3 = pow_int(a, 3)
    b3 = pow_int(b, 3)
    x = sa * (a3 - 8.0) / (a3 * a3)
    y = sb * (b3 - 8.0) / (b3 * b3)
    return x, d3 + a3, y, d3 + b3, a3 * b3 * d2 / 4.0


def _m_core(a, b, sa, sb):
    d = sa - sb
    d2 = pow_int(d, 2)
    a3 = pow_int(a, 3)
    b3 = pow_int(b, 3)
    y1 = pow_int(d, 3) + b3
    return -(sa * (a3 - 8.0) * b3 * d2) / (4.0 * a3 * y1)


def _h2_core(a, b, sa, sb):
    d = sa - sb
    d2 = pow_int(d, 2)
    a3 = pow_int(a, 3)
    b3 = pow_int(b, 3)
    x1 = pow_int(d, 3) + a3
    return a3 * sb * (b3 - 8.0) * d2 / (4.0 * b3 * x1)


def _g_core(a, b, sa, sb):
    x, x1, y, y1, _ = _aux_core(a, b, sa, sb)
    return x * x1 + y * y1


def _scaled_leaves(a, b):
    """Leaves whose gradients are ``(sa d/da, sb d/db)`` applied to a, b, sa, sb.

    With these seeds every propagated gradient equals ``(sa * du/da,
    sb * du/db)`` and no square-root derivative is ever formed, so the
    result stays bounded up to ``a = 1``.
    """
    sa = root_minus_one(a)
    sb = root_minus_one(b)
    return (
        DualVec(a, (sa, 0.0)),
        DualVec(b, (0.0, sb)),
        DualVec(sa, (a, 0.0)),
        DualVec(sb, (0.0, b)),
    )


# --- public evaluators ------------------------------------------------------

def eval_g1_g2(a, b, m):
    """Residuals of the two shape equations of the symmetric kite."""
    return _g1_g2_core(a, b, root_minus_one(a), root_minus_one(b), m)


def eval_lambda(a, b, m):
    """Configuration constant ``m (1/a^3 + 1/b^3) + 1/4``."""
    return m * (1.0 / pow_int(a, 3) + 1.0 / pow_int(b, 3)) + 0.25


def eval_aux(a, b):
    """``(x, x1, y, y1, w1)``."""
    return _aux_core(a, b, root_minus_one(a), root_minus_one(b))


def eval_m(a, b):
    """Mass ratio ``m(a, b)`` solving the first shape equation."""
    return _m_core(a, b, root_minus_one(a), root_minus_one(b))


def eval_g(a, b):
    """Mass-free equation ``g = x x1 + y y1``."""
    return _g_core(a, b, root_minus_one(a), root_minus_one(b))


def eval_h1_h2(a, b):
    """Two expressions for the mass that agree exactly on ``g = 0``.

    ``h1 = -w1 x / y1`` and ``h2 = w1 y / x1``; ``h2`` has a removable-looking
    but genuine singularity where ``x1 = 0``.
    """
    sa, sb = root_minus_one(a), root_minus_one(b)
    return _m_core(a, b, sa, sb), _h2_core(a, b, sa, sb)


def eval_f1(a, b):
    """Jacobian determinant of ``(m, g)`` in ``(a, b)``; vanishes at extrema of m on g = 0."""
    A, B = DualVec.variables([a, b])
    m = eval_m(A, B)
    g = eval_g(A, B)
    return m.grad[0] * g.grad[1] - m.grad[1] * g.grad[0]


def eval_f1_scaled(a, b):
    """``sa * sb * f1``, bounded up to the boundary ``a = 1``."""
    A, B, SA, SB = _scaled_leaves(a, b)
    m = _m_core(A, B, SA, SB)
    g = _g_core(A, B, SA, SB)
    return m.grad[0] * g.grad[1] - m.grad[1] * g.grad[0]


def eval_ga_scaled(a, b):
    """``sa * dg/da``; zero exactly where ``dg/da`` is (for ``a > 1``)."""
    A, B, SA, SB = _scaled_leaves(a, b)
    return _g_core(A, B, SA, SB).grad[0]


def eval_dg_db(a, b):
    """``dg/db`` via forward differentiation in ``b`` only."""
    sa = root_minus_one(a)
    B = DualVec(b, (1.0,))
    return _g_core(a, B, sa, root_minus_one(B)).grad[0]


def eval_dx1_db(a, b):
    sa = root_minus_one(a)
    B = DualVec(b, (1.0,))
    _, x1, _, _, _ = _aux_core(a, B, sa, root_minus_one(B))
    return x1.grad[0]


def eval_d_yy1_db(a, b):
    sa = root_minus_one(a)
    B = DualVec(b, (1.0,))
    _, _, y, y1, _ = _aux_core(a, B, sa, root_minus_one(B))
    return (y * y1).grad[0]


def eval_f2(a, b):
    """Jacobian determinant of ``(h1, h2)`` by direct differentiation."""
    A, B = DualVec.variables([a, b])
    h1, h2 = eval_h1_h2(A, B)
    return h1.grad[0] * h2.grad[1] - h1.grad[1] * h2.grad[0]


def eval_f2_tilde(a, b):
    """Cleared numerator of ``f2``, with the factor ``d^3`` divided out.

    Write ``h_i = K_i d^2 / E_i`` with
    ``K1 = -sa (a^3-8) b^3``, ``E1 = 4 a^3 y1``,
    ``K2 = a^3 sb (b^3-8)``, ``E2 = 4 b^3 x1``,
    and let ``Sa = sa d/da``, ``Sb = sb d/db`` (total derivatives) with
    ``Qa_i = Sa[K_i] E_i - K_i Sa[E_i]`` and likewise ``Qb_i``.  Then

        f2 * sa * sb * E1^2 * E2^2 = d^3 * F,
        F = 2 K1 E1 (a Qb2 + b Qa2) - 2 K2 E2 (a Qb1 + b Qa1)
            + d (Qa1 Qb2 - Qb1 Qa2).

    ``sa sb E1^2 E2^2 > 0`` on the open domain, so ``sign f2 = sign(d^3 F)``
    and away from the diagonal ``d = 0`` the zeros of ``f2`` are those of F.
    The polynomial F has no denominators and is evaluated with scaled
    forward derivatives, so it is defined on the whole closed domain.
    """
    A, B, SA, SB = _scaled_leaves(a, b)
    a3 = pow_int(A, 3)
    b3 = pow_int(B, 3)
    d = SA - SB
    d3 = pow_int(d, 3)
    K1 = -(SA * (a3 - 8.0) * b3)
    E1 = 4.0 * a3 * (d3 + b3)
    K2 = a3 * SB * (b3 - 8.0)
    E2 = 4.0 * b3 * (d3 + a3)
    qa1 = K1.grad[0] * E1.val - K1.val * E1.grad[0]
    qb1 = K1.grad[1] * E1.val - K1.val * E1.grad[1]
    qa2 = K2.grad[0] * E2.val - K2.val * E2.grad[0]
    qb2 = K2.grad[1] * E2.val - K2.val * E2.grad[1]
    av, bv, dv = A.val, B.val, d.val
    return (
        2.0 * K1.val * E1.val * (av * qb2 + bv * qa2)
        - 2.0 * K2.val * E2.val * (av * qb1 + bv * qa1)
        + dv * (qa1 * qb2 - qb1 * qa2)
    )


def eval_p(z):
    """``p(z) = -2 z^5 + 3 z^3 + 40 z^2 - 48`` by Horner's rule."""
    return (((-2.0 * z * z + 3.0) * z + 40.0) * z) * z - 48.0


def eval_dp(z):
    return ((-10.0 * z * z + 9.0) * z + 80.0) * z


def eval_d2p(z):
    return (-40.0 * z * z + 18.0) * z + 80.0


def eval_d3p(z):
    return -120.0 * z * z + 18.0


# --- system functions (sequence in, list out) -------------------------------

def sys_f1_g(x):
    return [eval_f1(x[0], x[1]), eval_g(x[0], x[1])]


def sys_f1s_g(x):
    return [eval_f1_scaled(x[0], x[1]), eval_g(x[0], x[1])]


def sys_ga_g(x):
    return [eval_ga_scaled(x[0], x[1]), eval_g(x[0], x[1])]


def sys_f2t_g(x):
    return [eval_f2_tilde(x[0], x[1]), eval_g(x[0], x[1])]


def sys_g1_g2(x, m):
    return list(eval_g1_g2(x[0], x[1], m))


def sys_mass_g(x, m):
    """Zeros are the symmetric kites with mass ratio ``m``."""
    return [eval_m(x[0], x[1]) - m, eval_g(x[0], x[1])]


def sys_G(x, m):
    """``(m - h1, m - h2)``: both vanish at symmetric kites of mass ``m``."""
    h1, h2 = eval_h1_h2(x[0], x[1])
    return [m - h1, m - h2]


# --- planar 4-body system ----------------------------------------------------

@dataclass(frozen=True)
class FullPlanarState:
    """Positions of bodies 3 and 4 (bodies 1, 2 fixed) and the constant lambda."""

    x3: object
    y3: object
    x4: object
    y4: object
    lam: object = 0.0

    def as_list(self) -> list:
        return [self.x3, self.y3, self.x4, self.y4, self.lam]

    @classmethod
    def from_list(cls, s: Sequence) -> "FullPlanarState":
        return cls(*s)

    def mirrored(self) -> "FullPlanarState":
        return FullPlanarState(-self.x3, self.y3, -self.x4, self.y4, self.lam)


def shape_to_positions(a, b, lam=0.0) -> FullPlanarState:
    """Symmetric placement ``q3 = (0, sa)``, ``q4 = (0, sb)``."""
    return FullPlanarState(0.0, sqrt(a * a - 1.0), 0.0, sqrt(b * b - 1.0), lam)


def planar_residuals(s: Sequence, masses: Sequence) -> list:
    """All eight residuals ``lam (q_j - c) + sum_i m_i (q_i - q_j) / r_ij^3``.

    Ordered ``[E1x, E1y, E2x, E2y, E3x, E3y, E4x, E4y]``.  A central
    configuration with constant ``lam > 0`` makes all of them vanish.
    """
    x3, y3, x4, y4, lam = s
    qx = [-1.0, 1.0, x3, x4]
    qy = [0.0, 0.0, y3, y4]
    total = masses[0] + masses[1] + masses[2] + masses[3]
    cx = (masses[1] - masses[0] + masses[2] * x3 + masses[3] * x4) / total
    cy = (masses[2] * y3 + masses[3] * y4) / total
    ex = [lam * (qx[j] - cx) for j in range(4)]
    ey = [lam * (qy[j] - cy) for j in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            dx = qx[i] - qx[j]
            dy = qy[i] - qy[j]
            r2 = dx * dx + dy * dy
            if isinstance(r2, float) and r2 == 0.0:
                raise DomainError("collision")
            k = _inv(r2 * sqrt(r2))
            ux, uy = dx * k, dy * k
            ex[j] = ex[j] + masses[i] * ux
            ey[j] = ey[j] + masses[i] * uy
            ex[i] = ex[i] - masses[j] * ux
            ey[i] = ey[i] - masses[j] * uy
    return [ex[0], ey[0], ex[1], ey[1], ex[2], ey[2], ex[3], ey[3]]


def _kite_masses(m):
    return (1.0, 1.0, m, m)


def eval_full_planar(s: Sequence, m) -> list:
    """Square selection ``(E3x, E3y, E4x, E4y, E1x)`` with masses (1, 1, m, m)."""
    e = planar_residuals(list(s), _kite_masses(m))
    return [e[4], e[5], e[6], e[7], e[0]]


def residual_check_full(s: Sequence, m) -> list:
    """The three residuals left out of the square selection: ``(E1y, E2x, E2y)``."""
    e = planar_residuals(list(s), _kite_masses(m))
    return [e[1], e[2], e[3]]


def eval_full_planar_equivariant(s: Sequence, m) -> list:
    """``(E3x, E3y, E4x, E4y, E1x - E2x)``.

    Same zero set as ``eval_full_planar`` (it differs by an invertible row
    operation at solutions) but commutes with the reflection ``x -> -x``:
    rows 0 and 2 are odd, rows 1, 3 and 4 are even.
    """
    e = planar_residuals(list(s), _kite_masses(m))
    return [e[4], e[5], e[6], e[7], e[0] - e[2]]


def eval_full_planar_swapped(s: Sequence, m) -> list:
    """Masses ``(m, m, 1, 1)``; at ``m = 0`` this is the large-mass limit.

    Square selection ``(E1x, E1y, E2x, E2y, E3x)``: with bodies 1 and 2
    massless their own equations carry the information.
    """
    e = planar_residuals(list(s), (m, m, 1.0, 1.0))
    return [e[0], e[1], e[2], e[3], e[4]]


def residual_check_swapped(s: Sequence, m) -> list:
    e = planar_residuals(list(s), (m, m, 1.0, 1.0))
    return [e[5], e[6], e[7]]


def odd_block(y3, y4, lam, m):
    """Jacobian of ``(E3x, E4x)`` in ``(x3, x4)`` at the symmetric state."""
    zero = zero_like(y3, y4, lam, m)
    X3 = DualVec(zero, (1.0, 0.0))
    X4 = DualVec(zero, (0.0, 1.0))
    e = planar_residuals([X3, y3, X4, y4, lam], _kite_masses(m))
    lv = X3.level
    rows = []
    for y in (e[4], e[6]):
        rows.append(list(y.grad) if isinstance(y, DualVec) and y.level == lv else [0.0, 0.0])
    return rows


def sys_pitchfork(x):
    """Symmetric states where the reflection-odd block is singular.

    Unknowns ``(y3, y4, lam, m)``; equations: the three reflection-even
    residuals at ``x3 = x4 = 0`` and the determinant of the odd block.
    """
    y3, y4, lam, m = x
    e = planar_residuals([0.0, y3, 0.0, y4, lam], _kite_masses(m))
    j = odd_block(y3, y4, lam, m)
    return [e[5], e[7], e[0] - e[2], j[0][0] * j[1][1] - j[0][1] * j[1][0]]
