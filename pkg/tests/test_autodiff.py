import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from _properties import SYSTEM_FUNCTIONS, random_box  # noqa: E402
from kitecc import cc_equations as cc  # noqa: E402
from kitecc.autodiff import DualVec, IntervalMatrix, TaylorJet, directional_jet, jacobian, param_derivative  # noqa: E402
from kitecc.bifurcation import null_vectors  # noqa: E402
from kitecc.continuation import fold_point  # noqa: E402
from kitecc.interval import Box, DomainError, Interval  # noqa: E402
from kitecc import reference  # noqa: E402

SQRT3 = math.sqrt(3.0)


def test_jacobian_diagonal_example():
    J = jacobian(lambda x: [x[0] * x[0], x[1] ** 3], Box.from_bounds([(1, 2), (1, 1)]))
    assert J[0, 0] == Interval(2, 4) and J[1, 1] == Interval(3, 3)
    assert J[0, 1] == Interval(0) and J[1, 0] == Interval(0)


def test_dg_db_positive_at_equilateral_kite():
    a = Interval(2.0) / cc.SQRT3
    J = jacobian(lambda x: [cc.eval_g(x[0], x[1])], [a, Interval(2.0)])
    assert J[0, 1].lo > 0


def test_cubic_jet_is_binomial():
    (jet,) = directional_jet(lambda x: [x[0] ** 3], [Interval(1.0)], [Interval(1.0)], 3)
    assert [c for c in jet.c] == [Interval(1.0), Interval(3.0), Interval(3.0), Interval(1.0)]
    assert jet.derivative(3) == Interval(6.0)


def test_param_derivative_of_G_is_ones():
    fp = fold_point()
    dm = param_derivative(cc.sys_G, list(fp.point), fp.m)
    assert dm == [Interval(1.0), Interval(1.0)]
    assert param_derivative(lambda x, mu: [x[0] * x[0]], [Interval(2.0)], Interval(0.5)) == [Interval(0.0)]


def test_second_order_jet_of_G_at_fold():
    fp = fold_point()
    f = lambda x: cc.sys_G(x, fp.m)  # noqa: E731
    v, w = null_vectors(jacobian(f, fp.point))
    jets = directional_jet(f, list(fp.point), v, 2)
    t3 = w[0] * jets[0].derivative(2) + w[1] * jets[1].derivative(2)
    assert t3.contains(reference.FOLD_T3)


def test_jacobian_of_G_at_fold_matches_reference():
    fp = fold_point()
    J = jacobian(lambda x: cc.sys_G(x, fp.m), fp.point)
    for i in range(2):
        for j in range(2):
            assert abs(J[i, j].mid() - reference.FOLD_JG[i][j]) <= 1e-9 * max(1.0, abs(reference.FOLD_JG[i][j]))


@pytest.mark.parametrize("name", sorted(SYSTEM_FUNCTIONS))
def test_jacobian_encloses_finite_differences(name):
    fn, ranges, m_range = SYSTEM_FUNCTIONS[name]
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(100):
        x = [iv.mid() for iv in random_box(rng, ranges)]
        m = float(rng.uniform(*m_range)) if m_range else None
        try:
            J = jacobian(lambda z: fn(z, m), [Interval(v) for v in x])
        except DomainError:
            continue
        for j in range(len(x)):
            h = 1e-6 * max(1.0, abs(x[j]))
            xp, xm = list(x), list(x)
            xp[j] += h
            xm[j] -= h
            fd = (np.asarray(fn(xp, m), dtype=float) - np.asarray(fn(xm, m), dtype=float)) / (2 * h)
            for i in range(J.shape[0]):
                e = J[i, j]
                tol = 1e-4 * max(1.0, e.mag())
                assert e.lo - tol <= fd[i] <= e.hi + tol, (name, x, i, j, e, fd[i])
        checked += 1
    assert checked >= 50


@pytest.mark.parametrize("name", ["g", "m", "f1", "f2_tilde", "full_planar", "pitchfork"])
def test_box_jacobian_contains_point_jacobians(name):
    fn, ranges, m_range = SYSTEM_FUNCTIONS[name]
    rng = np.random.default_rng(11)
    for _ in range(10):
        box = random_box(rng, ranges)
        m = float(rng.uniform(*m_range)) if m_range else None
        J = jacobian(lambda z: fn(z, m), box)
        for _ in range(10):
            pt = [Interval(float(rng.uniform(iv.lo, iv.hi))) for iv in box]
            Jp = jacobian(lambda z: fn(z, m), pt)
            assert all(J[i, j].contains(Jp[i, j]) for i in range(J.shape[0]) for j in range(J.shape[1]))


@pytest.mark.parametrize("name", ["g", "f1", "h1_h2", "full_planar", "pitchfork"])
def test_first_jet_coefficient_meets_jacobian_times_direction(name):
    fn, ranges, m_range = SYSTEM_FUNCTIONS[name]
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = [Interval(iv.mid()) for iv in random_box(rng, ranges)]
        m = float(rng.uniform(*m_range)) if m_range else None
        v = [Interval(float(t)) for t in rng.normal(size=len(x))]
        J = jacobian(lambda z: fn(z, m), x)
        jets = directional_jet(lambda z: fn(z, m), x, v, 3)
        Jv = J.matvec(v)
        assert all(j.c[1].intersect(jv) is not None for j, jv in zip(jets, Jv))


@given(st.lists(st.floats(min_value=-2, max_value=2), min_size=4, max_size=4),
       st.floats(min_value=-1.5, max_value=1.5), st.floats(min_value=-1, max_value=1))
def test_cubic_jets_match_symbolic_derivatives(coef, x0, v):
    c0, c1, c2, c3 = coef
    f = lambda x: [c0 + c1 * x[0] + c2 * x[0] * x[0] + c3 * x[0] ** 3]  # noqa: E731
    (jet,) = directional_jet(f, [Interval(x0)], [Interval(v)], 3)
    d1 = (c1 + 2 * c2 * x0 + 3 * c3 * x0 * x0) * v
    d2 = (2 * c2 + 6 * c3 * x0) * v * v
    d3 = 6 * c3 * v ** 3
    for k, exact in ((1, d1), (2, d2), (3, d3)):
        d = jet.derivative(k)
        assert d.lo - 1e-12 <= exact <= d.hi + 1e-12


def test_param_derivative_matches_finite_difference_on_full_system():
    a, b = 2.0 / SQRT3, 2.0
    state = [0.0, math.sqrt(a * a - 1), 0.0, math.sqrt(b * b - 1), float(cc.eval_lambda(a, b, 1.0))]
    d = param_derivative(cc.eval_full_planar, [Interval(s) for s in state], Interval(1.0))
    h = 1e-6
    fd = (np.array(cc.eval_full_planar(state, 1.0 + h)) - np.array(cc.eval_full_planar(state, 1.0 - h))) / (2 * h)
    assert all(abs(di.mid() - f) <= 1e-6 * max(1.0, abs(f)) for di, f in zip(d, fd))


def test_dual_and_jet_types_with_numpy_arrays():
    x = DualVec(2.0, (1.0,))
    arr = np.array([1.0, 2.0]) * x
    # the array defers to DualVec.__rmul__, giving one DualVec with array parts
    assert isinstance(arr, DualVec) and np.array_equal(arr.grad[0], [1.0, 2.0])
    assert isinstance(np.float64(3.0) + TaylorJet((1.0, 1.0)), TaylorJet)


def test_interval_matrix_products_enclose_real_products():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(4, 4))
    v = rng.normal(size=4)
    M = IntervalMatrix.from_float(A)
    prod = M.matvec([Interval(float(t)) for t in v])
    ref = A @ v
    assert all(p.lo - 1e-15 <= r <= p.hi + 1e-15 for p, r in zip(prod, ref))
