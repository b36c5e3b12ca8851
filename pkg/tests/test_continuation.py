import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import _shared as shared  # noqa: E402
from kitecc import cc_equations as cc  # noqa: E402
from kitecc import reference  # noqa: E402
from kitecc.continuation import (  # noqa: E402
    fold_point,
    solve_b_hat,
    solve_full_planar_for_m,
    trace_curve,
)
from kitecc.interval import Interval  # noqa: E402

A0, B0 = reference.FOLD_AB


@pytest.fixture(scope="module")
def curve():
    return trace_curve(1.001, 1.999, 1000)


def test_solve_b_hat_examples():
    p = solve_b_hat(Interval(A0))
    assert p.b.contains(B0) and abs(p.b.mid() - 2.0369863931895205) < 1e-12
    p = solve_b_hat(Interval(1.5))
    assert cc.I_B.lo < p.b.lo and p.b.hi < cc.I_B.hi
    # sign-scan oracle: g(1.5, .) changes sign exactly once on the b-range, at b_hat
    bs = np.linspace(cc.I_B.lo + 1e-9, cc.I_B.hi, 20001)
    vals = np.array([cc.eval_g(1.5, b) for b in bs])
    flips = np.nonzero(np.diff(np.sign(vals)))[0]
    assert len(flips) == 1 and bs[flips[0]] <= p.b.mid() <= bs[flips[0] + 1]


def test_solve_b_hat_rejects_endpoints():
    with pytest.raises(ValueError):
        solve_b_hat(Interval(1.0))


def test_trace_points_are_certified_and_ordered(curve):
    assert len(curve) == 1000
    assert all(p.a.mid() < q.a.mid() for p, q in zip(curve, curve[1:]))
    for p in curve:
        assert cc.eval_g(p.a, p.b).contains(0.0)
        assert cc.I_B.lo < p.b.lo and p.b.hi < 2.5


def test_mass_profile_has_single_interior_maximum(curve):
    m = np.array([p.m.mid() for p in curve])
    k = int(np.argmax(m))
    assert abs(curve[k].a.mid() - A0) <= 1e-3
    assert np.all(np.diff(m[: k + 1]) > 0) and np.all(np.diff(m[k:]) < 0)


def test_mass_profile_bounded_by_certified_maximum(curve):
    top = fold_point().m.hi
    assert all(p.m.hi <= top for p in curve)


def test_mass_profile_tends_to_zero_at_both_ends():
    # m_hat(1.001) is still about 0.27; the limits are reached only as a -> 1, 2
    left = [solve_b_hat(Interval(1.0 + 10.0 ** -k)).m for k in range(3, 9)]
    right = [solve_b_hat(Interval(2.0 - 10.0 ** -k)).m for k in range(3, 9)]
    for seq in (left, right):
        assert all(q.hi < p.lo for p, q in zip(seq, seq[1:]))
        assert seq[-1].hi < 1e-2 and seq[-1].lo >= 0.0


@pytest.mark.parametrize("m", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
def test_two_symmetric_kites_below_maximum(m):
    sol = shared.symmetric(m)
    assert len(sol.points) == 2 and sol.complete


def test_one_symmetric_kite_at_maximum():
    sol = shared.symmetric(fold_point().m.mid())
    assert len(sol.points) == 1 and sol.fold


@pytest.mark.parametrize("m", [1.01, 1.5, 2.0, 3.0])
def test_no_symmetric_kite_above_maximum(m):
    sol = shared.symmetric(m)
    assert sol.points == [] and sol.complete


def test_zero_mass_shapes():
    sol = shared.symmetric(0.0)
    shapes = sorted((p.a.mid(), p.b.mid()) for p in sol.points)
    assert np.allclose(shapes, [(1.0, 2.0), (2.0, 2.0)], rtol=0, atol=1e-12)


def test_symmetric_positions_at_m_04():
    sol = shared.symmetric(0.4)
    y3 = sorted(cc.shape_to_positions(p.a, p.b).y3.mid() for p in sol.points)
    refs = sorted(r[2][1] for r in reference.TABLE_ROWS if r[1] == 0.4)
    assert np.allclose(y3, refs, rtol=0, atol=1e-8)


def test_m1_solutions_include_equilateral_and_mirror_pair():
    sol = solve_full_planar_for_m(1.0)
    sym = sol.symmetric
    assert len(sym) == 2 and len(sol.asymmetric) == 2
    assert any(r.state[1].contains(1.0 / math.sqrt(3.0)) and r.state[3].contains(math.sqrt(3.0)) for r in sym)


def test_asymmetric_solutions_come_in_mirror_pairs():
    for m in (0.996, 1.0, 2.0):
        rows = solve_full_planar_for_m(m).asymmetric
        assert rows
        for r in rows:
            mirror = [-r.state[0], r.state[1], -r.state[2], r.state[3], r.state[4]]
            assert any(all(o.state[i] == mirror[i] for i in range(5)) for o in rows)


def test_large_mass_has_only_asymmetric_solutions():
    sol = solve_full_planar_for_m(2.0)
    assert not sol.symmetric and len(sol.asymmetric) == 2
    for r in sol.rows:
        assert all(x.contains(0.0) for x in cc.eval_full_planar(list(r.state), r.m))
        assert all(x.contains(0.0) for x in cc.residual_check_full(list(r.state), r.m))


def test_curve_extrema_are_certified():
    ext = shared.extrema()
    for key, ref in (("b_min", reference.B_HAT_MIN), ("b_max", reference.B_HAT_MAX)):
        e = ext[key]
        assert abs(e.point[0].mid() - ref[0]) <= 1e-9 and abs(e.point[1].mid() - ref[1]) <= 1e-9
        assert cc.eval_g(*e.point).contains(0.0) and cc.eval_ga_scaled(*e.point).contains(0.0)
    top = ext["m_max"]
    assert abs(top.point[0].mid() - reference.M_HAT_MAX[0]) <= 1e-9
    assert abs(top.value.mid() - reference.M_HAT_MAX[1]) <= 1e-9


# --- reference table ------------------------------------------------------------------

LABELS = [r[0] for r in reference.TABLE_ROWS]


def _row(label):
    return next(r for r in shared.table().table if r["label"] == label)


@pytest.mark.parametrize("label", [
    pytest.param(k, marks=pytest.mark.xfail(strict=True, reason=reference.KNOWN_DEFECTS[k]))
    if k in reference.KNOWN_DEFECTS else k
    for k in LABELS
])
def test_table_row(label):
    row = _row(label)
    assert row["deviation"] <= 1e-8, row


def test_table_rows_are_certified_solutions():
    for row in shared.table().table:
        if row["method"] == "degenerate" or row["m"] == "inf":
            continue
        m = Interval(*row["m"])
        state = [Interval(*iv) for iv in row["state"]]
        assert all(x.contains(0.0) for x in cc.eval_full_planar(state, m)), row["label"]


def test_table_defect_diagnostics():
    diag = shared.table().report["diagnostics"]
    assert diag["D2"]["q4y_deviation"] <= 1e-8 and diag["D2"]["q3y_deviation"] > 1e-3
    for label in ("F3", "F4"):
        assert diag[label]["deviation_at_1.0027"] <= 1e-8
        assert _row(label)["deviation"] > 1e-6
