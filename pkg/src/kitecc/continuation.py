"""Certified points on the kite curve, its extrema, and solution sets by mass.

Floating-point predictors (secant steps, Newton, multistart) only propose
candidates; every emitted point carries a Krawczyk proof.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .autodiff import jacobian_values
from .cc_equations import (
    DELTA,
    DOMAIN_D,
    DOMAIN_D0,
    I_A,
    I_B,
    SQRT3,
    eval_full_planar,
    eval_full_planar_swapped,
    eval_g,
    eval_lambda,
    eval_m,
    residual_check_full,
    residual_check_swapped,
    shape_to_positions,
    sys_f1_g,
    sys_ga_g,
    sys_g1_g2,
    sys_mass_g,
    sys_pitchfork,
)
from .interval import Box, DomainError, Interval, as_interval
from .krawczyk import certify_near
from .prover import CampaignConfig, certify_all_zeros, certify_scalar_root

# documented search box for (x3, y3, x4, y4, lam)
SEARCH_BOX = Box.from_bounds([(-1.5, 1.5), (0.0, 2.5), (-1.5, 1.5), (0.5, 3.0), (0.1, 3.0)])


class NoRoot(ArithmeticError):
    pass


@dataclass
class CurvePoint:
    a: Interval
    b: Interval
    m: Interval
    lam: Interval

    def to_row(self) -> list[float]:
        return [self.a.lo, self.a.hi, self.b.lo, self.b.hi, self.m.lo, self.m.hi]


@dataclass
class BranchRow:
    m: Interval
    branch: str
    state: Box                 # enclosure of (x3, y3, x4, y4, lam)
    symmetric: bool
    method: str = ""
    mirror_of: str | None = None

    @property
    def q3(self) -> tuple[Interval, Interval]:
        return self.state[0], self.state[1]

    @property
    def q4(self) -> tuple[Interval, Interval]:
        return self.state[2], self.state[3]

    def midpoints(self) -> tuple[float, float, float, float]:
        return tuple(iv.mid() for iv in self.state[:4])

    def to_json(self) -> dict:
        return {
            "m": self.m.to_json(), "branch": self.branch, "symmetric": self.symmetric,
            "q3": [self.state[0].to_json(), self.state[1].to_json()],
            "q4": [self.state[2].to_json(), self.state[3].to_json()],
            "lambda": self.state[4].to_json(), "method": self.method,
        }


# --- the curve g = 0 ----------------------------------------------------------

def _g_of_b(a, x):
    return [eval_g(a, x[0])]


def solve_b_hat(a, guess: float | None = None) -> CurvePoint:
    """Certified ``b`` with ``g(a, b) = 0`` in the admissible b-range."""
    a = as_interval(a)
    if a.lo < 1.0 + DELTA or a.hi > 2.0 - DELTA:
        raise ValueError("a must lie in (1 + 1e-9, 2 - 1e-9)")
    am = a.mid()
    fb = lambda b: eval_g(am, b)  # noqa: E731
    lo, hi = I_B.lo + 1e-15, I_B.hi
    if guess is None or not lo < guess < hi:
        if fb(lo) * fb(hi) > 0:
            raise NoRoot(f"no sign change of g({am}, .) on the b-range")
        guess = brentq(fb, lo, hi, xtol=1e-15, rtol=1e-15)
    else:
        guess = _newton_scalar(fb, guess, lo, hi)
    f = partial(_g_of_b, a)
    cert = certify_near(f, [guess], 1e-10)
    if cert is None:
        res = certify_scalar_root(lambda b: eval_g(a, b), I_B)
        if res.refined_enclosure is None:
            raise NoRoot(f"could not certify b for a = {a}")
        b = res.refined_enclosure[0]
    else:
        b = cert.enclosure[0]
    m = eval_m(a, b)
    return CurvePoint(a, b, m, eval_lambda(a, b, m))


def _newton_scalar(fn, x, lo, hi, iters=30):
    for _ in range(iters):
        h = 1e-7 * max(1.0, abs(x))
        d = (fn(x + h) - fn(x - h)) / (2 * h)
        if d == 0:
            break
        step = fn(x) / d
        x_new = min(max(x - step, lo), hi)
        if abs(x_new - x) < 1e-15:
            return x_new
        x = x_new
    if fn(lo) * fn(hi) < 0:
        return brentq(fn, lo, hi, xtol=1e-15, rtol=1e-15)
    return x


def trace_curve(a_min: float = 1.001, a_max: float = 1.999, samples: int = 100) -> list[CurvePoint]:
    """Certified samples of ``b = b_hat(a)`` with secant-predicted starts."""
    if not 1.0 < a_min < a_max < 2.0:
        raise ValueError("need 1 < a_min < a_max < 2")
    a_values = np.linspace(a_min, a_max, samples) if samples > 1 else np.array([a_min])
    out: list[CurvePoint] = []
    for k, a in enumerate(a_values):
        guess = None
        if k >= 2:
            a1, a2 = out[-2].a.mid(), out[-1].a.mid()
            b1, b2 = out[-2].b.mid(), out[-1].b.mid()
            guess = b2 + (b2 - b1) * (a - a2) / (a2 - a1)
        elif k == 1:
            guess = out[-1].b.mid()
        out.append(solve_b_hat(Interval(float(a)), guess))
    return out


def write_curve_csv(points: Sequence[CurvePoint], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a_lo", "a_hi", "b_lo", "b_hi", "m_lo", "m_hi"])
        for p in points:
            w.writerow([_fmt(x) for x in p.to_row()])


def _fmt(x: float) -> str:
    return repr(float(x))


# --- extrema ------------------------------------------------------------------

@dataclass
class Extremum:
    name: str
    point: Box                 # (a, b)
    value: Interval            # b or m at the extremum
    system: str

    def to_json(self) -> dict:
        return {"name": self.name, "a": self.point[0].to_json(), "b": self.point[1].to_json(),
                "value": self.value.to_json(), "system": self.system}


def newton(f: Callable, x0: Sequence[float], tol: float = 1e-14, max_iter: int = 60,
           damping: bool = True) -> np.ndarray | None:
    """Floating Newton iteration with simple backtracking; None on failure."""
    x = np.array(x0, dtype=float)
    try:
        for _ in range(max_iter):
            vals, J = jacobian_values(f, list(x))
            r = np.array(vals, dtype=float)
            if not np.all(np.isfinite(r)):
                return None
            if np.max(np.abs(r)) < tol:
                return x
            step = np.linalg.solve(np.array(J, dtype=float), r)
            t = 1.0
            nr = np.linalg.norm(r)
            while True:
                xn = x - t * step
                try:
                    rn = np.linalg.norm(np.array(f(list(xn)), dtype=float))
                except (DomainError, ValueError, ZeroDivisionError):
                    rn = math.inf
                if rn < nr or not damping or t < 1e-4:
                    break
                t *= 0.5
            if np.max(np.abs(xn - x)) < 1e-15 * max(1.0, np.max(np.abs(x))):
                return xn
            x = xn
    except (DomainError, ValueError, ZeroDivisionError, np.linalg.LinAlgError, OverflowError):
        return None
    return x if np.max(np.abs(np.array(f(list(x)), dtype=float))) < 1e-10 else None


def find_curve_extrema(cfg: CampaignConfig | None = None) -> dict[str, Extremum]:
    """Minimum and maximum of ``b_hat`` and maximum of the mass along the curve.

    b-extrema: zeros of ``(sa * dg/da, g)`` over the whole domain; mass
    maximum: zero of ``(f1, g)`` on the small box around it.
    """
    cfg = cfg or CampaignConfig(initial_grid=50)
    res = certify_all_zeros(sys_ga_g, DOMAIN_D, cfg, "ga_g")
    pts = sorted(res.zeros, key=lambda c: c.refined_enclosure[1].mid())
    if len(pts) != 2 or res.unknown:
        raise NoRoot(f"expected two stationary points of b_hat, got {len(pts)} (+{len(res.unknown)} unknown)")
    lo, hi = pts[0].refined_enclosure, pts[1].refined_enclosure
    res_m = certify_all_zeros(sys_f1_g, DOMAIN_D0, CampaignConfig(initial_grid=10), "f1_g")
    if len(res_m.zeros) != 1 or res_m.unknown:
        raise NoRoot(f"expected one mass maximum, got {len(res_m.zeros)} (+{len(res_m.unknown)} unknown)")
    top = res_m.zeros[0].refined_enclosure
    return {
        "b_min": Extremum("b_min", lo, lo[1], "ga_g"),
        "b_max": Extremum("b_max", hi, hi[1], "ga_g"),
        "m_max": Extremum("m_max", top, eval_m(*top), "f1_g"),
    }


# --- special points -------------------------------------------------------------

@dataclass
class FoldPoint:
    point: Box       # (a0, b0)
    m: Interval      # m0
    campaign_unique: bool = False


@lru_cache(maxsize=1)
def fold_point() -> FoldPoint:
    """Certified maximum of the mass along the curve (local certification)."""
    x = newton(sys_f1_g, DOMAIN_D0.mid())
    if x is None:
        raise NoRoot("Newton failed for the mass maximum")
    cert = certify_near(sys_f1_g, x, 1e-9)
    if cert is None:
        raise NoRoot("could not certify the mass maximum")
    return FoldPoint(cert.enclosure, eval_m(*cert.enclosure))


@dataclass
class PitchforkPoint:
    y3: Interval
    y4: Interval
    lam: Interval
    m: Interval

    def state(self) -> Box:
        return Box([Interval(0.0), self.y3, Interval(0.0), self.y4, self.lam])


@lru_cache(maxsize=1)
def pitchfork_point() -> PitchforkPoint:
    """Symmetric state where the reflection-odd block of the full system is singular.

    Newton starts from the equilateral-type symmetric kite at m = 1.
    """
    a, b = 2.0 / math.sqrt(3.0), 2.0
    start = [math.sqrt(a * a - 1.0), math.sqrt(b * b - 1.0), float(eval_lambda(a, b, 1.0)), 1.0]
    x = newton(sys_pitchfork, start)
    if x is None:
        raise NoRoot("Newton failed for the symmetry-breaking point")
    cert = certify_near(sys_pitchfork, x, 1e-9)
    if cert is None:
        raise NoRoot("could not certify the symmetry-breaking point")
    e = cert.enclosure
    return PitchforkPoint(e[0], e[1], e[2], e[3])


# --- symmetric solutions for given mass --------------------------------------------

def _degenerate_m0() -> list[CurvePoint]:
    """Mass zero: shape equations reduce to ``sa (8 - a^3) = 0`` and ``sb (8 - b^3) = 0``."""
    two = certify_scalar_root(lambda z: 8.0 - z * z * z, Interval(1.5, 2.5))
    if two.refined_enclosure is None:
        raise NoRoot("root 2 of 8 - z^3 not certified")
    r2 = two.refined_enclosure[0]
    zero = Interval(0.0)
    out = []
    for a in (Interval(1.0), r2):
        out.append(CurvePoint(a, r2, zero, eval_lambda(a, r2, zero)))
    return out


@dataclass
class SymmetricSolutions:
    m: Interval
    points: list[CurvePoint]
    complete: bool = True
    fold: bool = False
    notes: list = field(default_factory=list)


def solve_symmetric_for_m(m, cfg: CampaignConfig | None = None) -> SymmetricSolutions:
    """All symmetric kites with mass ratio ``m`` on the domain."""
    mi = as_interval(m)
    if mi.hi < 0:
        raise ValueError("m must be non-negative")
    if mi.lo == 0.0 and mi.hi == 0.0:
        return SymmetricSolutions(mi, _degenerate_m0(), True, False, ["degenerate shapes at m = 0"])
    fp = fold_point()
    if fp.m.contains(mi) if isinstance(m, Interval) else fp.m.contains(float(m)):
        a, b = fp.point
        pt = CurvePoint(a, b, fp.m, eval_lambda(a, b, fp.m))
        return SymmetricSolutions(mi, [pt], True, True, ["mass inside the certified maximum enclosure"])
    cfg = cfg or CampaignConfig(initial_grid=40, min_box_width=1e-10)
    res = certify_all_zeros(partial(sys_mass_g, m=mi), DOMAIN_D, cfg, f"mass_g[{mi.mid()!r}]")
    pts = []
    notes = []
    for z in sorted(res.zeros, key=lambda c: c.refined_enclosure[0].mid()):
        a, b = z.refined_enclosure
        # the same point must also solve the original pair of shape equations
        chk = certify_near(partial(sys_g1_g2, m=mi), [a.mid(), b.mid()], 1e-9)
        if chk is None or not Box([a, b]).intersect(chk.enclosure):
            notes.append(f"shape equations not confirmed at {z.refined_enclosure}")
        pts.append(CurvePoint(a, b, mi, eval_lambda(a, b, mi)))
    if res.boundary_zeros:
        notes.append(f"{len(res.boundary_zeros)} zero(s) on the domain boundary ignored")
    return SymmetricSolutions(mi, pts, not res.unknown and not res.budget_exceeded, False, notes)


# --- full planar solutions -----------------------------------------------------------

def _planar_sys(m, swapped: bool):
    return partial(eval_full_planar_swapped, m=m) if swapped else partial(eval_full_planar, m=m)


def _sys_fix(x, m):
    """Square system on the reflection-fixed subspace: (E3y, E4y, E1x) at x3 = x4 = 0."""
    r = eval_full_planar([0.0, x[0], 0.0, x[1], x[2]], m)
    return [r[1], r[3], r[4]]


def _inside_triangle(p, a, b, c, strict: bool = True) -> bool:
    def cross(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])
    s = [cross(a, b, p), cross(b, c, p), cross(c, a, p)]
    if strict:
        return all(t > 0 for t in s) or all(t < 0 for t in s)
    tol = 1e-9
    return all(t > -tol for t in s) or all(t < tol for t in s)


def _interval_inside_triangle(s: Box, strict: bool = True) -> bool:
    """Body 3 inside triangle (q1, q2, q4), decided with interval signs.

    ``strict=False`` accepts the closed triangle: no edge test may be
    certified to have the wrong sign.
    """
    q1 = (Interval(-1.0), Interval(0.0))
    q2 = (Interval(1.0), Interval(0.0))
    q3 = (s[0], s[1])
    q4 = (s[2], s[3])

    def cross(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

    signs = [cross(q1, q2, q3), cross(q2, q4, q3), cross(q4, q1, q3)]
    if strict:
        return all(t.lo > 0 for t in signs) or all(t.hi < 0 for t in signs)
    return all(t.hi >= 0 for t in signs) or all(t.lo <= 0 for t in signs)


def _admissible(x: np.ndarray, strict: bool = True) -> bool:
    return SEARCH_BOX.contains(list(x)) and _inside_triangle(
        (x[0], x[1]), (-1.0, 0.0), (1.0, 0.0), (x[2], x[3]), strict
    )


def _residuals_contain_zero(state: Box, m, swapped: bool) -> bool:
    f = eval_full_planar_swapped if swapped else eval_full_planar
    g = residual_check_swapped if swapped else residual_check_full
    try:
        vals = list(f(list(state), m)) + list(g(list(state), m))
    except DomainError:
        return False
    return all(as_interval(v).contains(0.0) for v in vals)


def _multistart_seeds(sym_states: Sequence[Sequence[float]], n_random: int, seed: int) -> list[list[float]]:
    seeds = []
    for s in sym_states:
        for amp in (0.005, 0.02, 0.05, 0.1, 0.2, 0.4):
            for sgn in (1.0, -1.0):
                # odd direction: bodies 3 and 4 pushed to opposite sides
                seeds.append([s[0] - sgn * amp * 0.2, s[1], s[2] + sgn * amp, s[3], s[4]])
    rng = random.Random(seed)
    for _ in range(n_random):
        x3 = rng.uniform(-0.6, 0.6)
        y3 = rng.uniform(0.2, 1.4)
        x4 = rng.uniform(-1.0, 1.0)
        y4 = rng.uniform(max(0.6, y3 + 0.3), 2.6)
        seeds.append([x3, y3, x4, y4, rng.uniform(0.5, 1.5)])
    return seeds


def _dedupe(points: list[np.ndarray], tol: float = 1e-7) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in out):
            out.append(p)
    return out


@dataclass
class PlanarSolutions:
    m: Interval
    rows: list[BranchRow]
    notes: list = field(default_factory=list)

    @property
    def symmetric(self) -> list[BranchRow]:
        return [r for r in self.rows if r.symmetric]

    @property
    def asymmetric(self) -> list[BranchRow]:
        return [r for r in self.rows if not r.symmetric]


def _certify_state(f, x, radius=1e-10) -> Box | None:
    cert = certify_near(f, list(x), radius)
    return None if cert is None else cert.enclosure


def solve_full_planar_for_m(m, seeds: Sequence[Sequence[float]] | None = None, n_random: int = 48,
                            seed: int = 0, swapped: bool = False,
                            sym_cfg: CampaignConfig | None = None) -> PlanarSolutions:
    """Concave solutions (body 3 inside triangle 1-2-4) of the full planar system.

    Symmetric solutions come from the reduced symmetric system and are
    re-certified in the full system where it is regular (otherwise on the
    reflection-fixed subspace, or through their shape enclosure at the
    fold).  Asymmetric ones come from seeded Newton plus a local Krawczyk
    proof; their mirror images are certified as well.  Completeness in the
    5-dimensional space is not claimed.

    With ``swapped=True`` (masses (m, m, 1, 1)) the limit solutions have
    body 3 on an edge of the triangle, so the closed triangle is accepted.
    """
    strict = not swapped
    mi = as_interval(m)
    notes: list[str] = []
    f = _planar_sys(mi, swapped)
    f_float = _planar_sys(mi.mid(), swapped)
    rows: list[BranchRow] = []
    sym_states: list[list[float]] = []

    if not swapped:
        sym = solve_symmetric_for_m(m if not isinstance(m, Interval) else mi, sym_cfg)
        notes.extend(sym.notes)
        for p in sym.points:
            pos = shape_to_positions(p.a, p.b, p.lam)
            state = Box([Interval(0.0), pos.y3, Interval(0.0), pos.y4, p.lam])
            if not _interval_inside_triangle(state):
                notes.append(f"symmetric solution at a={p.a} not strictly concave (degenerate)")
            method = "shape"
            enc = None
            if not sym.fold and mi.hi > 0:
                enc = _certify_state(f, state.mid())
                if enc is not None:
                    method = "full"
                else:
                    sub = certify_near(partial(_sys_fix, m=mi), [state[1].mid(), state[3].mid(), state[4].mid()], 1e-10)
                    if sub is not None:
                        e = sub.enclosure
                        enc = Box([Interval(0.0), e[0], Interval(0.0), e[1], e[2]])
                        method = "fixed_subspace"
            if enc is None:
                enc = state
            rows.append(BranchRow(mi, "", enc, True, method))
            sym_states.append(list(enc.mid()))

    starts = [list(s) for s in (seeds or [])]
    starts += _multistart_seeds(sym_states, n_random, seed)
    found = []
    for s in starts:
        x = newton(f_float, s)
        if x is not None and _admissible(x, strict) and abs(x[0]) > 1e-6:
            found.append(x)
    for x in _dedupe(found):
        enc = _certify_state(f, x)
        if enc is None:
            notes.append(f"candidate {x.tolist()} not certified")
            continue
        if not _interval_inside_triangle(enc, strict) or not (enc[0].lo > 0 or enc[0].hi < 0):
            continue
        if any(r.state.intersect(enc) is not None for r in rows):
            continue
        mirror = Box([-enc[0], enc[1], -enc[2], enc[3], enc[4]])
        proof = _certify_state(f, mirror.mid())
        mirror_ok = proof is not None and proof.intersect(mirror) is not None
        rows.append(BranchRow(mi, "", enc, False, "full"))
        if not any(r.state.intersect(mirror) is not None for r in rows):
            rows.append(BranchRow(mi, "", mirror, False, "full_mirror" if mirror_ok else "mirror_exact"))
    _name_rows(rows)
    return PlanarSolutions(mi, rows, notes)


def _name_rows(rows: list[BranchRow]) -> None:
    sym = sorted((r for r in rows if r.symmetric), key=lambda r: r.state[1].mid())
    for k, r in enumerate(sym):
        r.branch = f"sym{k + 1}"
    asym = sorted((r for r in rows if not r.symmetric), key=lambda r: (r.state[1].mid(), r.state[0].mid()))
    counts: dict[str, int] = {}
    for r in asym:
        side = "-" if r.state[0].hi < 0 else "+"
        counts[side] = counts.get(side, 0) + 1
        r.branch = f"asym{side}" if counts[side] == 1 else f"asym{side}{counts[side]}"
    rows.sort(key=lambda r: (not r.symmetric, r.branch))


def write_branches_csv(rows: Sequence[BranchRow], path) -> None:
    cols = ["m_lo", "m_hi", "branch", "q3x_lo", "q3x_hi", "q3y_lo", "q3y_hi",
            "q4x_lo", "q4x_hi", "q4y_lo", "q4y_hi", "symmetric"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in rows:
            vals = [r.m.lo, r.m.hi, r.branch]
            for iv in r.state[:4]:
                vals += [iv.lo, iv.hi]
            vals.append(int(r.symmetric))
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in vals])


def equilateral_state() -> Box:
    """Exact-constant enclosure of the m = 1 kite with body 3 at the centroid."""
    a = 2.0 / SQRT3
    b = Interval(2.0)
    lam = eval_lambda(a, b, 1.0)
    return Box([Interval(0.0), 1.0 / SQRT3, Interval(0.0), SQRT3, lam])
