"""Branch-and-prune campaigns producing per-box certificates.

A campaign lays a uniform grid over the domain and processes each cell
independently: exclude by plain interval evaluation, otherwise apply the
Krawczyk test (retrying on a slightly inflated box when a zero sits close to
a face), otherwise bisect.  Leaves are collected in canonical order so the
output does not depend on how cells were scheduled.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Sequence

from .interval import Box, DomainError, Interval
from .krawczyk import Verdict, krawczyk_step, refine


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    max_depth: int = 60
    min_box_width: float = 1e-8
    initial_grid: int = 100
    worker_count: int = 1
    refine_width: float = 1e-12
    inflation: float = 0.1

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not self.min_box_width > 0:
            raise ValueError("min_box_width must be positive")
        if self.initial_grid < 1 or self.worker_count < 1:
            raise ValueError("initial_grid and worker_count must be >= 1")

    def to_json(self) -> dict:
        return asdict(self)

    def result_fields(self) -> dict:
        """Settings that can change a campaign's output."""
        d = self.to_json()
        d.pop("worker_count")
        return d

    def digest(self, system_id: str = "") -> str:
        payload = json.dumps({"system": system_id, "config": self.result_fields()}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class Certificate:
    system_id: str
    box: Box
    verdict: Verdict
    evidence: dict
    refined_enclosure: Box | None = None
    config_hash: str = ""
    boundary: bool = False

    def to_json(self) -> dict:
        out = {"box": self.box.to_json(), "verdict": str(self.verdict), "evidence": self.evidence}
        if self.refined_enclosure is not None:
            out["enclosure"] = self.refined_enclosure.to_json()
        if self.boundary:
            out["boundary"] = True
        return out


@dataclass
class CampaignResult:
    system_id: str
    domain: Box
    config: CampaignConfig
    certificates: list[Certificate]
    zeros: list[Certificate] = field(default_factory=list)
    boundary_zeros: list[Certificate] = field(default_factory=list)
    budget_exceeded: bool = False

    @property
    def unknown(self) -> list[Certificate]:
        return [c for c in self.certificates if c.verdict is Verdict.UNKNOWN]

    def summary(self) -> dict:
        return {
            "unique_zeros": len(self.zeros),
            "boundary_zeros": len(self.boundary_zeros),
            "unknown": len(self.unknown),
            "leaves": len(self.certificates),
            "budget_exceeded": self.budget_exceeded,
        }

    def covered_volume(self) -> float:
        return sum(c.box.volume() for c in self.certificates)

    def coverage_ok(self, tol: float = 1e-12) -> bool:
        return self.covered_volume() >= self.domain.volume() * (1.0 - 1e-12) - tol

    def to_json(self) -> dict:
        return {
            "system": self.system_id,
            "domain": self.domain.to_json(),
            "config": self.config.result_fields(),
            "config_hash": self.config.digest(self.system_id),
            "certificates": [c.to_json() for c in self.certificates],
            "zeros": [c.refined_enclosure.to_json() for c in self.zeros],
            "boundary_zeros": [c.refined_enclosure.to_json() for c in self.boundary_zeros],
            "summary": self.summary(),
        }


def splat(fn: Callable, x: Sequence):
    """``fn(*x)``; with ``functools.partial`` this turns ``fn(a, b)`` into ``f(x)``."""
    return fn(*x)


def scalar_as_system(fn: Callable, x: Sequence) -> list:
    return [fn(*x)]


def _zero_excluded(ys) -> int | None:
    for i, y in enumerate(ys):
        if isinstance(y, Interval):
            if y.lo > 0.0 or y.hi < 0.0:
                return i
        elif y != 0.0:
            return i
    return None


def _examine(f, box: Box, cfg: CampaignConfig, depth: int):
    """Decide one box: returns (verdict, evidence, enclosure) or None to bisect."""
    try:
        ys = f(list(box))
        i = _zero_excluded(ys)
        if i is not None:
            return Verdict.NO_ZERO, {"kind": "enclosure", "component": i}, None
    except DomainError:
        pass
    res = krawczyk_step(f, box)
    if res.verdict is Verdict.NO_ZERO:
        return Verdict.NO_ZERO, {"kind": "krawczyk"}, None
    if res.verdict is Verdict.UNIQUE_ZERO:
        enc = refine(f, box.intersect(res.k_box), cfg.refine_width)
        return Verdict.UNIQUE_ZERO, {"kind": "krawczyk", "proof_box": box.to_json()}, enc
    if res.verdict is Verdict.CONTRACTED and all(
        k.width() < 0.5 * b.width() for k, b in zip(res.k_box, box)
    ):
        # a zero close to a face: prove it on a box reaching across the face
        wide = box.inflate(cfg.inflation)
        res2 = krawczyk_step(f, wide)
        if res2.verdict is Verdict.UNIQUE_ZERO:
            enc = refine(f, wide.intersect(res2.k_box), cfg.refine_width)
            ev = {"kind": "inflated_krawczyk", "proof_box": wide.to_json()}
            if box.intersect(enc) is None:
                return Verdict.NO_ZERO, ev, None
            return Verdict.UNIQUE_ZERO, ev, enc
    if box.max_width() <= cfg.min_box_width:
        return Verdict.UNKNOWN, {"kind": "residue", "reason": res.reason or "min_width"}, None
    if depth >= cfg.max_depth:
        return Verdict.UNKNOWN, {"kind": "residue", "reason": "max_depth"}, None
    return None


def _process_cell(f, cfg: CampaignConfig, scale: Sequence[float], system_id: str, cell: Box) -> list[Certificate]:
    out = []
    digest = cfg.digest(system_id)
    stack = [(cell, 0)]
    while stack:
        box, depth = stack.pop()
        decided = _examine(f, box, cfg, depth)
        if decided is None:
            left, right = box.bisect(scale=scale)
            stack.append((right, depth + 1))
            stack.append((left, depth + 1))
            continue
        verdict, ev, enc = decided
        out.append(Certificate(system_id, box, verdict, ev, enc, digest))
    return out


def _map_cells(worker, cells: list[Box], workers: int) -> list:
    if workers <= 1 or len(cells) <= 1:
        return [worker(c) for c in cells]
    chunk = max(1, len(cells) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(worker, cells, chunksize=chunk))


def _same_zero(a: Certificate, b: Certificate) -> bool:
    ea, eb = a.refined_enclosure, b.refined_enclosure
    if ea.intersect(eb) is None:
        return False
    pa = Box.from_json(a.evidence["proof_box"])
    pb = Box.from_json(b.evidence["proof_box"])
    # uniqueness inside either proof box identifies the two zeros
    return pa.contains(eb) or pb.contains(ea)


def certify_all_zeros(f, domain: Box, cfg: CampaignConfig | None = None, system_id: str = "system",
                      grid: int | Sequence[int] | None = None) -> CampaignResult:
    """Enclose every zero of the square system ``f`` in ``domain``."""
    cfg = cfg or CampaignConfig()
    domain = Box(domain)
    parts = cfg.initial_grid if grid is None else grid
    cells = domain.grid(parts)
    scale = [w if w > 0 else 1.0 for w in domain.widths()]
    worker = partial(_process_cell, f, cfg, scale, system_id)
    certs = [c for group in _map_cells(worker, cells, cfg.worker_count) for c in group]
    certs.sort(key=lambda c: c.box.key())

    zeros: list[Certificate] = []
    for c in certs:
        if c.verdict is not Verdict.UNIQUE_ZERO:
            continue
        twin = next((z for z in zeros if _same_zero(z, c)), None)
        if twin is not None:
            # same zero reached from a neighbouring leaf
            c.verdict = Verdict.NO_ZERO
            c.evidence = dict(c.evidence, kind="shared_zero", zero=twin.refined_enclosure.to_json())
            c.refined_enclosure = None
            continue
        if not domain.interior_contains(c.refined_enclosure):
            c.boundary = True
        zeros.append(c)
    budget = any(c.verdict is Verdict.UNKNOWN and c.evidence.get("reason") == "max_depth" for c in certs)
    return CampaignResult(
        system_id, domain, cfg, certs,
        zeros=[z for z in zeros if not z.boundary],
        boundary_zeros=[z for z in zeros if z.boundary],
        budget_exceeded=budget,
    )


# --- sign and exclusion campaigns --------------------------------------------

def _sign_ok(kind: str, y) -> bool:
    if kind == "nonzero":
        return y.lo > 0.0 or y.hi < 0.0
    if kind == "+":
        return y.lo > 0.0
    if kind == "-":
        return y.hi < 0.0
    if kind == "<=0":
        return y.hi <= 0.0
    if kind == ">=0":
        return y.lo >= 0.0
    raise ValueError(f"unknown sign kind {kind!r}")


def _sign_cell(f, kind: str, cfg: CampaignConfig, scale, cell: Box) -> tuple[int, list[Box]]:
    leaves = 0
    survivors = []
    stack = [(cell, 0)]
    while stack:
        box, depth = stack.pop()
        try:
            ok = _sign_ok(kind, f(list(box)))
        except DomainError:
            ok = False
        if ok:
            leaves += 1
            continue
        if box.max_width() <= cfg.min_box_width or depth >= cfg.max_depth:
            leaves += 1
            survivors.append(box)
            continue
        left, right = box.bisect(scale=scale)
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    return leaves, survivors


@dataclass
class SignResult:
    ok: bool
    leaves: int
    survivors: list[Box]
    region: Box
    kind: str

    def to_json(self) -> dict:
        return {
            "ok": self.ok, "kind": self.kind, "region": self.region.to_json(),
            "leaves": self.leaves, "survivors": [b.to_json() for b in self.survivors],
        }


def _sign_campaign(f, region: Box, kind: str, cfg: CampaignConfig) -> SignResult:
    region = Box(region)
    scale = [w if w > 0 else 1.0 for w in region.widths()]
    worker = partial(_sign_cell, f, kind, cfg, scale)
    parts = _map_cells(worker, region.grid(cfg.initial_grid), cfg.worker_count)
    leaves = sum(p[0] for p in parts)
    survivors = sorted((b for p in parts for b in p[1]), key=lambda b: b.key())
    return SignResult(not survivors, leaves, survivors, region, kind)


def certify_exclusion(f, region: Box, cfg: CampaignConfig | None = None) -> SignResult:
    """Prove the scalar function ``f(x)`` has no zero on ``region``."""
    return _sign_campaign(f, region, "nonzero", cfg or CampaignConfig())


def certify_sign(f, region: Box, sign: str, cfg: CampaignConfig | None = None) -> SignResult:
    """Prove ``f > 0`` (``'+'``), ``f < 0`` (``'-'``), ``f <= 0`` or ``f >= 0`` on ``region``."""
    return _sign_campaign(f, region, sign, cfg or CampaignConfig())


def certify_scalar_root(f: Callable, bracket: Interval, cfg: CampaignConfig | None = None,
                        system_id: str = "scalar") -> Certificate:
    """Single-variable campaign: UniqueZero with enclosure, NoZero, or Unknown."""
    cfg = cfg or CampaignConfig(initial_grid=16, min_box_width=1e-14)
    dom = Box([bracket])
    res = certify_all_zeros(partial(scalar_as_system, f), dom, cfg, system_id)
    found = res.zeros + res.boundary_zeros
    ev = {"leaves": len(res.certificates), "unknown": len(res.unknown), "zeros": len(found)}
    if res.unknown:
        return Certificate(system_id, dom, Verdict.UNKNOWN, ev, None, cfg.digest(system_id))
    if not found:
        return Certificate(system_id, dom, Verdict.NO_ZERO, ev, None, cfg.digest(system_id))
    if len(found) == 1:
        z = found[0]
        return Certificate(system_id, dom, Verdict.UNIQUE_ZERO, ev, z.refined_enclosure,
                           cfg.digest(system_id), z.boundary)
    return Certificate(system_id, dom, Verdict.UNKNOWN, ev, None, cfg.digest(system_id))


def save_campaign(result: CampaignResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(result.to_json(), fh, indent=1)
