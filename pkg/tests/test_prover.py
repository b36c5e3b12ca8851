import json
import math
import sys
from functools import partial
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import _properties as props  # noqa: E402
import _shared as shared  # noqa: E402
from kitecc import cc_equations as cc  # noqa: E402
from kitecc import reference  # noqa: E402
from kitecc.interval import Box, Interval  # noqa: E402
from kitecc.krawczyk import Verdict  # noqa: E402
from kitecc.prover import (  # noqa: E402
    CampaignConfig,
    certify_all_zeros,
    certify_exclusion,
    certify_scalar_root,
    certify_sign,
    save_campaign,
)

SMALL = CampaignConfig(initial_grid=8)


def test_config_validation():
    with pytest.raises(ValueError):
        CampaignConfig(max_depth=0)
    with pytest.raises(ValueError):
        CampaignConfig(min_box_width=0.0)
    assert CampaignConfig().initial_grid == 100
    assert CampaignConfig(worker_count=1).digest("s") == CampaignConfig(worker_count=3).digest("s")


def test_no_real_zeros_is_fully_excluded():
    res = certify_all_zeros(lambda x: [x[0] * x[0] + x[1] * x[1] + 1.0, x[0] - x[1]],
                            Box.from_bounds([(-1, 1), (-1, 1)]), SMALL, "no_zero")
    assert not res.zeros and not res.unknown
    assert all(c.verdict is Verdict.NO_ZERO for c in res.certificates)
    assert res.coverage_ok()


def test_scalar_roots():
    c = certify_scalar_root(lambda z: z * z * z - 8.0, Interval(1.0, 3.0))
    assert c.verdict is Verdict.UNIQUE_ZERO and c.refined_enclosure[0].contains(2.0)
    c = certify_scalar_root(cc.eval_p, Interval(2.75, 2.76))
    assert c.verdict is Verdict.UNIQUE_ZERO and c.refined_enclosure.max_width() <= 1e-12
    assert certify_scalar_root(cc.eval_p, Interval(2.0, 2.7)).verdict is Verdict.NO_ZERO


def test_mass_maximum_campaign():
    res = shared.max_campaign()
    assert len(res.zeros) == 1 and not res.unknown and not res.boundary_zeros
    enc = res.zeros[0].refined_enclosure
    assert enc.contains(list(reference.FOLD_AB)) and enc.max_width() <= 1e-12
    assert res.coverage_ok()


def test_candidate_campaign_finds_fold_and_equilateral_shape():
    res = shared.candidates_campaign()
    encl = [z.refined_enclosure for z in res.zeros]
    assert len(encl) == 2 and not res.unknown
    assert any(e.contains(list(reference.FOLD_AB)) for e in encl)
    assert any(e[0].contains(2.0 / math.sqrt(3.0)) and e[1].contains(2.0) for e in encl)
    # the collision corner (2, 2) is a zero on the boundary, reported separately
    assert len(res.boundary_zeros) == 1 and res.boundary_zeros[0].refined_enclosure.contains([2.0, 2.0])
    assert res.coverage_ok()


def test_unique_zero_enclosures_are_disjoint():
    for res in (shared.max_campaign(), shared.candidates_campaign()):
        encl = [z.refined_enclosure for z in res.zeros + res.boundary_zeros]
        for i, e in enumerate(encl):
            assert all(e.intersect(o) is None for o in encl[i + 1:])


def test_unknown_boxes_respect_min_width():
    cfg = CampaignConfig(initial_grid=4, min_box_width=1e-6)
    # a double root cannot be certified: it must end as small Unknown boxes
    res = certify_all_zeros(lambda x: [x[0] * x[0]], Box.from_bounds([(-1, 1)]), cfg, "double_root")
    assert res.unknown and all(c.box.max_width() <= 1e-6 for c in res.unknown)
    assert not res.zeros


def test_exclusion_examples():
    r = certify_exclusion(lambda x: cc.eval_g(x[0], x[1]), cc.EXCLUSION_REGION, CampaignConfig(initial_grid=100))
    assert r.ok and r.leaves >= 100 * 100
    r = certify_exclusion(lambda x: cc.eval_g(x[0], Interval(2.5)), Box([cc.I_A]), CampaignConfig(initial_grid=50))
    assert r.ok and not r.survivors
    box = Box.from_bounds([(1.1, 1.2), (1.95, 2.05)])
    r = certify_exclusion(lambda x: cc.eval_g(x[0], x[1]), box, CampaignConfig(initial_grid=4, min_box_width=1e-4))
    assert not r.ok and any(s.contains([2.0 / math.sqrt(3.0), 2.0]) for s in r.survivors)


def test_sign_examples():
    r = certify_sign(lambda x: cc.eval_dg_db(x[0], x[1]), Box([Interval(1.0 + 1e-6, 2.0), cc.I_B]), "+",
                     CampaignConfig(initial_grid=16))
    assert r.ok
    r = certify_sign(lambda x: cc.eval_aux(x[0], Interval(2.0))[0], Box([Interval(1.0 + 1e-9, 2.0 - 1e-9)]), "-",
                     CampaignConfig(initial_grid=16))
    assert r.ok
    r = certify_sign(lambda x: cc.eval_aux(x[0], x[1])[3], Box([cc.I_A, cc.I_B_TILDE]), "+",
                     CampaignConfig(initial_grid=16))
    assert r.ok
    r = certify_sign(lambda x: x[0], Box.from_bounds([(-1, 1)]), "+", CampaignConfig(initial_grid=4, min_box_width=0.1))
    assert not r.ok and all(b[0].lo < 0.1 for b in r.survivors)


def test_campaign_json_round_trip(tmp_path):
    res = certify_all_zeros(cc.sys_f1_g, cc.DOMAIN_D0, CampaignConfig(initial_grid=6), "f1_g")
    path = tmp_path / "campaign.json"
    save_campaign(res, path)
    data = json.loads(path.read_text())
    assert {"system", "domain", "config", "certificates", "summary"} <= set(data)
    assert data["summary"]["unique_zeros"] == 1 and data["summary"]["unknown"] == 0
    for c, d in zip(res.certificates, data["certificates"]):
        assert Box.from_json(d["box"]) == c.box
    assert Box.from_json(data["zeros"][0]) == res.zeros[0].refined_enclosure


def test_result_independent_of_worker_count():
    assert props.campaign_bytes(1) == props.campaign_bytes(2)


def test_planted_roots_are_never_lost():
    stats = props.planted_full()
    assert stats.systems == 1000
    assert stats.lost == 0 and stats.wrongly_excluded == 0 and stats.bad_unique == 0


def test_planted_roots_small_sample_reports_every_root():
    stats = props.planted_sweep(n=40, seed=2)
    assert stats.lost == 0 and stats.bad_unique == 0 and stats.unknown == 0


def test_singular_residue_reported_on_diagonal():
    # the shape equations divide by (sa - sb)^2: boxes on a = b stay Unknown, never NoZero
    cfg = CampaignConfig(initial_grid=4, min_box_width=1e-3, max_depth=20)
    res = certify_all_zeros(partial(cc.sys_g1_g2, m=0.5), Box.from_bounds([(1.5, 1.6), (1.5, 1.6)]), cfg, "diag")
    diag = [c for c in res.certificates if c.box.contains([1.55, 1.55])]
    assert diag and all(c.verdict is Verdict.UNKNOWN for c in diag)
