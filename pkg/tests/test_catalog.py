import json
from fractions import Fraction

import pytest

from polystar import catalog
from polystar.compositions import Composition, ShapeBlocks
from polystar.kernel import DomainError

F = Fraction

EXPECTED_IDS = {
    "MNEIMNEH_ORIG", "GENCEV_D1", "MAIN_TRANSFORM", "EX_FIRST", "MN1",
    "DILCHER_PLUS", "DILCHER_A2", "ODD_BINOM", "DILCHER_CLASSIC",
    "P_DEGENERATE", "AUX1", "AUX2", "PAN_XU", "INTRO_SERIES", "INTRO_RED_L",
    "INTRO_RED_R", "LI1_MAIN", "LI1_A1", "LI1_EX", "LI1_RED1", "LI1_RED2",
    "LI2_MAIN", "LI2_A1", "LI2_EX", "LI2_RED1", "LI2_RED2", "MEAN_FINITE",
    "MEAN_EX1", "MEAN_SUM_HK", "MEAN_INF_A", "MEAN_INF_1", "MEAN_EX2",
    "BINOM_RATIO",
}


def test_catalog_complete_and_unique():
    descriptors = catalog.list_identities()
    ids = [d.id for d in descriptors]
    assert len(ids) == 33
    assert len(set(ids)) == 33
    assert set(ids) == EXPECTED_IDS


def test_catalog_modes():
    by_id = {d.id: d for d in catalog.list_identities()}
    assert by_id["MAIN_TRANSFORM"].mode == "EXACT"
    assert by_id["AUX1"].mode == "QUADRATURE"
    assert by_id["LI1_EX"].mode == "NUMERIC"
    assert by_id["LI1_EX"].constraint_id == "A1_P"
    assert by_id["LI1_RED1"].constraint_id == "RED_BOX"


def test_verify_main_transform_example():
    r = catalog.verify("MAIN_TRANSFORM", dict(n=3, s=Composition((2,)), a=F(1), p=F(1, 2)))
    assert r.status == "pass"
    assert r.lhs == r.rhs == F(73, 72)
    assert r.abs_diff == 0


def test_verify_mean_sum_hk_example():
    r = catalog.verify("MEAN_SUM_HK", dict(n=3))
    assert r.status == "pass"
    assert r.lhs == F(13, 3)


def test_verify_li1_ex_against_closed_form():
    r = catalog.verify("LI1_EX", dict(d=2, p=0.5), 1e-8)
    assert r.status == "pass"
    assert float(r.abs_diff) <= 1e-8


def test_verify_skips_domain_violations():
    r = catalog.verify("MEAN_INF_A", dict(s=Composition((1, 1)), a=0.5))
    assert r.status == "skip"
    assert r.passed is None
    r = catalog.verify("INTRO_SERIES", dict(s=2, a=1.0, p=2.5), 1e-8)
    assert r.status == "skip"


def test_verify_unknown_identity():
    with pytest.raises(DomainError):
        catalog.verify("NOT_AN_ID", {})


def test_report_json_roundtrip():
    r = catalog.verify("MAIN_TRANSFORM", dict(n=2, s=Composition((1, 1)), a=F(1), p=F(1, 3)))
    payload = json.loads(json.dumps(r.to_json_dict()))
    assert payload["id"] == "MAIN_TRANSFORM"
    assert payload["pass"] is True
    assert payload["mode"] == "EXACT"
    assert payload["lhs"] == payload["rhs"]
    assert "anchor" in payload and payload["anchor"]


def test_verify_deterministic():
    kw = dict(params=dict(d=1, p=0.5), tol=1e-8)
    r1 = catalog.verify("LI1_EX", **kw)
    r2 = catalog.verify("LI1_EX", **kw)
    assert r1.to_json_dict()["lhs"] == r2.to_json_dict()["lhs"]
    assert r1.cost["terms_rhs"] == r2.cost["terms_rhs"]


def test_fuzz_deterministic_and_passing():
    a = catalog.fuzz("DILCHER_PLUS", 42, 50)
    b = catalog.fuzz("DILCHER_PLUS", 42, 50)
    assert [r.params for r in a] == [r.params for r in b]
    assert all(r.status == "pass" for r in a)
    c = catalog.fuzz("DILCHER_PLUS", 43, 5)
    assert [r.params for r in c] != [r.params for r in a[:5]]


def test_fuzz_main_transform():
    reports = catalog.fuzz("MAIN_TRANSFORM", 7, 30)
    assert all(r.status == "pass" for r in reports)


def test_fuzz_red1_red_box_samples():
    reports = catalog.fuzz("LI1_RED1", 1, 10, 1e-8)
    assert len(reports) == 10
    assert all(r.status == "pass" for r in reports)


def test_fuzz_requires_trials():
    with pytest.raises(DomainError):
        catalog.fuzz("MAIN_TRANSFORM", 1, 0)


def test_fuzz_in_domain_never_skips():
    for ident in ("GENCEV_D1", "PAN_XU", "INTRO_SERIES"):
        reports = catalog.fuzz(ident, 3, 8)
        assert all(not r.skipped for r in reports)


def test_outside_mode_reports_failure_without_abort():
    # divergent series outside the validity region: a failure, not an error
    r = catalog.verify("INTRO_SERIES", dict(s=2, a=-1.0, p=1.5), 1e-8, outside=True)
    assert r.passed is False
    assert r.skip_reason and "rejected" in r.skip_reason


def test_grid_tolerance_overrides():
    grids = list(catalog.default_grid("MEAN_INF_1"))
    tols = {str(params["s"]): tol for params, tol in grids}
    assert tols["2"] == 1e-6
    assert tols["2,2"] == 1e-5
