import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhverify import scalar_hh as sc
from hhverify.errors import DomainViolation
from hhverify.functions import SCALAR_BUILTINS, get_function, power
from hhverify.linalg_core import Status

E = math.e
EXP = get_function("exp")


def test_geo_convex_examples():
    assert sc.check_geo_convex(EXP, 1, 2).status is Status.HOLDS
    v = sc.check_geo_convex(power(3), 0.5, 3)
    assert v.holds and abs(v.margin) < 1e-14
    assert sc.check_geo_convex(get_function("poly:2,1"), 1, 4).holds


def test_geo_convex_detects_non_geometrically_convex_function():
    # log(1+x) is concave in log-coordinates
    from hhverify.functions import ScalarFunction

    f = ScalarFunction("log1p", np.log1p)
    v = sc.check_geo_convex(f, 0.5, 8)
    assert v.status is Status.VIOLATED and v.witness["f"] == "log1p"


def test_geo_convex_domain_violation():
    with pytest.raises(DomainViolation):
        sc.check_geo_convex(EXP, -1, 2)


def test_basic_chain_exp_closed_links():
    r = sc.hh_chain_basic(EXP, 1, 2)
    assert r.holds
    assert r.link_values[0] == pytest.approx(math.exp(math.sqrt(2)), rel=1e-14)
    assert r.link_values[0] == pytest.approx(4.11325, abs=1e-5)
    assert r.link_values[3] == pytest.approx(E * E - E, rel=1e-14)
    assert r.link_values[4] == pytest.approx((E + E * E) / 2, rel=1e-14)
    # mean of f(t) dt/t over [a, b] equals (Ei(2) - Ei(1)) / ln 2 for exp
    ei1, ei2 = 1.8951178163559368, 4.954234356001890
    assert r.link_values[2] == pytest.approx((ei2 - ei1) / math.log(2), rel=1e-13)
    assert all(m >= 0 for m in r.margins)


def test_basic_chain_power_collapses_left_half():
    r = sc.hh_chain_basic(power(2), 1.5, 6)
    v = r.link_values
    assert v[1] == pytest.approx(v[0], rel=1e-13)
    assert r.holds


def test_basic_chain_degenerate_interval():
    a = 2.0
    r = sc.hh_chain_basic(EXP, a, a * (1 + 1e-12))
    assert all(x == pytest.approx(math.exp(a), rel=1e-9) for x in r.link_values)


def test_refinement_examples():
    r = sc.hh_refinement(EXP, 1, 4, 0.0)
    assert r.link_values[1] == pytest.approx(r.link_values[2], rel=1e-15)
    r = sc.hh_refinement(EXP, 1, 4, 0.5)
    assert r.link_values[1] == pytest.approx(r.link_values[0], rel=1e-15)
    r = sc.hh_refinement(EXP, 1, 4, 0.25)
    assert r.link_values == pytest.approx((math.exp(2), math.exp(1.5 * math.sqrt(2)), math.exp(2.5)), rel=1e-14)
    assert r.link_values[1] == pytest.approx(8.342, abs=1e-3)


def test_refinement_integrated_holds():
    r = sc.hh_refinement_integrated(get_function("cosh"), 0.2, 7)
    assert r.holds and r.link_values[0] <= r.link_values[1] <= r.link_values[2]


def test_quarter_chain_exp_anchor():
    r = sc.hh_quarter_chain(EXP, 1, 4)
    assert r.holds
    assert r.link_values == pytest.approx((7.389, 8.342, 8.706, 9.488, 12.182), abs=1e-3)
    assert r.link_values[2] == pytest.approx(math.exp(3 / math.log(4)), rel=1e-13)


def test_quarter_chain_power_and_degenerate():
    v = sc.hh_quarter_chain(power(-1.5), 0.3, 5).link_values
    assert v[0] == pytest.approx(v[1], rel=1e-13) == pytest.approx(v[2], rel=1e-13)
    v = sc.hh_quarter_chain(EXP, 3.0, 3.0 * (1 + 1e-12)).link_values
    assert all(x == pytest.approx(math.exp(3.0), rel=1e-9) for x in v)


def test_chain_requires_ordered_interval():
    with pytest.raises(ValueError):
        sc.hh_chain_basic(EXP, 2, 1)


def test_log_exp_transform_examples():
    F = sc.log_exp_transform(EXP)
    x = np.linspace(-2, 2, 9)
    assert np.allclose(F(x), np.exp(x))
    G = sc.log_exp_transform(power(2.5))
    assert np.allclose(G(x), 2.5 * x)
    v = sc.midpoint_convexity_check(G, -1, 1)
    assert v.holds and abs(v.margin) < 1e-13
    assert sc.log_exp_convexity_check(get_function("cosh"), 0.1, 5).holds


def test_exp_log_transform_inverts():
    f = get_function("cosh")
    back = sc.exp_log_transform(sc.log_exp_transform(f))
    x = np.geomspace(0.2, 5, 7)
    assert np.allclose(back(x), f(x), rtol=1e-14)


def test_chain_report_csv_and_json():
    reports = [sc.hh_chain_basic(EXP, 1, 2), sc.hh_quarter_chain(EXP, 1, 4)]
    text = sc.write_chain_csv(reports)
    lines = text.strip().splitlines()
    assert len(lines) == 3 and lines[0].startswith("verdict,min_margin")
    js = reports[0].to_json()
    assert js["verdict"]["status"] == "Holds" and len(js["links"]) == 5


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SCALAR_BUILTINS), st.floats(0.1, 10), st.floats(0.1, 10))
def test_chains_hold_for_builtins(name, x, y):
    a, b = min(x, y), max(x, y)
    if b - a < 1e-9 * b:
        b = a * 1.5
    f = get_function(name)
    assert sc.hh_chain_basic(f, a, b).verdict.status is not Status.VIOLATED
    assert sc.hh_quarter_chain(f, a, b).verdict.status is not Status.VIOLATED
    assert sc.check_geo_convex(f, a, b).status is not Status.VIOLATED
