import math

import numpy as np
import pytest

from hhverify import trace_ineq as tr
from hhverify.commuting_means import make_pair
from hhverify.errors import DimensionMismatch, EmptyList, SingularX
from hhverify.generators import gen_commuting_pair, gen_complex, gen_psd
from hhverify.linalg_core import Status

EQ = 1e-10


def assert_equality(v, rhs):
    assert v.status is Status.HOLDS
    assert abs(v.margin) <= EQ * abs(rhs)


def test_trace_axioms_examples(rng):
    i2 = np.eye(2)
    v = tr.trace_axioms_check(i2, i2)
    assert v.holds
    a = np.array([[0, 1], [0, 0]])
    t = np.array([[0, 0], [1, 0]])
    assert tr.trace(a @ t) == 1 == tr.trace(t @ a)
    assert tr.schatten_norm(a, 1) == pytest.approx(1) and tr.schatten_norm(t, tr.INF) == pytest.approx(1)
    assert tr.trace_axioms_check(a, t).holds
    assert tr.trace_axioms_check(gen_complex(rng, 6), gen_complex(rng, 6)).holds
    with pytest.raises(DimensionMismatch):
        tr.trace_axioms_check(np.eye(2), np.eye(3))


def test_psd_trace_bounds(rng):
    assert tr.psd_trace_bounds_check(gen_psd(rng, 4), gen_psd(rng, 4)).holds


def test_psd_product_chain_examples():
    r = tr.psd_trace_product_chain(make_pair(np.eye(2), [1.0, 4.0], [4.0, 1.0]))
    assert r.link_values == pytest.approx((math.sqrt(8), 4.0, 5.0), rel=1e-13)
    n = 3
    r = tr.psd_trace_product_chain(make_pair(np.eye(n), np.ones(n), np.ones(n)))
    assert r.link_values == pytest.approx((math.sqrt(n), n, n), rel=1e-13)
    r = tr.psd_trace_product_chain(make_pair(np.eye(2), [0.0, 0.0], [1.0, 2.0], strict=False))
    assert r.link_values == pytest.approx((0, 0, 0), abs=1e-15)


def test_trace_geo_convex_examples(rng):
    v = tr.trace_geo_convex_check(make_pair(np.eye(2), [1.0, 2.0], [2.0, 1.0]), grid=[0.5])
    assert v.details.get("grid") == [0.5]
    assert v.margin == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-12)
    p = gen_commuting_pair(rng, 4)
    assert_equality(tr.trace_geo_convex_check(make_pair(p.u, p.a, p.a)), np.sum(p.a))
    v = tr.trace_geo_convex_check(p, grid=[0.0, 1.0])
    assert abs(v.margin) <= EQ * max(np.sum(p.a), np.sum(p.b))


def test_trace_log_chain_examples(rng):
    r = tr.trace_log_hh_chain(make_pair(np.eye(2), [1.0, 4.0], [4.0, 1.0]))
    assert r.holds
    assert r.link_values[0] == pytest.approx(math.log(4), rel=1e-14)
    assert r.link_values[2] == pytest.approx(math.log(5), rel=1e-14)
    assert r.link_values[1] == pytest.approx(1.4628, abs=1e-4)
    p = gen_commuting_pair(rng, 3)
    r = tr.trace_log_hh_chain(make_pair(p.u, p.b, p.b))
    assert all(v == pytest.approx(math.log(np.sum(p.b)), rel=1e-12) for v in r.link_values)


def test_trace_log_chain_squared(rng):
    assert tr.trace_log_hh_chain_squared(gen_commuting_pair(rng, 5)).holds


def test_bhatia_davis_examples(rng):
    n = 3
    i = np.eye(n)
    v = tr.bhatia_davis_check(i, i, i, 1)
    assert v.details["lhs"] == pytest.approx(n * n) and abs(v.margin) < 1e-12
    v = tr.bhatia_davis_check(np.diag([1.0, 0.0]), np.eye(2), np.eye(2), 1)
    assert (v.details["lhs"], v.details["rhs"]) == pytest.approx((1.0, 2.0))
    for r in (0.5, 1, 2):
        a, x, b = gen_complex(rng, 4), gen_complex(rng, 4), gen_complex(rng, 4)
        assert tr.bhatia_davis_check(a, x, b, r).holds


def test_bhatia_davis_zero_power_counts_rank():
    v = tr.bhatia_davis_check(np.diag([1.0, 0.0]), np.eye(2), np.eye(2), 0)
    assert v.details["lhs"] == 1 and v.details["rhs"] == 2


def test_trace_cauchy_schwarz_examples(rng):
    a = gen_complex(rng, 4)
    v = tr.trace_cauchy_schwarz(a, a)
    assert_equality(v, v.details["rhs"])
    assert v.details["cs_lhs"] == pytest.approx(v.details["cs_rhs"], rel=1e-13)
    v = tr.trace_cauchy_schwarz(np.diag([1.0, 0.0]), np.eye(2), np.eye(2))
    assert (v.details["lhs"], v.details["rhs"]) == pytest.approx((1.0, 2.0))
    assert tr.trace_cauchy_schwarz(gen_complex(rng, 5), gen_complex(rng, 5), gen_complex(rng, 5)).holds


def test_dragomir_examples(rng):
    for alpha in (-1.0, 0.3, 2.0):
        v = tr.dragomir_alpha_check(np.eye(3), np.eye(3), np.eye(3), alpha)
        assert v.details["lhs"] == pytest.approx(9) and abs(v.margin) < 1e-12
    v = tr.dragomir_alpha_check(np.eye(2), np.eye(2), np.diag([1.0, 2.0]), 2)
    assert v.details["lhs"] == pytest.approx(9) and v.details["rhs"] == pytest.approx(21.25)
    for alpha in (-1.0, 0.3, 2.0):
        a, b, x = gen_complex(rng, 4), gen_complex(rng, 4), gen_complex(rng, 4)
        assert tr.dragomir_alpha_check(a, b, x, alpha).holds
        assert tr.dragomir_identity_check(x, alpha).holds


def test_dragomir_singular_gate():
    x = np.diag([1.0, 0.0])
    with pytest.raises(SingularX):
        tr.dragomir_alpha_check(np.eye(2), np.eye(2), x, 2.0)
    # inside [0, 1] the zero singular value is allowed
    assert tr.dragomir_alpha_check(np.eye(2), np.eye(2), x, 0.5).holds
    assert tr.dragomir_alpha_check(np.eye(2), np.eye(2), x, 0.0).holds


def test_dannan_examples(rng):
    i2 = np.eye(2)
    v = tr.dannan_block_check([i2], [i2])
    assert v.details["lhs"] == pytest.approx(4) and abs(v.margin) < 1e-12
    s = [gen_complex(rng, 3) for _ in range(3)]
    v = tr.dannan_block_check(s, s)
    assert_equality(v, v.details["rhs"])
    s = [gen_complex(rng, 4) for _ in range(3)]
    t = [gen_complex(rng, 4) for _ in range(3)]
    v = tr.dannan_block_check(s, t)
    assert v.holds and v.details["route_rel_diff"] <= 1e-11


def test_dannan_errors():
    with pytest.raises(EmptyList):
        tr.dannan_block_check([], [])
    with pytest.raises(DimensionMismatch):
        tr.dannan_block_check([np.eye(2)], [np.eye(2), np.eye(2)])


def test_dannan_positive_subchain(rng):
    ps = [gen_commuting_pair(rng, 3) for _ in range(2)]
    v = tr.dannan_positive_check([p.A for p in ps], [p.B for p in ps])
    assert v.holds and v.details["pd_chain"]["status"] == "Holds"
    v = tr.dannan_positive_check([gen_psd(rng, 3)], [gen_psd(rng, 3)])
    assert v.holds and v.details["pd_chain"]["status"] == "Skipped"


def test_block_row_shape():
    b = tr.block_row([np.eye(2), 2 * np.eye(2)])
    assert b.shape == (4, 4) and np.array_equal(b[:2, 2:], 2 * np.eye(2)) and not b[2:].any()
