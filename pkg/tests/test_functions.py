import math

import numpy as np
import pytest

from hhverify import functions as fn
from hhverify.errors import DomainViolation


@pytest.mark.parametrize("name", fn.SCALAR_BUILTINS + fn.OPERATOR_BUILTINS)
def test_builtins_are_positive_and_geometrically_convex(name):
    f = fn.get_function(name)
    assert f.geometrically_convex
    x = np.geomspace(0.1, 10, 50)
    assert np.all(f(x) > 0)


def test_names_roundtrip():
    for name in ("power:2", "power:-0.5", "poly:0,1,0,1", "exp", "cosh"):
        assert fn.get_function(name).name == name


@pytest.mark.parametrize("name", ["power:4", "poly:-1,2", "poly:0,0", "poly:1,1,1,1,1,1,1,1", "tan", "power:x"])
def test_rejected_names(name):
    with pytest.raises(KeyError):
        fn.get_function(name)


def test_domain_checks():
    log = fn.get_function("log")
    assert not log.covers(0.0, 1.0)
    with pytest.raises(DomainViolation) as exc:
        log.check_domain([1.0, -2.0])
    assert exc.value.value == -2.0
    sqrt = fn.get_function("sqrt")
    assert sqrt.check_domain([-1e-14], slack=1e-12)[0] == 0.0
    with pytest.raises(DomainViolation):
        sqrt.check_domain([-1e-10], slack=1e-12)


def test_operator_convex_flags():
    assert fn.get_function("square_real").operator_convex
    assert fn.get_function("inverse").operator_convex
    assert not fn.get_function("exp").operator_convex
    assert not fn.get_function("power:3").operator_convex


def test_combinators():
    e, p2 = fn.get_function("exp"), fn.get_function("power:2")
    x = np.array([0.5, 2.0])
    assert np.allclose(fn.product(e, p2)(x), np.exp(x) * x**2)
    assert np.allclose(fn.times_identity(p2)(x), x**3)
    assert np.allclose(fn.scaled(e, 3.0)(x), 3 * np.exp(x))
    assert np.allclose(fn.total(e, p2)(x), np.exp(x) + x**2)
    assert np.allclose(fn.compose_log(e)(x), x)
    with pytest.raises(ValueError):
        fn.scaled(e, 0.0)


def test_poly_evaluates_in_ascending_coefficients():
    f = fn.get_function("poly:2,1")
    assert f(3.0) == pytest.approx(5.0)
    assert fn.get_function("poly:1,0,0,0,0,0,1")(2.0) == pytest.approx(65.0)
    assert fn.get_function("cosh")(math.log(2)) == pytest.approx(1.25)
