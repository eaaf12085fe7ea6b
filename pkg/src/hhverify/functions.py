"""Scalar functions with declared domains and convexity flags.

Names accepted by :func:`get_function`::

    exp, cosh                     geometrically convex on (0, inf)
    power:p                       x**p on (0, inf), -2 <= p <= 3 (geometrically affine)
    poly:c0,c1,...,cd             nonnegative coefficients, degree <= 6
    square_real                   x**2 on the whole real line (operator convex)
    inverse                       1/x on (0, inf) (operator convex)
    identity, sqrt, log           functional-calculus utilities
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import DomainViolation

INF = math.inf


@dataclass(frozen=True)
class ScalarFunction:
    """A vectorized real function together with its domain interval.

    The domain is ``(lo, hi)`` with endpoint inclusion given by
    ``lo_closed`` / ``hi_closed``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    lo: float = 0.0
    hi: float = INF
    lo_closed: bool = False
    hi_closed: bool = False
    geometrically_convex: bool = False
    operator_convex: bool = False
    monotone: bool = False

    def __call__(self, x):
        return self.func(x)

    def in_domain(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo_ok = x >= self.lo if self.lo_closed else x > self.lo
        hi_ok = x <= self.hi if self.hi_closed else x < self.hi
        return lo_ok & hi_ok

    def check_domain(self, x, slack: float = 0.0) -> np.ndarray:
        """Return ``x`` with closed endpoints snapped within ``slack``.

        Raises DomainViolation for the first point outside the domain.
        """
        x = np.asarray(x, dtype=float)
        if slack > 0.0:
            if self.lo_closed and math.isfinite(self.lo):
                x = np.where((x < self.lo) & (x >= self.lo - slack), self.lo, x)
            if self.hi_closed and math.isfinite(self.hi):
                x = np.where((x > self.hi) & (x <= self.hi + slack), self.hi, x)
        ok = self.in_domain(x)
        if not np.all(ok):
            raise DomainViolation(float(x[~ok].flat[0]), self.name)
        return x

    def covers(self, lo: float, hi: float) -> bool:
        return bool(np.all(self.in_domain([lo, hi])))


def _positive(name, func, **flags) -> ScalarFunction:
    return ScalarFunction(name, func, 0.0, INF, False, False, **flags)


def power(p: float) -> ScalarFunction:
    p = float(p)
    return _positive(
        f"power:{p:g}",
        lambda x: np.power(x, p),
        geometrically_convex=True,
        operator_convex=(1.0 <= p <= 2.0) or (-1.0 <= p <= 0.0),
        monotone=True,
    )


def poly(coeffs) -> ScalarFunction:
    c = [float(v) for v in coeffs]
    if not c or len(c) > 7:
        raise ValueError("polynomial degree must be between 0 and 6")
    if any(v < 0 for v in c) or not any(v > 0 for v in c):
        raise ValueError("polynomial coefficients must be nonnegative and not all zero")
    rev = c[::-1]
    return _positive(
        "poly:" + ",".join(f"{v:g}" for v in c),
        lambda x: np.polyval(rev, x),
        geometrically_convex=True,
        monotone=True,
    )


def _parse(name: str) -> ScalarFunction:
    kind, _, arg = name.partition(":")
    if kind == "power":
        p = float(arg)
        if not -2.0 <= p <= 3.0:
            raise ValueError(f"power exponent {p} outside [-2, 3]")
        return power(p)
    if kind == "poly":
        return poly(arg.split(","))
    raise KeyError(name)


_FIXED = {
    "exp": _positive("exp", np.exp, geometrically_convex=True, monotone=True),
    "cosh": _positive("cosh", np.cosh, geometrically_convex=True, monotone=True),
    "inverse": _positive("inverse", lambda x: 1.0 / x, geometrically_convex=True,
                         operator_convex=True, monotone=True),
    "square_real": ScalarFunction("square_real", np.square, -INF, INF, operator_convex=True),
    "identity": ScalarFunction("identity", lambda x: np.asarray(x, dtype=float), -INF, INF,
                               monotone=True),
    "sqrt": ScalarFunction("sqrt", np.sqrt, 0.0, INF, lo_closed=True, monotone=True),
    "log": _positive("log", np.log, monotone=True),
    "exp_real": ScalarFunction("exp_real", np.exp, -INF, INF, monotone=True),
}


def get_function(name: str) -> ScalarFunction:
    """Look up a built-in function by name (see module docstring)."""
    if name in _FIXED:
        return _FIXED[name]
    try:
        return _parse(name)
    except (KeyError, ValueError) as exc:
        raise KeyError(f"unknown function {name!r}: {exc}") from None


# Default set for scalar Hermite-Hadamard trials.
SCALAR_BUILTINS = (
    "exp", "cosh", "power:-2", "power:-1", "power:0.5", "power:2", "power:3",
    "poly:2,1", "poly:1,1,1", "poly:0,1,0,1", "poly:1,0,0,0,0,0,1",
)

# Default set for commuting-pair operator chains.
OPERATOR_BUILTINS = ("exp", "power:2", "poly:0,1,0,1", "cosh")


def compose_log(f: ScalarFunction) -> ScalarFunction:
    """``log o f``; requires f > 0 on its domain."""
    return replace(f, name=f"log({f.name})", func=lambda x: np.log(f.func(x)),
                   geometrically_convex=False, operator_convex=False)


def product(f: ScalarFunction, g: ScalarFunction) -> ScalarFunction:
    return replace(f, name=f"({f.name})*({g.name})", func=lambda x: f.func(x) * g.func(x),
                   lo=max(f.lo, g.lo), hi=min(f.hi, g.hi), operator_convex=False)


def times_identity(f: ScalarFunction) -> ScalarFunction:
    return replace(f, name=f"t*({f.name})", func=lambda x: x * f.func(x), operator_convex=False)


def scaled(f: ScalarFunction, m: float) -> ScalarFunction:
    if m <= 0:
        raise ValueError("scale factor must be positive")
    return replace(f, name=f"{m:g}*({f.name})", func=lambda x: m * f.func(x))


def total(f: ScalarFunction, g: ScalarFunction) -> ScalarFunction:
    return replace(f, name=f"({f.name})+({g.name})", func=lambda x: f.func(x) + g.func(x),
                   lo=max(f.lo, g.lo), hi=min(f.hi, g.hi))
