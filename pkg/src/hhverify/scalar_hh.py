"""Scalar geometric convexity checks and Hermite-Hadamard chains.

Every integral over [a, b] against dt/t is computed in the weight
parameterization t = a^lam b^(1-lam), which turns it into a plain integral
over lam in [0, 1] and shares the quadrature with the operator chains.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .commuting_means import DEFAULT_QUAD, QuadratureSpec, integrate_scalar, log_mean
from .errors import DomainViolation
from .functions import ScalarFunction
from .linalg_core import DEFAULT_TOL, LoewnerTolerance, Verdict, combine, judge

MIDPOINT_GRID = 33


@dataclass(frozen=True)
class ChainReport:
    """Values of an inequality chain link_0 <= link_1 <= ... with margins."""

    link_names: tuple[str, ...]
    link_values: tuple[float, ...]
    margins: tuple[float, ...]
    verdict: Verdict
    inputs: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict.holds

    def to_json(self) -> dict:
        return {
            "links": [{"name": n, "value": v} for n, v in zip(self.link_names, self.link_values)],
            "margins": list(self.margins),
            "verdict": self.verdict.to_dict(),
            "inputs": self.inputs,
        }

    def csv_row(self) -> dict:
        row = {"verdict": self.verdict.status.value, "min_margin": self.verdict.margin}
        row.update(zip(self.link_names, self.link_values))
        return row


def chain_report(names: Sequence[str], values: Sequence[float],
                 tol: LoewnerTolerance = DEFAULT_TOL, inputs: dict | None = None) -> ChainReport:
    values = tuple(float(v) for v in values)
    margins = tuple(values[k + 1] - values[k] for k in range(len(values) - 1))
    pair_verdicts = [
        judge(m, max(abs(values[k]), abs(values[k + 1])), tol) for k, m in enumerate(margins)
    ]
    verdict = combine(pair_verdicts)
    inputs = dict(inputs or {})
    if verdict.status.value == "Violated":
        verdict = verdict.with_witness(inputs)
    return ChainReport(tuple(names), values, margins, verdict, inputs)


def write_chain_csv(reports: Sequence[ChainReport]) -> str:
    """One row per report, one column per link."""
    rows = [r.csv_row() for r in reports]
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _require(f: ScalarFunction, a: float, b: float) -> tuple[float, float]:
    a, b = float(a), float(b)
    for x in (a, b):
        if not bool(f.in_domain(x)):
            raise DomainViolation(x, f.name)
    return a, b


def _ordered(f: ScalarFunction, a: float, b: float) -> tuple[float, float]:
    a, b = _require(f, a, b)
    if not 0 < a < b:
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
    return a, b


def _geo(a: float, b: float, lam):
    """a^lam b^(1-lam), elementwise in lam."""
    lam = np.asarray(lam, dtype=float)
    return np.exp(lam * math.log(a) + (1.0 - lam) * math.log(b))


def check_geo_convex(f: ScalarFunction, a: float, b: float, grid: int = MIDPOINT_GRID) -> Verdict:
    """Sampled test of f(a^lam b^(1-lam)) <= f(a)^lam f(b)^(1-lam).

    The margin is the smallest relative slack over the lam grid; the
    verdict Holds when it is >= -1e-10. A Holds verdict is evidence from
    ``grid`` samples, not a proof.
    """
    if grid < 3:
        raise ValueError("grid needs at least 3 samples")
    a, b = _require(f, a, b)
    lam = np.linspace(0.0, 1.0, grid)
    lhs = np.asarray(f(_geo(a, b, lam)), dtype=float)
    fa, fb = float(f(a)), float(f(b))
    rhs = np.exp(lam * math.log(fa) + (1.0 - lam) * math.log(fb))
    slack = (rhs - lhs) / rhs
    k = int(np.argmin(slack))
    v = judge(slack[k], 1.0, LoewnerTolerance(rel=1e-10, abs_floor=0.0),
              grid=grid, worst_lambda=float(lam[k]), relative=True)
    if v.status.value == "Violated":
        v = v.with_witness({"f": f.name, "a": a, "b": b, "grid": grid})
    return v


def hh_chain_basic(f: ScalarFunction, a: float, b: float, q: QuadratureSpec = DEFAULT_QUAD,
                   tol: LoewnerTolerance = DEFAULT_TOL) -> ChainReport:
    """The five-link chain from the geometric midpoint value to the endpoint average."""
    a, b = _ordered(f, a, b)
    fa, fb = float(f(a)), float(f(b))
    mid = float(f(math.sqrt(a * b)))
    sym = integrate_scalar(lambda t: np.sqrt(f(_geo(a, b, t)) * f(_geo(a, b, 1.0 - t))), q)
    mean = integrate_scalar(lambda t: f(_geo(a, b, t)), q)
    names = ("f(sqrt(ab))", "mean_sqrt_f(t)f(ab/t)", "mean_f", "L(f(a),f(b))", "(f(a)+f(b))/2")
    values = (mid, sym, mean, log_mean(fa, fb), 0.5 * (fa + fb))
    return chain_report(names, values, tol, {"f": f.name, "a": a, "b": b, "quadrature": q.to_json()})


def hh_refinement(f: ScalarFunction, a: float, b: float, lam: float,
                  tol: LoewnerTolerance = DEFAULT_TOL) -> ChainReport:
    """f(sqrt(ab)) <= sqrt(f(a^lam b^(1-lam)) f(a^(1-lam) b^lam)) <= sqrt(f(a) f(b))."""
    a, b = _require(f, a, b)
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda {lam} outside [0, 1]")
    mid = float(f(math.sqrt(a * b)))
    pointwise = math.sqrt(float(f(_geo(a, b, lam))) * float(f(_geo(a, b, 1.0 - lam))))
    right = math.sqrt(float(f(a)) * float(f(b)))
    return chain_report(("f(sqrt(ab))", "sqrt(f(x)f(y))", "sqrt(f(a)f(b))"),
                        (mid, pointwise, right), tol, {"f": f.name, "a": a, "b": b, "lambda": lam})


def hh_refinement_integrated(f: ScalarFunction, a: float, b: float,
                             q: QuadratureSpec = DEFAULT_QUAD,
                             tol: LoewnerTolerance = DEFAULT_TOL) -> ChainReport:
    """The refinement with its middle term integrated over lam in [0, 1]."""
    a, b = _require(f, a, b)
    mid = float(f(math.sqrt(a * b)))
    middle = integrate_scalar(lambda t: np.sqrt(f(_geo(a, b, t)) * f(_geo(a, b, 1.0 - t))), q)
    right = math.sqrt(float(f(a)) * float(f(b)))
    return chain_report(("f(sqrt(ab))", "integrated_sqrt(f(x)f(y))", "sqrt(f(a)f(b))"),
                        (mid, middle, right), tol,
                        {"f": f.name, "a": a, "b": b, "quadrature": q.to_json()})


def hh_quarter_chain(f: ScalarFunction, a: float, b: float, q: QuadratureSpec = DEFAULT_QUAD,
                     tol: LoewnerTolerance = DEFAULT_TOL) -> ChainReport:
    """Five links built from the quarter points a^(3/4) b^(1/4), a^(1/4) b^(3/4)."""
    a, b = _ordered(f, a, b)
    fa, fb = float(f(a)), float(f(b))
    fmid = float(f(math.sqrt(a * b)))
    quarters = math.sqrt(float(f(_geo(a, b, 0.75))) * float(f(_geo(a, b, 0.25))))
    log_avg = integrate_scalar(lambda t: np.log(f(_geo(a, b, t))), q)
    names = ("f(sqrt(ab))", "sqrt(f(q1)f(q3))", "exp(mean_log_f)",
             "sqrt(f(sqrt(ab)))*(f(a)f(b))^(1/4)", "sqrt(f(a)f(b))")
    values = (fmid, quarters, math.exp(log_avg),
              math.sqrt(fmid) * (fa * fb) ** 0.25, math.sqrt(fa * fb))
    return chain_report(names, values, tol, {"f": f.name, "a": a, "b": b, "quadrature": q.to_json()})


# ---------------------------------------------------------------------------
# log o f o exp
# ---------------------------------------------------------------------------


def log_exp_transform(f: ScalarFunction) -> ScalarFunction:
    """F = log o f o exp on log(I)."""
    lo = math.log(f.lo) if f.lo > 0 else -math.inf
    hi = math.log(f.hi) if f.hi < math.inf else math.inf
    return replace(
        f,
        name=f"log.{f.name}.exp",
        func=lambda x: np.log(f.func(np.exp(x))),
        lo=lo,
        hi=hi,
        lo_closed=f.lo_closed and f.lo > 0,
        geometrically_convex=False,
        operator_convex=False,
    )


def exp_log_transform(F: ScalarFunction) -> ScalarFunction:
    """f = exp o F o log on exp(J); the converse direction."""
    lo = math.exp(F.lo) if F.lo > -math.inf else 0.0
    hi = math.exp(F.hi) if F.hi < math.inf else math.inf
    return replace(
        F,
        name=f"exp.{F.name}.log",
        func=lambda x: np.exp(F.func(np.log(x))),
        lo=lo,
        hi=hi,
        lo_closed=F.lo_closed and F.lo > -math.inf,
    )


def midpoint_convexity_check(F: ScalarFunction, x0: float, x1: float,
                             grid: int = MIDPOINT_GRID) -> Verdict:
    """F((x+y)/2) <= (F(x)+F(y))/2 for every pair of points on a uniform grid."""
    xs = np.linspace(float(x0), float(x1), grid)
    vals = np.asarray(F(xs), dtype=float)
    i, j = np.triu_indices(grid, 1)
    mids = np.asarray(F(0.5 * (xs[i] + xs[j])), dtype=float)
    slack = 0.5 * (vals[i] + vals[j]) - mids
    k = int(np.argmin(slack))
    scale = float(np.max(np.abs(vals)))
    v = judge(slack[k], scale, LoewnerTolerance(rel=1e-10, abs_floor=0.0),
              grid=grid, worst_pair=[float(xs[i[k]]), float(xs[j[k]])])
    if v.status.value == "Violated":
        v = v.with_witness({"F": F.name, "x0": float(x0), "x1": float(x1), "grid": grid})
    return v


def log_exp_convexity_check(f: ScalarFunction, a: float, b: float,
                            grid: int = MIDPOINT_GRID) -> Verdict:
    """Midpoint convexity of log o f o exp on [log a, log b]."""
    a, b = _require(f, a, b)
    return midpoint_convexity_check(log_exp_transform(f), math.log(a), math.log(b), grid)
