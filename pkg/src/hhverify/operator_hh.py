"""Operator Hermite-Hadamard chains and operator geometric convexity checks.

Commuting-pair checks are evaluated twice: once on matrices, where every
f(M) goes through a fresh Jacobi decomposition of the materialized M, and
once per shared eigenvalue index with plain scalars. The scalar route is
the oracle; ``details["oracle_rel_err"]`` records the worst Frobenius
disagreement between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import functions as fn
from .commuting_means import (
    DEFAULT_QUAD,
    CommutingPositivePair,
    QuadratureSpec,
    agm_weighted_mean,
    check_weight,
    geometric_values,
    integrate_scalar,
    log_mean_vec,
    weighted_geometric,
    weighted_geometric_integral_closed_form,
    weighted_geometric_stack,
)
from .functions import ScalarFunction
from .linalg_core import (
    DEFAULT_TOL,
    LoewnerTolerance,
    Status,
    Verdict,
    as_matrix,
    combine,
    eig_hermitian,
    eigh_stack,
    funm,
    funm_stack,
    hermitian,
    judge,
    loewner_chain,
    loewner_leq,
    matrix_to_json,
    same_shape,
)

DEFAULT_GRID = tuple(np.linspace(0.0, 1.0, 9))


@dataclass(frozen=True, eq=False)
class OperatorChainReport:
    link_names: tuple[str, ...]
    link_matrices: tuple[np.ndarray, ...]
    pairwise_verdicts: tuple[Verdict, ...]
    overall: Verdict
    inputs: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.overall.holds

    def to_json(self) -> dict:
        return {
            "links": [{"name": n, "value": matrix_to_json(m)}
                      for n, m in zip(self.link_names, self.link_matrices)],
            "margins": [v.margin for v in self.pairwise_verdicts],
            "pairwise": [v.to_dict() for v in self.pairwise_verdicts],
            "verdict": self.overall.to_dict(),
            "inputs": self.inputs,
        }


def operator_chain_report(names, mats, tol=DEFAULT_TOL, inputs=None, **details) -> OperatorChainReport:
    verdicts = tuple(loewner_chain(mats, tol))
    overall = combine(verdicts, **details)
    inputs = dict(inputs or {})
    if overall.status is Status.VIOLATED:
        overall = overall.with_witness(inputs)
    return OperatorChainReport(tuple(names), tuple(mats), verdicts, overall, inputs)


def _rel_err(m: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(m - ref) / max(np.linalg.norm(ref), 1e-300))


def _scalar_chain_verdict(rows: Sequence[np.ndarray], tol: LoewnerTolerance) -> Verdict:
    """Per-index scalar chain rows[0] <= rows[1] <= ...; each row has one entry per eigenvalue."""
    out = []
    for lo, hi in zip(rows[:-1], rows[1:]):
        k = int(np.argmin(hi - lo))
        out.append(judge(hi[k] - lo[k], max(abs(lo[k]), abs(hi[k])), tol))
    return combine(out)


def _pair_inputs(f: ScalarFunction | None, p: CommutingPositivePair, **extra) -> dict:
    out = {"pair": p.to_json(), **extra}
    if f is not None:
        out["f"] = f.name
    return out


def _grid(grid) -> np.ndarray:
    if isinstance(grid, int):
        return np.linspace(0.0, 1.0, grid)
    return np.array([check_weight(x) for x in grid], dtype=float)


def _commuting_powers(fa: np.ndarray, fb: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """Stack of FA^lam FB^(1-lam) from fresh decompositions of FA and FB."""
    da = eig_hermitian(fa)
    db = eig_hermitian(fb)
    pa = np.clip(da.lam, 0.0, None)[None, :] ** lams[:, None]
    pb = np.clip(db.lam, 0.0, None)[None, :] ** (1.0 - lams[:, None])
    left = np.einsum("ij,mj,kj->mik", da.u, pa, da.u.conj())
    right = np.einsum("ij,mj,kj->mik", db.u, pb, db.u.conj())
    return hermitian(left @ right)


def _stack_loewner(lhs: np.ndarray, rhs: np.ndarray, tol: LoewnerTolerance) -> Verdict:
    """Worst verdict of lhs[k] <= rhs[k] over a stack."""
    m = lhs.shape[0]
    lam, _ = eigh_stack(np.concatenate([hermitian(rhs - lhs), lhs, rhs]))
    scales = np.maximum(np.max(np.abs(lam[m:2 * m]), axis=1), np.max(np.abs(lam[2 * m:]), axis=1))
    return combine(judge(lam[k, 0], scales[k], tol) for k in range(m))


# ---------------------------------------------------------------------------
# Operator geometric convexity
# ---------------------------------------------------------------------------


def check_operator_geo_convex(f: ScalarFunction, p: CommutingPositivePair, grid=DEFAULT_GRID,
                              tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """f(A^lam B^(1-lam)) <= f(A)^lam f(B)^(1-lam) in Loewner order on a lam grid.

    Both routes are evaluated; ``details`` carries the scalar-route verdict
    and the matrix-vs-scalar disagreement.
    """
    lams = _grid(grid)
    w = weighted_geometric_stack(p, lams)
    lhs = funm_stack(f, w)
    rhs = _commuting_powers(funm(f, p.A), funm(f, p.B), lams)
    matrix_v = _stack_loewner(lhs, rhs, tol)

    gv = geometric_values(p.a, p.b, lams)
    s_lhs = f(gv)
    s_rhs = f(p.a)[None, :] ** lams[:, None] * f(p.b)[None, :] ** (1.0 - lams[:, None])
    scalar_v = _scalar_chain_verdict([s_lhs.ravel(), s_rhs.ravel()], tol)
    err = max(
        max(_rel_err(lhs[k], p.diag(s_lhs[k])) for k in range(len(lams))),
        max(_rel_err(rhs[k], p.diag(s_rhs[k])) for k in range(len(lams))),
    )
    v = matrix_v.with_details(scalar_status=scalar_v.status.value, scalar_margin=scalar_v.margin,
                              oracle_rel_err=err, grid=lams.tolist())
    if v.status is Status.VIOLATED:
        v = v.with_witness(_pair_inputs(f, p, grid=lams.tolist()))
    return v


# ---------------------------------------------------------------------------
# Chains for commuting pairs
# ---------------------------------------------------------------------------


def hh_operator_log_chain(f: ScalarFunction, p: CommutingPositivePair,
                          q: QuadratureSpec = DEFAULT_QUAD,
                          tol: LoewnerTolerance = DEFAULT_TOL) -> OperatorChainReport:
    """log f(sqrt(AB)) <= int_0^1 log f(A^t B^(1-t)) dt <= log sqrt(f(A) f(B))."""
    logf = fn.compose_log(f)
    t, wts = q.rule()
    left = funm(logf, weighted_geometric(p, 0.5))
    middle = hermitian(np.tensordot(wts, funm_stack(logf, weighted_geometric_stack(p, t)), axes=(0, 0)))
    fa, fb = f(p.a), f(p.b)
    right = funm(fn.get_function("log"), p.diag(np.sqrt(fa * fb)))

    s_left = np.log(f(np.sqrt(p.a) * np.sqrt(p.b)))
    s_mid = integrate_scalar(lambda x: np.log(f(geometric_values(p.a, p.b, x))), q)
    s_right = 0.5 * (np.log(fa) + np.log(fb))
    err = max(_rel_err(m, p.diag(s)) for m, s in
              ((left, s_left), (middle, s_mid), (right, s_right)))
    scalar_v = _scalar_chain_verdict([s_left, s_mid, s_right], tol)
    return operator_chain_report(
        ("log f(sqrt(AB))", "int log f(A^t B^(1-t))", "log sqrt(f(A)f(B))"),
        (left, middle, right), tol, _pair_inputs(f, p, quadrature=q.to_json()),
        oracle_rel_err=err, scalar_status=scalar_v.status.value, scalar_margin=scalar_v.margin,
        scalar_links=[s_left.tolist(), s_mid.tolist(), s_right.tolist()],
    )


def hh_operator_unlogged_chain(f: ScalarFunction, p: CommutingPositivePair,
                               q: QuadratureSpec = DEFAULT_QUAD,
                               tol: LoewnerTolerance = DEFAULT_TOL) -> OperatorChainReport:
    """f(sqrt(AB)) <= int_0^1 sqrt(f(A^t B^(1-t)) f(A^(1-t) B^t)) dt <= sqrt(f(A) f(B))."""
    t, wts = q.rule()
    left = funm(f, weighted_geometric(p, 0.5))
    ft = funm_stack(f, weighted_geometric_stack(p, t))
    fs = funm_stack(f, weighted_geometric_stack(p, 1.0 - t))
    roots = funm_stack(fn.get_function("sqrt"), hermitian(ft @ fs))
    middle = hermitian(np.tensordot(wts, roots, axes=(0, 0)))
    fa, fb = f(p.a), f(p.b)
    right = p.diag(np.sqrt(fa * fb))

    s_left = f(np.sqrt(p.a) * np.sqrt(p.b))
    s_mid = integrate_scalar(
        lambda x: np.sqrt(f(geometric_values(p.a, p.b, x)) * f(geometric_values(p.a, p.b, 1.0 - x))), q)
    s_right = np.sqrt(fa * fb)
    err = max(_rel_err(m, p.diag(s)) for m, s in
              ((left, s_left), (middle, s_mid), (right, s_right)))
    scalar_v = _scalar_chain_verdict([s_left, s_mid, s_right], tol)
    return operator_chain_report(
        ("f(sqrt(AB))", "int sqrt(f(A^t B^(1-t)) f(A^(1-t) B^t))", "sqrt(f(A)f(B))"),
        (left, middle, right), tol, _pair_inputs(f, p, quadrature=q.to_json()),
        oracle_rel_err=err, scalar_status=scalar_v.status.value, scalar_margin=scalar_v.margin,
        scalar_links=[s_left.tolist(), s_mid.tolist(), s_right.tolist()],
    )


def exp_special_chain(p: CommutingPositivePair, q: QuadratureSpec = DEFAULT_QUAD,
                      tol: LoewnerTolerance = DEFAULT_TOL) -> OperatorChainReport:
    """sqrt(AB) <= int_0^1 A^t B^(1-t) dt <= (A+B)/2, with the middle checked in closed form."""
    t, wts = q.rule()
    left = weighted_geometric(p, 0.5)
    middle = hermitian(np.tensordot(wts, weighted_geometric_stack(p, t), axes=(0, 0)))
    right = 0.5 * (p.A + p.B)
    closed = weighted_geometric_integral_closed_form(p)
    s_rows = [np.sqrt(p.a * p.b), log_mean_vec(p.a, p.b), 0.5 * (p.a + p.b)]
    err = max(_rel_err(m, p.diag(s)) for m, s in zip((left, middle, right), s_rows))
    scalar_v = _scalar_chain_verdict(s_rows, tol)
    return operator_chain_report(
        ("sqrt(AB)", "int A^t B^(1-t)", "(A+B)/2"), (left, middle, right), tol,
        _pair_inputs(None, p, quadrature=q.to_json()),
        closed_form_rel_err=_rel_err(middle, closed), oracle_rel_err=err,
        scalar_status=scalar_v.status.value, scalar_margin=scalar_v.margin,
    )


def inverted_exp_chain(p: CommutingPositivePair, tol: LoewnerTolerance = DEFAULT_TOL) -> OperatorChainReport:
    """Deliberately reversed claim (A+B)/2 <= sqrt(AB); a forced-violation hook for tests."""
    return operator_chain_report(("(A+B)/2", "sqrt(AB)"),
                                 (0.5 * (p.A + p.B), weighted_geometric(p, 0.5)), tol,
                                 _pair_inputs(None, p))


# ---------------------------------------------------------------------------
# Non-commuting chains
# ---------------------------------------------------------------------------


def operator_convex_hh_chain(f: ScalarFunction, a, b, q: QuadratureSpec = DEFAULT_QUAD,
                             tol: LoewnerTolerance = DEFAULT_TOL) -> OperatorChainReport:
    """Six-link Hermite-Hadamard chain for an operator convex f and arbitrary Hermitian A, B."""
    if not f.operator_convex:
        raise ValueError(f"{f.name} is not flagged operator convex")
    a = hermitian(as_matrix(a))
    b = hermitian(as_matrix(b))
    same_shape(a, b)
    t, wts = q.rule()
    fa, fb = funm(f, a), funm(f, b)
    f_mid = funm(f, 0.5 * (a + b))
    # 2 * int_{1/4}^{3/4} f(sA + (1-s)B) ds with s = 1/4 + t/2
    s = 0.25 + 0.5 * t
    inner = funm_stack(f, s[:, None, None] * a + (1.0 - s)[:, None, None] * b)
    link2 = hermitian(np.tensordot(wts, inner, axes=(0, 0)))
    link3 = 0.5 * (funm(f, 0.25 * (3 * a + b)) + funm(f, 0.25 * (a + 3 * b)))
    full = funm_stack(f, (1.0 - t)[:, None, None] * a + t[:, None, None] * b)
    link4 = hermitian(np.tensordot(wts, full, axes=(0, 0)))
    link6 = 0.5 * (fa + fb)
    link5 = 0.5 * (f_mid + link6)
    details = {}
    if f.name == "square_real":
        d = b - a
        closed = hermitian(a @ a + 0.5 * (a @ d + d @ a) + d @ d / 3.0)
        details["closed_form_rel_err"] = _rel_err(link4, closed)
    return operator_chain_report(
        ("f((A+B)/2)", "2 int_{1/4}^{3/4} f(tA+(1-t)B)", "[f((3A+B)/4)+f((A+3B)/4)]/2",
         "int_0^1 f((1-t)A+tB)", "[f((A+B)/2)+(f(A)+f(B))/2]/2", "(f(A)+f(B))/2"),
        (f_mid, link2, link3, link4, link5, link6), tol,
        {"f": f.name, "a": matrix_to_json(a), "b": matrix_to_json(b), "quadrature": q.to_json()},
        **details,
    )


def agm_inequality_check(a, b, nu: float, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """A^(1/2)(A^(-1/2) B A^(-1/2))^nu A^(1/2) <= (1-nu)A + nu B."""
    a = hermitian(as_matrix(a))
    b = hermitian(as_matrix(b))
    mean = agm_weighted_mean(a, b, nu)
    v = loewner_leq(mean, (1.0 - nu) * a + nu * b, tol).with_details(nu=float(nu))
    if v.status is Status.VIOLATED:
        v = v.with_witness({"a": matrix_to_json(a), "b": matrix_to_json(b), "nu": float(nu)})
    return v


# ---------------------------------------------------------------------------
# Closure properties
# ---------------------------------------------------------------------------

CLOSURE_KINDS = ("sum", "scalar_multiple", "product", "t_times_f", "norm_mcintosh")


def _sum_readings(f, g, p, lams, tol):
    fa, fb, ga, gb = funm(f, p.A), funm(f, p.B), funm(g, p.A), funm(g, p.B)
    lhs = _commuting_powers(fa, fb, lams) + _commuting_powers(ga, gb, lams)
    sa, sb = hermitian(fa + ga), hermitian(fb + gb)
    da, db = eig_hermitian(sa), eig_hermitian(sb)
    pow_a = np.stack([da.reconstruct(da.lam ** x) for x in lams])
    pow_b = np.stack([db.reconstruct(db.lam ** (1.0 - x)) for x in lams])
    literal = _stack_loewner(hermitian(lhs), hermitian(pow_a + pow_b), tol)
    multiplicative = _stack_loewner(hermitian(lhs), _commuting_powers(sa, sb, lams), tol)
    return literal, multiplicative


def closure_check(kind: str, f: ScalarFunction, g: ScalarFunction | None,
                  p: CommutingPositivePair, grid=DEFAULT_GRID, m: float = 2.0,
                  reading: str = "multiplicative",
                  tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """Closure of operator geometric convexity under algebra operations.

    ``kind="sum"`` evaluates two readings of the sum inequality: the literal
    ``(A+C)^a + (B+D)^(1-a)`` and the multiplicative ``(A+C)^a (B+D)^(1-a)``.
    Both are recorded in ``details``; ``reading`` selects which one sets the
    returned status. Neither is an asserted invariant.
    """
    lams = _grid(grid)
    if kind == "product":
        v = check_operator_geo_convex(fn.product(f, g), p, lams, tol)
    elif kind == "scalar_multiple":
        v = check_operator_geo_convex(fn.scaled(f, m), p, lams, tol)
    elif kind == "t_times_f":
        v = check_operator_geo_convex(fn.times_identity(f), p, lams, tol)
    elif kind == "norm_mcintosh":
        na = float(np.max(p.a))
        nb = float(np.max(p.b))
        w = weighted_geometric_stack(p, lams)
        lam, _ = eigh_stack(w)
        verdicts = [judge(na**x * nb ** (1 - x) - lam[k, -1], na**x * nb ** (1 - x), tol)
                    for k, x in enumerate(lams)]
        v = combine(verdicts)
    elif kind == "sum":
        literal, multiplicative = _sum_readings(f, g, p, lams, tol)
        chosen = literal if reading == "literal" else multiplicative
        v = chosen.with_details(reading=reading, literal=literal.to_dict(),
                                multiplicative=multiplicative.to_dict())
    else:
        raise ValueError(f"unknown closure kind {kind!r}; expected one of {CLOSURE_KINDS}")
    v = v.with_details(kind=kind)
    if v.status is Status.VIOLATED and v.witness is None:
        v = v.with_witness(_pair_inputs(f, p, kind=kind, g=g.name if g else None,
                                        grid=lams.tolist(), m=m, reading=reading))
    return v
