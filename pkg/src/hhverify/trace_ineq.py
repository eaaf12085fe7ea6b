"""Trace functional inequalities for (not necessarily commuting) matrices.

Every check returns a :class:`Verdict` whose ``details`` carry ``lhs`` and
``rhs`` so a report can be replayed and compared digit for digit. In finite
dimension every operator is trace class; the Schatten-1 / operator norm
distinction is kept only so the checks read like their statements.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .commuting_means import (
    DEFAULT_QUAD,
    CommutingPositivePair,
    QuadratureSpec,
    check_weight,
    integrate_scalar,
    weighted_geometric,
    weighted_geometric_stack,
)
from .errors import DimensionMismatch, EmptyList, SingularX
from .linalg_core import (
    DEFAULT_TOL,
    INF,
    LoewnerTolerance,
    Status,
    Verdict,
    abs_op,
    abs_power,
    as_matrix,
    combine,
    eig_hermitian,
    hermitian,
    judge,
    judge_leq,
    matrix_to_json,
    same_shape,
    schatten_norm,
    singular_values,
    sqrtm_psd,
    trace,
    trace_abs_power,
)
from .scalar_hh import ChainReport, chain_report

IDENTITY_TOL = LoewnerTolerance(rel=1e-11, abs_floor=0.0)


def _equal(x: complex, y: complex, scale: float, label: str) -> Verdict:
    """Identity x == y as a verdict: margin is -|x - y|, band 1e-11 relative."""
    return judge(-abs(x - y), scale, IDENTITY_TOL, identity=label, lhs=x, rhs=y)


def _witness(v: Verdict, **operands) -> Verdict:
    if v.status is not Status.VIOLATED:
        return v
    payload = {k: (matrix_to_json(x) if isinstance(x, np.ndarray) else x) for k, x in operands.items()}
    return v.with_witness(payload)


def _is_identity(x: np.ndarray) -> bool:
    return bool(np.array_equal(x, np.eye(x.shape[0])))


# ---------------------------------------------------------------------------
# Trace properties
# ---------------------------------------------------------------------------


def trace_axioms_check(a, t) -> Verdict:
    """Tr(A*) = conj Tr(A); Tr(AT) = Tr(TA); |Tr(AT)| <= |A|_1 |T|; Tr(AB) = Tr(BA) with B = T*."""
    a, t = as_matrix(a), as_matrix(t)
    same_shape(a, t)
    scale = float(np.linalg.norm(a) * np.linalg.norm(t))
    tr_at, tr_ta = trace(a @ t), trace(t @ a)
    b = t.conj().T
    checks = [
        _equal(trace(a.conj().T), trace(a).conjugate(), float(np.linalg.norm(a)) * math.sqrt(a.shape[0]),
               "Tr(A*) = conj Tr(A)"),
        _equal(tr_at, tr_ta, scale, "Tr(AT) = Tr(TA)"),
        judge_leq(abs(tr_at), schatten_norm(a, 1) * schatten_norm(t, INF)),
        _equal(trace(a @ b), trace(b @ a), scale, "Tr(AB) = Tr(BA)"),
    ]
    return _witness(combine(checks, parts=checks), a=a, t=t)


def psd_trace_bounds_check(a, b, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """For PSD A, B: Tr(AB) <= Tr(A)Tr(B), its square-root form, and Tr(A^2) <= (Tr A)^2.

    The last claim is the readable form of the squared-trace bound used for
    the squared log-trace chain.
    """
    a, b = hermitian(as_matrix(a)), hermitian(as_matrix(b))
    same_shape(a, b)
    tab = trace(a @ b).real
    ta, tb = trace(a).real, trace(b).real
    checks = [
        judge_leq(tab, ta * tb, tol, claim="Tr(AB) <= Tr(A)Tr(B)"),
        judge_leq(math.sqrt(max(tab, 0.0)), math.sqrt(ta * tb), tol,
                  claim="sqrt(Tr(AB)) <= sqrt(Tr(A)Tr(B))"),
        judge_leq(trace(a @ a).real, ta * ta, tol, claim="Tr(A^2) <= (Tr A)^2"),
    ]
    return _witness(combine(checks, parts=checks), a=a, b=b)


def psd_trace_product_chain(p: CommutingPositivePair, tol: LoewnerTolerance = DEFAULT_TOL) -> ChainReport:
    """sqrt(Tr(AB)) <= Tr(sqrt(AB)) <= sqrt(Tr(A) Tr(B)) for a commuting PSD pair."""
    ab = hermitian(p.A @ p.B)
    tab = trace(ab).real
    links = (math.sqrt(max(tab, 0.0)), trace(sqrtm_psd(ab)).real,
             math.sqrt(trace(p.A).real * trace(p.B).real))
    return chain_report(("sqrt(Tr(AB))", "Tr(sqrt(AB))", "sqrt(Tr(A)Tr(B))"), links, tol,
                        {"pair": p.to_json()})


def trace_geo_convex_check(p: CommutingPositivePair, grid=9, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """Tr(A^t B^(1-t)) <= (Tr A)^t (Tr B)^(1-t) on a t grid."""
    ts = np.linspace(0.0, 1.0, grid) if isinstance(grid, int) else np.array([check_weight(x) for x in grid])
    ta, tb = trace(p.A).real, trace(p.B).real
    stack = weighted_geometric_stack(p, ts)
    lhs = np.trace(stack, axis1=1, axis2=2).real
    checks = [judge_leq(lhs[k], ta**t * tb ** (1 - t), tol, t=float(t)) for k, t in enumerate(ts)]
    v = combine(checks, grid=ts.tolist())
    return v.with_witness({"pair": p.to_json(), "grid": ts.tolist()}) if v.status is Status.VIOLATED else v


def trace_log_hh_chain(p: CommutingPositivePair, q: QuadratureSpec = DEFAULT_QUAD,
                       tol: LoewnerTolerance = DEFAULT_TOL) -> ChainReport:
    """log Tr(sqrt(AB)) <= int_0^1 log Tr(A^t B^(1-t)) dt <= (log Tr A + log Tr B)/2."""
    left = math.log(trace(weighted_geometric(p, 0.5)).real)
    middle = integrate_scalar(
        lambda t: np.log(np.trace(weighted_geometric_stack(p, t), axis1=1, axis2=2).real), q)
    right = 0.5 * (math.log(trace(p.A).real) + math.log(trace(p.B).real))
    return chain_report(("log Tr(sqrt(AB))", "int log Tr(A^t B^(1-t))", "log sqrt(Tr(A)Tr(B))"),
                        (left, middle, right), tol, {"pair": p.to_json(), "quadrature": q.to_json()})


def trace_log_hh_chain_squared(p: CommutingPositivePair, q: QuadratureSpec = DEFAULT_QUAD,
                               tol: LoewnerTolerance = DEFAULT_TOL) -> ChainReport:
    """log Tr(AB) <= int_0^1 log Tr(A^(2t) B^(2(1-t))) dt <= log(Tr(A) Tr(B))."""
    sq = CommutingPositivePair(p.u, p.a**2, p.b**2)
    left = math.log(trace(hermitian(p.A @ p.B)).real)
    middle = integrate_scalar(
        lambda t: np.log(np.trace(weighted_geometric_stack(sq, t), axis1=1, axis2=2).real), q)
    right = math.log(trace(p.A).real * trace(p.B).real)
    return chain_report(("log Tr(AB)", "int log Tr(A^2t B^2(1-t))", "log(Tr(A)Tr(B))"),
                        (left, middle, right), tol, {"pair": p.to_json(), "quadrature": q.to_json()})


# ---------------------------------------------------------------------------
# Schatten-1 and Cauchy-Schwarz type bounds
# ---------------------------------------------------------------------------


def bhatia_davis_check(a, x, b, r: float, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """(Tr|A* X B|^r)^2 <= Tr|A A* X|^r * Tr|X B B*|^r.

    r = 0 uses the spectral projection convention: Tr|M|^0 is the number of
    nonzero singular values.
    """
    a, x, b = as_matrix(a), as_matrix(x), as_matrix(b)
    same_shape(a, x, b)
    if r < 0:
        raise ValueError("r must be nonnegative")
    lhs = trace_abs_power(a.conj().T @ x @ b, r) ** 2
    rhs = trace_abs_power(a @ a.conj().T @ x, r) * trace_abs_power(x @ b @ b.conj().T, r)
    v = judge_leq(lhs, rhs, tol, r=float(r), zero_power_convention="projection" if r == 0 else None)
    return _witness(v, a=a, x=x, b=b, r=float(r))


def trace_cauchy_schwarz(a, b, x=None, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """|Tr(A B* X)|^2 <= Tr|A A* X*| * Tr|X* B B*|.

    With X = I the exact Cauchy-Schwarz form |Tr(AB*)|^2 <= Tr(AA*) Tr(BB*)
    is checked as well and its values are reported under ``cs_lhs``/``cs_rhs``.
    """
    a, b = as_matrix(a), as_matrix(b)
    x = np.eye(a.shape[0], dtype=np.complex128) if x is None else as_matrix(x)
    same_shape(a, b, x)
    bs, xs = b.conj().T, x.conj().T
    lhs = abs(trace(a @ bs @ x)) ** 2
    rhs = schatten_norm(a @ a.conj().T @ xs, 1) * schatten_norm(xs @ b @ bs, 1)
    checks = [judge_leq(lhs, rhs, tol)]
    extra = {}
    if _is_identity(x):
        cs_lhs = abs(trace(a @ bs)) ** 2
        cs_rhs = trace(a @ a.conj().T).real * trace(b @ bs).real
        checks.append(judge_leq(cs_lhs, cs_rhs, tol))
        extra = {"cs_lhs": cs_lhs, "cs_rhs": cs_rhs}
    v = combine(checks, lhs=lhs, rhs=rhs, **extra)
    return _witness(v, a=a, b=b, x=x)


def _check_alpha_gate(x: np.ndarray, alpha: float) -> None:
    if 0.0 <= alpha <= 1.0:
        return
    sig = singular_values(x)
    if sig[-1] <= 1e-12 * sig[0]:
        raise SingularX(f"alpha={alpha} needs nonsingular |X|; smallest singular value {sig[-1]:.3g}")


def dragomir_alpha_check(a, b, x, alpha: float, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """|Tr(A B* |X|)|^2 <= Tr(|A*|^2 |X|^(2 alpha)) * Tr(|B*|^2 |X|^(2(1-alpha))) for real alpha.

    Powers of |X| come from the decomposition of X*X; for alpha in [0, 1]
    zero singular values use 0^s = 0 (s > 0) and 0^0 = 1.
    """
    a, b, x = as_matrix(a), as_matrix(b), as_matrix(x)
    same_shape(a, b, x)
    alpha = float(alpha)
    _check_alpha_gate(x, alpha)
    d = eig_hermitian(x.conj().T @ x)
    lam = np.clip(d.lam, 0.0, None)
    absx = d.reconstruct(np.sqrt(lam))
    pow_a = d.reconstruct(np.power(lam, alpha))
    pow_b = d.reconstruct(np.power(lam, 1.0 - alpha))
    lhs = abs(trace(a @ b.conj().T @ absx)) ** 2
    rhs = trace(a @ a.conj().T @ pow_a).real * trace(b @ b.conj().T @ pow_b).real
    v = judge_leq(lhs, rhs, tol, alpha=alpha)
    return _witness(v, a=a, b=b, x=x, alpha=alpha)


def dragomir_identity_check(x, alpha: float, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """|Tr X|^2 <= Tr(|X|^(2 alpha)) * Tr(|X|^(2(1-alpha)))."""
    x = as_matrix(x)
    alpha = float(alpha)
    _check_alpha_gate(x, alpha)
    sig = singular_values(x)
    lhs = abs(trace(x)) ** 2
    rhs = float(np.sum(np.power(sig, 2 * alpha))) * float(np.sum(np.power(sig, 2 * (1 - alpha))))
    v = judge_leq(lhs, rhs, tol, alpha=alpha)
    return _witness(v, x=x, alpha=alpha)


# ---------------------------------------------------------------------------
# Sums of products
# ---------------------------------------------------------------------------


def _lists(s: Sequence, t: Sequence) -> tuple[list[np.ndarray], list[np.ndarray]]:
    if len(s) == 0 or len(t) == 0:
        raise EmptyList("operand lists must be nonempty")
    if len(s) != len(t):
        raise DimensionMismatch(f"list lengths differ: {len(s)} vs {len(t)}")
    s = [as_matrix(m) for m in s]
    t = [as_matrix(m) for m in t]
    same_shape(*s, *t)
    return s, t


def block_row(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Square (k*d) matrix whose first block row is [M_1 ... M_k], zero elsewhere."""
    k, d = len(mats), mats[0].shape[0]
    out = np.zeros((k * d, k * d), dtype=np.complex128)
    out[:d, :] = np.hstack(mats)
    return out


def dannan_block_check(s: Sequence, t: Sequence, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """|Tr(sum S_i T_i*)|^2 <= Tr(sum S_i S_i*) * Tr(sum T_i T_i*).

    Evaluated directly and through the block-row embedding followed by the
    X = I trace Cauchy-Schwarz check; ``details["route_rel_diff"]`` is the
    larger relative disagreement of the two routes.
    """
    s, t = _lists(s, t)
    lhs = abs(trace(sum(si @ ti.conj().T for si, ti in zip(s, t)))) ** 2
    rhs = (trace(sum(si @ si.conj().T for si in s)).real
           * trace(sum(ti @ ti.conj().T for ti in t)).real)
    block = trace_cauchy_schwarz(block_row(s), block_row(t), None, tol)
    b_lhs, b_rhs = block.details["cs_lhs"], block.details["cs_rhs"]
    diff = max(abs(lhs - b_lhs) / max(abs(lhs), abs(rhs), 1e-300),
               abs(rhs - b_rhs) / max(abs(rhs), 1e-300))
    v = judge_leq(lhs, rhs, tol, block_lhs=b_lhs, block_rhs=b_rhs, route_rel_diff=diff,
                  block_status=block.status.value)
    return _witness(v, s=[matrix_to_json(m) for m in s], t=[matrix_to_json(m) for m in t])


def _is_psd_product(m: np.ndarray, tol: LoewnerTolerance) -> bool:
    norm = float(np.linalg.norm(m))
    if np.linalg.norm(m - m.conj().T) > 1e-12 * max(norm, 1.0):
        return False
    return eig_hermitian(hermitian(m)).lam[0] >= -tol.band(norm)


def dannan_positive_check(s: Sequence, t: Sequence, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """(Tr sum S_i T_i)^2 <= Tr(sum S_i^2) * Tr(sum T_i^2) for PSD S_i, T_i.

    When every S_i T_i is verified PSD, also Tr((sum S_i T_i)^2) <= (Tr sum S_i T_i)^2;
    otherwise that sub-claim is reported as Skipped.
    """
    s, t = _lists(s, t)
    s = [hermitian(m) for m in s]
    t = [hermitian(m) for m in t]
    prods = [si @ ti for si, ti in zip(s, t)]
    total = sum(prods)
    tr_total = trace(total).real
    main = judge_leq(tr_total**2, trace(sum(si @ si for si in s)).real * trace(sum(ti @ ti for ti in t)).real,
                     tol)
    if all(_is_psd_product(m, tol) for m in prods):
        pd = judge_leq(trace(total @ total).real, tr_total**2, tol)
    else:
        pd = Verdict(Status.SKIPPED, 0.0, details={"reason": "some S_i T_i is not PSD"})
    v = combine([main, pd], lhs=main.details["lhs"], rhs=main.details["rhs"], pd_chain=pd.to_dict())
    return _witness(v, s=[matrix_to_json(m) for m in s], t=[matrix_to_json(m) for m in t])
