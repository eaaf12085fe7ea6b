"""Registry of campaign checks.

Each check has a generator producing a JSON-native instance
``{"operands": ..., "params": ...}`` from a trial's random stream, and a
runner mapping that instance to a :class:`Verdict`. The campaign always
runs the decoded JSON instance, so a witness file replays through exactly
the same code path that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import functions as fn
from . import generators as gen
from . import operator_hh as op
from . import scalar_hh as sc
from . import trace_ineq as tr
from .commuting_means import (
    DEFAULT_QUAD,
    CommutingPositivePair,
    QuadratureSpec,
    integrate_curve,
    weighted_geometric,
    weighted_geometric_integral_closed_form,
)
from .errors import ConfigError
from .linalg_core import (
    DEFAULT_TOL,
    LoewnerTolerance,
    Status,
    Verdict,
    combine,
    eig_hermitian,
    judge,
    matrix_from_json,
    matrix_to_json,
)

ORACLE_REL = 1e-10
# Products such as exp*cosh span ~1e8 over the default spectra; fresh
# decompositions of f(A) then lose that factor in relative accuracy.
CLOSURE_ORACLE_REL = 1e-6
CLOSED_FORM_REL = 1e-11
EIG_RESIDUAL = 1e-12
EXACT = LoewnerTolerance(rel=0.0, abs_floor=0.0)

ALPHAS = (-1.0, 0.3, 2.0)
BHATIA_R = (0.5, 1.0, 2.0)
AGM_NU = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class RunContext:
    tol: LoewnerTolerance = DEFAULT_TOL
    quad: QuadratureSpec = DEFAULT_QUAD
    spectra_range: tuple[float, float] = (0.1, 10.0)
    function_set: tuple[str, ...] | None = None


@dataclass(frozen=True)
class CheckDef:
    id: str
    generate: Callable[[np.random.Generator, int, int, RunContext], dict]
    run: Callable[[dict, RunContext], Verdict]
    default: bool = True
    description: str = ""


REGISTRY: dict[str, CheckDef] = {}


def register(id: str, generate, default: bool = True, description: str = ""):
    def deco(run):
        REGISTRY[id] = CheckDef(id, generate, run, default, description or (run.__doc__ or "").strip())
        return run
    return deco


def default_checks() -> list[str]:
    return [c for c, d in REGISTRY.items() if d.default]


def get_check(check_id: str) -> CheckDef:
    try:
        return REGISTRY[check_id]
    except KeyError:
        raise ConfigError(f"unknown check {check_id!r}") from None


# ---------------------------------------------------------------------------
# Operand coding
# ---------------------------------------------------------------------------


def _pair(ops: dict, key: str = "pair") -> CommutingPositivePair:
    return CommutingPositivePair.from_json(ops[key])


def _mat(ops: dict, key: str) -> np.ndarray:
    return matrix_from_json(ops[key])


def _mats(ops: dict, key: str) -> list[np.ndarray]:
    return [matrix_from_json(m) for m in ops[key]]


def _gate(v: Verdict, err: float, limit: float, cause: str) -> Verdict:
    """Downgrade Holds to Inconclusive when a cross-check disagreement exceeds ``limit``."""
    v = v.with_details(**{cause: err})
    if v.status is Status.HOLDS and not err <= limit:
        return Verdict(Status.INCONCLUSIVE, v.margin, v.scale, v.band, v.witness,
                       {**v.details, "cause": f"{cause} {err:.3g} > {limit:g}"})
    return v


def _accuracy(residual: float, bound: float, **details) -> Verdict:
    """Holds iff ``residual <= bound``; the margin is ``bound - residual``."""
    return judge(bound - residual, bound, EXACT, residual=residual, bound=bound, **details)


def _pick(names: tuple[str, ...], k: int) -> str:
    return names[k % len(names)]


def _scalar_names(ctx: RunContext) -> tuple[str, ...]:
    return tuple(ctx.function_set) if ctx.function_set else fn.SCALAR_BUILTINS


def _operator_names(ctx: RunContext) -> tuple[str, ...]:
    return tuple(ctx.function_set) if ctx.function_set else fn.OPERATOR_BUILTINS


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def g_hermitian(rng, n, k, ctx):
    return {"operands": {"h": matrix_to_json(gen.gen_hermitian(rng, n))}, "params": {}}


def g_two_complex(rng, n, k, ctx):
    return {"operands": {"a": matrix_to_json(gen.gen_complex(rng, n)),
                         "t": matrix_to_json(gen.gen_complex(rng, n))}, "params": {}}


def _interval(rng, ctx):
    lo, hi = ctx.spectra_range
    a, b = sorted(float(x) for x in gen.log_uniform(rng, lo, hi, 2))
    return a, b


def g_scalar(rng, n, k, ctx):
    a, b = _interval(rng, ctx)
    return {"operands": {"a": a, "b": b}, "params": {"f": _pick(_scalar_names(ctx), k)}}


def g_scalar_lambda(rng, n, k, ctx):
    inst = g_scalar(rng, n, k, ctx)
    inst["params"]["lambda"] = float(rng.uniform(0.0, 1.0))
    return inst


def g_pair(rng, n, k, ctx):
    return {"operands": {"pair": gen.gen_commuting_pair(rng, n, ctx.spectra_range).to_json()},
            "params": {}}


def g_pair_f(rng, n, k, ctx):
    inst = g_pair(rng, n, k, ctx)
    inst["params"]["f"] = _pick(_operator_names(ctx), k)
    return inst


def g_closure_product(rng, n, k, ctx):
    names = _operator_names(ctx)
    inst = g_pair(rng, n, k, ctx)
    inst["params"] = {"f": _pick(names, k), "g": _pick(names, k // len(names) + 1)}
    return inst


def g_closure_multiple(rng, n, k, ctx):
    inst = g_pair_f(rng, n, k, ctx)
    inst["params"]["m"] = float(gen.log_uniform(rng, 0.1, 10.0))
    return inst


def g_psd_two(rng, n, k, ctx):
    return {"operands": {"a": matrix_to_json(gen.gen_psd(rng, n, ctx.spectra_range)),
                         "b": matrix_to_json(gen.gen_psd(rng, n, ctx.spectra_range))},
            "params": {}}


def g_agm(rng, n, k, ctx):
    inst = g_psd_two(rng, n, k, ctx)
    inst["params"]["nu"] = _pick(AGM_NU, k)
    return inst


def g_operator_convex(rng, n, k, ctx):
    name = ("square_real", "inverse")[k % 2]
    if name == "square_real":
        a, b = gen.gen_hermitian(rng, n), gen.gen_hermitian(rng, n)
    else:
        a, b = gen.gen_psd(rng, n, ctx.spectra_range), gen.gen_psd(rng, n, ctx.spectra_range)
    return {"operands": {"a": matrix_to_json(a), "b": matrix_to_json(b)}, "params": {"f": name}}


def _g_three(identity_x: bool, params: Callable[[int], dict]):
    def g(rng, n, k, ctx):
        a = gen.gen_complex(rng, n)
        b = gen.gen_complex(rng, n)
        x = np.eye(n, dtype=complex) if identity_x else gen.gen_complex(rng, n)
        return {"operands": {"a": matrix_to_json(a), "x": matrix_to_json(x), "b": matrix_to_json(b)},
                "params": params(k)}
    return g


def g_dragomir_identity(rng, n, k, ctx):
    return {"operands": {"x": matrix_to_json(gen.gen_complex(rng, n))},
            "params": {"alpha": _pick(ALPHAS, k)}}


DANNAN_MAX_DIM = 6
DANNAN_MAX_PAIRS = 4


def g_dannan_block(rng, n, k, ctx):
    d = min(n, DANNAN_MAX_DIM)
    m = 1 + k % DANNAN_MAX_PAIRS
    s = [matrix_to_json(gen.gen_complex(rng, d)) for _ in range(m)]
    t = [matrix_to_json(gen.gen_complex(rng, d)) for _ in range(m)]
    return {"operands": {"s": s, "t": t}, "params": {}}


def g_dannan_positive(rng, n, k, ctx):
    """PSD lists; on even trials each S_i commutes with T_i so the product sub-chain is exercised."""
    d = min(n, DANNAN_MAX_DIM)
    m = 1 + (k // 2) % DANNAN_MAX_PAIRS
    s, t = [], []
    for _ in range(m):
        if k % 2 == 0:
            p = gen.gen_commuting_pair(rng, d, ctx.spectra_range)
            s.append(p.A)
            t.append(p.B)
        else:
            s.append(gen.gen_psd(rng, d, ctx.spectra_range))
            t.append(gen.gen_psd(rng, d, ctx.spectra_range))
    return {"operands": {"s": [matrix_to_json(x) for x in s], "t": [matrix_to_json(x) for x in t]},
            "params": {"commuting": k % 2 == 0}}


# ---------------------------------------------------------------------------
# Linear algebra and quadrature accuracy
# ---------------------------------------------------------------------------


@register("eig_reconstruction", g_hermitian)
def r_eig(inst, ctx):
    """Jacobi reconstruction residual and unitarity of the eigenbasis."""
    h = _mat(inst["operands"], "h")
    d = eig_hermitian(h)
    res = float(np.linalg.norm(d.reconstruct(d.lam) - h))
    bound = EIG_RESIDUAL * max(1.0, float(np.linalg.norm(h)))
    n = h.shape[0]
    unit = float(np.linalg.norm(d.u @ d.u.conj().T - np.eye(n)))
    return combine([_accuracy(res, bound), _accuracy(unit, EIG_RESIDUAL * n)],
                   residual=res, unitarity=unit)


@register("quadrature_oracle", g_pair)
def r_quadrature(inst, ctx):
    """Quadrature of A^t B^(1-t) over [0, 1] against U diag(L(a_i, b_i)) U*."""
    p = _pair(inst["operands"])
    approx = integrate_curve(lambda t: weighted_geometric(p, t), ctx.quad)
    closed = weighted_geometric_integral_closed_form(p)
    scale = float(np.linalg.norm(closed))
    return _accuracy(float(np.linalg.norm(approx - closed)), CLOSED_FORM_REL * scale)


# ---------------------------------------------------------------------------
# Scalar checks
# ---------------------------------------------------------------------------


def _ab_f(inst):
    ops, params = inst["operands"], inst["params"]
    return fn.get_function(params["f"]), ops["a"], ops["b"]


@register("scalar_geo_convex", g_scalar)
def r_scalar_geo(inst, ctx):
    """f(a^t b^(1-t)) <= f(a)^t f(b)^(1-t) on a t grid."""
    return sc.check_geo_convex(*_ab_f(inst))


@register("hh_chain_basic", g_scalar)
def r_hh_basic(inst, ctx):
    """Five-link scalar chain from f(sqrt(ab)) to (f(a)+f(b))/2."""
    return sc.hh_chain_basic(*_ab_f(inst), ctx.quad, ctx.tol).verdict


@register("hh_refinement", g_scalar_lambda)
def r_hh_refinement(inst, ctx):
    """Pointwise and integrated refinement of the geometric midpoint bound."""
    f, a, b = _ab_f(inst)
    point = sc.hh_refinement(f, a, b, inst["params"]["lambda"], ctx.tol).verdict
    integrated = sc.hh_refinement_integrated(f, a, b, ctx.quad, ctx.tol).verdict
    return combine([point, integrated], pointwise=point, integrated=integrated)


@register("hh_quarter_chain", g_scalar)
def r_hh_quarter(inst, ctx):
    """Five-link chain through the quarter points."""
    return sc.hh_quarter_chain(*_ab_f(inst), ctx.quad, ctx.tol).verdict


@register("log_exp_convexity", g_scalar)
def r_log_exp(inst, ctx):
    """Midpoint convexity of log o f o exp."""
    return sc.log_exp_convexity_check(*_ab_f(inst))


# ---------------------------------------------------------------------------
# Operator checks
# ---------------------------------------------------------------------------


def _pf(inst):
    return fn.get_function(inst["params"]["f"]), _pair(inst["operands"])


def _oracle_gated(report) -> Verdict:
    v = report.overall
    if "closed_form_rel_err" in v.details:
        v = _gate(v, v.details["closed_form_rel_err"], CLOSED_FORM_REL, "closed_form_rel_err")
    return _gate(v, v.details["oracle_rel_err"], ORACLE_REL, "oracle_rel_err")


@register("operator_geo_convex", g_pair_f)
def r_op_geo(inst, ctx):
    """Loewner-order geometric convexity for commuting pairs."""
    f, p = _pf(inst)
    v = op.check_operator_geo_convex(f, p, tol=ctx.tol)
    return _gate(v, v.details["oracle_rel_err"], ORACLE_REL, "oracle_rel_err")


@register("hh_operator_log_chain", g_pair_f)
def r_op_log(inst, ctx):
    """log f(sqrt(AB)) <= int log f(A^t B^(1-t)) <= log sqrt(f(A)f(B))."""
    f, p = _pf(inst)
    return _oracle_gated(op.hh_operator_log_chain(f, p, ctx.quad, ctx.tol))


@register("hh_operator_unlogged_chain", g_pair_f)
def r_op_unlogged(inst, ctx):
    """f(sqrt(AB)) <= int sqrt(f(A^t B^(1-t)) f(A^(1-t) B^t)) <= sqrt(f(A)f(B))."""
    f, p = _pf(inst)
    return _oracle_gated(op.hh_operator_unlogged_chain(f, p, ctx.quad, ctx.tol))


@register("exp_special_chain", g_pair)
def r_exp_special(inst, ctx):
    """sqrt(AB) <= int A^t B^(1-t) <= (A+B)/2."""
    return _oracle_gated(op.exp_special_chain(_pair(inst["operands"]), ctx.quad, ctx.tol))


@register("inverted_exp_chain", g_pair, default=False)
def r_inverted(inst, ctx):
    """Deliberately false (A+B)/2 <= sqrt(AB); test hook for witness handling."""
    return op.inverted_exp_chain(_pair(inst["operands"]), ctx.tol).overall


@register("operator_convex_chain", g_operator_convex)
def r_op_convex(inst, ctx):
    """Six-link chain for operator convex f on non-commuting pairs."""
    ops = inst["operands"]
    f = fn.get_function(inst["params"]["f"])
    report = op.operator_convex_hh_chain(f, _mat(ops, "a"), _mat(ops, "b"), ctx.quad, ctx.tol)
    v = report.overall
    if "closed_form_rel_err" in v.details:
        v = _gate(v, v.details["closed_form_rel_err"], CLOSED_FORM_REL, "closed_form_rel_err")
    return v


@register("agm_inequality", g_agm)
def r_agm(inst, ctx):
    """Weighted geometric mean below the weighted arithmetic mean."""
    ops = inst["operands"]
    return op.agm_inequality_check(_mat(ops, "a"), _mat(ops, "b"), inst["params"]["nu"], ctx.tol)


def _closure(kind: str, reading: str = "multiplicative"):
    def run(inst, ctx):
        params = inst["params"]
        f = fn.get_function(params["f"]) if "f" in params else None
        g = fn.get_function(params["g"]) if "g" in params else None
        v = op.closure_check(kind, f, g, _pair(inst["operands"]), m=params.get("m", 2.0),
                             reading=reading, tol=ctx.tol)
        if "oracle_rel_err" in v.details:
            v = _gate(v, v.details["oracle_rel_err"], CLOSURE_ORACLE_REL, "oracle_rel_err")
        return v
    run.__doc__ = f"Closure of operator geometric convexity: {kind}."
    return run


register("closure_product", g_closure_product)(_closure("product"))
register("closure_scalar_multiple", g_closure_multiple)(_closure("scalar_multiple"))
register("closure_t_times_f", g_pair_f)(_closure("t_times_f"))
register("closure_norm_mcintosh", g_pair)(_closure("norm_mcintosh"))
# Exploratory: the two readings of the sum property are recorded, not asserted.
register("closure_sum_literal", g_closure_product, default=False)(_closure("sum", "literal"))
register("closure_sum_multiplicative", g_closure_product, default=False)(
    _closure("sum", "multiplicative"))


# ---------------------------------------------------------------------------
# Trace checks
# ---------------------------------------------------------------------------


@register("trace_axioms", g_two_complex)
def r_trace_axioms(inst, ctx):
    """Trace identities and the Schatten-1 / operator-norm duality bound."""
    ops = inst["operands"]
    return tr.trace_axioms_check(_mat(ops, "a"), _mat(ops, "t"))


@register("psd_trace_bounds", g_psd_two)
def r_psd_bounds(inst, ctx):
    """Tr(AB) <= Tr(A)Tr(B) and companions for PSD A, B."""
    ops = inst["operands"]
    return tr.psd_trace_bounds_check(_mat(ops, "a"), _mat(ops, "b"), ctx.tol)


@register("psd_trace_product_chain", g_pair)
def r_psd_chain(inst, ctx):
    """sqrt(Tr(AB)) <= Tr(sqrt(AB)) <= sqrt(Tr(A)Tr(B))."""
    return tr.psd_trace_product_chain(_pair(inst["operands"]), ctx.tol).verdict


@register("trace_geo_convex", g_pair)
def r_trace_geo(inst, ctx):
    """Tr(A^t B^(1-t)) <= (Tr A)^t (Tr B)^(1-t)."""
    return tr.trace_geo_convex_check(_pair(inst["operands"]), tol=ctx.tol)


@register("trace_log_chain", g_pair)
def r_trace_log(inst, ctx):
    """Log-trace chain for a commuting pair."""
    return tr.trace_log_hh_chain(_pair(inst["operands"]), ctx.quad, ctx.tol).verdict


@register("trace_log_chain_squared", g_pair)
def r_trace_log_sq(inst, ctx):
    """Squared log-trace chain for a commuting pair."""
    return tr.trace_log_hh_chain_squared(_pair(inst["operands"]), ctx.quad, ctx.tol).verdict


def _abx(inst):
    ops = inst["operands"]
    return _mat(ops, "a"), _mat(ops, "x"), _mat(ops, "b")


def _bhatia(inst, ctx):
    a, x, b = _abx(inst)
    return tr.bhatia_davis_check(a, x, b, inst["params"]["r"], ctx.tol)


def _cauchy(inst, ctx):
    a, x, b = _abx(inst)
    return tr.trace_cauchy_schwarz(a, b, x, ctx.tol)


def _dragomir(inst, ctx):
    a, x, b = _abx(inst)
    return tr.dragomir_alpha_check(a, b, x, inst["params"]["alpha"], ctx.tol)


_BD = "(Tr|A* X B|^r)^2 <= Tr|A A* X|^r Tr|X B B*|^r"
_CS = "|Tr(A B* X)|^2 <= Tr|A A* X*| Tr|X* B B*|"
register("bhatia_davis", _g_three(False, lambda k: {"r": _pick(BHATIA_R, k)}),
         description=_BD + ", general X.")(_bhatia)
register("bhatia_davis_xi", _g_three(True, lambda k: {"r": _pick(BHATIA_R, k)}),
         description=_BD + ", X = I.")(_bhatia)
register("trace_cauchy_schwarz", _g_three(False, lambda k: {}), description=_CS + ", general X.")(_cauchy)
register("trace_cauchy_schwarz_xi", _g_three(True, lambda k: {}),
         description=_CS + ", X = I, with the exact Cauchy-Schwarz form.")(_cauchy)
register("dragomir_alpha", _g_three(False, lambda k: {"alpha": _pick(ALPHAS, k)}),
         description="|Tr(A B* |X|)|^2 <= Tr(|A*|^2 |X|^(2 alpha)) Tr(|B*|^2 |X|^(2(1-alpha))).")(_dragomir)


@register("dragomir_alpha_identity", g_dragomir_identity)
def r_dragomir_identity(inst, ctx):
    """|Tr X|^2 <= Tr|X|^(2 alpha) Tr|X|^(2(1-alpha))."""
    return tr.dragomir_identity_check(_mat(inst["operands"], "x"), inst["params"]["alpha"], ctx.tol)


@register("dannan_block", g_dannan_block)
def r_dannan_block(inst, ctx):
    """Sum-of-products Cauchy-Schwarz, direct and through the block-row embedding."""
    ops = inst["operands"]
    v = tr.dannan_block_check(_mats(ops, "s"), _mats(ops, "t"), ctx.tol)
    v = _gate(v, v.details["route_rel_diff"], CLOSED_FORM_REL, "route_rel_diff")
    if v.details["block_status"] == Status.VIOLATED.value:
        v = Verdict(Status.VIOLATED, v.margin, v.scale, v.band, v.witness, v.details)
    return v


@register("dannan_positive", g_dannan_positive)
def r_dannan_positive(inst, ctx):
    """Sum-of-products bound for PSD lists, with the product sub-chain when applicable."""
    ops = inst["operands"]
    return tr.dannan_positive_check(_mats(ops, "s"), _mats(ops, "t"), ctx.tol)


def run_instance(check_id: str, inst: dict, ctx: RunContext = RunContext()) -> Verdict:
    return get_check(check_id).run(inst, ctx)
