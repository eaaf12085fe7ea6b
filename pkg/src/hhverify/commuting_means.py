"""Commuting positive pairs, weighted geometric products, the logarithmic
mean, and composite Gauss-Legendre quadrature of matrix-valued curves."""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    BadWeight,
    DimensionMismatch,
    IllConditionedWarning,
    NotPositive,
    NotPositiveDefinite,
    NotUnitary,
    QuadratureFailure,
)
from .linalg_core import (
    as_matrix,
    eig_hermitian,
    eigh_stack,
    hermitian,
    is_unitary,
    matrix_from_json,
    matrix_to_json,
    same_shape,
)

COND_CAP = 1e8


# ---------------------------------------------------------------------------
# Commuting pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CommutingPositivePair:
    """A = U diag(a) U*, B = U diag(b) U* sharing the eigenbasis U."""

    u: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def _materialize(self, vals) -> np.ndarray:
        return hermitian((self.u * vals) @ self.u.conj().T)

    @functools.cached_property
    def A(self) -> np.ndarray:
        return self._materialize(self.a)

    @functools.cached_property
    def B(self) -> np.ndarray:
        return self._materialize(self.b)

    def diag(self, vals) -> np.ndarray:
        """U diag(vals) U* in the shared basis."""
        return self._materialize(np.asarray(vals, dtype=float))

    def swapped(self) -> "CommutingPositivePair":
        return CommutingPositivePair(self.u, self.b, self.a)

    def to_json(self) -> dict:
        return {"u": matrix_to_json(self.u), "a": self.a.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_json(cls, obj: dict, strict: bool = True) -> "CommutingPositivePair":
        return make_pair(matrix_from_json(obj["u"]), obj["a"], obj["b"], strict=strict)


def make_pair(u, a, b, strict: bool = True) -> CommutingPositivePair:
    """Build a commuting pair from a unitary and two eigenvalue vectors.

    With ``strict=False`` zero eigenvalues are allowed (PSD pair).
    """
    u = as_matrix(u)
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    if a.shape != (u.shape[0],) or b.shape != a.shape:
        raise DimensionMismatch("eigenvalue vectors must match the unitary's dimension")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("eigenvalues must be finite")
    low = min(a.min(), b.min())
    if (strict and low <= 0) or low < 0:
        raise NotPositive(f"eigenvalue {low!r} is not positive")
    if not is_unitary(u):
        raise NotUnitary("basis matrix is not unitary to 1e-12")
    a.setflags(write=False)
    b.setflags(write=False)
    return CommutingPositivePair(u, a, b)


def check_weight(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise BadWeight(f"weight {lam} outside [0, 1]")
    return lam


def geometric_values(a, b, lam) -> np.ndarray:
    """Per-eigenvalue a^lam b^(1-lam); ``lam`` may be an array (broadcast on a new leading axis)."""
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        return np.power(a, lam) * np.power(b, 1.0 - lam)
    lam = lam[:, None]
    return np.power(a, lam) * np.power(b, 1.0 - lam)


def weighted_geometric(p: CommutingPositivePair, lam: float) -> np.ndarray:
    """A^lam B^(1-lam) = U diag(a_i^lam b_i^(1-lam)) U*."""
    lam = check_weight(lam)
    return p.diag(geometric_values(p.a, p.b, lam))


def weighted_geometric_stack(p: CommutingPositivePair, lams) -> np.ndarray:
    vals = geometric_values(p.a, p.b, lams)
    return hermitian(np.einsum("ij,mj,kj->mik", p.u, vals, p.u.conj()))


# ---------------------------------------------------------------------------
# Logarithmic mean
# ---------------------------------------------------------------------------


def log_mean(a: float, b: float) -> float:
    """L(a, b) = (b - a) / (ln b - ln a), with L(a, a) = a.

    Evaluated as ``a * x / log1p(x)`` with ``x = (b - a)/a`` so that nearly
    equal arguments keep full relative accuracy.
    """
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise NotPositive(f"log_mean needs positive arguments, got ({a}, {b})")
    if a > b:
        a, b = b, a
    if b - a <= 1e-14 * b:
        return 0.5 * (a + b)
    x = (b - a) / a
    return a * x / math.log1p(x)


def log_mean_vec(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise NotPositive("log_mean needs positive arguments")
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    near = hi - lo <= 1e-14 * hi
    x = np.where(near, 1.0, (hi - lo) / lo)
    return np.where(near, 0.5 * (lo + hi), lo * x / np.log1p(x))


def weighted_geometric_integral_closed_form(p: CommutingPositivePair) -> np.ndarray:
    """Closed form of the integral of A^t B^(1-t) over [0, 1]: U diag(L(a_i, b_i)) U*."""
    return p.diag(log_mean_vec(p.a, p.b))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule on [0, 1]."""

    panels: int = 8
    nodes_per_panel: int = 8

    def __post_init__(self):
        if self.panels < 1 or self.nodes_per_panel < 1:
            raise ValueError("panels and nodes_per_panel must be positive")
        if self.panels * self.nodes_per_panel < 4:
            raise ValueError("quadrature needs at least 4 nodes in total")

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        return _composite_rule(self.panels, self.nodes_per_panel)

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.panels, self.nodes_per_panel)

    def to_json(self) -> dict:
        return {"panels": self.panels, "nodes_per_panel": self.nodes_per_panel}


@functools.lru_cache(maxsize=32)
def _composite_rule(panels: int, npp: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(npp)
    h = 1.0 / panels
    left = np.arange(panels) * h
    nodes = (left[:, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * w, panels)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


DEFAULT_QUAD = QuadratureSpec()


def _finite_or_fail(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise QuadratureFailure("integrand is not finite at every quadrature node")
    return values


def integrate_scalar(g: Callable[[np.ndarray], np.ndarray], q: QuadratureSpec = DEFAULT_QUAD):
    """Integral over [0, 1] of a vectorized integrand ``g(t_array)``.

    ``g`` returns shape (m,) or (m, ...) for m nodes; the result drops the
    node axis.
    """
    t, w = q.rule()
    vals = _finite_or_fail(np.asarray(g(t)))
    return np.tensordot(w, vals, axes=(0, 0))


def integrate_curve(g: Callable, q: QuadratureSpec = DEFAULT_QUAD, *, vectorized: bool = False,
                    estimate_error: bool = False):
    """Integral over [0, 1] of a matrix-valued curve, symmetrized.

    ``g(t)`` returns one Hermitian matrix, or with ``vectorized=True`` a
    stack (m, n, n) for an array of m nodes. With ``estimate_error=True``
    returns ``(result, err)`` where ``err`` is the Frobenius distance to the
    panel-doubled rule.
    """

    def run(spec: QuadratureSpec) -> np.ndarray:
        t, w = spec.rule()
        if vectorized:
            vals = np.asarray(g(t))
        else:
            vals = np.stack([np.asarray(g(float(ti))) for ti in t])
        return hermitian(np.tensordot(w, _finite_or_fail(vals), axes=(0, 0)))

    result = run(q)
    if estimate_error:
        return result, float(np.linalg.norm(result - run(q.doubled())))
    return result


# ---------------------------------------------------------------------------
# Non-commuting weighted geometric mean
# ---------------------------------------------------------------------------


def _pd_decomposition(m, label: str):
    d = eig_hermitian(m)
    if d.lam[0] <= 0:
        raise NotPositiveDefinite(f"{label} has eigenvalue {d.lam[0]!r} <= 0")
    cond = d.lam[-1] / d.lam[0]
    if cond > COND_CAP:
        warnings.warn(f"{label} condition number {cond:.3g} exceeds {COND_CAP:g}",
                      IllConditionedWarning, stacklevel=3)
    return d


def agm_weighted_mean(a, b, nu: float) -> np.ndarray:
    """A^(1/2) (A^(-1/2) B A^(-1/2))^nu A^(1/2) for positive definite A, B.

    The endpoints return A (nu = 0) and B (nu = 1) exactly.
    """
    nu = check_weight(nu)
    a = hermitian(as_matrix(a))
    b = hermitian(as_matrix(b))
    same_shape(a, b)
    da = _pd_decomposition(a, "A")
    _pd_decomposition(b, "B")
    if nu == 0.0:
        return a
    if nu == 1.0:
        return b
    root = da.reconstruct(np.sqrt(da.lam))
    inv_root = da.reconstruct(1.0 / np.sqrt(da.lam))
    inner = hermitian(inv_root @ b @ inv_root)
    lam, u = eigh_stack(inner[None])
    inner_pow = hermitian((u[0] * np.power(np.clip(lam[0], 0.0, None), nu)) @ u[0].conj().T)
    return hermitian(root @ inner_pow @ root)
