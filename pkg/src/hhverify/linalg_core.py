"""Complex Hermitian linear algebra: eigendecomposition, functional calculus,
Loewner order, absolute value, trace and Schatten norms.

Matrices are plain ``numpy`` complex128 arrays. Functions that need exact
Hermitian symmetry pass their input through :func:`hermitian` first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence, Union

import numpy as np

from . import _backend
from .errors import (
    BadExponent,
    DimensionMismatch,
    DomainViolation,
    MatrixFormatError,
    NonConvergence,
)
from .functions import ScalarFunction

INF = math.inf

EIG_TOL = 1e-13
EIG_MAX_SWEEPS = 30


# ---------------------------------------------------------------------------
# Verdicts and tolerances
# ---------------------------------------------------------------------------


class Status(str, enum.Enum):
    HOLDS = "Holds"
    INCONCLUSIVE = "Inconclusive"
    VIOLATED = "Violated"
    SKIPPED = "Skipped"


_SEVERITY = {Status.SKIPPED: -1, Status.HOLDS: 0, Status.INCONCLUSIVE: 1, Status.VIOLATED: 2}


@dataclass(frozen=True)
class LoewnerTolerance:
    """Relative tolerance and absolute floor for order comparisons."""

    rel: float = 1e-9
    abs_floor: float = 1e-12

    def __post_init__(self):
        if self.rel < 0 or self.abs_floor < 0:
            raise ValueError("tolerances must be nonnegative")

    def band(self, scale: float) -> float:
        return self.rel * max(float(scale), 1.0) + self.abs_floor


DEFAULT_TOL = LoewnerTolerance()


@dataclass(frozen=True)
class Verdict:
    """Outcome of one inequality claim.

    ``margin`` is the signed slack (smallest eigenvalue of RHS - LHS, or
    RHS - LHS for scalars). ``scale`` is the magnitude of the compared
    quantities, used for the tolerance band and for normalized margins.
    """

    status: Status
    margin: float
    scale: float = 1.0
    band: float = 0.0
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def normalized_margin(self) -> float:
        return self.margin / max(self.scale, 1e-300)

    def with_witness(self, witness: dict) -> "Verdict":
        return Verdict(self.status, self.margin, self.scale, self.band, witness, self.details)

    def with_details(self, **details) -> "Verdict":
        merged = {**self.details, **details}
        return Verdict(self.status, self.margin, self.scale, self.band, self.witness, merged)

    def to_dict(self) -> dict:
        out = {
            "status": self.status.value,
            "margin": self.margin,
            "normalized_margin": self.normalized_margin,
            "scale": self.scale,
            "band": self.band,
        }
        if self.details:
            out["details"] = _jsonable(self.details)
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def judge(margin: float, scale: float, tol: LoewnerTolerance = DEFAULT_TOL, **details) -> Verdict:
    """Three-way verdict: Holds above ``-band``, Violated below ``-10*band``."""
    margin = float(margin)
    band = tol.band(scale)
    if not math.isfinite(margin):
        status = Status.INCONCLUSIVE
    elif margin >= -band:
        status = Status.HOLDS
    elif margin < -10.0 * band:
        status = Status.VIOLATED
    else:
        status = Status.INCONCLUSIVE
    return Verdict(status, margin, float(scale), band, None, details)


def judge_leq(lhs: float, rhs: float, tol: LoewnerTolerance = DEFAULT_TOL, **details) -> Verdict:
    """Verdict for the scalar claim ``lhs <= rhs``."""
    lhs, rhs = float(lhs), float(rhs)
    return judge(rhs - lhs, max(abs(lhs), abs(rhs)), tol, lhs=lhs, rhs=rhs, **details)


def combine(verdicts: Iterable[Verdict], **details) -> Verdict:
    """Worst status and smallest margin over ``verdicts`` (Skipped ignored)."""
    vs = [v for v in verdicts if v.status is not Status.SKIPPED]
    if not vs:
        return Verdict(Status.SKIPPED, 0.0, 1.0, 0.0, None, details)
    worst = max(vs, key=lambda v: _SEVERITY[v.status])
    tight = min(vs, key=lambda v: v.normalized_margin)
    return Verdict(worst.status, tight.margin, tight.scale, tight.band, None, details)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Verdict):
        return obj.to_dict()
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj) or obj.ndim == 2:
            return matrix_to_json(obj)
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


# ---------------------------------------------------------------------------
# Matrix validation and serialization
# ---------------------------------------------------------------------------


def as_matrix(m) -> np.ndarray:
    """Validate a square finite matrix and return it as complex128."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian(m) -> np.ndarray:
    """(M + M*)/2 with the diagonal made exactly real."""
    a = np.asarray(m, dtype=np.complex128)
    h = 0.5 * (a + np.swapaxes(a, -1, -2).conj())
    idx = np.arange(h.shape[-1])
    h[..., idx, idx] = h[..., idx, idx].real
    return h


def same_shape(*mats: np.ndarray) -> None:
    shapes = {np.shape(m) for m in mats}
    if len(shapes) != 1:
        raise DimensionMismatch(f"operand shapes differ: {sorted(shapes)}")


def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=np.complex128)
    return {"n": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Parse ``{"n", "re", "im"}``; rejects non-square or non-finite payloads."""
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed matrix payload: {exc}") from None
    if re.shape != (n, n) or im.shape != (n, n):
        raise MatrixFormatError(f"matrix payload is not {n}x{n}")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise MatrixFormatError("matrix payload contains NaN or Inf")
    return re + 1j * im


# ---------------------------------------------------------------------------
# Eigendecomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralDecomposition:
    u: np.ndarray
    lam: np.ndarray

    @property
    def n(self) -> int:
        return self.lam.shape[0]

    def reconstruct(self, values=None) -> np.ndarray:
        """U diag(values) U*, defaulting to the eigenvalues themselves."""
        vals = self.lam if values is None else np.asarray(values)
        return hermitian((self.u * vals) @ self.u.conj().T)


def _phase_fix(u: np.ndarray) -> np.ndarray:
    # first component with modulus above 1e-10 made real positive, per column
    mag = np.abs(u)
    first = np.argmax(mag > 1e-10, axis=-2)
    lead = np.take_along_axis(u, first[..., None, :], axis=-2)
    phase = lead / np.abs(lead)
    return u * phase.conj()


def _tie_break(lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Order for ascending ``lam``; exact ties ordered by column entries."""
    keys = np.concatenate([-u.imag[::-1], -u.real[::-1]])
    return np.lexsort(tuple(keys) + (lam,))


def eigh_stack(h: np.ndarray, sort: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi eigendecomposition of a stack of Hermitian matrices.

    ``h`` has shape (m, n, n) and is assumed exactly Hermitian. Returns
    eigenvalues (m, n) ascending and phase-fixed eigenvectors (m, n, n).
    """
    h = np.ascontiguousarray(h, dtype=np.complex128)
    lam, u, sweeps = _backend.jacobi_eigh_batch(h, EIG_TOL, EIG_MAX_SWEEPS)
    if np.any(sweeps < 0):
        bad = int(np.argmax(sweeps < 0))
        raise NonConvergence(
            f"Jacobi did not reach off-diagonal mass {EIG_TOL:g}*|H|_F in "
            f"{EIG_MAX_SWEEPS} sweeps (matrix {bad} of stack)"
        )
    if sort:
        order = np.argsort(lam, axis=-1, kind="stable")
        lam = np.take_along_axis(lam, order, axis=-1)
        u = np.take_along_axis(u, order[:, None, :], axis=-1)
        u = _phase_fix(u)
    return lam, u


def eig_hermitian(h) -> SpectralDecomposition:
    """Deterministic spectral decomposition of one Hermitian matrix."""
    h = hermitian(as_matrix(h))
    lam, u = eigh_stack(h[None])
    lam, u = lam[0], u[0]
    if lam.size > 1 and np.any(np.diff(lam) == 0.0):
        order = _tie_break(lam, u)
        lam, u = lam[order], u[:, order]
    return SpectralDecomposition(u, lam)


def eigvalsh(h) -> np.ndarray:
    return eig_hermitian(h).lam


# ---------------------------------------------------------------------------
# Functional calculus
# ---------------------------------------------------------------------------

FunctionLike = Union[ScalarFunction, Callable[[np.ndarray], np.ndarray]]


def _eval(f: FunctionLike, lam: np.ndarray, scale: float) -> np.ndarray:
    if isinstance(f, ScalarFunction):
        lam = f.check_domain(lam, slack=1e-12 * max(scale, 1.0))
        return np.asarray(f.func(lam), dtype=float)
    return np.asarray(f(lam))


def apply_scalar_function(f: FunctionLike, d: SpectralDecomposition) -> np.ndarray:
    """U diag(f(lambda_i)) U*.

    Raises DomainViolation if an eigenvalue lies outside the domain of a
    :class:`ScalarFunction`; eigenvalues within 1e-12 relative of a closed
    endpoint are snapped onto it.
    """
    scale = float(np.max(np.abs(d.lam))) if d.lam.size else 1.0
    return d.reconstruct(_eval(f, d.lam, scale))


def funm(f: FunctionLike, h) -> np.ndarray:
    """f(H) through the spectral decomposition of Hermitian ``h``."""
    return apply_scalar_function(f, eig_hermitian(h))


def funm_stack(f: FunctionLike, hs: np.ndarray) -> np.ndarray:
    """Batched f(H_k) for a stack of Hermitian matrices."""
    hs = hermitian(hs)
    lam, u = eigh_stack(hs, sort=False)
    scale = float(np.max(np.abs(lam))) if lam.size else 1.0
    vals = _eval(f, lam, scale)
    return hermitian(np.einsum("bij,bj,bkj->bik", u, vals, u.conj()))


def sqrtm_psd(h) -> np.ndarray:
    d = eig_hermitian(h)
    return d.reconstruct(np.sqrt(np.clip(d.lam, 0.0, None)))


# ---------------------------------------------------------------------------
# Order, absolute value, trace, norms
# ---------------------------------------------------------------------------


def opnorm_hermitian(h) -> float:
    lam = eigvalsh(h)
    return float(np.max(np.abs(lam)))


def loewner_leq(a, b, tol: LoewnerTolerance = DEFAULT_TOL) -> Verdict:
    """Verdict for A <= B: margin is the smallest eigenvalue of B - A."""
    a = hermitian(as_matrix(a))
    b = hermitian(as_matrix(b))
    same_shape(a, b)
    lam, _ = eigh_stack(np.stack([b - a, a, b]))
    margin = lam[0, 0]
    scale = max(np.max(np.abs(lam[1])), np.max(np.abs(lam[2])))
    return judge(margin, scale, tol)


def loewner_chain(mats: Sequence[np.ndarray], tol: LoewnerTolerance = DEFAULT_TOL) -> list[Verdict]:
    """Pairwise verdicts mats[k] <= mats[k+1], sharing one batched eig call."""
    hs = [hermitian(as_matrix(m)) for m in mats]
    same_shape(*hs)
    k = len(hs)
    stack = np.stack(hs + [hs[i + 1] - hs[i] for i in range(k - 1)])
    lam, _ = eigh_stack(stack)
    norms = np.max(np.abs(lam[:k]), axis=1)
    out = []
    for i in range(k - 1):
        scale = max(norms[i], norms[i + 1])
        out.append(judge(lam[k + i, 0], scale, tol))
    return out


def singular_values(m) -> np.ndarray:
    """Singular values, descending.

    Hermitian input uses |eigenvalues|; otherwise the eigenvalues of the
    dilation [[0, M], [M*, 0]], which are +/- sigma_i and keep small
    singular values accurate to eps * |M| (M*M would square the error).
    """
    a = as_matrix(m)
    n = a.shape[0]
    if np.array_equal(a, a.conj().T):
        return np.sort(np.abs(eigvalsh(a)))[::-1]
    dil = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    dil[:n, n:] = a
    dil[n:, :n] = a.conj().T
    lam, _ = eigh_stack(dil[None])
    return np.clip(lam[0, n:][::-1], 0.0, None)


def abs_op(m) -> np.ndarray:
    """|M| = (M*M)^(1/2)."""
    a = as_matrix(m)
    return sqrtm_psd(a.conj().T @ a)


def abs_power(m, r: float) -> np.ndarray:
    """|M|^r = (M*M)^(r/2) from the eigendecomposition of M*M.

    Eigenvalues of M*M at or below 1e-12 of the largest count as zero. For
    r > 0 they map to 0; for r == 0 the spectral projection convention
    applies (nonzero -> 1, zero -> 0). Negative r requires M nonsingular.
    """
    a = as_matrix(m)
    d = eig_hermitian(a.conj().T @ a)
    lam = np.clip(d.lam, 0.0, None)
    top = float(np.max(lam)) if lam.size else 0.0
    zero = lam <= 1e-12 * top if top > 0 else np.ones_like(lam, dtype=bool)
    if r == 0:
        vals = np.where(zero, 0.0, 1.0)
    elif r > 0:
        vals = np.where(zero, 0.0, lam ** (0.5 * r))
    else:
        if np.any(zero):
            raise DomainViolation(0.0, f"|M|^{r}")
        vals = lam ** (0.5 * r)
    return d.reconstruct(vals)


def trace_abs_power(m, r: float, zero_tol: float = 1e-12) -> float:
    """Tr |M|^r = sum sigma_i^r; for r == 0 counts sigma_i > zero_tol * sigma_max."""
    sig = singular_values(m)
    smax = float(sig[0]) if sig.size else 0.0
    if smax == 0.0:
        return 0.0
    nz = sig > zero_tol * smax
    if r == 0:
        return float(np.count_nonzero(nz))
    if r < 0 and not np.all(nz):
        raise DomainViolation(0.0, f"|M|^{r}")
    return float(np.sum(sig[nz] ** r))


def trace(m) -> complex:
    """Sum of the diagonal in the standard basis."""
    return complex(np.trace(as_matrix(m)))


def schatten_norm(m, p: float) -> float:
    """(sum sigma_i^p)^(1/p); ``p = INF`` gives the operator norm."""
    if not (p == INF or p >= 1):
        raise BadExponent(f"Schatten exponent must be >= 1 or inf, got {p}")
    sig = singular_values(m)
    if p == INF:
        return float(sig[0])
    if p == 1:
        return float(np.sum(sig))
    smax = float(sig[0])
    if smax == 0.0:
        return 0.0
    return smax * float(np.sum((sig / smax) ** p)) ** (1.0 / p)


def is_unitary(u, tol: float = 1e-12) -> bool:
    u = as_matrix(u)
    n = u.shape[0]
    return bool(np.linalg.norm(u @ u.conj().T - np.eye(n)) <= tol * n)

