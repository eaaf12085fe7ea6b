import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhverify import _backend, _jacobi_py, linalg_core as lc
from hhverify.errors import BadExponent, DimensionMismatch, DomainViolation, MatrixFormatError, NonConvergence
from hhverify.functions import get_function
from hhverify.linalg_core import LoewnerTolerance, Status

from conftest import random_complex, random_hermitian


# --- eigendecomposition -----------------------------------------------------


def test_identity_eig_is_exact():
    d = lc.eig_hermitian(np.eye(3))
    assert np.array_equal(d.lam, np.ones(3))
    assert np.allclose(d.reconstruct(), np.eye(3), atol=0)


def test_diagonal_eig_sorted_with_permutation_basis():
    d = lc.eig_hermitian(np.diag([4.0, 1.0]))
    assert np.array_equal(d.lam, [1.0, 4.0])
    assert np.allclose(np.abs(d.u), [[0, 1], [1, 0]])


def test_two_by_two_closed_form():
    lam = lc.eigvalsh([[2, 1], [1, 2]])
    assert np.allclose(lam, [1.0, 3.0], rtol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12])
def test_eig_against_numpy_oracle(rng, n):
    for _ in range(5):
        h = random_hermitian(rng, n)
        d = lc.eig_hermitian(h)
        ref = np.linalg.eigvalsh(h)
        assert np.allclose(d.lam, ref, rtol=0, atol=1e-13 * max(1, np.linalg.norm(h)))
        assert np.linalg.norm(d.reconstruct() - h) <= 1e-12 * max(1, np.linalg.norm(h))
        assert lc.is_unitary(d.u)


def test_phase_convention_first_nonzero_component_real_positive(rng):
    d = lc.eig_hermitian(random_hermitian(rng, 5))
    for j in range(5):
        col = d.u[:, j]
        lead = col[np.argmax(np.abs(col) > 1e-10)]
        assert lead.imag == pytest.approx(0, abs=1e-15) and lead.real > 0


def test_eig_is_deterministic(rng):
    h = random_hermitian(rng, 6)
    a, b = lc.eig_hermitian(h), lc.eig_hermitian(h.copy())
    assert np.array_equal(a.lam, b.lam) and np.array_equal(a.u, b.u)


def test_nonconvergence_raised(monkeypatch, rng):
    monkeypatch.setattr(lc, "EIG_MAX_SWEEPS", 1)
    with pytest.raises(NonConvergence):
        lc.eig_hermitian(random_hermitian(rng, 8))


@pytest.mark.skipif(_backend.BACKEND != "cython", reason="compiled kernel not built")
def test_backends_agree(rng):
    from hhverify import _jacobi_ext

    h = np.stack([random_hermitian(rng, 6) for _ in range(10)])
    lp, up, sp = _jacobi_py.jacobi_eigh_batch(h)
    lx, ux, sx = _jacobi_ext.jacobi_eigh_batch(h)
    assert np.all(sp > 0) and np.all(sx > 0)
    assert np.allclose(np.sort(lp, axis=1), np.sort(lx, axis=1), atol=1e-13)
    for k in range(10):
        for lam, u in ((lp[k], up[k]), (lx[k], ux[k])):
            assert np.linalg.norm((u * lam) @ u.conj().T - h[k]) < 1e-12 * np.linalg.norm(h[k])


def test_python_backend_reports_nonconvergence(rng):
    _, _, sweeps = _jacobi_py.jacobi_eigh_batch(random_hermitian(rng, 6)[None], max_sweeps=1)
    assert sweeps[0] == -1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_eig_reconstruction_property(n, seed, scale):
    h = random_hermitian(np.random.default_rng(seed), n, scale)
    d = lc.eig_hermitian(h)
    assert np.all(np.diff(d.lam) >= 0)
    assert np.linalg.norm(d.reconstruct() - h) <= 1e-12 * max(1, np.linalg.norm(h))


# --- functional calculus ----------------------------------------------------


def test_funm_identity(rng):
    h = random_hermitian(rng, 4)
    assert np.linalg.norm(lc.funm(get_function("identity"), h) - h) <= 1e-12 * np.linalg.norm(h)


def test_funm_exp_diagonal():
    out = lc.funm(get_function("exp_real"), np.diag([0.0, math.log(2)]))
    assert np.allclose(out, np.diag([1.0, 2.0]), atol=1e-15)


def test_funm_sqrt_same_eigenbasis():
    h = np.array([[2.0, 1.0], [1.0, 2.0]])
    d = lc.eig_hermitian(h)
    s = lc.funm(get_function("sqrt"), h)
    assert np.allclose(d.u.conj().T @ s @ d.u, np.diag([1.0, math.sqrt(3)]), atol=1e-14)


def test_funm_domain_violation():
    with pytest.raises(DomainViolation):
        lc.funm(get_function("log"), np.diag([-1.0, 2.0]))


def test_funm_stack_matches_funm(rng):
    hs = np.stack([random_hermitian(rng, 4) for _ in range(3)])
    f = get_function("exp_real")
    batch = lc.funm_stack(f, hs)
    for k in range(3):
        assert np.allclose(batch[k], lc.funm(f, hs[k]), atol=1e-12)


# --- Loewner order ----------------------------------------------------------


def test_loewner_examples():
    i2 = np.eye(2)
    v = lc.loewner_leq(i2, 2 * i2)
    assert v.status is Status.HOLDS and v.margin == pytest.approx(1.0)
    v = lc.loewner_leq(2 * i2, i2)
    assert v.status is Status.VIOLATED and v.margin == pytest.approx(-1.0)
    v = lc.loewner_leq([[2, 1], [1, 2]], 3 * i2)
    assert v.status is Status.HOLDS and abs(v.margin) < 1e-14


def test_loewner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        lc.loewner_leq(np.eye(2), np.eye(3))


def test_verdict_three_way_bands():
    tol = LoewnerTolerance(rel=1e-9, abs_floor=0.0)
    band = tol.band(1.0)
    assert lc.judge(-0.5 * band, 1.0, tol).status is Status.HOLDS
    assert lc.judge(-5 * band, 1.0, tol).status is Status.INCONCLUSIVE
    assert lc.judge(-20 * band, 1.0, tol).status is Status.VIOLATED
    assert lc.judge(math.nan, 1.0, tol).status is Status.INCONCLUSIVE


def test_combine_takes_worst_status_and_tightest_margin():
    a = lc.judge(1.0, 1.0)
    b = lc.judge(-1.0, 1.0)
    skipped = lc.Verdict(Status.SKIPPED, 0.0)
    c = lc.combine([a, b, skipped])
    assert c.status is Status.VIOLATED and c.margin == -1.0
    assert lc.combine([skipped]).status is Status.SKIPPED


def test_loewner_chain_pairwise():
    vs = lc.loewner_chain([np.eye(2), 2 * np.eye(2), 1.5 * np.eye(2)])
    assert [v.status for v in vs] == [Status.HOLDS, Status.VIOLATED]


# --- absolute value, singular values, norms, trace ----------------------------


def test_abs_op_examples():
    assert np.allclose(lc.abs_op(np.diag([-3.0, 2.0])), np.diag([3.0, 2.0]), atol=1e-14)
    q, _ = np.linalg.qr(random_complex(np.random.default_rng(1), 3))
    assert np.allclose(lc.abs_op(q), np.eye(3), atol=1e-13)
    m = np.array([[0, 2], [0, 0]])
    assert np.allclose(lc.abs_op(m), np.diag([0.0, 2.0]), atol=1e-14)
    assert np.allclose(lc.singular_values(m), [2.0, 0.0], atol=1e-15)


def test_singular_values_against_numpy(rng):
    for n in (2, 4, 7):
        m = random_complex(rng, n)
        assert np.allclose(lc.singular_values(m), np.linalg.svd(m, compute_uv=False), atol=1e-13)


def test_small_singular_values_keep_absolute_accuracy(rng):
    u, _ = np.linalg.qr(random_complex(rng, 4))
    v, _ = np.linalg.qr(random_complex(rng, 4))
    sig = np.array([1.0, 1e-3, 1e-6, 1e-9])
    m = (u * sig) @ v.conj().T
    assert np.allclose(lc.singular_values(m), sig, rtol=0, atol=1e-14)


def test_abs_power_zero_uses_projection():
    p = lc.abs_power(np.diag([2.0, 0.0]), 0)
    assert np.allclose(p, np.diag([1.0, 0.0]))
    with pytest.raises(DomainViolation):
        lc.abs_power(np.diag([2.0, 0.0]), -1)


def test_trace_examples(rng):
    assert lc.trace(np.eye(4)) == 4
    assert lc.trace([[0, 1], [0, 0]]) == 0
    a, b = random_complex(rng, 5), random_complex(rng, 5)
    ab, ba = lc.trace(a @ b), lc.trace(b @ a)
    assert abs(ab - ba) <= 1e-12 * abs(ab)


def test_schatten_examples():
    m = np.diag([3.0, -4.0])
    assert lc.schatten_norm(m, 1) == pytest.approx(7.0)
    assert lc.schatten_norm(m, 2) == pytest.approx(5.0)
    assert lc.schatten_norm(m, lc.INF) == pytest.approx(4.0)
    with pytest.raises(BadExponent):
        lc.schatten_norm(m, 0.5)


def test_schatten_two_is_frobenius(rng):
    m = random_complex(rng, 6)
    assert lc.schatten_norm(m, 2) == pytest.approx(np.linalg.norm(m), rel=1e-13)


# --- serialization ----------------------------------------------------------


def test_matrix_json_roundtrip_is_exact(rng):
    m = random_complex(rng, 3)
    assert np.array_equal(lc.matrix_from_json(lc.matrix_to_json(m)), m)


@pytest.mark.parametrize("payload", [
    {"n": 2, "re": [[1, 2, 3], [4, 5, 6]]},
    {"n": 2, "re": [[1, float("nan")], [0, 1]]},
    {"re": [[1]]},
    {"n": 1, "re": [[1]], "im": [[float("inf")]]},
])
def test_matrix_json_rejects_bad_payloads(payload):
    with pytest.raises(MatrixFormatError):
        lc.matrix_from_json(payload)


def test_verdict_to_dict_is_json_ready():
    import json

    v = lc.judge(0.5, 2.0, arr=np.array([1.0, 2.0]), z=1 + 2j)
    out = json.loads(json.dumps(v.to_dict()))
    assert out["status"] == "Holds" and out["details"]["z"] == {"re": 1.0, "im": 2.0}


def test_fallback_backend_selected_by_environment():
    import os
    import subprocess
    import sys

    code = ("from hhverify import _backend, linalg_core as lc; import numpy as np; "
            "print(_backend.BACKEND, lc.eigvalsh([[2, 1], [1, 2]]).round(12).tolist())")
    env = {**os.environ, "HHVERIFY_BACKEND": "python"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split()[0] == "python" and "[1.0, 3.0]" in out.stdout
