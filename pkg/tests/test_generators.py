import numpy as np
import pytest

from hhverify import generators as gen


def test_unitary_examples():
    u = gen.gen_random_unitary(gen.trial_rng(1, "x", 0), 1)
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-15
    u = gen.gen_random_unitary(gen.trial_rng(1, "x", 1), 4)
    assert np.linalg.norm(u @ u.conj().T - np.eye(4)) <= 1e-12 * 4


def test_streams_are_deterministic_and_distinct():
    a = gen.gen_random_unitary(gen.trial_rng(7, "chk", 3), 4)
    b = gen.gen_random_unitary(gen.trial_rng(7, "chk", 3), 4)
    assert np.array_equal(a, b)
    others = [gen.trial_rng(8, "chk", 3), gen.trial_rng(7, "chk2", 3), gen.trial_rng(7, "chk", 4)]
    for r in others:
        assert not np.array_equal(a, gen.gen_random_unitary(r, 4))


def test_trial_stream_uses_philox():
    assert isinstance(gen.trial_rng(0, "a", 0).bit_generator, np.random.Philox)


def test_haar_phase_distribution_is_not_biased():
    # Haar measure: E[U] = 0, E[|U_ij|^2] = 1/n
    n, m = 3, 3000
    us = np.stack([gen.gen_random_unitary(gen.trial_rng(0, "haar", k), n) for k in range(m)])
    assert np.abs(us.mean(axis=0)).max() < 0.05
    assert np.allclose((np.abs(us) ** 2).mean(axis=0), 1 / n, atol=0.03)


def test_commuting_pair_examples():
    p = gen.gen_commuting_pair(gen.trial_rng(0, "p", 0), 3, (1.0, 1.0))
    assert np.allclose(p.A, np.eye(3), atol=1e-14) and np.allclose(p.B, np.eye(3), atol=1e-14)
    p = gen.gen_commuting_pair(gen.trial_rng(0, "p", 1), 8)
    comm = p.A @ p.B - p.B @ p.A
    assert np.linalg.norm(comm) <= 1e-11 * np.linalg.norm(p.A) * np.linalg.norm(p.B)
    assert 0.1 <= p.a.min() and p.a.max() <= 10
    q = gen.gen_commuting_pair(gen.trial_rng(0, "p", 1), 8)
    assert np.array_equal(p.A, q.A)


def test_psd_examples():
    m = gen.gen_psd(gen.trial_rng(0, "s", 0), 4, (2.0, 2.0))
    assert np.allclose(m, 2 * np.eye(4), atol=1e-13)
    for k in range(20):
        m = gen.gen_psd(gen.trial_rng(0, "s", k), 5, (0.5, 3.0))
        assert np.linalg.eigvalsh(m).min() >= 0.5 - 1e-12
        assert np.array_equal(m, m.conj().T)


def test_complex_entries_have_unit_variance():
    z = gen.gen_complex(gen.trial_rng(0, "c", 0), 200)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.02)
    assert np.all(np.isfinite(z))
