"""Random instance generators and per-trial random streams.

Every trial draws from its own generator: Philox-4x64 (counter based),
keyed through ``SeedSequence(entropy=seed, spawn_key=(crc32(check_id), trial))``.
Inputs are therefore fixed by (seed, check, trial) alone, independent of
execution order or worker count.
"""

from __future__ import annotations

import zlib

import numpy as np

from .commuting_means import CommutingPositivePair, make_pair
from .linalg_core import hermitian


def check_key(check_id: str) -> int:
    return zlib.crc32(check_id.encode("utf-8"))


def trial_rng(seed: int, check_id: str, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(check_key(check_id), int(trial)))
    return np.random.Generator(np.random.Philox(ss))


def gen_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    """Standard complex Gaussian entries (unit variance)."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def gen_random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary: QR of a complex Gaussian matrix with R's diagonal made real positive."""
    q, r = np.linalg.qr(gen_complex(rng, n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def log_uniform(rng: np.random.Generator, lo: float, hi: float, size=None):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))


def gen_commuting_pair(rng: np.random.Generator, n: int, spectra_range=(0.1, 10.0)) -> CommutingPositivePair:
    lo, hi = spectra_range
    u = gen_random_unitary(rng, n)
    return make_pair(u, log_uniform(rng, lo, hi, n), log_uniform(rng, lo, hi, n))


def gen_psd(rng: np.random.Generator, n: int, spectra_range=(0.1, 10.0)) -> np.ndarray:
    """U diag(log-uniform spectrum) U* for Haar U."""
    lo, hi = spectra_range
    u = gen_random_unitary(rng, n)
    return hermitian((u * log_uniform(rng, lo, hi, n)) @ u.conj().T)


def gen_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    z = gen_complex(rng, n)
    return hermitian(z)
