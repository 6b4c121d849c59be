"""Shared helpers for the test suite."""

import numpy as np

from cpmaps import CpMap


def random_kraus(rng, d_in, d_out, k):
    """A list of k independent complex Gaussian factor matrices."""
    return [
        rng.normal(size=(d_in, d_out)) + 1j * rng.normal(size=(d_in, d_out))
        for _ in range(k)
    ]


def random_map(rng, d_in, d_out, k):
    return CpMap.from_kraus(random_kraus(rng, d_in, d_out, k))


def random_psd(rng, n, rank=None):
    """A random PSD matrix, optionally of prescribed rank."""
    r = n if rank is None else rank
    g = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
    return g @ g.conj().T


def random_projection(rng, n, rank):
    """An orthogonal projection of the given rank."""
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    q, _ = np.linalg.qr(g)
    return q @ q.conj().T


def random_unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def matrix_unit(n, i, j):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e
