"""Shared fixtures and random-matrix helpers."""

import numpy as np
import pytest

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def random_real_symmetric(n, rng):
    a = rng.normal(size=(n, n))
    return a + a.T


def random_traceless_symmetric(n, rng):
    m = random_real_symmetric(n, rng)
    return m - np.trace(m) / n * np.eye(n)


def random_traceless_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    z = (a + a.conj().T) / 2
    return z - np.trace(z).real / n * np.eye(n)


def random_density(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unitary(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def coupled_traceless_symmetric(n, rng, min_offdiag=0.1):
    """Random real symmetric traceless matrix with |off-diagonal| >= min_offdiag."""
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mag = rng.uniform(min_offdiag, 1.0)
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            m[i, j] = m[j, i] = sign * mag
    diag = rng.normal(size=n)
    np.fill_diagonal(m, diag - diag.mean())
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
