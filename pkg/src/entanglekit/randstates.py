"""Random states and unitaries for tests and Monte Carlo checks."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .core import DensityMatrix, PureState


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_unitary(d: int, seed=None) -> np.ndarray:
    return unitary_group.rvs(d, random_state=_rng(seed))


def random_vector(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)


def random_pure(dims: Sequence[int], seed=None) -> PureState:
    """Haar-random pure state."""
    return PureState(random_vector(int(np.prod(dims)), seed), tuple(dims))


def random_mixture(dims: Sequence[int], n_terms: int | None = None, seed=None) -> DensityMatrix:
    """Mixture of Haar-random pure states with flat Dirichlet weights."""
    rng = _rng(seed)
    d = int(np.prod(dims))
    n = n_terms or int(rng.integers(1, d + 1))
    p = rng.dirichlet(np.ones(n))
    vs = np.array([random_vector(d, rng) for _ in range(n)])
    m = np.einsum("k,ki,kj->ij", p, vs, vs.conj())
    return DensityMatrix(m, tuple(dims))


def random_separable(dims: Sequence[int], n_terms: int = 4, seed=None, pure_factors: bool = False) -> DensityMatrix:
    """``sum_i p_i rho_A^i ⊗ rho_B^i`` with random local states."""
    rng = _rng(seed)
    dA, dB = dims
    p = rng.dirichlet(np.ones(n_terms))
    m = np.zeros((dA * dB, dA * dB), dtype=complex)
    for w in p:
        if pure_factors:
            a, b = random_pure((dA,), rng).density().matrix, random_pure((dB,), rng).density().matrix
        else:
            a = random_mixture((dA,), seed=rng).matrix
            b = random_mixture((dB,), seed=rng).matrix
        m += w * np.kron(a, b)
    return DensityMatrix(m, (dA, dB))


def random_product_ensemble(dims: Sequence[int], n_terms: int, seed=None):
    """Separable state together with the product vectors of its decomposition."""
    rng = _rng(seed)
    dA, dB = dims
    p = rng.dirichlet(np.ones(n_terms))
    pairs = [(random_vector(dA, rng), random_vector(dB, rng)) for _ in range(n_terms)]
    m = sum(w * np.outer(np.kron(e, f), np.kron(e, f).conj()) for w, (e, f) in zip(p, pairs))
    return DensityMatrix(m, (dA, dB)), pairs


def local_unitary(dims: Sequence[int], seed=None) -> np.ndarray:
    rng = _rng(seed)
    U = np.eye(1)
    for d in dims:
        U = np.kron(U, haar_unitary(d, rng))
    return U


def conjugate(rho, U) -> DensityMatrix:
    m = rho.matrix if isinstance(rho, DensityMatrix) else rho.density().matrix
    return DensityMatrix(U @ m @ U.conj().T, rho.dims)
