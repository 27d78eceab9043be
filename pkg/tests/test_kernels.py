import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entanglekit import kernels
from entanglekit.randstates import random_mixture

from .strategies import seeds

HAVE_CYTHON = kernels.BACKEND == "cython"
needs_ext = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled extension not built")


def _starts(rng, n, dA, dB):
    e = rng.normal(size=(n, dA)) + 1j * rng.normal(size=(n, dA))
    f = rng.normal(size=(n, dB)) + 1j * rng.normal(size=(n, dB))
    return e / np.linalg.norm(e, axis=1, keepdims=True), f / np.linalg.norm(f, axis=1, keepdims=True)


def _hermitian(rng, d):
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (X + X.conj().T) / 2


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_ext)])
@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (4, 4)])
def test_product_min_properties(backend, dims):
    rng = np.random.default_rng(sum(dims))
    dA, dB = dims
    H = _hermitian(rng, dA * dB)
    e0, f0 = _starts(rng, 16, dA, dB)
    vals, e, f, sweeps = kernels.product_min(H, dA, dB, e0, f0, backend=backend)
    np.testing.assert_allclose(np.linalg.norm(e, axis=1), 1, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(f, axis=1), 1, atol=1e-12)
    ef = np.einsum("na,nb->nab", e, f).reshape(16, -1)
    np.testing.assert_allclose(np.einsum("ni,ij,nj->n", ef.conj(), H, ef).real, vals, atol=1e-10)
    assert vals.min() >= np.linalg.eigvalsh(H)[0] - 1e-10
    start = np.einsum("na,nb->nab", e0, f0).reshape(16, -1)
    assert np.all(vals <= np.einsum("ni,ij,nj->n", start.conj(), H, start).real + 1e-12)
    assert sweeps.min() >= 1


@needs_ext
@given(st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 4)]), seeds)
def test_product_min_backends_agree(dims, seed):
    rng = np.random.default_rng(seed)
    dA, dB = dims
    H = _hermitian(rng, dA * dB)
    e0, f0 = _starts(rng, 8, dA, dB)
    a = kernels.product_min(H, dA, dB, e0, f0, backend="python")
    b = kernels.product_min(H, dA, dB, e0, f0, backend="cython")
    np.testing.assert_allclose(a[0], b[0], atol=1e-9)


@needs_ext
@given(seeds)
def test_chsh_backends_agree(seed):
    rng = np.random.default_rng(seed)
    T = rng.uniform(-1, 1, size=(3, 3))
    starts = rng.normal(size=(8, 4, 3))
    starts /= np.linalg.norm(starts, axis=2, keepdims=True)
    a = kernels.chsh_ascent(T, starts, backend="python")
    b = kernels.chsh_ascent(T, starts, backend="cython")
    np.testing.assert_allclose(a[0], b[0], atol=1e-9)
    np.testing.assert_array_equal(a[2], b[2])


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_ext)])
def test_chsh_ascent_monotone_reaches_optimum(backend):
    rho = random_mixture((2, 2), seed=3)
    from entanglekit.witness import chsh_maximum_closed_form, correlation_matrix
    T = correlation_matrix(rho)
    rng = np.random.default_rng(0)
    starts = rng.normal(size=(16, 4, 3))
    starts /= np.linalg.norm(starts, axis=2, keepdims=True)
    a, ap, b, bp = starts.transpose(1, 0, 2)
    initial = np.einsum("ni,ij,nj->n", a, T, b + bp) + np.einsum("ni,ij,nj->n", ap, T, b - bp)
    vals, S, _ = kernels.chsh_ascent(T, starts, backend=backend)
    assert np.all(vals >= initial - 1e-12)
    assert vals.max() == pytest.approx(chsh_maximum_closed_form(rho), abs=1e-8)
    np.testing.assert_allclose(np.linalg.norm(S, axis=2), 1, atol=1e-12)


def test_read_only_inputs_accepted():
    H = np.eye(4, dtype=complex)
    H.setflags(write=False)
    e0, f0 = _starts(np.random.default_rng(0), 2, 2, 2)
    e0.setflags(write=False)
    vals, *_ = kernels.product_min(H, 2, 2, e0, f0)
    np.testing.assert_allclose(vals, 1)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.product_min(np.eye(4), 2, 2, np.ones((1, 2)), np.ones((1, 2)), backend="fortran")


def test_env_forces_fallback():
    env = dict(os.environ, ENTANGLEKIT_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import entanglekit; print(entanglekit.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"
