"""Backend dispatch for the see-saw kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback.  Set ``ENTANGLEKIT_BACKEND=python`` to force the fallback.
"""

import os

import numpy as np

from . import _fallback

BACKEND = "python"
_impl = _fallback
if os.environ.get("ENTANGLEKIT_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback


def _backend(name):
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def product_min(H, dA, dB, e0, f0, max_sweeps=1000, tol=1e-13, backend=None):
    """Alternating minimization of ``<e,f|H|e,f>`` over unit product vectors.

    Parameters
    ----------
    H : (dA*dB, dA*dB) complex Hermitian array
    e0, f0 : (n, dA) and (n, dB) complex arrays of starting vectors
    max_sweeps : int
        Cap on e/f sweep pairs per start.
    tol : float
        A start stops once a sweep lowers its value by less than this.

    Returns
    -------
    values : (n,) float
    e, f : unit vectors reached from each start
    sweeps : (n,) int
    """
    impl = _backend(backend)
    H = np.ascontiguousarray(H, dtype=complex)
    e0 = np.ascontiguousarray(e0, dtype=complex)
    f0 = np.ascontiguousarray(f0, dtype=complex)
    return impl.product_min(H, int(dA), int(dB), e0, f0, int(max_sweeps), float(tol))


def chsh_ascent(T, starts, max_sweeps=500, tol=1e-10, backend=None):
    """Coordinate ascent of the CHSH polynomial for correlation matrix ``T``.

    ``starts`` is (n, 4, 3): rows a, a', b, b' for each start.
    """
    impl = _backend(backend)
    T = np.ascontiguousarray(T, dtype=float)
    starts = np.ascontiguousarray(starts, dtype=float)
    return impl.chsh_ascent(T, starts, int(max_sweeps), float(tol))
