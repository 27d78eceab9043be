# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled see-saw kernels.

Both loops run many tiny eigenproblems (2x2 to 4x4) or 3-vector updates per
sweep, so the interpreter overhead of the numpy version dominates.  The
compiled path calls LAPACK zheev on a stack-sized Fortran buffer directly.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()


cdef void _smallest_eigvec_2x2(double complex* a, double complex* out, double* val) noexcept nogil:
    # lowest eigenpair of [[p, q], [conj q, s]] in closed form
    cdef double p = a[0].real
    cdef double s = a[3].real
    cdef double complex q = a[2]
    cdef double h = 0.5 * (p - s)
    cdef double lam = 0.5 * (p + s) - sqrt(h * h + q.real * q.real + q.imag * q.imag)
    # two candidate null vectors of A - lam; keep the better conditioned one
    cdef double complex u0 = q
    cdef double complex u1 = lam - p
    cdef double complex v0 = lam - s
    cdef double complex v1 = q.conjugate()
    cdef double nu = u0.real * u0.real + u0.imag * u0.imag + u1.real * u1.real
    cdef double nv = v0.real * v0.real + v1.real * v1.real + v1.imag * v1.imag
    cdef double nrm
    if nu >= nv and nu > 0:
        nrm = sqrt(nu)
        out[0] = u0 / nrm
        out[1] = u1 / nrm
    elif nv > 0:
        nrm = sqrt(nv)
        out[0] = v0 / nrm
        out[1] = v1 / nrm
    else:
        out[0] = 1
        out[1] = 0
    val[0] = lam


cdef int _smallest_eigvec(double complex* a, int n, double complex* work, int lwork,
                          double* rwork, double* w, double complex* out, double* val) noexcept nogil:
    """Overwrite ``a`` (column-major n×n) and write its lowest eigenpair."""
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef int info = 0
    cdef int i
    if n == 2:
        _smallest_eigvec_2x2(a, out, val)
        return 0
    zheev(&jobz, &uplo, &n, a, &n, w, work, &lwork, rwork, &info)
    if info != 0:
        return info
    for i in range(n):
        out[i] = a[i]
    val[0] = w[0]
    return 0


def product_min(const double complex[:, ::1] H, int dA, int dB,
                const double complex[:, ::1] e0, const double complex[:, ::1] f0,
                int max_sweeps, double tol):
    """Minimize <e,f|H|e,f> over unit product vectors from each start.

    Returns (values, e, f, sweeps) with one row per start.
    """
    cdef int n = e0.shape[0]
    cdef int dmax = dA if dA > dB else dB
    cdef int lwork = 4 * dmax
    cdef cnp.ndarray[double complex, ndim=2] E = np.array(e0, dtype=np.complex128, copy=True)
    cdef cnp.ndarray[double complex, ndim=2] F = np.array(f0, dtype=np.complex128, copy=True)
    cdef cnp.ndarray[double, ndim=1] vals = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sweeps = np.zeros(n, dtype=np.int64)
    cdef double complex[:, ::1] Ev = E
    cdef double complex[:, ::1] Fv = F
    cdef double complex[::1] buf = np.empty(dmax * dmax, dtype=np.complex128)
    cdef double complex[::1] work = np.empty(lwork, dtype=np.complex128)
    cdef double[::1] rwork = np.empty(3 * dmax, dtype=np.float64)
    cdef double[::1] w = np.empty(dmax, dtype=np.float64)
    cdef double complex acc
    cdef double val, prev
    cdef int r, s, a, c, b, d, info
    for r in range(n):
        prev = 1e300
        val = prev
        for s in range(max_sweeps):
            # e-step: H_A(f)[a, c] = sum_{b,d} conj(f_b) H[a b, c d] f_d
            for a in range(dA):
                for c in range(a, dA):
                    acc = 0
                    for b in range(dB):
                        for d in range(dB):
                            acc = acc + Fv[r, b].conjugate() * H[a * dB + b, c * dB + d] * Fv[r, d]
                    buf[a + c * dA] = acc
                    buf[c + a * dA] = acc.conjugate()
            info = _smallest_eigvec(&buf[0], dA, &work[0], lwork, &rwork[0], &w[0], &Ev[r, 0], &val)
            if info != 0:
                raise ArithmeticError(f"zheev failed with info={info}")
            # f-step
            for b in range(dB):
                for d in range(b, dB):
                    acc = 0
                    for a in range(dA):
                        for c in range(dA):
                            acc = acc + Ev[r, a].conjugate() * H[a * dB + b, c * dB + d] * Ev[r, c]
                    buf[b + d * dB] = acc
                    buf[d + b * dB] = acc.conjugate()
            info = _smallest_eigvec(&buf[0], dB, &work[0], lwork, &rwork[0], &w[0], &Fv[r, 0], &val)
            if info != 0:
                raise ArithmeticError(f"zheev failed with info={info}")
            sweeps[r] = s + 1
            if prev - val < tol:
                break
            prev = val
        vals[r] = val
    return vals, E, F, sweeps


cdef inline void _mat3(const double[:, ::1] T, double* x, double* out, bint transpose) noexcept nogil:
    cdef int i, j
    for i in range(3):
        out[i] = 0
        for j in range(3):
            out[i] += (T[j, i] if transpose else T[i, j]) * x[j]


cdef inline void _normalize_into(double* v, double* target) noexcept nogil:
    cdef double nrm = sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if nrm > 1e-300:
        target[0] = v[0] / nrm
        target[1] = v[1] / nrm
        target[2] = v[2] / nrm


cdef inline double _chsh(const double[:, ::1] T, double* a, double* ap, double* b, double* bp) noexcept nogil:
    cdef double s[3]
    cdef double dd[3]
    cdef double ts[3]
    cdef double td[3]
    cdef int i
    for i in range(3):
        s[i] = b[i] + bp[i]
        dd[i] = b[i] - bp[i]
    _mat3(T, s, ts, False)
    _mat3(T, dd, td, False)
    return (a[0] * ts[0] + a[1] * ts[1] + a[2] * ts[2]
            + ap[0] * td[0] + ap[1] * td[1] + ap[2] * td[2])


def chsh_ascent(const double[:, ::1] T, const double[:, :, ::1] starts, int max_sweeps, double tol):
    """Coordinate ascent of a.T(b+b') + a'.T(b-b') from each start.

    ``starts`` has shape (n, 4, 3) holding (a, a', b, b').  Returns
    (values, settings, sweeps).
    """
    cdef int n = starts.shape[0]
    cdef cnp.ndarray[double, ndim=3] S = np.array(starts, dtype=np.float64, copy=True)
    cdef double[:, :, ::1] Sv = S
    cdef cnp.ndarray[double, ndim=1] vals = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sweeps = np.zeros(n, dtype=np.int64)
    cdef double tmp[3]
    cdef double u[3]
    cdef double val, prev
    cdef int r, s, i
    for r in range(n):
        prev = _chsh(T, &Sv[r, 0, 0], &Sv[r, 1, 0], &Sv[r, 2, 0], &Sv[r, 3, 0])
        val = prev
        for s in range(max_sweeps):
            for i in range(3):
                u[i] = Sv[r, 2, i] + Sv[r, 3, i]
            _mat3(T, u, tmp, False)
            _normalize_into(tmp, &Sv[r, 0, 0])
            for i in range(3):
                u[i] = Sv[r, 2, i] - Sv[r, 3, i]
            _mat3(T, u, tmp, False)
            _normalize_into(tmp, &Sv[r, 1, 0])
            for i in range(3):
                u[i] = Sv[r, 0, i] + Sv[r, 1, i]
            _mat3(T, u, tmp, True)
            _normalize_into(tmp, &Sv[r, 2, 0])
            for i in range(3):
                u[i] = Sv[r, 0, i] - Sv[r, 1, i]
            _mat3(T, u, tmp, True)
            _normalize_into(tmp, &Sv[r, 3, 0])
            val = _chsh(T, &Sv[r, 0, 0], &Sv[r, 1, 0], &Sv[r, 2, 0], &Sv[r, 3, 0])
            sweeps[r] = s + 1
            if fabs(val - prev) < tol:
                break
            prev = val
        vals[r] = val
    return vals, S, sweeps
