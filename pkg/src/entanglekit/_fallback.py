"""Pure numpy versions of the compiled kernels.

Batched over restarts; each start stops independently under the same rule as
the compiled loop, so the two backends follow identical iterate sequences up
to eigenvector phase.
"""

import numpy as np


def product_min(H, dA, dB, e0, f0, max_sweeps, tol):
    H4 = np.asarray(H, dtype=complex).reshape(dA, dB, dA, dB)
    E = np.array(e0, dtype=complex, copy=True)
    F = np.array(f0, dtype=complex, copy=True)
    n = E.shape[0]
    vals = np.full(n, 1e300)
    prev = np.full(n, 1e300)
    sweeps = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for _ in range(max_sweeps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        f = F[idx]
        ha = np.einsum("nb,abcd,nd->nac", f.conj(), H4, f)
        w, v = np.linalg.eigh(ha)
        E[idx] = v[:, :, 0]
        e = E[idx]
        hb = np.einsum("na,abcd,nc->nbd", e.conj(), H4, e)
        w, v = np.linalg.eigh(hb)
        F[idx] = v[:, :, 0]
        vals[idx] = w[:, 0]
        sweeps[idx] += 1
        done = prev[idx] - w[:, 0] < tol
        prev[idx] = w[:, 0]
        active[idx[done]] = False
    return vals, E, F, sweeps


def _normalize(v, old):
    nrm = np.linalg.norm(v, axis=-1, keepdims=True)
    ok = nrm > 1e-300
    return np.where(ok, v / np.where(ok, nrm, 1.0), old)


def _chsh(T, S):
    ts = (S[:, 2] + S[:, 3]) @ T.T
    td = (S[:, 2] - S[:, 3]) @ T.T
    return np.sum(S[:, 0] * ts, axis=1) + np.sum(S[:, 1] * td, axis=1)


def chsh_ascent(T, starts, max_sweeps, tol):
    T = np.asarray(T, dtype=float)
    S = np.array(starts, dtype=float, copy=True)
    n = S.shape[0]
    prev = _chsh(T, S)
    vals = prev.copy()
    sweeps = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for _ in range(max_sweeps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        s = S[idx]
        s[:, 0] = _normalize((s[:, 2] + s[:, 3]) @ T.T, s[:, 0])
        s[:, 1] = _normalize((s[:, 2] - s[:, 3]) @ T.T, s[:, 1])
        s[:, 2] = _normalize((s[:, 0] + s[:, 1]) @ T, s[:, 2])
        s[:, 3] = _normalize((s[:, 0] - s[:, 1]) @ T, s[:, 3])
        S[idx] = s
        v = _chsh(T, s)
        vals[idx] = v
        sweeps[idx] += 1
        done = np.abs(v - prev[idx]) < tol
        prev[idx] = v
        active[idx[done]] = False
    return vals, S, sweeps
