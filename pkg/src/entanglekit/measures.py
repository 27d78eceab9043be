"""Entanglement measures: closed forms and certified numerical upper bounds.

Entanglement cost and distillable entanglement are asymptotic quantities and
are not computed; only the ordering ``REE <= EoF`` is checked in tests.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import (
    BipartiteSplit,
    DensityMatrix,
    DomainError,
    EnsembleDecomposition,
    PureState,
    State,
    UnsupportedError,
    as_density,
    bipartite_matrix,
    bipartite_vector,
    partial_transpose_matrix,
    schmidt,
    shannon_entropy,
    von_neumann_entropy,
)

LN2 = np.log(2.0)
SIGMA_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=float)


class Kind(str, enum.Enum):
    EXACT = "Exact"
    UPPER = "UpperBound"
    LOWER = "LowerBound"


@dataclass(frozen=True)
class MeasureResult:
    measure: str
    value: float
    kind: Kind
    method: str
    certificate: dict | None = field(default=None, compare=False)

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        d = {"measure": self.measure, "value": float(self.value), "kind": self.kind.value,
             "method": self.method}
        if self.certificate is not None:
            d["certificate"] = self.certificate
        return d


def _need_two_qubit(state: State):
    if tuple(state.dims) != (2, 2):
        raise DomainError(f"two-qubit input required, got dims {list(state.dims)}")


def binary_entropy(x: float) -> float:
    return shannon_entropy([x, 1 - x])


def entropy_of_entanglement(psi: PureState, split: BipartiteSplit | None = None) -> MeasureResult:
    """Entropy of the squared Schmidt coefficients."""
    coeffs = schmidt(psi, split).coefficients
    return MeasureResult("entropy_of_entanglement", shannon_entropy(coeffs ** 2), Kind.EXACT, "schmidt")


def concurrence_pure(psi: PureState) -> MeasureResult:
    """``|<psi| sigma_y⊗sigma_y |psi*>|``."""
    _need_two_qubit(psi)
    a = psi.amplitudes
    c = abs(a @ SIGMA_YY @ a)
    return MeasureResult("concurrence", float(min(c, 1.0)), Kind.EXACT, "spin-flip overlap")


def wootters_lambdas(rho: State) -> np.ndarray:
    """Decreasing square roots of the eigenvalues of ``rho * rho_tilde``.

    With ``rho = X X^dag`` these are the singular values of
    ``X^T (sigma_y⊗sigma_y) X``, which avoids the non-Hermitian eigenproblem.
    """
    m = as_density(rho).matrix
    w, v = np.linalg.eigh(m)
    keep = w > 1e-13
    X = v[:, keep] * np.sqrt(w[keep])
    out = np.zeros(4)
    s = np.linalg.svd(X.T @ SIGMA_YY @ X, compute_uv=False)
    out[: s.size] = s
    return out


def concurrence_mixed(rho: State) -> MeasureResult:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``."""
    _need_two_qubit(rho)
    lam = wootters_lambdas(rho)
    c = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return MeasureResult("concurrence", float(min(c, 1.0)), Kind.EXACT, "wootters")


def concurrence(state: State) -> MeasureResult:
    if isinstance(state, PureState):
        return concurrence_pure(state)
    return concurrence_mixed(state)


def eof_from_concurrence(c: float) -> float:
    c = min(max(float(c), 0.0), 1.0)
    return binary_entropy((1 + np.sqrt(1 - c * c)) / 2)


def eof_two_qubit(rho: State) -> MeasureResult:
    _need_two_qubit(rho)
    c = concurrence(rho).value
    return MeasureResult("eof", eof_from_concurrence(c), Kind.EXACT, "wootters closed form")


def negativity(rho: State, split: BipartiteSplit | None = None) -> MeasureResult:
    """Absolute sum of the negative eigenvalues of the partial transpose."""
    m, dA, dB = bipartite_matrix(rho, split)
    pt = partial_transpose_matrix(m, (dA, dB), 1)
    w = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    n = float(-np.sum(w[w < 0]))
    return MeasureResult("negativity", n, Kind.EXACT, "partial transpose spectrum")


def log_negativity(rho: State, split: BipartiteSplit | None = None) -> MeasureResult:
    n = negativity(rho, split).value
    return MeasureResult("log_negativity", float(np.log2(2 * n + 1)), Kind.EXACT,
                         "log2 of partial transpose trace norm")


# Convex-roof upper bound for the entanglement of formation

def _roof_objective(Psi, dA, dB):
    """Average entanglement of the ensemble given by the columns of ``Psi``.

    Returns the value and the Wirtinger gradient with respect to conj(Psi).
    """
    m = Psi.shape[1]
    M = Psi.T.reshape(m, dA, dB)
    u, s, wh = np.linalg.svd(M, full_matrices=False)
    sig = s * s
    p = sig.sum(axis=1)
    pos = sig > 1e-300
    logsig = np.where(pos, np.log(np.where(pos, sig, 1.0)), 0.0)
    logp = np.log(np.where(p > 1e-300, p, 1.0))
    val = -(np.sum(sig * logsig) - np.sum(p * logp)) / LN2
    coef = np.where(pos, -(logsig - logp[:, None]) * s, 0.0) / LN2
    G = np.einsum("kai,ki,kib->kab", u, coef, wh)
    return val, G.reshape(m, dA * dB).T


def _isometry(Z):
    S = Z.conj().T @ Z
    s, Q = np.linalg.eigh(S)
    s = np.maximum(s, 1e-300)
    inv_sqrt = (Q / np.sqrt(s)) @ Q.conj().T
    return Z @ inv_sqrt, inv_sqrt, s, Q


def _roof_value_grad(x, A, m, dA, dB):
    D, r = A.shape
    Z = (x[: m * r] + 1j * x[m * r:]).reshape(m, r)
    U, inv_sqrt, s, Q = _isometry(Z)
    Psi = A @ U.T
    val, G = _roof_objective(Psi, dA, dB)
    GU = G.T @ A.conj()
    # Frechet derivative of S^{-1/2}, Daleckii-Krein form.
    rs = 1 / np.sqrt(s)
    ds = s[:, None] - s[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        gam = np.where(np.abs(ds) > 1e-12 * s.max(), (rs[:, None] - rs[None, :]) / ds,
                       -0.5 * rs[:, None] ** 1.5 * rs[None, :] ** 1.5)
    C = Q.conj().T @ (Z.conj().T @ GU) @ Q
    Y = Q @ (gam * C) @ Q.conj().T
    GZ = GU @ inv_sqrt + Z @ (Y + Y.conj().T)
    grad = 2 * np.concatenate([GZ.real.ravel(), GZ.imag.ravel()])
    return val, grad


def _ensemble_from(A, U, dims):
    Psi = A @ U.T
    p = np.sum(np.abs(Psi) ** 2, axis=0)
    keep = p > 1e-14
    p, Psi = p[keep], Psi[:, keep]
    members = tuple(PureState(Psi[:, k] / np.sqrt(p[k]), dims) for k in range(Psi.shape[1]))
    return EnsembleDecomposition(p / p.sum(), members)


def _roof_search(m_, dA, dB, restarts, seed, members, maxiter):
    """Best decomposition found; returns (value, ensemble, member count)."""
    D = dA * dB
    w, v = np.linalg.eigh(m_)
    keep = w > 1e-12
    A = v[:, keep] * np.sqrt(w[keep])
    r = A.shape[1]
    if r == 1:
        psi = PureState(A[:, 0] / np.linalg.norm(A[:, 0]), (dA, dB))
        ens = EnsembleDecomposition(np.array([1.0]), (psi,))
        return entropy_of_entanglement(psi).value, ens, 1
    m = members or min(D * D, max(2 * r, D))
    rng = np.random.default_rng(seed)
    best = (np.inf, None)
    for k in range(max(1, restarts)):
        if k == 0:
            Z0 = np.zeros((m, r), dtype=complex)
            Z0[:r, :r] = np.eye(r)
            Z0 += 1e-3 * (rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r)))
        else:
            Z0 = rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r))
        x0 = np.concatenate([Z0.real.ravel(), Z0.imag.ravel()])
        res = minimize(_roof_value_grad, x0, args=(A, m, dA, dB), jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-10})
        if res.fun < best[0]:
            best = (float(res.fun), res.x)
    Z = (best[1][: m * r] + 1j * best[1][m * r:]).reshape(m, r)
    ens = _ensemble_from(A, _isometry(Z)[0], (dA, dB))
    return max(best[0], 0.0), ens, m


def eof_convex_roof_upper(rho: State, split: BipartiteSplit | None = None, restarts: int = 4,
                          seed=None, members: int | None = None, maxiter: int = 2000,
                          include_decomposition: bool = False) -> MeasureResult:
    """Upper bound on the entanglement of formation by minimizing over decompositions.

    Every ``m``-member decomposition of ``rho = A A^dag`` is ``A U^T`` for an
    ``m×r`` isometry ``U``.  ``U`` is taken as the polar factor of a free
    complex matrix and the average entanglement is minimized with L-BFGS on
    the analytic gradient.  The first start is the eigen-ensemble.

    With ``include_decomposition`` the certificate lists the achieving
    weights and member amplitudes.
    """
    m_, dA, dB = bipartite_matrix(rho, split)
    if dA > 4 or dB > 4:
        raise UnsupportedError(f"convex-roof search supports local dimension <= 4, got ({dA}, {dB})")
    val, ens, m = _roof_search(m_, dA, dB, restarts, seed, members, maxiter)
    cert = _ens_cert(ens) if include_decomposition else {"members": len(ens.members)}
    method = "pure input" if m == 1 else f"convex roof, L-BFGS over {m}-member decompositions"
    return MeasureResult("eof_upper", val, Kind.UPPER, method, cert)


def _ens_cert(ens: EnsembleDecomposition) -> dict:
    return {
        "weights": [float(p) for p in ens.weights],
        "members": [[[float(z.real), float(z.imag)] for z in s.amplitudes] for s in ens.members],
    }


# Relative entropy of entanglement, upper bound

def _logm_frechet_weights(s):
    ls = np.log(s)
    ds = s[:, None] - s[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(ds) > 1e-12 * s.max(), (ls[:, None] - ls[None, :]) / ds,
                        1 / np.sqrt(s[:, None] * s[None, :]))


def _unpack_products(x, K, dA, dB):
    o = 0
    wts = x[o:o + K]; o += K
    a = x[o:o + K * dA] + 1j * x[o + K * dA:o + 2 * K * dA]; o += 2 * K * dA
    b = x[o:o + K * dB] + 1j * x[o + K * dB:o + 2 * K * dB]
    return wts, a.reshape(K, dA), b.reshape(K, dB)


def _ree_value_grad(x, rho, rho_log_rho, K, dA, dB):
    wts, a, b = _unpack_products(x, K, dA, dB)
    q = np.exp(wts - wts.max())
    q /= q.sum()
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    ah, bh = a / na[:, None], b / nb[:, None]
    v = np.einsum("ka,kb->kab", ah, bh).reshape(K, dA * dB)
    sigma = np.einsum("k,ki,kj->ij", q, v, v.conj())
    s, Q = np.linalg.eigh(sigma)
    if s[0] <= 1e-300:
        return np.inf, np.zeros_like(x)
    rq = Q.conj().T @ rho @ Q
    val = (rho_log_rho - np.real(np.sum(np.diag(rq) * np.log(s)))) / LN2
    Gm = Q @ (_logm_frechet_weights(s) * rq) @ Q.conj().T
    gv = v @ Gm.T  # rows are (G v_k)
    c = -np.real(np.einsum("ki,ki->k", v.conj(), gv)) / LN2
    g_w = q * (c - q @ c)
    gv = gv.reshape(K, dA, dB)
    ga = np.einsum("kab,kb->ka", gv, bh.conj())
    gb = np.einsum("kab,ka->kb", gv, ah.conj())
    ga = (ga - np.real(np.sum(ah.conj() * ga, axis=1))[:, None] * ah) / na[:, None]
    gb = (gb - np.real(np.sum(bh.conj() * gb, axis=1))[:, None] * bh) / nb[:, None]
    # df = -(1/ln2) q_k 2 Re(g^dag dv); real-parameter gradient doubles again
    fa = -2 * q[:, None] * ga / LN2
    fb = -2 * q[:, None] * gb / LN2
    grad = np.concatenate([g_w, fa.real.ravel(), fa.imag.ravel(), fb.real.ravel(), fb.imag.ravel()])
    return float(val), grad


def _dephased_seed(ens: EnsembleDecomposition, dA, dB):
    """Product mixture obtained by dephasing each member in its Schmidt basis."""
    q, A, B = [], [], []
    for p, psi in zip(ens.weights, ens.members):
        sd = schmidt(PureState(psi.amplitudes, (dA, dB)))
        for c, e, f in zip(sd.coefficients, sd.left, sd.right):
            q.append(p * c * c)
            A.append(e)
            B.append(f)
    return np.array(q), np.array(A), np.array(B)


def relative_entropy_of_entanglement_upper(rho: State, split: BipartiteSplit | None = None,
                                           restarts: int = 4, seed=None, maxiter: int = 3000,
                                           terms: int | None = None) -> MeasureResult:
    """Upper bound on ``min_sigma S(rho || sigma)`` over mixtures of product states.

    The first start dephases each member of a convex-roof decomposition in
    its own Schmidt basis, so by joint convexity the result never exceeds
    the convex-roof bound.  Further starts are random.
    """
    m_, dA, dB = bipartite_matrix(rho, split)
    if dA * dB > 9 or dA > 3 or dB > 3:
        raise UnsupportedError(f"relative-entropy search supports dims up to (3, 3), got ({dA}, {dB})")
    D = dA * dB
    K0 = terms or D * D
    rho_log_rho = -von_neumann_entropy(m_) * LN2
    rng = np.random.default_rng(seed)
    _, ens, _ = _roof_search(m_, dA, dB, max(1, restarts // 2), rng.integers(2 ** 63), None, 2000)
    q0, a0, b0 = _dephased_seed(ens, dA, dB)
    K = max(K0, q0.size)
    starts = []
    pad = K - q0.size
    wts = np.concatenate([np.log(q0 + 1e-300), np.full(pad, -40.0)])
    a = np.vstack([a0, rng.normal(size=(pad, dA)) + 1j * rng.normal(size=(pad, dA))]) if pad else a0
    b = np.vstack([b0, rng.normal(size=(pad, dB)) + 1j * rng.normal(size=(pad, dB))]) if pad else b0
    starts.append((wts, a, b))
    for _ in range(max(0, restarts - 1)):
        starts.append((rng.normal(size=K) * 0.1,
                       rng.normal(size=(K, dA)) + 1j * rng.normal(size=(K, dA)),
                       rng.normal(size=(K, dB)) + 1j * rng.normal(size=(K, dB))))
    best_val, best_x = np.inf, None
    for wts, a, b in starts:
        x0 = np.concatenate([wts, a.real.ravel(), a.imag.ravel(), b.real.ravel(), b.imag.ravel()])
        f0, _ = _ree_value_grad(x0, m_, rho_log_rho, K, dA, dB)
        res = minimize(_ree_value_grad, x0, args=(m_, rho_log_rho, K, dA, dB), jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-10})
        v, x = (res.fun, res.x) if res.fun <= f0 else (f0, x0)
        if np.isfinite(v) and v < best_val:
            best_val, best_x = v, x
    if best_x is None:
        raise UnsupportedError("no admissible separable state found")
    wts, a, b = _unpack_products(best_x, K, dA, dB)
    q = np.exp(wts - wts.max())
    q /= q.sum()
    cert = {"terms": int(K), "weights": [float(t) for t in q]}
    return MeasureResult("ree_upper", max(float(best_val), 0.0), Kind.UPPER,
                         f"mixture of {K} product states, L-BFGS", cert)


MEASURES = {
    "negativity": negativity,
    "log_negativity": log_negativity,
}
