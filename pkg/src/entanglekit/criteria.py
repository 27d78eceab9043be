"""Separability criteria.

Every check returns a :class:`CriterionVerdict`; ``Entangled`` is only
reported when the score clears its threshold by more than
:data:`DETECTION_MARGIN`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .core import (
    EPS_PSD,
    BipartiteSplit,
    DensityMatrix,
    DomainError,
    PureState,
    State,
    UnsupportedError,
    as_density,
    bipartite_matrix,
    hermitian_basis,
    operator_schmidt,
    partial_transpose_matrix,
    realign,
    von_neumann_entropy,
)

DETECTION_MARGIN = 1e-9
# Residual norm below which a vector counts as lying in a subspace.
EPS_RANGE = 1e-6
# Relative singular-value cutoff for numerical rank.
RANK_RTOL = 1e-7
# Dimension pairs where PPT is also sufficient for separability.
PPT_SUFFICIENT_DIMS = {(2, 2), (2, 3), (3, 2)}


class Outcome(str, enum.Enum):
    ENTANGLED = "Entangled"
    NOT_DETECTED = "NotDetected"
    SEPARABLE_CERTIFIED = "SeparableCertified"


@dataclass(frozen=True)
class CriterionVerdict:
    criterion: str
    outcome: Outcome
    score: float
    threshold: float
    details: dict = field(default_factory=dict)

    @property
    def detected(self) -> bool:
        return self.outcome is Outcome.ENTANGLED

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "outcome": self.outcome.value,
            "score": float(self.score),
            "threshold": float(self.threshold),
            "details": self.details,
        }


def _verdict(name, score, threshold, entangled, details=None):
    out = Outcome.ENTANGLED if entangled else Outcome.NOT_DETECTED
    return CriterionVerdict(name, out, float(score), float(threshold), details or {})


def numerical_rank(m: np.ndarray, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(np.atleast_2d(m), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def range_basis(m: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal columns spanning the range of a Hermitian PSD-ish matrix."""
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    top = np.max(np.abs(w))
    if top == 0:
        return v[:, :0]
    return v[:, np.abs(w) > rtol * top]


# Spectral criteria

def ppt_check(rho: State, split: BipartiteSplit | None = None) -> CriterionVerdict:
    """Minimum eigenvalue of the partial transpose on side A."""
    m, dA, dB = bipartite_matrix(rho, split)
    pt = partial_transpose_matrix(m, (dA, dB), 0)
    lo = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
    if lo < -EPS_PSD:
        out = Outcome.ENTANGLED
    elif (dA, dB) in PPT_SUFFICIENT_DIMS:
        out = Outcome.SEPARABLE_CERTIFIED
    else:
        out = Outcome.NOT_DETECTED
    return CriterionVerdict("ppt", out, lo, 0.0, {"dims": [dA, dB]})


def _majorization_gap(x: np.ndarray, y: np.ndarray) -> float:
    """Largest ``sum_{i<=l} x_i - sum_{i<=l} y_i`` with both sorted descending."""
    n = max(x.size, y.size)
    xs = np.zeros(n)
    ys = np.zeros(n)
    xs[: x.size] = np.sort(x)[::-1]
    ys[: y.size] = np.sort(y)[::-1]
    return float(np.max(np.cumsum(xs) - np.cumsum(ys)))


def _marginal_spectra(m, dA, dB):
    t = m.reshape(dA, dB, dA, dB)
    ra = np.einsum("ibjb->ij", t)
    rb = np.einsum("aiaj->ij", t)
    return np.linalg.eigvalsh(ra), np.linalg.eigvalsh(rb)


def majorization_check(rho: State, split: BipartiteSplit | None = None) -> CriterionVerdict:
    """Global spectrum must be majorized by both marginal spectra.

    The score is the worst prefix-sum excess over the two relations.
    """
    m, dA, dB = bipartite_matrix(rho, split)
    lam = np.linalg.eigvalsh(m)
    la, lb = _marginal_spectra(m, dA, dB)
    gap_a = _majorization_gap(lam, la)
    gap_b = _majorization_gap(lam, lb)
    score = max(gap_a, gap_b)
    return _verdict("majorization", score, 0.0, score > DETECTION_MARGIN,
                    {"gap_a": gap_a, "gap_b": gap_b})


def entropy_check(rho: State, split: BipartiteSplit | None = None) -> CriterionVerdict:
    """``S(rho) - max(S(rho_A), S(rho_B))``; negative means entangled."""
    m, dA, dB = bipartite_matrix(rho, split)
    s = von_neumann_entropy(m)
    la, lb = _marginal_spectra(m, dA, dB)
    sa, sb = von_neumann_entropy(np.diag(la)), von_neumann_entropy(np.diag(lb))
    score = s - max(sa, sb)
    return _verdict("entropy", score, 0.0, score < -DETECTION_MARGIN,
                    {"S": s, "S_A": sa, "S_B": sb})


def ccnr_check(rho: State, split: BipartiteSplit | None = None) -> CriterionVerdict:
    """Sum of realignment singular values; above 1 means entangled."""
    lam = realign(rho, split)
    score = float(np.sum(lam))
    return _verdict("ccnr", score, 1.0, score > 1.0 + DETECTION_MARGIN)


# Covariance-matrix criteria

@dataclass(frozen=True)
class CovarianceMatrixBundle:
    """Block covariance matrix over the local Hermitian bases.

    ``gamma = [[A, X], [X.T, B]]``.  With ``symmetric`` the marginal blocks use
    the symmetrized products ``<{M_i, M_j}>/2``; ``X`` is the same either way.
    """

    gamma: np.ndarray
    A: np.ndarray
    B: np.ndarray
    X: np.ndarray
    symmetric: bool
    dims: tuple[int, int]
    purity_a: float
    purity_b: float
    basis: str = "xyz"


def _local_covariance(r, basis, symmetric):
    ev = np.einsum("kij,ji->k", basis, r).real
    prod = np.einsum("kab,lbc,ca->kl", basis, basis, r)
    if symmetric:
        prod = prod.real
    return prod - np.outer(ev, ev), ev


def cmc_build(rho: State, split: BipartiteSplit | None = None, symmetric: bool = False) -> CovarianceMatrixBundle:
    """Block covariance matrix of ``rho`` for the observables ``A_k⊗I`` and ``I⊗B_k``."""
    m, dA, dB = bipartite_matrix(rho, split)
    t = m.reshape(dA, dB, dA, dB)
    ra = np.einsum("ibjb->ij", t)
    rb = np.einsum("aiaj->ij", t)
    ga, gb = hermitian_basis(dA), hermitian_basis(dB)
    A, ea = _local_covariance(ra, ga, symmetric)
    B, eb = _local_covariance(rb, gb, symmetric)
    joint = np.einsum("imjn,kji,lnm->kl", t, ga, gb).real
    X = joint - np.outer(ea, eb)
    gamma = np.block([[A, X], [X.T, B]])
    return CovarianceMatrixBundle(
        gamma=gamma, A=A, B=B, X=X, symmetric=symmetric, dims=(dA, dB),
        purity_a=float(np.trace(ra @ ra).real), purity_b=float(np.trace(rb @ rb).real),
    )


def _bundle(bundle_or_state, split, symmetric):
    if isinstance(bundle_or_state, CovarianceMatrixBundle):
        return bundle_or_state
    return cmc_build(bundle_or_state, split, symmetric=symmetric)


def cmc_corollary1(bundle, rho: State | None = None, split: BipartiteSplit | None = None) -> CriterionVerdict:
    """``||X||_1^2`` against ``(1 - tr rho_A^2)(1 - tr rho_B^2)``.

    ``bundle`` may also be a state, in which case it is built on the fly.
    ``rho`` is accepted for symmetry with the other checks; the purities are
    already stored in the bundle.
    """
    b = _bundle(bundle, split, False)
    norm = float(np.sum(np.linalg.svd(b.X, compute_uv=False)))
    rhs = (1 - b.purity_a) * (1 - b.purity_b)
    score = norm ** 2 - rhs
    return _verdict("cmc1", score, 0.0, score > DETECTION_MARGIN, {"trace_norm_X": norm, "rhs": rhs})


def cmc_corollary2(bundle, rho: State | None = None, J: Sequence[int] | None = None,
                   split: BipartiteSplit | None = None) -> CriterionVerdict:
    """``2 sum_i |X_{i, J_i}|`` against ``(1 - tr rho_A^2) + (1 - tr rho_B^2)``.

    ``J`` assigns a distinct column of ``X`` to each row (rows indexed by the
    smaller side).  By default the assignment maximizing the left-hand side
    is used.
    """
    b = _bundle(bundle, split, True)
    if not b.symmetric:
        raise DomainError("this bound uses the symmetric covariance matrix")
    X = np.abs(b.X)
    if X.shape[0] > X.shape[1]:
        X = X.T
    rows, cols = X.shape
    if J is None:
        r, c = linear_sum_assignment(X, maximize=True)
        J = c[np.argsort(r)]
    else:
        J = np.asarray(J, dtype=int)
        if J.shape != (rows,):
            raise DomainError(f"index set must have exactly {rows} entries, got {J.size}")
        if len(set(J.tolist())) != rows or J.min() < 0 or J.max() >= cols:
            raise DomainError(f"index set must hold {rows} distinct columns in [0, {cols})")
    lhs = 2 * float(np.sum(X[np.arange(rows), J]))
    rhs = (1 - b.purity_a) + (1 - b.purity_b)
    score = lhs - rhs
    return _verdict("cmc2", score, 0.0, score > DETECTION_MARGIN,
                    {"lhs": lhs, "rhs": rhs, "J": [int(j) for j in J]})


def cmc_corollary3(rho: State, split: BipartiteSplit | None = None) -> CriterionVerdict:
    """Covariance bound evaluated in the operator-Schmidt basis of ``rho``."""
    os_ = operator_schmidt(rho, split)
    lam = os_.values
    ga = np.einsum("kii->k", os_.ops_a).real
    gb = np.einsum("kii->k", os_.ops_b).real
    lhs = 2 * float(np.sum(np.abs(lam - lam ** 2 * ga * gb)))
    rhs = 2 - float(np.sum(lam ** 2 * (ga ** 2 + gb ** 2)))
    score = lhs - rhs
    return _verdict("cmc3", score, 0.0, score > DETECTION_MARGIN, {"lhs": lhs, "rhs": rhs})


# Range criterion

@dataclass(frozen=True)
class RangeWitnessData:
    """Outcome of checking a product-vector family against the two ranges.

    ``in_range[k]`` says whether ``e_k ⊗ f_k`` lies in Range(rho) and
    ``in_pt_range[k]`` whether ``e_k ⊗ conj(f_k)`` lies in Range(rho^{T_B}).
    ``deficit`` is ``rank(rho)`` minus the rank of the in-range members.
    """

    product_vectors: list
    residuals: np.ndarray
    pt_residuals: np.ndarray
    in_range: np.ndarray
    in_pt_range: np.ndarray
    rank: int
    pt_rank: int
    span_rank: int
    pt_span_rank: int
    spans_range: bool
    spans_pt_range: bool

    @property
    def deficit(self) -> int:
        return self.rank - self.span_rank

    @property
    def pt_deficit(self) -> int:
        return self.pt_rank - self.pt_span_rank


def _as_pair(c):
    e, f = c
    e = e.amplitudes if isinstance(e, PureState) else np.asarray(e, dtype=complex)
    f = f.amplitudes if isinstance(f, PureState) else np.asarray(f, dtype=complex)
    return e / np.linalg.norm(e), f / np.linalg.norm(f)


def _residuals(basis, vecs):
    if vecs.size == 0:
        return np.zeros(0)
    proj = basis @ (basis.conj().T @ vecs.T)
    return np.linalg.norm(vecs.T - proj, axis=0)


def range_verify(rho: State, candidates, split: BipartiteSplit | None = None,
                 eps_range: float = EPS_RANGE) -> RangeWitnessData:
    """Test product vectors ``(e, f)`` against Range(rho) and Range(rho^{T_B})."""
    m, dA, dB = bipartite_matrix(rho, split)
    pairs = [_as_pair(c) for c in candidates]
    for e, f in pairs:
        if e.size != dA or f.size != dB:
            raise DomainError(f"candidate has dims ({e.size}, {f.size}), split needs ({dA}, {dB})")
    pt = partial_transpose_matrix(m, (dA, dB), 1)
    basis, pt_basis = range_basis(m), range_basis(pt)
    if pairs:
        vecs = np.array([np.kron(e, f) for e, f in pairs])
        cvecs = np.array([np.kron(e, f.conj()) for e, f in pairs])
    else:
        vecs = cvecs = np.zeros((0, dA * dB), dtype=complex)
    res, pres = _residuals(basis, vecs), _residuals(pt_basis, cvecs)
    inr, inp = res < eps_range, pres < eps_range
    span = numerical_rank(vecs[inr]) if inr.any() else 0
    pspan = numerical_rank(cvecs[inp]) if inp.any() else 0
    rank, prank = basis.shape[1], pt_basis.shape[1]
    return RangeWitnessData(
        product_vectors=pairs, residuals=res, pt_residuals=pres, in_range=inr, in_pt_range=inp,
        rank=rank, pt_rank=prank, span_rank=span, pt_span_rank=pspan,
        spans_range=bool(span == rank), spans_pt_range=bool(pspan == prank),
    )


@dataclass(frozen=True)
class ProductVectorSearch:
    """All restarts of a product-vector search; ``found`` holds the hits."""

    found: list
    residuals: np.ndarray
    sweeps: np.ndarray

    @property
    def min_residual(self) -> float:
        return float(self.residuals.min()) if self.residuals.size else float("inf")


def _random_unit(rng, n, d):
    z = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def range_search(rho, split: BipartiteSplit | None = None, budget: int = 64, seed=None,
                 partial_transpose: bool = False, max_sweeps: int = 2000, tol: float = 1e-15,
                 eps_range: float = EPS_RANGE, dims: tuple[int, int] | None = None) -> ProductVectorSearch:
    """See-saw search for product vectors in the range of ``rho`` (or rho^{T_B}).

    Each restart alternately replaces ``e`` and ``f`` by the lowest
    eigenvector of the reduced operator of ``I - P``, where ``P`` projects
    onto the range.  ``rho`` may be a raw Hermitian matrix if ``dims`` is given.
    """
    if isinstance(rho, (DensityMatrix, PureState)):
        m, dA, dB = bipartite_matrix(rho, split)
    else:
        if dims is None:
            raise DomainError("dims are required for a raw matrix")
        m = np.asarray(rho, dtype=complex)
        dA, dB = dims
    if dA > 4 or dB > 4:
        raise UnsupportedError(f"product-vector search supports local dimension <= 4, got ({dA}, {dB})")
    if partial_transpose:
        m = partial_transpose_matrix(m, (dA, dB), 1)
    basis = range_basis(m)
    H = np.eye(dA * dB) - basis @ basis.conj().T
    rng = np.random.default_rng(seed)
    e0, f0 = _random_unit(rng, budget, dA), _random_unit(rng, budget, dB)
    vals, e, f, sweeps = kernels.product_min(H, dA, dB, e0, f0, max_sweeps, tol)
    res = np.sqrt(np.clip(vals, 0, None))
    hits = [(e[k].copy(), f[k].copy()) for k in np.flatnonzero(res < eps_range)]
    return ProductVectorSearch(hits, res, sweeps)


def range_search_product_vectors(rho, split: BipartiteSplit | None = None, budget: int = 64,
                                 seed=None, partial_transpose: bool = False, **kw) -> list:
    """Product vectors ``(e, f)`` found in the range; possibly empty."""
    return range_search(rho, split, budget, seed, partial_transpose, **kw).found


def partial_conjugate(pairs) -> list:
    """``(e, f) -> (e, conj(f))`` for each pair."""
    return [(e, np.conj(f)) for e, f in (_as_pair(p) for p in pairs)]


CRITERIA = {
    "ppt": ppt_check,
    "majorization": majorization_check,
    "entropy": entropy_check,
    "ccnr": ccnr_check,
    "cmc1": lambda rho, split=None: cmc_corollary1(cmc_build(rho, split)),
    "cmc2": lambda rho, split=None: cmc_corollary2(cmc_build(rho, split, symmetric=True)),
    "cmc3": cmc_corollary3,
}
