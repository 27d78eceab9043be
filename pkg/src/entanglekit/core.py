"""State containers and the tensor-algebra transforms used throughout the package.

Conventions
-----------
Tensor factors are ordered row-major: party 0 is the slowest-varying index of
a composite basis label, so ``|i j k>`` sits at ``i*d1*d2 + j*d2 + k``.  All
entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

# Input validation tolerances.
EPS_HERM = 1e-9
EPS_NORM = 1e-9
EPS_PSD = 1e-9
# Schmidt coefficients at or below this are dropped.
EPS_RANK = 1e-10
EPS_RECON = 1e-8


class EntanglementError(Exception):
    """Base class for errors raised by entanglekit."""


class DomainError(EntanglementError, ValueError):
    """An argument is outside the domain of an operation."""


class UnsupportedError(DomainError):
    """The input is valid but exceeds what an operation supports."""


class NumericError(EntanglementError, ArithmeticError):
    """A computation produced a numerically inconsistent result."""


def _as_dims(dims: Iterable[int], size: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise DomainError("dims must name at least one party")
    if any(d < 2 for d in dims):
        raise DomainError(f"every party dimension must be >= 2, got {list(dims)}")
    if int(np.prod(dims)) != size:
        raise DomainError(f"dims {list(dims)} multiply to {int(np.prod(dims))}, expected {size}")
    return dims


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a tensor-product space."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1:
            raise DomainError("amplitudes must be a 1-D vector")
        dims = _as_dims(self.dims, amp.size)
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > EPS_NORM:
            raise DomainError(f"state vector has norm {norm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amp))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims) -> "PureState":
        amp = np.asarray(amplitudes, dtype=complex)
        return cls(amp / np.linalg.norm(amp), dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator with party dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {m.shape}")
        dims = _as_dims(self.dims, m.shape[0])
        herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm > EPS_HERM:
            raise DomainError(f"matrix is not Hermitian (max deviation {herm:.3g})")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1.0) > EPS_NORM:
            raise DomainError(f"trace is {tr:.12g}, expected 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -EPS_PSD:
            raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3g})")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_matrix(cls, matrix, dims, normalize: bool = False) -> "DensityMatrix":
        m = np.asarray(matrix, dtype=complex)
        if normalize:
            m = m / np.trace(m).real
        return cls(m, dims)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        d = int(np.prod(dims))
        return cls(np.eye(d) / d, dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


State = Union[PureState, DensityMatrix]


def as_density(state: State) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


@dataclass(frozen=True)
class BipartiteSplit:
    """Partition of the parties ``0..n-1`` into two nonempty groups."""

    party_a: frozenset
    party_b: frozenset

    def __post_init__(self):
        a, b = frozenset(int(i) for i in self.party_a), frozenset(int(i) for i in self.party_b)
        if not a or not b:
            raise DomainError("both sides of a bipartition must be nonempty")
        if a & b:
            raise DomainError(f"parties {sorted(a & b)} appear on both sides")
        if a | b != frozenset(range(len(a | b))):
            raise DomainError("bipartition must cover parties 0..n-1 exactly")
        object.__setattr__(self, "party_a", a)
        object.__setattr__(self, "party_b", b)

    @classmethod
    def of(cls, party_a: Iterable[int], n_parties: int) -> "BipartiteSplit":
        a = frozenset(int(i) for i in party_a)
        if any(i < 0 or i >= n_parties for i in a):
            raise DomainError(f"party index out of range for {n_parties} parties: {sorted(a)}")
        return cls(a, frozenset(range(n_parties)) - a)

    @property
    def n_parties(self) -> int:
        return len(self.party_a) + len(self.party_b)

    def label(self, names: str = "ABCDEFGH") -> str:
        return "".join(names[i] for i in sorted(self.party_a)) + ":" + "".join(
            names[i] for i in sorted(self.party_b))

    def dims(self, dims: Sequence[int]) -> tuple[int, int]:
        return (int(np.prod([dims[i] for i in sorted(self.party_a)])),
                int(np.prod([dims[i] for i in sorted(self.party_b)])))


def default_split(n_parties: int) -> BipartiteSplit:
    """Party 0 against everyone else."""
    if n_parties < 2:
        raise DomainError("a bipartition needs at least two parties")
    return BipartiteSplit.of([0], n_parties)


def all_bipartitions(n_parties: int) -> list[BipartiteSplit]:
    """Every bipartition once, with party 0 always on side A."""
    rest = list(range(1, n_parties))
    out = []
    for size in range(0, n_parties - 1):
        for extra in combinations(rest, size):
            out.append(BipartiteSplit.of((0,) + extra, n_parties))
    return out


def _check_split(split: BipartiteSplit | None, n_parties: int) -> BipartiteSplit:
    if split is None:
        return default_split(n_parties)
    if split.n_parties != n_parties:
        raise DomainError(f"split covers {split.n_parties} parties, state has {n_parties}")
    return split


def _order(split: BipartiteSplit) -> list[int]:
    return sorted(split.party_a) + sorted(split.party_b)


def permute_vector(psi: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a state vector; ``order[k]`` is the old index of new party k."""
    t = np.asarray(psi).reshape(tuple(dims))
    return t.transpose(tuple(order)).reshape(-1)


def permute_operator(m: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    n = len(dims)
    t = np.asarray(m).reshape(tuple(dims) * 2)
    t = t.transpose(tuple(order) + tuple(n + k for k in order))
    d = int(np.prod(dims))
    return t.reshape(d, d)


def bipartite_matrix(rho: State, split: BipartiteSplit | None = None) -> tuple[np.ndarray, int, int]:
    """Density matrix regrouped as A⊗B for ``split``, with (dA, dB)."""
    rho = as_density(rho)
    split = _check_split(split, rho.n_parties)
    dA, dB = split.dims(rho.dims)
    return permute_operator(rho.matrix, rho.dims, _order(split)), dA, dB


def bipartite_vector(psi: PureState, split: BipartiteSplit | None = None) -> tuple[np.ndarray, int, int]:
    split = _check_split(split, psi.n_parties)
    dA, dB = split.dims(psi.dims)
    return permute_vector(psi.amplitudes, psi.dims, _order(split)), dA, dB


def as_bipartite(rho: State, split: BipartiteSplit | None = None) -> DensityMatrix:
    m, dA, dB = bipartite_matrix(rho, split)
    return DensityMatrix(m, (dA, dB))


def tensor(a: State, b: State) -> State:
    """Kronecker product; party lists are concatenated."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    a, b = as_density(a), as_density(b)
    return DensityMatrix(np.kron(a.matrix, b.matrix), a.dims + b.dims)


def _party_set(parties, n: int) -> set[int]:
    if isinstance(parties, (int, np.integer)):
        parties = [parties]
    s = {int(p) for p in parties}
    if not s:
        raise DomainError("party set must be nonempty")
    bad = [p for p in s if p < 0 or p >= n]
    if bad:
        raise DomainError(f"party index {bad[0]} out of range for {n} parties")
    return s


def partial_trace(rho: State, keep) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (kept in their original order)."""
    rho = as_density(rho)
    n = rho.n_parties
    kept = sorted(_party_set(keep, n))
    traced = [k for k in range(n) if k not in kept]
    dims = rho.dims
    t = rho.matrix.reshape(dims * 2)
    t = t.transpose(kept + traced + [n + k for k in kept] + [n + k for k in traced])
    dk = int(np.prod([dims[k] for k in kept]))
    dt = int(np.prod([dims[k] for k in traced])) if traced else 1
    red = np.trace(t.reshape(dk, dt, dk, dt), axis1=1, axis2=3)
    return DensityMatrix(red, tuple(dims[k] for k in kept))


def partial_transpose_matrix(m: np.ndarray, dims: Sequence[int], parties) -> np.ndarray:
    """Transpose the indices of ``parties`` in an operator on ``dims``."""
    n = len(dims)
    ps = _party_set(parties, n)
    axes = list(range(2 * n))
    for p in ps:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    d = int(np.prod(dims))
    return np.asarray(m).reshape(tuple(dims) * 2).transpose(axes).reshape(d, d)


def partial_transpose(rho: State, party=0) -> np.ndarray:
    """Partial transpose on one party (or a set of parties).

    The result can have negative eigenvalues, so it is returned as a plain
    Hermitian array rather than a :class:`DensityMatrix`.
    """
    rho = as_density(rho)
    return partial_transpose_matrix(rho.matrix, rho.dims, party)


def spectrum(m, tol: float = EPS_HERM) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in non-increasing order."""
    if isinstance(m, DensityMatrix):
        m = m.matrix
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("spectrum needs a square matrix")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise DomainError("spectrum needs a Hermitian matrix")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)[::-1]


def _clipped_probabilities(evals: np.ndarray) -> np.ndarray:
    lo = evals.min() if evals.size else 0.0
    if lo < -EPS_PSD:
        raise NumericError(f"eigenvalue {lo:.3g} is too negative for a state")
    return np.clip(evals, 0.0, 1.0)


def shannon_entropy(p) -> float:
    """Shannon entropy in bits with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def von_neumann_entropy(rho) -> float:
    """``-tr rho log2 rho``."""
    if isinstance(rho, PureState):
        return 0.0
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return shannon_entropy(_clipped_probabilities(np.linalg.eigvalsh(m)))


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left: np.ndarray  # rows are |e_i>
    right: np.ndarray  # rows are |f_i>

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ia,ib->ab", self.coefficients, self.left, self.right).reshape(-1)


def schmidt(psi: PureState, split: BipartiteSplit | None = None) -> SchmidtDecomposition:
    """Schmidt decomposition across ``split`` (default: party 0 against the rest)."""
    vec, dA, dB = bipartite_vector(psi, split)
    u, s, vh = np.linalg.svd(vec.reshape(dA, dB), full_matrices=False)
    keep = s > EPS_RANK
    return SchmidtDecomposition(s[keep], u[:, keep].T.copy(), vh[keep].copy())


def hermitian_basis(d: int) -> np.ndarray:
    """Hilbert-Schmidt orthonormal Hermitian basis of d×d matrices.

    Ordered as the diagonal projectors |i><i|, then the symmetric
    combinations (|i><j| + |j><i|)/√2, then the antisymmetric
    i(|k><l| - |l><k|)/√2, pairs in lexicographic order.
    """
    basis = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1
        basis.append(m)
    pairs = list(combinations(range(d), 2))
    for i, j in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[i, j] = m[j, i] = 1 / np.sqrt(2)
        basis.append(m)
    for k, l in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[k, l] = 1j / np.sqrt(2)
        m[l, k] = -1j / np.sqrt(2)
        basis.append(m)
    return np.array(basis)


def realigned_matrix(m: np.ndarray, dA: int, dB: int) -> np.ndarray:
    """Rows indexed by (i, j) of A, columns by (mu, nu) of B."""
    return m.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB)


def realign(rho: State, split: BipartiteSplit | None = None) -> np.ndarray:
    """Operator-Schmidt singular values, non-increasing, ``min(dA², dB²)`` of them."""
    m, dA, dB = bipartite_matrix(rho, split)
    return np.linalg.svd(realigned_matrix(m, dA, dB), compute_uv=False)


@dataclass(frozen=True)
class OperatorSchmidt:
    """``rho = sum_k values[k] * ops_a[k] ⊗ ops_b[k]`` with orthonormal Hermitian factors."""

    values: np.ndarray
    ops_a: np.ndarray
    ops_b: np.ndarray
    dims: tuple[int, int]


def operator_schmidt(rho: State, split: BipartiteSplit | None = None) -> OperatorSchmidt:
    """Operator Schmidt decomposition with Hermitian factors.

    ``rho`` is expanded in the real coefficient matrix ``xi[k, l] = tr(rho Gk⊗Gl)``
    over the Hermitian bases of :func:`hermitian_basis`; the SVD of ``xi`` is
    real, so the rotated factors stay Hermitian.
    """
    m, dA, dB = bipartite_matrix(rho, split)
    ga, gb = hermitian_basis(dA), hermitian_basis(dB)
    t = m.reshape(dA, dB, dA, dB)
    # tr(rho (Ga ⊗ Gb)) = sum rho[i mu, j nu] Ga[j, i] Gb[nu, mu]
    xi = np.einsum("imjn,kji,lnm->kl", t, ga, gb).real
    u, s, vt = np.linalg.svd(xi, full_matrices=False)
    ops_a = np.einsum("ik,iab->kab", u, ga)
    ops_b = np.einsum("kl,lab->kab", vt, gb)
    return OperatorSchmidt(s, ops_a, ops_b, (dA, dB))


@dataclass(frozen=True)
class EnsembleDecomposition:
    """A pure-state ensemble ``{p_i, |psi_i>}``."""

    weights: np.ndarray
    members: tuple = field(default_factory=tuple)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        members = tuple(self.members)
        if w.ndim != 1 or w.size != len(members) or w.size == 0:
            raise DomainError("need one positive weight per ensemble member")
        if np.any(w <= 0) or abs(w.sum() - 1) > EPS_NORM:
            raise DomainError("ensemble weights must be positive and sum to 1")
        dims = members[0].dims
        if any(m.dims != dims for m in members):
            raise DomainError("ensemble members must share dimensions")
        if len(members) > int(np.prod(dims)) ** 2:
            raise DomainError("ensemble larger than the Caratheodory bound (dim H)^2")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "members", members)

    def density(self) -> DensityMatrix:
        dims = self.members[0].dims
        m = sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in zip(self.weights, self.members))
        return DensityMatrix(m, dims)

    def reconstructs(self, rho: DensityMatrix, tol: float = EPS_RECON) -> bool:
        return bool(np.max(np.abs(self.density().matrix - rho.matrix)) < tol)


def ket(label: str, d: int = 2) -> np.ndarray:
    """Computational basis vector from a digit string, e.g. ``ket("010")``."""
    v = np.zeros(d ** len(label), dtype=complex)
    v[int(label, d)] = 1
    return v
