"""Multipartite pure-state structure: bipartitions, GGM, three-qubit families, monogamy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    EPS_RANK,
    BipartiteSplit,
    DomainError,
    PureState,
    UnsupportedError,
    all_bipartitions,
    bipartite_vector,
    partial_trace,
    schmidt,
)

MAX_PARTIES = 8


@dataclass(frozen=True)
class BipartitionEntry:
    rank: int
    max_coefficient: float
    coefficients: np.ndarray


@dataclass(frozen=True)
class BipartitionTable:
    entries: dict

    def separable_splits(self) -> list[BipartiteSplit]:
        return [s for s, e in self.entries.items() if e.rank == 1]

    def to_dict(self) -> dict:
        return {s.label(): {"rank": e.rank, "max_coefficient": e.max_coefficient}
                for s, e in sorted(self.entries.items(), key=lambda kv: (len(kv[0].party_a), sorted(kv[0].party_a)))}


def _need_pure(psi):
    if not isinstance(psi, PureState):
        raise UnsupportedError("this operation is defined for pure states only")


def bipartition_table(psi: PureState) -> BipartitionTable:
    """Schmidt rank and largest Schmidt coefficient for every bipartition."""
    _need_pure(psi)
    if psi.n_parties > MAX_PARTIES:
        raise UnsupportedError(f"at most {MAX_PARTIES} parties supported, got {psi.n_parties}")
    if psi.n_parties < 2:
        raise DomainError("need at least two parties")
    entries = {}
    for split in all_bipartitions(psi.n_parties):
        sd = schmidt(psi, split)
        c = sd.coefficients
        # rank 1 exactly when the leading coefficient is 1 to within the cutoff
        rank = 1 if 1 - c[0] <= EPS_RANK else sd.rank
        entries[split] = BipartitionEntry(rank, float(min(c[0], 1.0)), c)
    return BipartitionTable(entries)


@dataclass(frozen=True)
class KSeparability:
    k: int
    genuine: bool
    separable_splits: int
    finest_partition: tuple


def _finest_product_partition(psi: PureState) -> tuple:
    """Coarsest-to-finest refinement: blocks that cannot be split further."""
    n = psi.n_parties
    blocks = [tuple(range(n))]
    # a party subset S factors off iff the S:rest cut has Schmidt rank 1
    changed = True
    table = bipartition_table(psi)
    seps = [frozenset(s.party_a) for s in table.separable_splits()]
    cuts = seps + [frozenset(range(n)) - s for s in seps]
    while changed:
        changed = False
        for i, blk in enumerate(blocks):
            b = frozenset(blk)
            for c in cuts:
                part = b & c
                if part and part != b:
                    blocks[i:i + 1] = [tuple(sorted(part)), tuple(sorted(b - part))]
                    changed = True
                    break
            if changed:
                break
    return tuple(sorted(blocks))


def k_separability_pure(psi: PureState) -> KSeparability:
    """``k = 1 + #separable bipartitions`` capped at the number of parties.

    ``genuine`` means no bipartition is separable.  The finest product
    partition is also returned because for four or more parties the count
    of separable cuts alone does not fix the partition structure.
    """
    table = bipartition_table(psi)
    nsep = len(table.separable_splits())
    k = min(1 + nsep, psi.n_parties)
    return KSeparability(k, nsep == 0, nsep, _finest_product_partition(psi))


def ggm(psi: PureState) -> float:
    """``1 - max lambda^2`` over all bipartitions."""
    table = bipartition_table(psi)
    lam = max(e.max_coefficient for e in table.entries.values())
    return float(max(0.0, 1 - lam * lam))


def ggm_bruteforce_oracle(psi: PureState, restarts: int = 8, seed=None, max_sweeps: int = 2000,
                          tol: float = 1e-15) -> float:
    """Direct minimization of ``1 - |<psi|phi>|^2`` over bipartite product ``phi``.

    Each cut is handled by see-saw on ``-|psi><psi|`` regrouped across the
    cut; the result never uses Schmidt coefficients.
    """
    _need_pure(psi)
    rng = np.random.default_rng(seed)
    best = 0.0
    for split in all_bipartitions(psi.n_parties):
        v, dA, dB = bipartite_vector(psi, split)
        H = -np.outer(v, v.conj())
        e0 = rng.normal(size=(restarts, dA)) + 1j * rng.normal(size=(restarts, dA))
        f0 = rng.normal(size=(restarts, dB)) + 1j * rng.normal(size=(restarts, dB))
        e0 /= np.linalg.norm(e0, axis=1, keepdims=True)
        f0 /= np.linalg.norm(f0, axis=1, keepdims=True)
        vals, *_ = kernels.product_min(H, dA, dB, e0, f0, max_sweeps, tol)
        best = max(best, float(-vals.min()))
    return float(max(0.0, 1 - best))


# Three-qubit families

@dataclass(frozen=True)
class GHZClassParams:
    delta: float
    alpha: float
    beta: float
    gamma: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0 < self.delta <= np.pi / 4:
            raise DomainError(f"delta must lie in (0, pi/4], got {self.delta}")
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0 < v <= np.pi / 2:
                raise DomainError(f"{name} must lie in (0, pi/2], got {v}")
        if not 0 <= self.phi < 2 * np.pi:
            raise DomainError(f"phi must lie in [0, 2pi), got {self.phi}")

    @property
    def K(self) -> float:
        c = np.cos
        return 1 / (1 + 2 * c(self.delta) * np.sin(self.delta) * c(self.alpha) * c(self.beta)
                    * c(self.gamma) * c(self.phi))


@dataclass(frozen=True)
class WClassParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.a + self.b + self.c > 1 + 1e-12:
            raise DomainError("a + b + c must not exceed 1")

    @property
    def d(self) -> float:
        return max(0.0, 1 - (self.a + self.b + self.c))


def make_ghz_class(p: GHZClassParams) -> PureState:
    qa = np.array([np.cos(p.alpha), np.sin(p.alpha)])
    qb = np.array([np.cos(p.beta), np.sin(p.beta)])
    qc = np.array([np.cos(p.gamma), np.sin(p.gamma)])
    zero = np.zeros(8, dtype=complex)
    zero[0] = 1
    v = np.cos(p.delta) * zero + np.sin(p.delta) * np.exp(1j * p.phi) * np.kron(np.kron(qa, qb), qc)
    return PureState(np.sqrt(p.K) * v, (2, 2, 2))


def make_w_class(p: WClassParams) -> PureState:
    v = np.zeros(8, dtype=complex)
    v[0b001], v[0b010], v[0b100], v[0] = np.sqrt(p.a), np.sqrt(p.b), np.sqrt(p.c), np.sqrt(p.d)
    return PureState(v / np.linalg.norm(v), (2, 2, 2))


def ghz_class_tangle(p: GHZClassParams) -> float:
    """Closed-form tangle of the GHZ-class family."""
    s = np.sin
    return float(4 * p.K ** 2 * np.cos(p.delta) ** 2 * s(p.delta) ** 2
                 * s(p.alpha) ** 2 * s(p.beta) ** 2 * s(p.gamma) ** 2)


# Tangle and monogamy

def _node_concurrence_sq(psi: PureState, node: int) -> float:
    """``C^2`` of ``node`` against the rest: ``4 det rho_node`` for a qubit node."""
    r = partial_trace(psi, [node]).matrix
    if r.shape != (2, 2):
        raise DomainError("node must be a qubit")
    return float(max(0.0, 4 * np.linalg.det(r).real))


def _pair_state(psi, i, j):
    return partial_trace(psi, [i, j])


def tangle(psi: PureState, node: int = 0) -> float:
    """``C^2_{A:BC} - C^2_{A:B} - C^2_{A:C}`` for three qubits."""
    from .measures import concurrence_mixed

    _need_pure(psi)
    if tuple(psi.dims) != (2, 2, 2):
        raise DomainError(f"tangle needs three qubits, got dims {list(psi.dims)}")
    others = [k for k in range(3) if k != node]
    total = _node_concurrence_sq(psi, node)
    pair = sum(concurrence_mixed(_pair_state(psi, node, k)).value ** 2 for k in others)
    return float(total - pair)


MONOGAMY_MEASURES = ("squared-concurrence", "concurrence", "eof", "negativity")


def _nodal(psi, node, measure):
    from .core import BipartiteSplit, shannon_entropy
    from .measures import negativity

    n = psi.n_parties
    if measure in ("squared-concurrence", "concurrence"):
        c2 = _node_concurrence_sq(psi, node)
        return c2 if measure == "squared-concurrence" else float(np.sqrt(c2))
    split = BipartiteSplit.of([node], n)
    if measure == "eof":
        return shannon_entropy(schmidt(psi, split).coefficients ** 2)
    return negativity(psi, split).value


def _pairwise(psi, node, other, measure):
    from .measures import concurrence_mixed, eof_two_qubit, negativity

    rho = _pair_state(psi, node, other)
    if measure == "negativity":
        return negativity(rho).value
    if tuple(rho.dims) != (2, 2):
        raise DomainError(f"{measure} needs qubit parties")
    if measure == "eof":
        return eof_two_qubit(rho).value
    c = concurrence_mixed(rho).value
    return c * c if measure == "squared-concurrence" else c


def monogamy_score(psi: PureState, node: int = 0, measure: str = "squared-concurrence") -> float:
    """Nodal entanglement minus the sum of pairwise entanglements with the node."""
    _need_pure(psi)
    if measure not in MONOGAMY_MEASURES:
        raise DomainError(f"unknown monogamy measure {measure!r}; choose from {', '.join(MONOGAMY_MEASURES)}")
    n = psi.n_parties
    if not 0 <= node < n:
        raise DomainError(f"node {node} out of range for {n} parties")
    if measure != "negativity" and any(d != 2 for d in psi.dims):
        raise DomainError(f"{measure} monogamy needs qubit parties")
    nodal = _nodal(psi, node, measure)
    pair = sum(_pairwise(psi, node, k, measure) for k in range(n) if k != node)
    return float(nodal - pair)


@dataclass(frozen=True)
class MonogamyWitness:
    """Decomposition of a negative monogamy score into its terms."""

    nodal: float
    pairwise: dict
    score: float


def monogamy_terms(psi: PureState, node: int = 0, measure: str = "eof") -> MonogamyWitness:
    score = monogamy_score(psi, node, measure)
    pair = {k: _pairwise(psi, node, k, measure) for k in range(psi.n_parties) if k != node}
    return MonogamyWitness(_nodal(psi, node, measure), pair, score)
