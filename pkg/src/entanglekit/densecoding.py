"""Dense-coding capacity with unitary encoding, Holevo quantity, and state classes."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    EPS_NORM,
    EPS_PSD,
    BipartiteSplit,
    DensityMatrix,
    DomainError,
    State,
    as_density,
    bipartite_matrix,
    von_neumann_entropy,
)
from .criteria import PPT_SUFFICIENT_DIMS, ccnr_check, cmc_corollary3, ppt_check

DC_MARGIN = 1e-9


class DCClass(str, enum.Enum):
    SEPARABLE = "Separable"
    PPT_ENTANGLED = "PPTEntangled"
    PPT_UNDECIDED = "PPTUndecided"
    NPT_NON_DC = "NPTnonDC"
    DC = "DC"


@dataclass(frozen=True)
class DenseCodingReport:
    capacity: float
    advantage: float
    dc_class: DCClass
    dims: tuple[int, int]

    def to_dict(self) -> dict:
        return {"capacity": float(self.capacity), "advantage": float(self.advantage),
                "class": self.dc_class.value, "dims": list(self.dims)}


def holevo_chi(weights: Sequence[float], states: Sequence[State]) -> float:
    """``S(sum p_i rho_i) - sum p_i S(rho_i)``."""
    p = np.asarray(weights, dtype=float)
    if p.ndim != 1 or p.size != len(states) or p.size == 0:
        raise DomainError("need one weight per ensemble member")
    if np.any(p < 0) or abs(p.sum() - 1) > EPS_NORM:
        raise DomainError("weights must be non-negative and sum to 1")
    rhos = [as_density(s) for s in states]
    dims = rhos[0].dims
    if any(r.dims != dims for r in rhos):
        raise DomainError("ensemble members must share dimensions")
    avg = sum(w * r.matrix for w, r in zip(p, rhos))
    chi = von_neumann_entropy(avg) - sum(w * von_neumann_entropy(r) for w, r in zip(p, rhos))
    return float(max(chi, 0.0))


def shift_clock_unitaries(d: int) -> list[np.ndarray]:
    """The ``d^2`` operators ``X^j Z^k`` with ``X|i> = |i+1>`` and ``Z|i> = w^i |i>``."""
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(X, j) @ np.linalg.matrix_power(Z, k) for j in range(d) for k in range(d)]


def encoded_ensemble(rho: State, split: BipartiteSplit | None = None):
    """Equiprobable ensemble ``(W_j ⊗ I) rho (W_j ⊗ I)^dag`` over shift-and-clock ``W_j``."""
    m, dA, dB = bipartite_matrix(rho, split)
    Ws = shift_clock_unitaries(dA)
    states = []
    for W in Ws:
        U = np.kron(W, np.eye(dB))
        states.append(DensityMatrix(U @ m @ U.conj().T, (dA, dB)))
    return np.full(len(Ws), 1 / len(Ws)), states


def dc_capacity(rho: State, split: BipartiteSplit | None = None) -> DenseCodingReport:
    """Capacity ``log2 dA + max(S(rho_B) - S(rho), 0)`` with Alice on side A."""
    m, dA, dB = bipartite_matrix(rho, split)
    t = m.reshape(dA, dB, dA, dB)
    rb = np.einsum("aiaj->ij", t)
    adv = von_neumann_entropy(rb) - von_neumann_entropy(m)
    cap = np.log2(dA) + max(adv, 0.0)
    bip = DensityMatrix(m, (dA, dB))
    ppt = ppt_check(bip)
    if ppt.score >= -EPS_PSD:
        if (dA, dB) in PPT_SUFFICIENT_DIMS:
            cls = DCClass.SEPARABLE
        elif ccnr_check(bip).detected or cmc_corollary3(bip).detected:
            cls = DCClass.PPT_ENTANGLED
        else:
            cls = DCClass.PPT_UNDECIDED
    elif adv > DC_MARGIN:
        cls = DCClass.DC
    else:
        cls = DCClass.NPT_NON_DC
    return DenseCodingReport(float(cap), float(adv), cls, (dA, dB))
