"""Entanglement witnesses, the Choi-Jamiołkowski correspondence, and CHSH tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .core import (
    EPS_HERM,
    EPS_PSD,
    EPS_RECON,
    BipartiteSplit,
    DensityMatrix,
    DomainError,
    NumericError,
    State,
    as_density,
    bipartite_matrix,
    partial_transpose_matrix,
)
from .criteria import DETECTION_MARGIN, CriterionVerdict, Outcome

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
])


@dataclass(frozen=True)
class WitnessOperator:
    """Hermitian operator on a bipartite space, optionally with ``W = P + Q^{T_A}``."""

    matrix: np.ndarray
    dims: tuple[int, int]
    decomposition: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        W = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or W.shape != (dims[0] * dims[1],) * 2:
            raise DomainError(f"witness of shape {W.shape} does not match dims {list(dims)}")
        if np.max(np.abs(W - W.conj().T)) > EPS_HERM:
            raise DomainError("witness must be Hermitian")
        W = (W + W.conj().T) / 2
        W.setflags(write=False)
        object.__setattr__(self, "matrix", W)
        object.__setattr__(self, "dims", dims)
        if self.decomposition is not None:
            P, Q = (np.asarray(x, dtype=complex) for x in self.decomposition)
            for name, X in (("P", P), ("Q", Q)):
                if np.linalg.eigvalsh((X + X.conj().T) / 2)[0] < -EPS_PSD:
                    raise DomainError(f"decomposition factor {name} is not positive semidefinite")
            gap = np.max(np.abs(W - P - partial_transpose_matrix(Q, dims, 0)))
            if gap > EPS_RECON:
                raise DomainError(f"W differs from P + Q^T_A by {gap:.3g}")
            object.__setattr__(self, "decomposition", (P, Q))

    @property
    def decomposable(self) -> bool:
        return self.decomposition is not None


def witness_value(W: WitnessOperator, rho: State) -> float:
    """``tr(W rho)``."""
    rho = as_density(rho)
    if rho.dim != W.matrix.shape[0]:
        raise DomainError(f"witness dims {list(W.dims)} do not match state dims {list(rho.dims)}")
    v = np.trace(W.matrix @ rho.matrix)
    if abs(v.imag) > 1e-10:
        raise NumericError(f"tr(W rho) has imaginary part {v.imag:.3g}")
    return float(v.real)


def witness_from_ppt_entangled_direction(Q, dims: Sequence[int] | None = None) -> WitnessOperator:
    """``W = Q^{T_A}`` for a positive ``Q``; decomposable with ``P = 0``."""
    if isinstance(Q, DensityMatrix):
        dims = Q.dims
        Q = Q.matrix
    Q = np.asarray(Q, dtype=complex)
    if dims is None or len(dims) != 2:
        raise DomainError("bipartite dims are required")
    return WitnessOperator(partial_transpose_matrix(Q, dims, 0), tuple(dims), (np.zeros_like(Q), Q))


def standard_witness() -> WitnessOperator:
    """``(I - 2|psi-><psi-|)/2``, the partial transpose of ``|phi+><phi+|``."""
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return witness_from_ppt_entangled_direction(np.outer(phi, phi), (2, 2))


@dataclass(frozen=True)
class ProductFloor:
    value: float
    e: np.ndarray
    f: np.ndarray
    values: np.ndarray


def product_floor(W, dims: Sequence[int] | None = None, restarts: int = 64, seed=None,
                  max_sweeps: int = 1000, tol: float = 1e-14) -> ProductFloor:
    """Best ``<e,f|W|e,f>`` found by see-saw over unit product vectors."""
    if isinstance(W, WitnessOperator):
        dims, M = W.dims, W.matrix
    else:
        M = np.asarray(W, dtype=complex)
    dA, dB = dims
    rng = np.random.default_rng(seed)
    e0 = rng.normal(size=(restarts, dA)) + 1j * rng.normal(size=(restarts, dA))
    f0 = rng.normal(size=(restarts, dB)) + 1j * rng.normal(size=(restarts, dB))
    e0 /= np.linalg.norm(e0, axis=1, keepdims=True)
    f0 /= np.linalg.norm(f0, axis=1, keepdims=True)
    vals, e, f, _ = kernels.product_min(M, dA, dB, e0, f0, max_sweeps, tol)
    k = int(np.argmin(vals))
    return ProductFloor(float(vals[k]), e[k], f[k], vals)


def witness_product_floor(W: WitnessOperator, restarts: int = 64, seed=None) -> float:
    """Smallest product-state expectation found; an upper bound on the true floor."""
    return product_floor(W, restarts=restarts, seed=seed).value


def witness_check(W: WitnessOperator, rho: State, restarts: int = 64, seed=None) -> CriterionVerdict:
    """Verdict from ``tr(W rho) < 0``.

    A decomposable witness is certified by its stored factors.  Otherwise
    positivity on product states is only checked numerically and the verdict
    is marked heuristic.
    """
    v = witness_value(W, rho)
    details = {"heuristic": not W.decomposable}
    if not W.decomposable:
        details["product_floor"] = witness_product_floor(W, restarts=restarts, seed=seed)
    out = Outcome.ENTANGLED if v < -DETECTION_MARGIN else Outcome.NOT_DETECTED
    return CriterionVerdict("witness", out, v, 0.0, details)


# Choi-Jamiołkowski correspondence

@dataclass(frozen=True)
class MapAsOperator:
    """Operator ``E = sum_ij |i><j| ⊗ eps(|i><j|)`` on H_B ⊗ H_C."""

    E: np.ndarray
    dim_b: int
    dim_c: int

    def __post_init__(self):
        E = np.asarray(self.E, dtype=complex)
        n = self.dim_b * self.dim_c
        if E.shape != (n, n):
            raise DomainError(f"operator shape {E.shape} does not match dims ({self.dim_b}, {self.dim_c})")
        E = E.copy()
        E.setflags(write=False)
        object.__setattr__(self, "E", E)

    def is_completely_positive(self, tol: float = EPS_PSD) -> bool:
        H = (self.E + self.E.conj().T) / 2
        return bool(np.linalg.eigvalsh(H)[0] >= -tol)

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.E + self.E.conj().T) / 2)[::-1]


def map_images(eps: Callable[[np.ndarray], np.ndarray], dim_b: int) -> np.ndarray:
    """Images ``eps(|i><j|)`` stacked as ``(dim_b, dim_b, dC, dC)``."""
    units = np.eye(dim_b * dim_b).reshape(dim_b, dim_b, dim_b, dim_b)
    return np.array([[np.asarray(eps(units[i, j]), dtype=complex) for j in range(dim_b)]
                     for i in range(dim_b)])


def cj_map_to_operator(eps, dim_b: int | None = None) -> MapAsOperator:
    """Operator of a linear map given by its matrix-unit images (or a callable)."""
    if callable(eps):
        if dim_b is None:
            raise DomainError("dim_b is required when the map is a callable")
        images = map_images(eps, dim_b)
    else:
        images = np.asarray(eps, dtype=complex)
    if images.ndim != 4 or images.shape[0] != images.shape[1] or images.shape[2] != images.shape[3]:
        raise DomainError("images must have shape (dB, dB, dC, dC)")
    dB, dC = images.shape[0], images.shape[2]
    if dim_b is not None and dim_b != dB:
        raise DomainError(f"got {dB}x{dB} images for dim_b={dim_b}")
    E = images.transpose(0, 2, 1, 3).reshape(dB * dC, dB * dC)
    return MapAsOperator(E, dB, dC)


def cj_operator_to_map(E: MapAsOperator, rho) -> np.ndarray:
    """``eps(rho) = tr_B(E (rho^T ⊗ I))``."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if r.shape != (E.dim_b, E.dim_b):
        raise DomainError(f"input of shape {r.shape} does not match dim_b={E.dim_b}")
    t = E.E.reshape(E.dim_b, E.dim_c, E.dim_b, E.dim_c)
    # sum_{i,j} <j|rho^T|i> eps(|i><j|) = sum rho[i, j] eps_ij
    return np.einsum("iajb,ij->ab", t, r)


def identity_map(x):
    return np.array(x, dtype=complex)


def transpose_map(x):
    return np.array(x, dtype=complex).T


def unitary_map(U) -> Callable[[np.ndarray], np.ndarray]:
    U = np.asarray(U, dtype=complex)
    return lambda x: U @ x @ U.conj().T


def map_product_floor(E: MapAsOperator, restarts: int = 64, seed=None) -> float:
    """Numerical evidence for positivity of the map: a non-negative floor."""
    return product_floor(E.E, (E.dim_b, E.dim_c), restarts=restarts, seed=seed).value


# Bell-CHSH

def _unit(v, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-12:
        raise DomainError(f"direction {name} must be a unit 3-vector")
    v = v.copy()
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class CHSHSetting:
    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, _unit(getattr(self, name), name))

    @classmethod
    def from_array(cls, s) -> "CHSHSetting":
        s = np.asarray(s, dtype=float)
        s = s / np.linalg.norm(s, axis=1, keepdims=True)
        return cls(*s)

    @classmethod
    def coplanar(cls, ta, tap, tb, tbp) -> "CHSHSetting":
        """Directions ``(cos t, 0, sin t)`` in the x-z plane, angles in radians."""
        d = lambda t: np.array([np.cos(t), 0.0, np.sin(t)])
        return cls(d(ta), d(tap), d(tb), d(tbp))

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.a_prime, self.b, self.b_prime])


def optimal_singlet_setting() -> CHSHSetting:
    """a at 90°, a' at 0°, b at 45°, b' at 135° in one plane."""
    return CHSHSetting.coplanar(np.pi / 2, 0.0, np.pi / 4, 3 * np.pi / 4)


def _check_two_qubit(rho):
    if tuple(rho.dims) != (2, 2):
        raise DomainError(f"CHSH needs a two-qubit state, got dims {list(rho.dims)}")


def correlation_matrix(rho: State) -> np.ndarray:
    """``T_ij = tr(rho sigma_i ⊗ sigma_j)``."""
    rho = as_density(rho)
    _check_two_qubit(rho)
    ops = np.einsum("iab,jcd->ijacbd", PAULI, PAULI).reshape(3, 3, 4, 4)
    return np.einsum("ijkl,lk->ij", ops, rho.matrix).real


def correlation(rho: State, a, b) -> float:
    """``E(a, b) = tr(rho sigma_a ⊗ sigma_b)``."""
    return float(np.asarray(a) @ correlation_matrix(rho) @ np.asarray(b))


def chsh_value(rho: State, s: CHSHSetting) -> float:
    """``E(a,b) + E(a,b') + E(a',b) - E(a',b')``."""
    T = correlation_matrix(rho)
    return float(s.a @ T @ (s.b + s.b_prime) + s.a_prime @ T @ (s.b - s.b_prime))


def chsh_maximize(rho: State, restarts: int = 32, seed=None, max_sweeps: int = 500,
                  tol: float = 1e-10) -> tuple[float, CHSHSetting]:
    """Best CHSH value over measurement directions by coordinate ascent."""
    T = correlation_matrix(rho)
    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(restarts, 4, 3))
    starts /= np.linalg.norm(starts, axis=2, keepdims=True)
    vals, S, _ = kernels.chsh_ascent(T, starts, max_sweeps, tol)
    k = int(np.argmax(vals))
    return float(vals[k]), CHSHSetting.from_array(S[k])


def chsh_maximum_closed_form(rho: State) -> float:
    """``2 sqrt(m1 + m2)`` from the two largest eigenvalues of ``T^T T``."""
    T = correlation_matrix(rho)
    m = np.sort(np.linalg.eigvalsh(T.T @ T))[::-1]
    return float(2 * np.sqrt(max(m[0] + m[1], 0.0)))


def chsh_check(rho: State, restarts: int = 32, seed=None) -> CriterionVerdict:
    """Bell-CHSH violation; the optimizer's value is a lower bound on the maximum."""
    v, s = chsh_maximize(rho, restarts, seed)
    out = Outcome.ENTANGLED if v > 2 + DETECTION_MARGIN else Outcome.NOT_DETECTED
    return CriterionVerdict("chsh", out, v, 2.0, {"setting": s.as_array().tolist()})
