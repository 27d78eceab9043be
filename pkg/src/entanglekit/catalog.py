"""Named example states with validated parameters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DensityMatrix, DomainError, PureState, State, ket
from .multipartite import GHZClassParams, WClassParams, make_ghz_class, make_w_class


class CatalogError(DomainError):
    """Unknown catalog entry or parameter outside its documented range."""


@dataclass(frozen=True)
class Param:
    name: str
    default: float | None
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False
    choices: tuple | None = None

    def describe(self) -> str:
        if self.choices:
            return f"{self.name} in {{{', '.join(map(str, self.choices))}}}"
        lb = "(" if self.lo_open else "["
        rb = ")" if self.hi_open else "]"
        return f"{self.name} in {lb}{self.lo:g}, {self.hi:g}{rb}"

    def check(self, value):
        if self.choices:
            if value not in self.choices:
                raise CatalogError(f"parameter {self.describe()}, got {value!r}")
            return value
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise CatalogError(f"parameter {self.name} must be a number, got {value!r}") from None
        bad = (v < self.lo or v > self.hi or (self.lo_open and v == self.lo)
               or (self.hi_open and v == self.hi) or not np.isfinite(v))
        if bad:
            raise CatalogError(f"parameter {self.describe()}, got {v:g}")
        return v


@dataclass(frozen=True)
class Entry:
    name: str
    build: Callable[..., State]
    params: tuple[Param, ...]
    summary: str


_BELL = {
    "phi+": (ket("00") + ket("11")) / np.sqrt(2),
    "phi-": (ket("00") - ket("11")) / np.sqrt(2),
    "psi+": (ket("01") + ket("10")) / np.sqrt(2),
    "psi-": (ket("01") - ket("10")) / np.sqrt(2),
}


def bell(which: str = "psi-") -> PureState:
    return PureState(_BELL[which], (2, 2))


def singlet() -> PureState:
    return bell("psi-")


def werner(p: float) -> DensityMatrix:
    """``p |psi-><psi-| + (1 - p) I/4``."""
    psi = _BELL["psi-"]
    return DensityMatrix(p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4, (2, 2))


def ghz(n: int = 3) -> PureState:
    n = int(n)
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return PureState(v, (2,) * n)


def w_state(n: int = 3) -> PureState:
    n = int(n)
    v = np.zeros(2 ** n, dtype=complex)
    for k in range(n):
        v[1 << k] = 1
    return PureState.normalized(v, (2,) * n)


def w_bar() -> PureState:
    return PureState.normalized(ket("110") + ket("101") + ket("011"), (2, 2, 2))


def horodecki_a(a: float) -> DensityMatrix:
    """3x3 PPT entangled family, ``0 < a < 1``."""
    m = np.zeros((9, 9))
    for i in range(9):
        m[i, i] = a
    for i in (0, 4, 8):
        for j in (0, 4, 8):
            m[i, j] = a
    m[6, 6] = m[8, 8] = (1 + a) / 2
    m[6, 8] = m[8, 6] = np.sqrt(1 - a * a) / 2
    return DensityMatrix(m / (8 * a + 1), (3, 3))


def horodecki_alpha(alpha: float) -> DensityMatrix:
    """``2/7 |psi><psi| + alpha/7 rho_+ + (5 - alpha)/7 rho_-`` on 3x3."""
    psi = sum(ket(f"{i}{i}", 3) for i in range(3)) / np.sqrt(3)
    plus = sum(np.outer(ket(s, 3), ket(s, 3)) for s in ("01", "12", "20")) / 3
    minus = sum(np.outer(ket(s, 3), ket(s, 3)) for s in ("10", "21", "02")) / 3
    m = 2 / 7 * np.outer(psi, psi.conj()) + alpha / 7 * plus + (5 - alpha) / 7 * minus
    return DensityMatrix(m, (3, 3))


def upb_tiles_vectors() -> list[np.ndarray]:
    """The five orthogonal product vectors whose span has no product complement."""
    e = np.eye(3)
    s = np.sqrt(2)
    return [
        np.kron(e[0], (e[0] - e[1]) / s),
        np.kron((e[0] - e[1]) / s, e[2]),
        np.kron(e[2], (e[1] - e[2]) / s),
        np.kron((e[1] - e[2]) / s, e[0]),
        np.kron(e.sum(0), e.sum(0)) / 3,
    ]


def upb_tiles() -> DensityMatrix:
    proj = sum(np.outer(v, v) for v in upb_tiles_vectors())
    return DensityMatrix((np.eye(9) - proj) / 4, (3, 3))


def maximally_mixed(dA: int = 2, dB: int = 2) -> DensityMatrix:
    return DensityMatrix.maximally_mixed((int(dA), int(dB)))


def product_zero(n: int = 2) -> PureState:
    return PureState(ket("0" * int(n)), (2,) * int(n))


def bisep_example() -> PureState:
    """``(|000> + |101>)/sqrt2``: entangled across A:BC and AB:C only."""
    return PureState.normalized(ket("000") + ket("101"), (2, 2, 2))


def w_wbar_mixture() -> DensityMatrix:
    w, wb = w_state().density().matrix, w_bar().density().matrix
    return DensityMatrix((w + wb) / 2, (2, 2, 2))


def psi12_mixture() -> DensityMatrix:
    p1 = PureState.normalized(ket("001") + ket("010"), (2, 2, 2)).density().matrix
    p2 = PureState.normalized(ket("001") + ket("100"), (2, 2, 2)).density().matrix
    return DensityMatrix((p1 + p2) / 2, (2, 2, 2))


def _ghz_class(delta, alpha, beta, gamma, phi):
    return make_ghz_class(GHZClassParams(delta, alpha, beta, gamma, phi))


def _w_class(a, b, c):
    return make_w_class(WClassParams(a, b, c))


_HALF_PI = np.pi / 2
_ENTRIES = [
    Entry("singlet", singlet, (), "two-qubit singlet |psi->"),
    Entry("bell", bell, (Param("which", "psi-", 0, 0, choices=tuple(_BELL)),), "one of the four Bell states"),
    Entry("werner", werner, (Param("p", None, 0, 1),), "p |psi-><psi-| + (1-p) I/4"),
    Entry("ghz", ghz, (Param("n", 3, 2, 8),), "(|0..0> + |1..1>)/sqrt2 on n qubits"),
    Entry("w", w_state, (Param("n", 3, 2, 8),), "equal superposition of single excitations"),
    Entry("w-bar", w_bar, (), "(|110> + |101> + |011>)/sqrt3"),
    Entry("horodecki-a", horodecki_a, (Param("a", None, 0, 1, lo_open=True, hi_open=True),),
          "3x3 PPT entangled family detected by the range criterion"),
    Entry("horodecki-alpha", horodecki_alpha, (Param("alpha", None, 0, 5),),
          "2/7 |psi><psi| + alpha/7 rho_+ + (5-alpha)/7 rho_- on 3x3"),
    Entry("upb-tiles", upb_tiles, (), "normalized projector onto the complement of the tiles UPB"),
    Entry("ghz-class", _ghz_class, (
        Param("delta", np.pi / 4, 0, np.pi / 4, lo_open=True),
        Param("alpha", _HALF_PI, 0, _HALF_PI, lo_open=True),
        Param("beta", _HALF_PI, 0, _HALF_PI, lo_open=True),
        Param("gamma", _HALF_PI, 0, _HALF_PI, lo_open=True),
        Param("phi", 0.0, 0, 2 * np.pi, hi_open=True),
    ), "three-qubit GHZ-class family"),
    Entry("w-class", _w_class, (
        Param("a", 1 / 3, 0, 1, lo_open=True),
        Param("b", 1 / 3, 0, 1, lo_open=True),
        Param("c", 1 / 3, 0, 1, lo_open=True),
    ), "sqrt(a)|001> + sqrt(b)|010> + sqrt(c)|100> + sqrt(d)|000>"),
    Entry("maximally-mixed", maximally_mixed, (Param("dA", 2, 2, 8), Param("dB", 2, 2, 8)), "I/(dA dB)"),
    Entry("product", product_zero, (Param("n", 2, 2, 8),), "|0...0>"),
    Entry("bisep", bisep_example, (), "(|000> + |101>)/sqrt2"),
    Entry("w-wbar-mixture", w_wbar_mixture, (), "equal mixture of |W> and |W-bar>"),
    Entry("psi12-mixture", psi12_mixture, (), "equal mixture of (|001>+|010>)/sqrt2 and (|001>+|100>)/sqrt2"),
]
CATALOG = {e.name: e for e in _ENTRIES}
_INTEGER_PARAMS = {"n", "dA", "dB"}


def names() -> list[str]:
    return sorted(CATALOG)


def resolve_params(name: str, params: dict | None = None) -> dict:
    """Fill defaults and range-check ``params`` for catalog entry ``name``."""
    if name not in CATALOG:
        raise CatalogError(f"unknown catalog state {name!r}; known: {', '.join(names())}")
    entry = CATALOG[name]
    params = dict(params or {})
    known = {p.name for p in entry.params}
    extra = set(params) - known
    if extra:
        allowed = ", ".join(sorted(known)) or "none"
        raise CatalogError(f"{name} takes parameters {allowed}; got unexpected {', '.join(sorted(extra))}")
    out = {}
    for p in entry.params:
        if p.name in params:
            v = p.check(params[p.name])
        elif p.default is not None:
            v = p.default
        else:
            raise CatalogError(f"{name} requires parameter {p.describe()}")
        if p.name in _INTEGER_PARAMS:
            if float(v) != int(v):
                raise CatalogError(f"parameter {p.name} must be an integer")
            v = int(v)
        out[p.name] = v
    return out


def catalog(name: str, **params) -> State:
    """Build the catalog state ``name``, e.g. ``catalog("werner", p=0.5)``."""
    resolved = resolve_params(name, params)
    return CATALOG[name].build(**resolved)
