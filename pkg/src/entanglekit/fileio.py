"""State file format.

A state file is a JSON document::

    {"dims": [2, 2], "kind": "pure" | "density",
     "data": [[re, im], ...], "label": "optional"}

``data`` lists amplitudes (pure) or matrix entries (density) in row-major
order, party 0 slowest.  Floats are written with ``repr`` so they parse back
to the identical double.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import DensityMatrix, DomainError, PureState, State


class IngestionError(DomainError):
    """A state file could not be read or does not describe a valid state."""


def state_to_dict(state: State, label: str | None = None) -> dict:
    if isinstance(state, PureState):
        kind, flat = "pure", state.amplitudes
    else:
        kind, flat = "density", state.matrix.reshape(-1)
    d = {"dims": list(state.dims), "kind": kind,
         "data": [[float(z.real), float(z.imag)] for z in flat]}
    if label is not None:
        d["label"] = label
    return d


def dumps_state(state: State, label: str | None = None) -> str:
    return json.dumps(state_to_dict(state, label), allow_nan=False)


def write_state(state: State, path, label: str | None = None) -> None:
    Path(path).write_text(dumps_state(state, label) + "\n")


def state_from_dict(doc) -> tuple[State, str | None]:
    if not isinstance(doc, dict):
        raise IngestionError("state document must be a JSON object with dims, kind and data")
    missing = [k for k in ("dims", "kind", "data") if k not in doc]
    if missing:
        raise IngestionError(f"state document is missing field(s): {', '.join(missing)}")
    dims, kind, data = doc["dims"], doc["kind"], doc["data"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise IngestionError("dims must be a list of integers, e.g. [2, 2]")
    if kind not in ("pure", "density"):
        raise IngestionError(f"kind must be 'pure' or 'density', got {kind!r}")
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise IngestionError("data must be a list of [re, im] number pairs") from None
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise IngestionError("data must be a list of [re, im] number pairs")
    if not np.all(np.isfinite(arr)):
        raise IngestionError("data contains non-finite numbers")
    z = arr[:, 0] + 1j * arr[:, 1]
    total = int(np.prod(dims)) if dims else 0
    expected = total if kind == "pure" else total * total
    if z.size != expected:
        raise IngestionError(f"dims {dims} need {expected} entries for a {kind} state, got {z.size}")
    label = doc.get("label")
    try:
        if kind == "pure":
            return PureState(z, tuple(dims)), label
        return DensityMatrix(z.reshape(total, total), tuple(dims)), label
    except DomainError as exc:
        raise IngestionError(f"invalid {kind} state: {exc}") from None


def loads_state(text: str) -> tuple[State, str | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestionError(f"not valid JSON: {exc}") from None
    return state_from_dict(doc)


def read_state(path) -> tuple[State, str | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read state file {path}: {exc.strerror or exc}") from None
    return loads_state(text)
