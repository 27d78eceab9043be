"""Analysis orchestration: run a selection of criteria and measures on one state."""

from __future__ import annotations

import json
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from . import criteria as crit
from . import densecoding, measures, multipartite, witness
from .catalog import catalog, resolve_params
from .core import (
    BipartiteSplit,
    DensityMatrix,
    PureState,
    State,
    all_bipartitions,
    as_bipartite,
    as_density,
)

SCHEMA_VERSION = 1

BIPARTITE_CRITERIA = ("ppt", "majorization", "entropy", "ccnr", "cmc1", "cmc2", "cmc3", "chsh", "witness", "range")
DEFAULT_CRITERIA = ("ppt", "majorization", "entropy", "ccnr", "cmc1", "cmc2", "cmc3", "chsh")
MEASURE_NAMES = ("negativity", "log_negativity", "entropy_of_entanglement", "concurrence", "eof",
                 "eof_upper", "ree_upper")
DEFAULT_MEASURES = ("negativity", "log_negativity", "entropy_of_entanglement", "concurrence", "eof")


def entry_seed(seed: int, name: str) -> int:
    """Per-analysis seed derived from the report seed and the analysis name."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class StateSpec:
    """Either a catalog name with parameters or a file path."""

    name: str | None = None
    params: dict = field(default_factory=dict)
    path: str | None = None

    def load(self) -> tuple[State, dict]:
        if self.path is not None:
            from .fileio import read_state

            state, label = read_state(self.path)
            return state, {"source": "file", "path": str(self.path), "label": label}
        params = resolve_params(self.name, self.params)
        state = catalog(self.name, **params)
        return state, {"source": "catalog", "name": self.name, "params": params}


@dataclass
class AnalysisReport:
    state: dict
    seed: int
    criteria: list = field(default_factory=list)
    measures: list = field(default_factory=list)
    dense_coding: dict | None = None
    multipartite: dict | None = None
    errors: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    version: str = __version__

    def to_dict(self) -> dict:
        return _finite({
            "schema_version": SCHEMA_VERSION,
            "toolkit_version": self.version,
            "seed": self.seed,
            "state": self.state,
            "criteria": self.criteria,
            "measures": self.measures,
            "dense_coding": self.dense_coding,
            "multipartite": self.multipartite,
            "errors": self.errors,
            "skipped": self.skipped,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        d = json.loads(text)
        return cls(state=d["state"], seed=d["seed"], criteria=d["criteria"], measures=d["measures"],
                   dense_coding=d["dense_coding"], multipartite=d["multipartite"], errors=d["errors"],
                   skipped=d.get("skipped", []), version=d["toolkit_version"])

    def verdict(self, criterion: str, split: str | None = None) -> dict | None:
        for v in self.criteria:
            if v["criterion"] == criterion and (split is None or v.get("split") == split):
                return v
        return None

    def measure(self, name: str, split: str | None = None) -> dict | None:
        for m in self.measures:
            if m["measure"] == name and (split is None or m.get("split") == split):
                return m
        return None


def _finite(x):
    """Make the report JSON-safe; non-finite floats become strings."""
    if isinstance(x, dict):
        return {str(k): _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def _range_verdict(rho, seed, budget):
    m = as_density(rho)
    dA, dB = m.dims
    search = crit.range_search(m, budget=budget, seed=seed)
    pt_search = crit.range_search(m, budget=budget, seed=seed + 1, partial_transpose=True)
    data = crit.range_verify(m, crit.partial_conjugate(pt_search.found))
    found = len(search.found) > 0
    out = crit.Outcome.NOT_DETECTED if found else crit.Outcome.ENTANGLED
    return crit.CriterionVerdict("range", out, search.min_residual, crit.EPS_RANGE, {
        "heuristic": True,
        "restarts": budget,
        "found_in_range": len(search.found),
        "found_in_pt_range": len(pt_search.found),
        "conjugate_family_deficit": data.deficit,
        "rank": data.rank,
        "pt_rank": data.pt_rank,
    })


@dataclass(frozen=True)
class _Skip:
    """Marks an analysis that does not apply to the state."""

    reason: str


def _run_criterion(name, rho, seed, restarts):
    dims = tuple(rho.dims)
    if name in crit.CRITERIA:
        return crit.CRITERIA[name](rho)
    if name == "chsh":
        if dims != (2, 2):
            return _Skip("two-qubit states only")
        return witness.chsh_check(rho, restarts=restarts, seed=seed)
    if name == "witness":
        if dims != (2, 2):
            return _Skip("two-qubit states only")
        return witness.witness_check(witness.standard_witness(), rho)
    if name == "range":
        if max(dims) > 4:
            return _Skip("local dimension above 4")
        return _range_verdict(rho, seed, max(64, restarts))
    raise ValueError(f"unknown criterion {name!r}")


def _run_measure(name, state, seed, restarts):
    dims = tuple(state.dims)
    if name == "negativity":
        return measures.negativity(state)
    if name == "log_negativity":
        return measures.log_negativity(state)
    if name == "entropy_of_entanglement":
        return measures.entropy_of_entanglement(state) if isinstance(state, PureState) else _Skip("pure states only")
    if name == "concurrence":
        return measures.concurrence(state) if dims == (2, 2) else _Skip("two-qubit states only")
    if name == "eof":
        if dims == (2, 2):
            return measures.eof_two_qubit(state)
        if isinstance(state, PureState):
            r = measures.entropy_of_entanglement(state)
            return measures.MeasureResult("eof", r.value, measures.Kind.EXACT, "pure state")
        return _Skip("closed form needs two qubits or a pure state; see eof_upper")
    if name == "eof_upper":
        if max(dims) > 4:
            return _Skip("local dimension above 4")
        return measures.eof_convex_roof_upper(state, restarts=restarts, seed=seed)
    if name == "ree_upper":
        if dims[0] * dims[1] > 9 or max(dims) > 3:
            return _Skip("dimensions above (3, 3)")
        return measures.relative_entropy_of_entanglement_upper(state, restarts=restarts, seed=seed)
    raise ValueError(f"unknown measure {name!r}")


def _normalize_selection(sel, known, default, kind):
    if sel is None:
        return list(default)
    if isinstance(sel, str):
        sel = [t.strip() for t in sel.split(",") if t.strip()]
    sel = list(sel)
    if sel == ["all"]:
        return list(known)
    unknown = [s for s in sel if s not in known]
    if unknown:
        raise ValueError(f"unknown {kind}: {', '.join(unknown)}; choose from {', '.join(known)}")
    return sel


def _splits_for(state, split):
    if state.n_parties == 2:
        return [(None, BipartiteSplit.of([0], 2))]
    if split is not None:
        return [(split.label(), split)]
    return [(s.label(), s) for s in all_bipartitions(state.n_parties)]


def _bipartite_view(state, split):
    if state.n_parties == 2:
        return state
    if isinstance(state, PureState):
        from .core import bipartite_vector

        v, dA, dB = bipartite_vector(state, split)
        return PureState(v, (dA, dB))
    return as_bipartite(state, split)


def _record(report, bucket, name, split_label, fn):
    try:
        out = fn()
    except Exception as exc:  # recorded per entry, never aborts the report
        report.errors.append({"analysis": name, "split": split_label,
                              "error": f"{type(exc).__name__}: {exc}"})
        return
    if isinstance(out, _Skip):
        report.skipped.append({"analysis": name, "split": split_label, "reason": out.reason})
        return
    d = out.to_dict()
    if split_label is not None:
        d["split"] = split_label
    bucket.append(d)


def run_analysis(state: State, criteria: Sequence[str] | None = None, measures_: Sequence[str] | None = None,
                 seed: int = 0, split: BipartiteSplit | None = None, restarts: int = 16,
                 descriptor: dict | None = None, multipartite_suite: bool = True,
                 dense_coding: bool = True) -> AnalysisReport:
    """Run the selected analyses on ``state``.

    Individual failures are recorded in ``report.errors``; the remaining
    entries are still computed.  The result is a deterministic function of
    the inputs and ``seed``.
    """
    crits = _normalize_selection(criteria, BIPARTITE_CRITERIA, DEFAULT_CRITERIA, "criteria")
    meas = _normalize_selection(measures_, MEASURE_NAMES, DEFAULT_MEASURES, "measures")
    desc = dict(descriptor or {})
    desc.update({"dims": list(state.dims), "kind": "pure" if isinstance(state, PureState) else "density"})
    report = AnalysisReport(state=desc, seed=int(seed))
    for label, sp in _splits_for(state, split):
        view = _bipartite_view(state, sp)
        rho = as_density(view)
        for name in crits:
            s = entry_seed(seed, f"criterion:{name}:{label}")
            _record(report, report.criteria, name, label, lambda: _run_criterion(name, rho, s, restarts))
        for name in meas:
            s = entry_seed(seed, f"measure:{name}:{label}")
            _record(report, report.measures, name, label, lambda: _run_measure(name, view, s, restarts))
    if dense_coding and state.n_parties == 2:
        try:
            report.dense_coding = densecoding.dc_capacity(state).to_dict()
        except Exception as exc:
            report.errors.append({"analysis": "dense_coding", "split": None,
                                  "error": f"{type(exc).__name__}: {exc}"})
    if multipartite_suite and isinstance(state, PureState) and state.n_parties >= 3:
        report.multipartite = _multipartite_summary(state, report)
    return report


def _multipartite_summary(psi, report):
    out = {}
    steps = {
        "bipartitions": lambda: multipartite.bipartition_table(psi).to_dict(),
        "k_separability": lambda: _ksep(psi),
        "ggm": lambda: multipartite.ggm(psi),
    }
    if tuple(psi.dims) == (2, 2, 2):
        steps["tangle"] = lambda: multipartite.tangle(psi)
    if all(d == 2 for d in psi.dims):
        steps["monogamy"] = lambda: {m: multipartite.monogamy_score(psi, 0, m)
                                     for m in multipartite.MONOGAMY_MEASURES}
    for key, fn in steps.items():
        try:
            out[key] = fn()
        except Exception as exc:
            report.errors.append({"analysis": key, "split": None, "error": f"{type(exc).__name__}: {exc}"})
    return out


def _ksep(psi):
    k = multipartite.k_separability_pure(psi)
    return {"k": k.k, "genuine": k.genuine, "separable_splits": k.separable_splits,
            "finest_partition": [list(b) for b in k.finest_partition]}


# Parameter sweeps

def _scores(state, analyses, seed, restarts):
    row = {}
    rho = as_density(state)
    for name in analyses:
        if name in ("dc", "dense_coding"):
            r = densecoding.dc_capacity(rho)
            row[name] = {"score": r.advantage, "detected": r.dc_class is densecoding.DCClass.DC,
                         "class": r.dc_class.value}
        elif name in BIPARTITE_CRITERIA:
            v = _run_criterion(name, rho, entry_seed(seed, name), restarts)
            row[name] = {"score": v.score, "detected": v.detected, "outcome": v.outcome.value}
        elif name in MEASURE_NAMES:
            m = _run_measure(name, state, entry_seed(seed, name), restarts)
            row[name] = {"score": m.value, "detected": m.value > crit.DETECTION_MARGIN}
        else:
            raise ValueError(f"unknown analysis {name!r}")
    return row


def _eval_point(args):
    name, params, key, value, analyses, seed, restarts = args
    p = dict(params)
    p[key] = value
    return _scores(catalog(name, **p), analyses, seed, restarts)


@dataclass
class SweepResult:
    name: str
    parameter: str
    grid: list
    rows: list
    thresholds: dict

    def to_dict(self) -> dict:
        return _finite({"schema_version": SCHEMA_VERSION, "state": self.name, "parameter": self.parameter,
                        "grid": self.grid, "rows": self.rows, "thresholds": self.thresholds})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False)


def _bisect(pred, lo, hi, plo, tol):
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if pred(mid) == plo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def sweep(name: str, parameter: str, grid: Iterable[float], analyses: Sequence[str],
          params: dict | None = None, seed: int = 0, restarts: int = 16, tol: float = 1e-4,
          jobs: int = 1) -> SweepResult:
    """Evaluate analyses over a grid of one catalog parameter and locate detection thresholds.

    Every adjacent pair of grid points whose detection flags differ is
    refined by bisection to ``tol``; all crossings are reported.
    """
    params = dict(params or {})
    if parameter in params:
        raise ValueError(f"{parameter} is the swept parameter and cannot also be fixed")
    grid = [float(g) for g in grid]
    if len(grid) < 2:
        raise ValueError("sweep grid needs at least two points")
    for g in (grid[0], grid[-1]):
        resolve_params(name, dict(params, **{parameter: g}))
    tasks = [(name, params, parameter, g, list(analyses), seed, restarts) for g in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_eval_point, tasks))
    else:
        rows = [_eval_point(t) for t in tasks]
    thresholds = {}
    for a in analyses:
        crossings = []
        for i in range(len(grid) - 1):
            f0, f1 = rows[i][a]["detected"], rows[i + 1][a]["detected"]
            if f0 != f1:
                pred = lambda x, a=a: _eval_point((name, params, parameter, x, [a], seed, restarts))[a]["detected"]
                x = _bisect(pred, grid[i], grid[i + 1], f0, tol)
                crossings.append({"value": x, "direction": "on" if f1 else "off"})
        thresholds[a] = crossings
    out_rows = [dict(r, **{parameter: g}) for g, r in zip(grid, rows)]
    return SweepResult(name, parameter, grid, out_rows, thresholds)
