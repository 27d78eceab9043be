"""Command-line interface.

Exit codes: 0 success, 2 usage or ingestion error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    BIPARTITE_CRITERIA,
    MEASURE_NAMES,
    StateSpec,
    run_analysis,
    sweep,
)
from .catalog import CATALOG, names
from .core import BipartiteSplit, DomainError, NumericError
from .fileio import read_state, write_state

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    k, v = text.split("=", 1)
    try:
        v = float(v)
    except ValueError:
        pass
    return k.strip(), v


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _grid(text: str) -> list[float]:
    """``lo:hi:n`` for n evenly spaced points, or a comma list."""
    if ":" in text:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n)).tolist()
    return [float(t) for t in _csv(text)]


def _add_state_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--state", help="path to a state file")
    g.add_argument("--name", help="catalog state name (see `catalog list`)")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="K=V",
                   help="catalog parameter, repeatable")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=16, help="random restarts for numerical searches")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "table"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entanglekit", description="Entanglement analysis of finite-dimensional states.")
    parser.add_argument("--version", action="version", version=f"entanglekit {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    pa = sub.add_parser("analyze", help="run criteria and measures on one state")
    _add_state_args(pa)
    pa.add_argument("--criteria", type=_csv, help=f"comma list or 'all' ({', '.join(BIPARTITE_CRITERIA)})")
    pa.add_argument("--measures", type=_csv, help=f"comma list or 'all' ({', '.join(MEASURE_NAMES)})")
    pa.add_argument("--split", type=_csv, help="parties on side A, e.g. 0 or 0,2")
    _add_common(pa)

    ps = sub.add_parser("sweep", help="scan one catalog parameter and locate thresholds")
    ps.add_argument("--name", required=True)
    ps.add_argument("--param", type=_param, action="append", default=[], metavar="K=V")
    ps.add_argument("--vary", required=True, help="parameter to scan")
    ps.add_argument("--grid", type=_grid, required=True, help="lo:hi:n or comma list")
    ps.add_argument("--analyses", type=_csv, required=True,
                    help="criteria, measures, or dc (dense-coding class)")
    ps.add_argument("--tol", type=float, default=1e-4, help="bisection tolerance for thresholds")
    ps.add_argument("--jobs", type=int, default=1)
    _add_common(ps)

    pc = sub.add_parser("catalog", help="list or export catalog states")
    csub = pc.add_subparsers(dest="action", parser_class=_Parser)
    csub.add_parser("list")
    pe = csub.add_parser("export")
    pe.add_argument("--name", required=True)
    pe.add_argument("--param", type=_param, action="append", default=[], metavar="K=V")
    pe.add_argument("--out")

    pv = sub.add_parser("validate", help="check that a state file parses and is a valid state")
    pv.add_argument("--state", required=True)
    return parser


def _spec(args) -> StateSpec:
    if args.state:
        if args.param:
            raise UsageError("--param applies to catalog states only")
        return StateSpec(path=args.state)
    if args.name:
        return StateSpec(name=args.name, params=dict(args.param))
    raise UsageError("one of --state or --name is required")


def _emit(text: str, out):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _report_table(d: dict) -> str:
    lines = [f"state: {json.dumps(d['state'], sort_keys=True)}", f"seed: {d['seed']}", ""]
    if d["criteria"]:
        lines.append(f"{'criterion':<14}{'split':<8}{'outcome':<20}{'score':>14}{'threshold':>12}")
        for v in d["criteria"]:
            lines.append(f"{v['criterion']:<14}{v.get('split') or '-':<8}{v['outcome']:<20}"
                         f"{_fmt(v['score']):>14}{_fmt(v['threshold']):>12}")
        lines.append("")
    if d["measures"]:
        lines.append(f"{'measure':<26}{'split':<8}{'value':>14}  kind")
        for m in d["measures"]:
            lines.append(f"{m['measure']:<26}{m.get('split') or '-':<8}{_fmt(m['value']):>14}  {m['kind']}")
        lines.append("")
    if d.get("dense_coding"):
        dc = d["dense_coding"]
        lines.append(f"dense coding: capacity {_fmt(dc['capacity'])} bits, advantage {_fmt(dc['advantage'])}, "
                     f"class {dc['class']}")
    if d.get("multipartite"):
        for k, v in d["multipartite"].items():
            lines.append(f"{k}: {json.dumps(v, sort_keys=True)}")
    for e in d.get("skipped", []):
        lines.append(f"skipped {e['analysis']}: {e['reason']}")
    for e in d["errors"]:
        lines.append(f"error in {e['analysis']}: {e['error']}")
    return "\n".join(lines)


def _sweep_table(d: dict) -> str:
    param = d["parameter"]
    analyses = [k for k in d["rows"][0] if k != param]
    head = f"{param:>12}" + "".join(f"{a:>18}" for a in analyses)
    lines = [head]
    for r in d["rows"]:
        cells = "".join(f"{_fmt(r[a]['score']) + ('*' if r[a]['detected'] else ' '):>18}" for a in analyses)
        lines.append(f"{_fmt(r[param]):>12}{cells}")
    lines.append("(* = detected)")
    for a, xs in d["thresholds"].items():
        desc = ", ".join(f"{_fmt(x['value'])} ({x['direction']})" for x in xs) or "none in range"
        lines.append(f"threshold {a}: {desc}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    state, desc = _spec(args).load()
    split = None
    if args.split:
        split = BipartiteSplit.of([int(s) for s in args.split], state.n_parties)
    report = run_analysis(state, args.criteria, args.measures, seed=args.seed, split=split,
                          restarts=args.restarts, descriptor=desc)
    d = report.to_dict()
    _emit(report.to_json() if args.format == "json" else _report_table(d), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    res = sweep(args.name, args.vary, args.grid, args.analyses, params=dict(args.param), seed=args.seed,
                restarts=args.restarts, tol=args.tol, jobs=args.jobs)
    _emit(res.to_json() if args.format == "json" else _sweep_table(res.to_dict()), args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        for n in names():
            e = CATALOG[n]
            ps = "; ".join(p.describe() for p in e.params) or "no parameters"
            sys.stdout.write(f"{n:<18}{e.summary}  [{ps}]\n")
        return EXIT_OK
    if args.action == "export":
        spec = StateSpec(name=args.name, params=dict(args.param))
        state, desc = spec.load()
        if args.out:
            write_state(state, args.out, label=args.name)
        else:
            from .fileio import dumps_state

            sys.stdout.write(dumps_state(state, label=args.name) + "\n")
        return EXIT_OK
    raise UsageError("catalog needs an action: list or export")


def cmd_validate(args) -> int:
    state, label = read_state(args.state)
    kind = "pure" if hasattr(state, "amplitudes") else "density"
    sys.stdout.write(f"ok: {kind} state on dims {list(state.dims)}" + (f" ({label})" if label else "") + "\n")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "sweep": cmd_sweep, "catalog": cmd_catalog, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NumericError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
