"""Command-line interface.

Every subcommand prints one canonical JSON document (sorted keys, floats
rounded to 12 significant digits) and exits with 0 on success or a positive
verdict, 1 on a negative verdict for well-formed input, and 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass
from typing import Any, Optional

from .dataset import AsymptoticDataSet, validate_data_set
from .index import index_report
from .linegraph import decide_nonempty, line_graph_from_json, line_graph_to_json
from .moduligraph import (MoveError, expand_to_moduli_graph, float_angles, graph_from_json,
                          graph_to_json, linearize, validate_positive_graph)
from .sampler import (ChartError, ChartSpec, chart_from_json, chart_to_json, export_chart,
                      sample_cylinder, verify_chart)

log = logging.getLogger("holosphere")

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 2."""


@dataclass
class CommandResult:
    exit_code: int
    payload: dict


def _normalize(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {str(k): _normalize(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_normalize(v) for v in x]
    if hasattr(x, "item"):
        return _normalize(x.item())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def canonical_json(doc: Any) -> str:
    return json.dumps(_normalize(doc), sort_keys=True, indent=2, ensure_ascii=False)


def _read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def _read_data_set(path: str) -> AsymptoticDataSet:
    try:
        return AsymptoticDataSet.from_json(_read_json(path))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_validate(path: str) -> CommandResult:
    ds = _read_data_set(path)
    rep = validate_data_set(ds)
    log.info("validate %s: %s", path, "pass" if rep.ok else ",".join(rep.rules))
    return CommandResult(0 if rep.ok else 1, {"rules": rep.rules, **rep.to_json()})


def cmd_decide(path: str) -> CommandResult:
    ds = _read_data_set(path)
    v = decide_nonempty(ds)
    log.info("decide %s: %s", path, "nonempty" if v.nonempty else "empty")
    doc = v.to_json(ds)
    doc["rules"] = v.rules
    return CommandResult(0 if v.nonempty else 1, doc)


def cmd_dim(path: str, genus: int = 0, k_c: Optional[int] = None) -> CommandResult:
    ds = _read_data_set(path)
    if genus < 0:
        raise InputError("genus must be non-negative")
    rep = validate_data_set(ds)
    try:
        doc = index_report(ds, genus, k_c).to_json()
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    doc["valid"] = rep.ok
    doc["rules"] = rep.rules
    return CommandResult(0 if rep.ok else 1, doc)


def _line_graph_input(path: str):
    doc = _read_json(path)
    try:
        if isinstance(doc, dict) and doc.get("kind") == "line":
            return line_graph_from_json(doc)
        ds = AsymptoticDataSet.from_json(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    v = decide_nonempty(ds)
    if v.witness is None:
        return None, ds
    return v.witness, ds


def cmd_expand(path: str, delta: Optional[float] = None) -> CommandResult:
    L, ds = _line_graph_input(path)
    if L is None:
        v = decide_nonempty(ds)
        reason = "one-angle data set has no line graph to expand" if v.one_angle \
            else "data set admits no positive line graph"
        return CommandResult(1, {"error": reason, "rules": v.rules})
    try:
        T = expand_to_moduli_graph(L, ds, delta)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    doc = graph_to_json(T, ds, "moduli")
    doc["delta"] = T.delta
    doc["float_angles"] = {str(k): x for k, x in sorted(float_angles(T, T.delta).items())}
    return CommandResult(0, doc)


def cmd_linearize(path: str) -> CommandResult:
    doc = _read_json(path)
    try:
        T, ds = graph_from_json(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    rep = validate_positive_graph(T, ds)
    if not rep.ok:
        return CommandResult(1, {"rules": rep.rules, **rep.to_json()})
    moves: list[int] = []
    try:
        L = linearize(T, ds, lambda res: moves.append(res.move))
    except (MoveError, ValueError) as exc:
        return CommandResult(1, {"error": str(exc)})
    out = line_graph_to_json(L, ds)
    out["moves"] = moves
    return CommandResult(0, out)


def _parse_res(res: str) -> tuple[int, int]:
    try:
        parts = [int(x) for x in res.lower().split("x")]
    except ValueError as exc:
        raise InputError(f"bad resolution {res!r}") from exc
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or min(parts) < 2:
        raise InputError(f"bad resolution {res!r}")
    return parts[0], parts[1]


def _load_chart(path: str, res: str):
    doc = _read_json(path)
    try:
        if isinstance(doc, dict) and doc.get("kind") == "chart":
            return chart_from_json(doc)
        spec = ChartSpec.from_json(doc)
    except ChartError:
        raise
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    n_s, n_v = _parse_res(res)
    return sample_cylinder(spec, n_s, n_v)


def cmd_sample(path: str, res: str = "64", out: Optional[str] = None) -> CommandResult:
    try:
        chart = _load_chart(path, res)
    except ChartError as exc:
        return CommandResult(1, {"error": str(exc)})
    rep = verify_chart(chart)
    doc = {"chart": chart_to_json(chart), "report": rep.to_json(),
           "resolution": list(chart.resolution)}
    if out is not None:
        with open(out, "w") as fh:
            fh.write(canonical_json(chart_to_json(chart)) + "\n")
        doc["written"] = out
    return CommandResult(0 if rep.ok else 1, doc)


def cmd_mesh(paths: list[str], fmt: str = "obj", out: Optional[str] = None,
             res: str = "64") -> CommandResult:
    charts = []
    try:
        for p in paths:
            charts.append(_load_chart(p, res))
    except ChartError as exc:
        return CommandResult(1, {"error": str(exc)})
    if out is None:
        out = f"mesh.{fmt}"
    try:
        export_chart(charts, fmt, out)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from exc
    return CommandResult(0, {"written": out, "format": fmt, "charts": len(charts),
                             "nodes": sum(c.s.size for c in charts)})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holosphere", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="seed for any randomness (default 0)")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", help="check a data set against its admissibility rules")
    p.add_argument("path")
    p = sub.add_parser("decide", help="decide non-emptiness and print a witness")
    p.add_argument("path")
    p = sub.add_parser("dim", help="formal dimension and counting identities")
    p.add_argument("path")
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--kc", type=int, default=None, help="number of critical points")
    p = sub.add_parser("expand", help="expand a line graph (or a data set's witness)")
    p.add_argument("path")
    p.add_argument("--delta", type=float, default=None)
    p = sub.add_parser("linearize", help="apply zipper moves until the graph is linear")
    p.add_argument("path")
    p = sub.add_parser("sample", help="sample and verify a chart spec")
    p.add_argument("path")
    p.add_argument("--res", default="64", help="N or NxM grid resolution")
    p.add_argument("-o", "--output", default=None, help="write the sampled chart JSON here")
    p = sub.add_parser("mesh", help="export charts as CSV or OBJ")
    p.add_argument("paths", nargs="*")
    p.add_argument("--format", choices=("csv", "obj"), default="obj")
    p.add_argument("--res", default="64")
    p.add_argument("-o", "--output", default=None)
    return ap


def run(argv: Optional[list[str]] = None) -> CommandResult:
    args = build_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        if args.command == "validate":
            return cmd_validate(args.path)
        if args.command == "decide":
            return cmd_decide(args.path)
        if args.command == "dim":
            return cmd_dim(args.path, args.genus, args.kc)
        if args.command == "expand":
            return cmd_expand(args.path, args.delta)
        if args.command == "linearize":
            return cmd_linearize(args.path)
        if args.command == "sample":
            return cmd_sample(args.path, args.res, args.output)
        return cmd_mesh(args.paths, args.format, args.output, args.res)
    except InputError as exc:
        log.error("%s", exc)
        return CommandResult(2, {"error": str(exc)})


def main(argv: Optional[list[str]] = None) -> int:
    level = os.environ.get("TOOLKIT_LOG", "quiet").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        res = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return 2 if exc.code else 0
    sys.stdout.write(canonical_json(res.payload) + "\n")
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
