"""Text and JSON formats for graphs, Boolean matrices and chains, plus the
JSON report encoder.

All formats are 1-based. Reports serialize sets as sorted arrays, rationals
as floats and infinite values as the string ``"inf"``.
"""
from __future__ import annotations

import json
import math
import os
from fractions import Fraction
from typing import Any

from .boolmat import BoolMatrix
from .errors import ParseError
from .graph import DirectedGraph
from .markov import DEFAULT_TOL, TransitionMatrix

SCHEMA = "graphflow/1"

GRAPH_FORMATS = ("edges", "json", "matrix")
CHAIN_FORMATS = ("csv", "json")

_EXTENSIONS = {".json": "json", ".csv": "csv", ".mat": "matrix", ".matrix": "matrix",
               ".edges": "edges", ".txt": "edges"}


def infer_format(path: str, default: str) -> str:
    return _EXTENSIONS.get(os.path.splitext(path)[1].lower(), default)


def sniff_graph_format(text: str) -> str:
    """``json`` for a leading brace, ``matrix`` when the first content line has
    several tokens (an edge list starts with the lone vertex count)."""
    head = text.lstrip()
    if head.startswith("{"):
        return "json"
    if head.startswith("["):
        return "matrix"
    lines = _content_lines(text)
    if lines and len(lines[0][1].split()) > 1:
        return "matrix"
    return "edges"


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            out.append((n, line))
    return out


def _int(tok: str, where: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{where}: expected an integer, got {tok!r}") from None


def parse_edge_list(text: str) -> DirectedGraph:
    lines = _content_lines(text)
    if not lines:
        raise ParseError("edge list is empty")
    n0, first = lines[0]
    toks = first.split()
    if len(toks) != 1:
        raise ParseError(f"line {n0}: first line must hold only the vertex count")
    d = _int(toks[0], f"line {n0}")
    edges = []
    for n, line in lines[1:]:
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(f"line {n}: expected 'i j', got {line!r}")
        edges.append((_int(toks[0], f"line {n}"), _int(toks[1], f"line {n}")))
    return DirectedGraph(d, edges)


def _load_json(text: str, **kw) -> Any:
    try:
        return json.loads(text, **kw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def parse_graph_json(text: str) -> DirectedGraph:
    obj = _load_json(text)
    if not isinstance(obj, dict) or "d" not in obj or "edges" not in obj:
        raise ParseError('graph JSON needs keys "d" and "edges"')
    d = obj["d"]
    if not isinstance(d, int) or isinstance(d, bool):
        raise ParseError('"d" must be an integer')
    edges = []
    for e in obj["edges"]:
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise ParseError(f"edge {e!r} is not a pair of integers")
        edges.append((e[0], e[1]))
    return DirectedGraph(d, edges)


def parse_bool_matrix(text: str) -> BoolMatrix:
    """``d`` lines of ``d`` space-separated 0/1 digits, or a JSON nested array."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = _load_json(text)
    else:
        rows = [[_int(t, f"line {n}") for t in line.split()] for n, line in _content_lines(text)]
    if not isinstance(rows, list) or not rows:
        raise ParseError("matrix is empty")
    for row in rows:
        if not isinstance(row, list) or any(x not in (0, 1) or isinstance(x, bool) for x in row):
            raise ParseError(f"matrix row {row!r} must hold only 0/1 digits")
    return BoolMatrix.from_lists(rows)


def parse_graph(text: str, fmt: str) -> DirectedGraph:
    if fmt == "edges":
        return parse_edge_list(text)
    if fmt == "json":
        return parse_graph_json(text)
    if fmt == "matrix":
        from .boolmat import graph_of
        return graph_of(parse_bool_matrix(text))
    raise ParseError(f"format {fmt!r} does not describe a graph")


def _entry(tok: str, where: str) -> Fraction:
    try:
        return Fraction(tok.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: {tok!r} is not a decimal or a/b fraction") from None


def parse_chain_csv(text: str, tol: float = DEFAULT_TOL) -> TransitionMatrix:
    rows = [[_entry(t, f"line {n}") for t in line.split(",")] for n, line in _content_lines(text)]
    if not rows:
        raise ParseError("chain CSV is empty")
    return TransitionMatrix(rows, tol)


def parse_chain_json(text: str, tol: float | None = None) -> TransitionMatrix:
    """``{"p": [[...]], "tol": ...}`` or a bare nested array. Decimal literals
    are read exactly; strings may hold ``a/b``."""
    obj = _load_json(text, parse_float=Fraction)
    file_tol = None
    if isinstance(obj, dict):
        if "p" not in obj:
            raise ParseError('chain JSON needs key "p"')
        file_tol = obj.get("tol")
        obj = obj["p"]
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise ParseError("chain matrix must be a list of rows")
    rows = []
    for r in obj:
        row = []
        for x in r:
            if isinstance(x, str):
                row.append(_entry(x, "chain JSON"))
            elif isinstance(x, (int, Fraction)) and not isinstance(x, bool):
                row.append(Fraction(x))
            else:
                raise ParseError(f"entry {x!r} is not a number")
        rows.append(row)
    if tol is None:
        tol = float(file_tol) if file_tol is not None else DEFAULT_TOL
    return TransitionMatrix(rows, tol)


def parse_chain(text: str, fmt: str, tol: float | None = None) -> TransitionMatrix:
    if fmt == "csv":
        return parse_chain_csv(text, DEFAULT_TOL if tol is None else tol)
    if fmt == "json":
        return parse_chain_json(text, tol)
    raise ParseError(f"format {fmt!r} does not describe a chain")


def read_text(path: str) -> str:
    if path == "-":
        import sys
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def format_edge_list(g: DirectedGraph) -> str:
    return "\n".join([str(g.d)] + [f"{i} {j}" for i, j in g.edges]) + "\n"


def graph_to_json(g: DirectedGraph) -> dict:
    return {"d": g.d, "edges": [list(e) for e in g.edges]}


def chain_to_json(chain: TransitionMatrix) -> dict:
    """Exact chains keep ``a/b`` strings so replays are bit-identical."""
    if chain.exact:
        p = [[str(x) for x in row] for row in chain.p]
    else:
        p = [list(row) for row in chain.p]
    return {"p": p, "tol": chain.tol}


def jsonable(obj: Any) -> Any:
    if isinstance(obj, (frozenset, set)):
        return sorted(jsonable(x) for x in obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):  # enums
        return obj.value
    return obj


def dumps_report(report: dict) -> str:
    payload = {"schema": SCHEMA, **jsonable(report)}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
