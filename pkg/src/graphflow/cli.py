"""``graphflow`` command-line front end.

Exit codes: 0 success, 1 domain error (machine-readable error object in the
report), 2 input/parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import boolmat as bm
from . import io
from . import markov as mk
from . import semiflow as sf
from . import verify as vf
from .errors import GraphflowError, NotAnLGraph, ParseError, ThresholdExceeded
from .graph import (
    DirectedGraph,
    communicating_classes,
    extended_quotient_graph,
    is_l_graph,
    maximal_classes,
)

GRAPH_COMMANDS = ("analyze", "morse", "attractors", "quotient", "matrix")
CHAIN_COMMANDS = ("chain-classify", "chain-invariant", "chain-absorb", "chain-limit", "chain-simulate")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return v


def _nonnegative_float(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"{text} must be a nonnegative number")
    return v


def _default_seed() -> int:
    env = os.environ.get("GRAPHFLOW_SEED")
    if env is None:
        return 0
    try:
        return _u64(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise SystemExit(f"graphflow: GRAPHFLOW_SEED={env!r} is not a u64") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--seed", type=_u64, default=None, help="RNG seed (default: $GRAPHFLOW_SEED or 0)")

    graph_opts = argparse.ArgumentParser(add_help=False)
    graph_opts.add_argument("input", help="graph file, or - for stdin")
    graph_opts.add_argument("--format", choices=io.GRAPH_FORMATS,
                            help="input format (default: from the extension, else edges)")
    graph_opts.add_argument("--exhaustive-threshold", type=int, default=sf.DEFAULT_EXHAUSTIVE_THRESHOLD,
                            help="largest d for the exhaustive attractor scan")
    graph_opts.add_argument("--candidates-only", action="store_true",
                            help="enumerate attractors from Morse-set candidates only")

    chain_opts = argparse.ArgumentParser(add_help=False)
    chain_opts.add_argument("input", help="chain file (CSV or JSON), or - for stdin")
    chain_opts.add_argument("--format", choices=io.CHAIN_FORMATS,
                            help="input format (default: from the extension, else csv)")
    chain_opts.add_argument("--tol", type=_nonnegative_float, default=None,
                            help=f"row-sum tolerance (default {mk.DEFAULT_TOL})")
    init = chain_opts.add_mutually_exclusive_group()
    init.add_argument("--initial", type=_positive, help="start in this state (1-based)")
    init.add_argument("--pi0", help="initial distribution as comma-separated weights")
    chain_opts.add_argument("--horizon", type=_positive, default=1000, help="simulation steps")
    chain_opts.add_argument("--trajectories", type=_positive, default=1000, help="simulated paths")

    parser = argparse.ArgumentParser(prog="graphflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "classes, semiflow and matrix views of a graph",
        "morse": "finest Morse decomposition",
        "attractors": "attractors with their complementary repellers",
        "quotient": "extended quotient graph",
        "matrix": "Boolean adjacency matrix analysis",
        "chain-classify": "transient/recurrent states, periods, classes",
        "chain-invariant": "extreme invariant distributions",
        "chain-absorb": "absorption probabilities into the maximal classes",
        "chain-limit": "limit distribution from an initial law",
        "chain-simulate": "seeded Monte Carlo trajectories",
    }
    for name in GRAPH_COMMANDS:
        sub.add_parser(name, parents=[common, graph_opts], help=helps[name])
    for name in CHAIN_COMMANDS:
        sub.add_parser(name, parents=[common, chain_opts], help=helps[name])
    v = sub.add_parser("verify", parents=[common], help="randomized property suites")
    v.add_argument("scope", nargs="?", default="all", choices=("all",) + vf.SCOPES)
    v.add_argument("--max-d", type=_positive, default=6, help="largest instance size")
    v.add_argument("--count", type=_positive, default=50, help="instances per property")
    v.add_argument("--replay", help="rerun a serialized failing witness")
    return parser


# --- report sections ------------------------------------------------------------


def _strict_pairs(order) -> list[list[int]]:
    """Strict order pairs as 1-based indices into the reported set list."""
    return sorted([a + 1, b + 1] for a, b in order if a != b)


def _graph_section(g: DirectedGraph) -> dict:
    dec = communicating_classes(g)
    q = extended_quotient_graph(g)
    return {
        "d": g.d,
        "edges": [list(e) for e in g.edges],
        "l_graph": is_l_graph(g),
        "classes": list(dec.classes),
        "transitory": dec.transitory,
        "class_order": _strict_pairs(dec.order),
        "maximal_classes": maximal_classes(g),
        "quotient": _quotient_section(q),
    }


def _quotient_section(q) -> dict:
    return {
        "nodes": [{"kind": n.kind, "members": n.members, "label": n.label()} for n in q.nodes],
        "edges": sorted([a + 1, b + 1] for a, b in q.edges),
    }


def _matrix_section(a: bm.BoolMatrix) -> dict:
    g = bm.graph_of(a)
    irreducible = bm.is_irreducible(a)
    form = bm.block_form(a)
    out = {
        "adjacency": a.to_lists(),
        "irreducible": irreducible,
        "class_periods": [{"class": c, "period": bm.class_period(g, c)}
                          for c in communicating_classes(g).classes],
        "block_form": {
            "permutation": list(form.permutation),
            "blocks": [{"kind": b.kind, "members": b.members, "start": b.start + 1, "stop": b.stop}
                       for b in form.blocks],
        },
        "recurrent_vertices": bm.recurrent_vertices_via_matrix(a),
    }
    if irreducible:
        out["period"] = bm.matrix_period(a)
        out["aperiodic"] = bm.is_aperiodic(a)
    return out


def _attractor_mode(g: DirectedGraph, args) -> str:
    if args.candidates_only:
        return "candidates"
    if g.d > args.exhaustive_threshold:
        raise ThresholdExceeded(
            f"d={g.d} exceeds the exhaustive threshold {args.exhaustive_threshold}; "
            "pass --candidates-only or raise --exhaustive-threshold")
    return "exhaustive"


def _attractor_section(g: DirectedGraph, args) -> dict:
    mode = _attractor_mode(g, args)
    pairs = sf.attractor_repeller_pairs(g, mode, args.exhaustive_threshold)
    return {"mode": mode,
            "attractors": [{"attractor": p.attractor, "repeller": p.repeller} for p in pairs]}


def _morse_section(g: DirectedGraph) -> dict:
    m = sf.finest_morse_decomposition(g)
    return {"sets": list(m.sets), "order": _strict_pairs(m.order)}


def _semiflow_section(g: DirectedGraph, args) -> dict:
    return {
        "recurrent": sf.recurrent_set(g),
        "morse": _morse_section(g),
        **_attractor_section(g, args),
    }


def cmd_graph(args, g: DirectedGraph) -> tuple[int, dict]:
    if args.command == "analyze":
        report = {"graph": _graph_section(g), "matrix": _matrix_section(bm.adjacency(g))}
        try:
            report["semiflow"] = _semiflow_section(g, args)
        except (NotAnLGraph, ThresholdExceeded) as exc:
            report["errors"] = [{**exc.to_dict(), "section": "semiflow"}]
            return 1, report
        return 0, report
    if args.command == "morse":
        return 0, _morse_section(g)
    if args.command == "attractors":
        return 0, _attractor_section(g, args)
    if args.command == "quotient":
        return 0, _quotient_section(extended_quotient_graph(g))
    if args.command == "matrix":
        return 0, _matrix_section(bm.adjacency(g))
    raise AssertionError(args.command)


def _initial(args, chain: mk.TransitionMatrix):
    if args.pi0 is not None:
        try:
            weights = [Fraction(w.strip()) for w in args.pi0.split(",")]
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"--pi0 {args.pi0!r} is not a list of numbers") from None
        if len(weights) != chain.d:
            raise ParseError(f"--pi0 has {len(weights)} weights for {chain.d} states")
        return mk.distribution(weights, chain.tol)
    return mk.delta(chain.d, args.initial or 1)


def cmd_chain(args, chain: mk.TransitionMatrix) -> tuple[int, dict]:
    if args.command == "chain-classify":
        cls = mk.classify_states(chain)
        return 0, {
            "classes": list(chain.classes.classes),
            "maximal_classes": list(chain.maximal),
            "states": [{"state": s + 1, "kind": cls.kinds[s], "period": cls.periods[s],
                        "class": None if cls.membership[s] is None else cls.membership[s] + 1}
                       for s in range(chain.d)],
        }
    if args.command == "chain-invariant":
        return 0, {"distributions": [{"class": c, "weights": list(w)}
                                     for c, w in mk.invariant_distributions(chain)]}
    if args.command == "chain-absorb":
        ab = mk.absorption_probabilities(chain)
        return 0, {"classes": list(ab.classes), "absorption": [list(r) for r in ab.probabilities],
                   "multistable": mk.multistable_states(chain)}
    if args.command == "chain-limit":
        pi0 = _initial(args, chain)
        lim = mk.limit_distribution(chain, pi0)
        return 0, {"initial": list(pi0), "weights": list(lim.weights), "mode": lim.mode,
                   "window": lim.window}
    if args.command == "chain-simulate":
        pi0 = _initial(args, chain)
        res = mk.simulate(chain, pi0, args.seed, args.horizon, args.trajectories)
        hits = [t for t in res.hitting_times if t is not None]
        return 0, {
            "seed": res.seed,
            "horizon": res.horizon,
            "trajectories": res.trajectories,
            "visit_counts": list(res.visit_counts),
            "occupancy": list(res.occupancy),
            "target": res.target,
            "hitting": {"hit": len(hits), "missed": res.trajectories - len(hits),
                        "mean": sum(hits) / len(hits) if hits else None,
                        "min": min(hits, default=None), "max": max(hits, default=None)},
            "absorption": [{"class": c, "frequency": f}
                           for c, f in zip(res.absorption_classes, res.absorption_frequencies)],
        }
    raise AssertionError(args.command)


def cmd_verify(args, out) -> int:
    if args.replay:
        try:
            witness = json.loads(io.read_text(args.replay))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid witness JSON: {exc}") from None
        witnesses = witness.get("failures", [witness]) if isinstance(witness, dict) else witness
        failed = 0
        for w in witnesses:
            try:
                detail = vf.replay(w)
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"malformed witness: {exc}") from None
            status = "FAIL" if detail else "PASS"
            failed += bool(detail)
            out.write(f"{status}  {w['property']}" + (f"  {detail}" if detail else "") + "\n")
        return 1 if failed else 0
    report = vf.run(args.scope, args.seed, args.max_d, args.count)
    out.write(vf.format_table(report))
    for w in report.failures():
        out.write("witness: " + json.dumps(io.jsonable(w), sort_keys=True) + "\n")
    return 0 if report.ok else 1


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    command = args.command
    try:
        if command == "verify":
            if args.output and not args.replay:
                report = vf.run(args.scope, args.seed, args.max_d, args.count)
                _emit(io.dumps_report({"command": "verify", **report.to_dict()}), args.output)
                sys.stdout.write(vf.format_table(report))
                return 0 if report.ok else 1
            return cmd_verify(args, sys.stdout)
        text = io.read_text(args.input)
        if command in GRAPH_COMMANDS:
            fmt = args.format or io.infer_format(args.input, io.sniff_graph_format(text))
            if fmt not in io.GRAPH_FORMATS:
                raise ParseError(f"format {fmt!r} does not describe a graph")
            code, report = cmd_graph(args, io.parse_graph(text, fmt))
        else:
            fmt = args.format or io.infer_format(args.input, "csv")
            if fmt not in io.CHAIN_FORMATS:
                raise ParseError(f"format {fmt!r} does not describe a chain")
            code, report = cmd_chain(args, io.parse_chain(text, fmt, args.tol))
    except GraphflowError as exc:
        _emit(io.dumps_report({"command": command, "error": exc.to_dict()}), args.output)
        return 1
    except (ParseError, OSError, UnicodeDecodeError) as exc:
        print(f"graphflow: {exc}", file=sys.stderr)
        _emit(io.dumps_report({"command": command, "error": {"error": "ParseError", "message": str(exc)}}),
              None)
        return 2
    _emit(io.dumps_report({"command": command, **report}), args.output)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
