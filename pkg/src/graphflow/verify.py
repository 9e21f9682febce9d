"""Randomized cross-representation property suites.

Each property has a generator producing a JSON-serializable instance and a
check returning ``None`` on success or a short failure description. Failing
instances are reported as witnesses that :func:`replay` can rerun.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

from . import boolmat as bm
from . import generators as gen
from . import markov as mk
from . import semiflow as sf
from .graph import (
    BACKWARD,
    DirectedGraph,
    communicating_classes,
    extended_quotient_graph,
    find_loop,
    invariance_kind,
    is_l_graph,
    make_path,
    maximal_classes,
    members,
)
from .io import chain_to_json, graph_to_json, parse_chain_json

SCOPES = ("graph", "semiflow", "matrix", "chain")

Instance = dict
Check = Callable[[Instance], "str | None"]


@dataclass(frozen=True)
class Property:
    name: str
    scope: str
    generate: Callable[[random.Random, int], Instance]
    check: Check


@dataclass
class PropertyOutcome:
    name: str
    scope: str
    passed: int = 0
    total: int = 0
    witness: dict | None = None


@dataclass
class SuiteReport:
    scope: str
    seed: int
    max_d: int
    count: int
    outcomes: list[PropertyOutcome] = field(default_factory=list)
    facts: dict[int, list[int]] = field(default_factory=dict)  # fact -> [passed, total]

    @property
    def ok(self) -> bool:
        return all(o.passed == o.total for o in self.outcomes)

    def failures(self) -> list[dict]:
        return [o.witness for o in self.outcomes if o.witness is not None]

    def to_dict(self) -> dict:
        return {
            "scope": self.scope,
            "seed": self.seed,
            "max_d": self.max_d,
            "count": self.count,
            "ok": self.ok,
            "properties": [{"name": o.name, "scope": o.scope, "passed": o.passed, "total": o.total}
                           for o in self.outcomes],
            "facts": {str(k): {"passed": v[0], "total": v[1]} for k, v in sorted(self.facts.items())},
            "failures": self.failures(),
        }


def _graph(inst: Instance) -> DirectedGraph:
    g = inst["graph"]
    return DirectedGraph(g["d"], [tuple(e) for e in g["edges"]])


def _chain(inst: Instance) -> mk.TransitionMatrix:
    import json
    return parse_chain_json(json.dumps(inst["chain"]))


def _size(rng: random.Random, max_d: int) -> int:
    return rng.randint(1, max_d)


def _gen_graph(rng, max_d):
    return {"graph": graph_to_json(gen.random_graph(rng, _size(rng, max_d)))}


def _gen_l_graph(rng, max_d):
    return {"graph": graph_to_json(gen.random_l_graph(rng, _size(rng, max_d)))}


def _gen_l_graph_set(rng, max_d):
    g = gen.random_l_graph(rng, _size(rng, max_d))
    return {"graph": graph_to_json(g), "set": sorted(gen.random_subset(rng, g.d, nonempty=False))}


def _gen_chain(rng, max_d):
    return {"chain": chain_to_json(gen.random_chain(rng, _size(rng, max_d)))}


def _gen_irreducible(rng, max_d):
    return {"chain": chain_to_json(gen.random_irreducible_chain(rng, _size(rng, max_d)))}


# --- graph ---------------------------------------------------------------------


def _warshall(g: DirectedGraph) -> list[list[bool]]:
    d = g.d
    r = [[g.has_edge(i + 1, j + 1) for j in range(d)] for i in range(d)]
    for k in range(d):
        for i in range(d):
            if r[i][k]:
                for j in range(d):
                    if r[k][j]:
                        r[i][j] = True
    return r


def check_classes_vs_closure(inst):
    g = _graph(inst)
    r = _warshall(g)
    d = g.d
    expected = set()
    for i in range(d):
        c = frozenset(j + 1 for j in range(d) if r[i][j] and r[j][i])
        if c:
            expected.add(c)
    dec = communicating_classes(g)
    if set(dec.classes) != expected:
        return f"classes {sorted(map(sorted, dec.classes))} != closure {sorted(map(sorted, expected))}"
    for a, ca in enumerate(dec.classes):
        for b, cb in enumerate(dec.classes):
            want = a == b or r[min(ca) - 1][min(cb) - 1]
            if ((a, b) in dec.order) != want:
                return f"order pair ({a},{b}) disagrees with closure"
    return None


def check_order_is_partial(inst):
    dec = communicating_classes(_graph(inst))
    n = len(dec.classes)
    o = dec.order
    if any((a, a) not in o for a in range(n)):
        return "not reflexive"
    if any((b, a) in o for a, b in o if a != b):
        return "not antisymmetric"
    if any((a, c) not in o for a, b in o for b2, c in o if b == b2):
        return "not transitive"
    if any(a > b for a, b in o):
        return "canonical order is not a linear extension"
    return None


def check_classes_partition(inst):
    g = _graph(inst)
    dec = communicating_classes(g)
    seen = set()
    for c in dec.classes:
        if seen & c:
            return "classes overlap"
        seen |= c
    if seen & dec.transitory or seen | dec.transitory != set(range(1, g.d + 1)):
        return "classes and transitory vertices do not partition V"
    return None


def _gen_long_path(rng, max_d):
    g = gen.random_l_graph(rng, _size(rng, max_d))
    v = rng.randint(1, g.d)
    path = [v]
    for _ in range(g.d + rng.randint(0, 3)):
        v = rng.choice(sorted(members(g.succ[v - 1])))
        path.append(v)
    return {"graph": graph_to_json(g), "path": path}


def check_long_path_has_loop(inst):
    p = make_path(_graph(inst), inst["path"])
    loop = find_loop(p)
    if loop is None:
        return "no loop found in a path of length >= d"
    a, b = loop
    if not (a < b and p[a] == p[b]):
        return f"reported loop {loop} is not a loop"
    return None


def check_maximal_forward_invariant(inst):
    g = _graph(inst)
    maximal = set(maximal_classes(g))
    for c in communicating_classes(g).classes:
        if (c in maximal) != invariance_kind(g, c).forward:
            return f"class {sorted(c)}: maximal={c in maximal}"
    return None


def check_quotient_idempotent(inst):
    q = extended_quotient_graph(_graph(inst))
    qq = extended_quotient_graph(q.as_graph())
    shape = lambda x: (sorted(n.kind for n in x.nodes), len(x.edges))  # noqa: E731
    if shape(q) != shape(qq):
        return "quotient of the quotient changed shape"
    return None


# --- semiflow ------------------------------------------------------------------


def _gen_semigroup(rng, max_d):
    inst = _gen_l_graph_set(rng, max_d) if rng.random() < 0.5 else _gen_graph(rng, max_d)
    g = _graph(inst)
    inst.setdefault("set", sorted(gen.random_subset(rng, g.d, nonempty=False)))
    n = rng.randint(0, 12)
    inst["n"], inst["m"] = n, rng.randint(0, 12 - n)
    return inst


def check_semigroup(inst):
    g = _graph(inst)
    a, n, m = inst["set"], inst["n"], inst["m"]
    if sf.phi(g, n + m, a) != sf.phi(g, n, sf.phi(g, m, a)):
        return f"Phi({n}+{m}, A) != Phi({n}, Phi({m}, A))"
    return None


def check_omega_additive(inst):
    g = _graph(inst)
    a = inst["set"]
    union = frozenset().union(*(sf.omega_limit(g, {i}) for i in a)) if a else frozenset()
    if sf.omega_limit(g, a) != union:
        return "omega(A) != union of omega({i})"
    return None


def check_l_graph_omega(inst):
    g = _graph(inst)
    nonempty = all(sf.omega_limit(g, {i}) for i in range(1, g.d + 1))
    if is_l_graph(g) != nonempty:
        return f"L-graph={is_l_graph(g)} but all singleton omegas nonempty={nonempty}"
    return None


def check_morse_equals_classes(inst):
    g = _graph(inst)
    m = sf.finest_morse_decomposition(g)
    dec = communicating_classes(g)
    if m.sets != dec.classes or m.order != dec.order:
        return "finest Morse decomposition differs from the communicating classes"
    check = sf.is_morse_decomposition(g, m.sets)
    if not check:
        return f"finest decomposition rejected: {check.reason}"
    if set(sf.phi_connected_components(g, sf.recurrent_set(g))) != set(m.sets):
        return "Phi-connected components of R differ from the Morse sets"
    return None


def check_attractor_round_trip(inst):
    g = _graph(inst)
    fine = sf.finest_morse_decomposition(g)
    seq = sf.attractor_sequence_from_morse(g, fine)
    back = sf.morse_from_attractor_sequence(g, seq)
    if back.sets != fine.sets:
        return "finest decomposition does not round-trip"
    # a random maximal strictly increasing chain of attractors
    atts = sf.attractor_masks(g)[0]
    rng = random.Random(repr(inst))
    chain, cur = [0], 0
    while True:
        ups = [a for a in atts if cur & ~a == 0 and a != cur]
        covers = [a for a in ups if not any(b != a and b & ~a == 0 for b in ups)]
        if not covers:
            break
        cur = rng.choice(covers)
        chain.append(cur)
    m = sf.morse_from_attractor_sequence(g, [members(a) for a in chain])
    check = sf.is_morse_decomposition(g, m.sets)
    if not check:
        return f"maximal attractor chain gives an invalid decomposition: {check.reason}"
    return None


def check_recurrence_via_attractors(inst):
    g = _graph(inst)
    if sf.recurrent_via_attractors(g, "exhaustive") != sf.recurrent_set(g):
        return "intersection of A | A* differs from the recurrent set"
    return None


def check_candidates_complete(inst):
    g = _graph(inst)
    if sf.attractor_masks(g, "candidates")[0] != sf.attractor_masks(g, "exhaustive")[0]:
        return "candidate attractors differ from the exhaustive scan"
    return None


def check_minimal_attractors(inst):
    g = _graph(inst)
    atts = [a for a in sf.attractor_masks(g, "exhaustive")[0] if a]
    minimal = {members(a) for a in atts if not any(b != a and b & ~a == 0 for b in atts)}
    if minimal != set(maximal_classes(g)):
        return "minimal nonempty attractors differ from the maximal classes"
    return None


# --- matrix --------------------------------------------------------------------


def _gen_flow(rng, max_d):
    inst = _gen_graph(rng, max_d)
    g = _graph(inst)
    inst["set"] = sorted(gen.random_subset(rng, g.d, nonempty=False))
    inst["n"] = rng.randint(0, 12)
    return inst


def check_flow_identity(inst):
    g = _graph(inst)
    a, n = inst["set"], inst["n"]
    q = bm.psi(bm.adjacency(g), n, bm.iota(a, g.d))
    qb = bm.psi(bm.adjacency(g), n, bm.iota(a, g.d), BACKWARD)
    if bm.iota_inv(q) != sf.phi(g, n, a) or bm.iota_inv(qb) != sf.phi_minus(g, n, a):
        return f"Phi and Psi disagree at n={n}"
    return None


def check_recurrent_via_matrix(inst):
    g = _graph(inst)
    if bm.recurrent_vertices_via_matrix(bm.adjacency(g)) != sf.recurrent_set(g):
        return "Boolean diagonal recurrence differs from omega recurrence"
    return None


def check_irreducible_iff_one_class(inst):
    g = _graph(inst)
    dec = communicating_classes(g)
    one = len(dec.classes) == 1 and not dec.transitory
    if bm.is_irreducible(bm.adjacency(g)) != one:
        return "irreducibility disagrees with the class count"
    return None


def check_period(inst):
    g = _graph(inst)
    a = bm.adjacency(g)
    for c in communicating_classes(g).classes:
        r = sf.restrict(g, c).graph
        ar = bm.adjacency(r)
        p = 0
        power = ar
        for n in range(1, r.d * r.d + r.d + 1):
            if power[0, 0]:
                p = gcd(p, n)
            power = power @ ar
        if bm.class_period(g, c) != p:
            return f"class {sorted(c)}: BFS period {bm.class_period(g, c)} != power gcd {p}"
        if bm.is_aperiodic(ar) != (p == 1):
            return f"class {sorted(c)}: aperiodicity disagrees with period {p}"
    form = bm.block_form(a)
    if not bm.is_block_upper_triangular(form.permuted(a), form.blocks):
        return "block form is not upper triangular"
    return None


# --- chain ---------------------------------------------------------------------


def check_dictionary(inst, facts: dict[int, list[int]] | None = None):
    chain = _chain(inst)
    bad = []
    for r in mk.verify_dictionary(chain):
        if facts is not None:
            slot = facts.setdefault(r.fact, [0, 0])
            slot[0] += int(r.ok)
            slot[1] += 1
        if not r.ok:
            bad.append(f"Fact {r.fact} ({r.detail}; witness {r.witness})")
    return "; ".join(bad) or None


def check_invariant_return_time(inst):
    chain = _chain(inst)
    (_, pi), = mk.invariant_distributions(chain)
    for k in range(chain.d):
        mu = mk.mean_hitting_time(chain, k + 1, [k + 1])
        if abs(float(pi[k] - 1 / mu)) > 1e-9:
            return f"state {k + 1}: pi={float(pi[k])} but 1/mu={1 / float(mu)}"
    return None


def check_absorption(inst):
    chain = _chain(inst)
    ab = mk.absorption_probabilities(chain)
    for s, row in enumerate(ab.probabilities):
        if abs(float(sum(row)) - 1) > 1e-12:
            return f"absorption row {s + 1} sums to {float(sum(row))}"
    target = frozenset().union(*ab.classes)
    F = mk.hitting_probabilities(chain, target)
    mu = mk.mean_hitting_times(chain, target)
    for s in range(chain.d):
        if F[s] != 1 or mu[s] == mk.INFINITE:
            return f"state {s + 1} is not absorbed surely in finite mean time"
    return None


def _gen_ck(rng, max_d):
    inst = _gen_chain(rng, max_d)
    d = len(inst["chain"]["p"])
    inst.update(i=rng.randint(1, d), j=rng.randint(1, d), n=rng.randint(1, 10))
    return inst


def check_ck(inst):
    res = mk.random_ck_check(_chain(inst), inst["i"], inst["j"], inst["n"])
    return None if res <= 1e-10 else f"first-passage decomposition residual {res}"


def _gen_leaking(rng, max_d):
    found = gen.random_leaking_instance(rng, max(2, _size(rng, max_d)), uniform=True)
    if found is None:
        return _gen_leaking(rng, max_d)
    chain, i, b = found
    return {"chain": chain_to_json(chain), "i": i, "B": sorted(b)}


def check_leaking_uniform(inst):
    r = mk.leaking_bound_check(_chain(inst), inst["i"], inst["B"], mode="uniform")
    return None if r.holds() else f"uniform leaking bound violated, margin {r.min_margin}"


PROPERTIES: tuple[Property, ...] = (
    Property("classes-vs-closure", "graph", _gen_graph, check_classes_vs_closure),
    Property("class-order-partial", "graph", _gen_graph, check_order_is_partial),
    Property("classes-partition", "graph", _gen_graph, check_classes_partition),
    Property("long-path-has-loop", "graph", _gen_long_path, check_long_path_has_loop),
    Property("maximal-iff-forward-invariant", "graph", _gen_l_graph, check_maximal_forward_invariant),
    Property("quotient-idempotent", "graph", _gen_graph, check_quotient_idempotent),
    Property("semigroup-law", "semiflow", _gen_semigroup, check_semigroup),
    Property("omega-additive", "semiflow", _gen_l_graph_set, check_omega_additive),
    Property("l-graph-iff-omega-nonempty", "semiflow", _gen_graph, check_l_graph_omega),
    Property("morse-equals-classes", "semiflow", _gen_l_graph, check_morse_equals_classes),
    Property("attractor-round-trip", "semiflow", _gen_l_graph, check_attractor_round_trip),
    Property("recurrence-via-attractors", "semiflow", _gen_l_graph, check_recurrence_via_attractors),
    Property("candidate-attractors-complete", "semiflow", _gen_l_graph, check_candidates_complete),
    Property("minimal-attractors-are-maximal-classes", "semiflow", _gen_l_graph, check_minimal_attractors),
    Property("flow-identity", "matrix", _gen_flow, check_flow_identity),
    Property("matrix-recurrence", "matrix", _gen_graph, check_recurrent_via_matrix),
    Property("irreducible-iff-one-class", "matrix", _gen_graph, check_irreducible_iff_one_class),
    Property("period-and-block-form", "matrix", _gen_graph, check_period),
    Property("fact-dictionary", "chain", _gen_chain, check_dictionary),
    Property("invariant-is-inverse-return-time", "chain", _gen_irreducible, check_invariant_return_time),
    Property("absorption", "chain", _gen_chain, check_absorption),
    Property("first-passage-decomposition", "chain", _gen_ck, check_ck),
    Property("leaking-bound-uniform", "chain", _gen_leaking, check_leaking_uniform),
)

BY_NAME = {p.name: p for p in PROPERTIES}


def _run_check(prop: Property, inst: Instance, facts=None) -> str | None:
    try:
        if prop.name == "fact-dictionary":
            return check_dictionary(inst, facts)
        return prop.check(inst)
    except Exception as exc:  # a crash is a failure with the same witness
        return f"{type(exc).__name__}: {exc}"


def run(scope: str = "all", seed: int = 0, max_d: int = 6, count: int = 25,
        properties: tuple[Property, ...] = PROPERTIES) -> SuiteReport:
    if scope != "all" and scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}")
    report = SuiteReport(scope, seed, max_d, count)
    for prop in properties:
        if scope != "all" and prop.scope != scope:
            continue
        # one independent stream per property, so suites can be run piecemeal
        rng = random.Random(f"{seed}:{prop.name}")
        out = PropertyOutcome(prop.name, prop.scope)
        for _ in range(count):
            inst = prop.generate(rng, max_d)
            detail = _run_check(prop, inst, report.facts)
            out.total += 1
            if detail is None:
                out.passed += 1
            elif out.witness is None:
                out.witness = {"property": prop.name, "instance": inst, "detail": detail}
        report.outcomes.append(out)
    return report


def replay(witness: dict) -> str | None:
    prop = BY_NAME.get(witness.get("property"))
    if prop is None:
        raise ValueError(f"unknown property {witness.get('property')!r}")
    return _run_check(prop, witness["instance"])


def format_table(report: SuiteReport) -> str:
    width = max((len(o.name) for o in report.outcomes), default=10)
    lines = [f"verify scope={report.scope} seed={report.seed} max_d={report.max_d} count={report.count}"]
    for o in report.outcomes:
        status = "PASS" if o.passed == o.total else "FAIL"
        lines.append(f"{status}  {o.name:<{width}}  {o.passed}/{o.total}")
    if report.facts:
        lines.append("Fact  passed/total")
        for k, (p, t) in sorted(report.facts.items()):
            lines.append(f"{k:>4}  {p}/{t}")
    return "\n".join(lines) + "\n"
