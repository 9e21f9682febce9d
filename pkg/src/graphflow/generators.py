"""Seeded random instances for the property suites and benchmarks.

Every generator takes a ``random.Random`` so callers control the stream.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .boolmat import BoolMatrix, class_period
from .graph import DirectedGraph
from .markov import TransitionMatrix


def random_graph(rng: random.Random, d: int, density: float | None = None) -> DirectedGraph:
    """Each ordered pair (self-loops included) is an edge with probability ``density``."""
    if density is None:
        density = rng.uniform(0.1, 0.6)
    return DirectedGraph(d, [(i, j) for i in range(1, d + 1) for j in range(1, d + 1)
                             if rng.random() < density])


def random_l_graph(rng: random.Random, d: int, density: float | None = None) -> DirectedGraph:
    """Like :func:`random_graph`, then one random out-edge is added to every
    vertex left without one."""
    g = random_graph(rng, d, density)
    edges = set(g.edges)
    for i in range(1, d + 1):
        if not g.succ[i - 1]:
            edges.add((i, rng.randint(1, d)))
    return DirectedGraph(d, edges)


def random_bool_matrix(rng: random.Random, d: int, density: float | None = None) -> BoolMatrix:
    g = random_graph(rng, d, density)
    return BoolMatrix(d, g.succ)


def _weights_on(rng: random.Random, g: DirectedGraph, max_weight: int) -> TransitionMatrix:
    d = g.d
    rows = []
    for i in range(d):
        w = [rng.randint(1, max_weight) if g.succ[i] >> j & 1 else 0 for j in range(d)]
        total = sum(w)
        rows.append([Fraction(x, total) for x in w])
    return TransitionMatrix(rows)


def random_chain(rng: random.Random, d: int, density: float | None = None,
                 max_weight: int = 9) -> TransitionMatrix:
    """Exact chain: random L-graph support, integer weights ``1..max_weight``
    normalized per row."""
    return _weights_on(rng, random_l_graph(rng, d, density), max_weight)


def random_irreducible_chain(rng: random.Random, d: int, density: float | None = None,
                             aperiodic: bool = False, max_weight: int = 9) -> TransitionMatrix:
    """A random Hamiltonian cycle plus random extra edges; ``aperiodic`` also
    puts a self-loop on a random state."""
    g = random_graph(rng, d, density)
    edges = set(g.edges)
    order = list(range(1, d + 1))
    rng.shuffle(order)
    edges.update((order[k], order[(k + 1) % d]) for k in range(d))
    if aperiodic:
        s = rng.randint(1, d)
        edges.add((s, s))
    return _weights_on(rng, DirectedGraph(d, edges), max_weight)


def all_maximal_aperiodic(chain: TransitionMatrix) -> bool:
    return all(class_period(chain.graph, c) == 1 for c in chain.maximal)


def random_aperiodic_chain(rng: random.Random, d: int, density: float | None = None,
                           max_weight: int = 9) -> TransitionMatrix:
    """Random chain whose maximal classes are all aperiodic (by rejection)."""
    while True:
        chain = random_chain(rng, d, density, max_weight)
        if all_maximal_aperiodic(chain):
            return chain


def random_subset(rng: random.Random, d: int, nonempty: bool = True) -> frozenset[int]:
    while True:
        s = frozenset(i for i in range(1, d + 1) if rng.random() < 0.5)
        if s or not nonempty:
            return s


def random_leaking_instance(rng: random.Random, d: int, tries: int = 200, uniform: bool = False):
    """``(chain, i, B)`` satisfying the hypotheses of the leaking bound: ``i`` in
    ``B`` and some path from ``i`` reaches a state outside ``B`` that never
    returns to ``B``. With ``uniform`` every state reachable from ``i`` must
    have such an escape. ``None`` if no instance is found within ``tries``."""
    for _ in range(tries):
        chain = random_chain(rng, d)
        g = chain.graph
        b = random_subset(rng, d)
        bm = g.mask(b)
        gone = g.full & ~bm & ~g.reach_mask(bm, "backward")
        starts = [i for i in sorted(b) if g.reach_mask(1 << (i - 1)) & gone]
        if uniform:
            starts = [i for i in starts if _all_escape(g, i, gone)]
        if starts:
            return chain, rng.choice(starts), b
    return None


def _all_escape(g: DirectedGraph, i: int, gone: int) -> bool:
    live = (g.reach_mask(1 << (i - 1)) | 1 << (i - 1)) & ~gone
    return all(g.reach_mask(1 << s) & gone for s in range(g.d) if live >> s & 1)
