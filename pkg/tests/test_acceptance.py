"""Acceptance criteria, one test each.

Every test prints a single ``criterion NN: PASS|FAIL`` line (collected again
in the terminal summary) and then asserts, so a failing criterion is both
visible in the log and red in the run.
"""
from __future__ import annotations

import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import oracles
from conftest import P1, P3, SESSION_START
from graphflow import generators as gen
from graphflow import semiflow as sf
from graphflow.boolmat import adjacency, graph_of, iota, iota_inv, psi, recurrent_vertices_via_matrix
from graphflow.errors import HypothesisViolated
from graphflow.graph import DirectedGraph, members
from graphflow.markov import (
    delta,
    fitted_decay_rate,
    invariant_distributions,
    leaking_bound_check,
    limit_distribution,
    limit_log_errors,
    mean_hitting_time,
    simulate,
)


def _random_distribution(rng: random.Random, d: int) -> tuple[Fraction, ...]:
    w = [rng.randint(0, 9) for _ in range(d)]
    if not any(w):
        w[rng.randrange(d)] = 1
    return tuple(Fraction(x, sum(w)) for x in w)


def test_criterion_01_finest_morse_equals_classes(record_criterion):
    rng = random.Random(101)
    graphs = [gen.random_l_graph(rng, rng.randint(1, 7)) for _ in range(1000)]
    t0 = time.perf_counter()
    results = [sf.finest_morse_decomposition(g) for g in graphs]
    elapsed = time.perf_counter() - t0
    bad = 0
    for g, m in zip(graphs, results):
        same_sets = set(m.sets) == oracles.classes(g.d, g.edges) and len(m.sets) == len(set(m.sets))
        if not (same_sets and m.order == oracles.class_order(g.d, g.edges, m.sets)):
            bad += 1
    ok = bad == 0 and elapsed <= 10
    record_criterion(1, ok, f"1000 L-graphs d<=7, mismatches={bad}, library time {elapsed:.2f}s (<=10s)")
    assert ok


def test_criterion_02_flow_equivalence(record_criterion):
    rng = random.Random(202)
    graphs = [gen.random_graph(rng, rng.randint(1, 6)) for _ in range(200)]
    t0 = time.perf_counter()
    bad = 0
    for g in graphs:
        a = adjacency(g)
        for s in oracles.all_subsets(g.d):
            q = iota(s, g.d)
            for n in range(13):
                if sf.phi(g, n, s) != iota_inv(psi(a, n, q)):
                    bad += 1
    elapsed = time.perf_counter() - t0
    # the library semiflow itself against the counting oracle, on a sample
    for g in graphs[:40]:
        for s in oracles.all_subsets(g.d):
            for n in (0, 1, 5, 12):
                if sf.phi(g, n, s) != oracles.phi_by_counting(g.d, g.edges, s, n):
                    bad += 1
    ok = bad == 0 and elapsed <= 10
    record_criterion(2, ok, f"200 graphs d<=6, all subsets, n<=12, mismatches={bad}, {elapsed:.2f}s (<=10s)")
    assert ok


def _semigroup_failures(g: DirectedGraph) -> int:
    bad = 0
    for s in oracles.all_subsets(g.d):
        images = [sf.phi(g, k, s) for k in range(9)]
        for m in range(9):
            for n in range(9 - m):
                if images[n + m] != sf.phi(g, n, images[m]):
                    bad += 1
    return bad


def test_criterion_03_semigroup_law(record_criterion):
    count, bad = 0, 0
    for d in (1, 2, 3):
        pairs = [(i, j) for i in range(1, d + 1) for j in range(1, d + 1)]
        for bits in range(1 << len(pairs)):
            g = DirectedGraph(d, [p for k, p in enumerate(pairs) if bits >> k & 1])
            bad += _semigroup_failures(g)
            count += 1
    rng = random.Random(303)
    for _ in range(500):
        bad += _semigroup_failures(gen.random_graph(rng, rng.randint(1, 5)))
    ok = bad == 0
    record_criterion(3, ok, f"{count} exhaustive graphs d<=3 + 500 random d<=5, n+m<=8, failures={bad}")
    assert ok


def _maximal_chains(atts: list[int]):
    """Every maximal strictly increasing chain of attractor masks from the empty set."""
    covers = {}
    for a in atts:
        ups = [b for b in atts if a & ~b == 0 and b != a]
        covers[a] = [b for b in ups if not any(c != b and c & ~b == 0 for c in ups)]

    def walk(prefix):
        nxt = covers[prefix[-1]]
        if not nxt:
            yield prefix
        for b in nxt:
            yield from walk(prefix + [b])

    yield from walk([0])


def test_criterion_04_attractor_round_trip(record_criterion):
    rng = random.Random(404)
    chains_checked, bad = 0, 0
    for _ in range(500):
        g = gen.random_l_graph(rng, rng.randint(1, 7))
        fine = sf.finest_morse_decomposition(g)
        if sf.morse_from_attractor_sequence(g, sf.attractor_sequence_from_morse(g, fine)).sets != fine.sets:
            bad += 1
        atts, _ = sf.attractor_masks(g, "exhaustive")
        for chain in _maximal_chains(atts):
            m = sf.morse_from_attractor_sequence(g, [members(a) for a in chain])
            chains_checked += 1
            if not sf.is_morse_decomposition(g, m.sets):
                bad += 1
    ok = bad == 0
    record_criterion(4, ok, f"500 L-graphs d<=7, {chains_checked} maximal attractor chains, failures={bad}")
    assert ok


def test_criterion_05_recurrence_via_attractors(record_criterion):
    rng = random.Random(505)
    bad = 0
    for _ in range(500):
        g = gen.random_l_graph(rng, rng.randint(1, 7))
        via = sf.recurrent_via_attractors(g, "exhaustive")
        if via != sf.recurrent_set(g) or via != oracles.recurrent(g.d, g.edges):
            bad += 1
    ok = bad == 0
    record_criterion(5, ok, f"500 L-graphs d<=7, exhaustive attractors, mismatches={bad}")
    assert ok


def test_criterion_06_invariant_is_inverse_return_time(record_criterion):
    rng = random.Random(606)
    worst = 0.0
    for _ in range(200):
        c = gen.random_irreducible_chain(rng, rng.randint(1, 10))
        [(_, pi)] = invariant_distributions(c)
        for k in range(1, c.d + 1):
            worst = max(worst, abs(float(pi[k - 1] - 1 / mean_hitting_time(c, k, {k}))))
    ok = worst <= 1e-9
    record_criterion(6, ok, f"200 irreducible rational chains d<=10, max |pi_k - 1/mu(k,k)| = {worst:.3g} (<=1e-9)")
    assert ok


def test_criterion_07_limit_behavior(record_criterion):
    rng = random.Random(707)
    fit = list(range(10, 101))
    worst, steepest, bad = -math.inf, -math.inf, 0
    for _ in range(200):
        c = gen.random_aperiodic_chain(rng, rng.randint(1, 8))
        pi0 = _random_distribution(rng, c.d)
        assert limit_distribution(c, pi0).mode == "pointwise"
        slope = fitted_decay_rate(limit_log_errors(c, pi0, fit), fit)
        [at_500] = limit_log_errors(c, pi0, [500], exact=False)
        worst = max(worst, at_500)
        steepest = max(steepest, slope)
        if not (at_500 <= math.log(1e-8) and slope < 0):
            bad += 1
    ok = bad == 0
    record_criterion(7, ok, f"200 aperiodic chains d<=8, max error at n=500 = {math.exp(worst):.3g} (<=1e-8), "
                            f"largest fitted slope = {steepest:.3g} (<0), failures={bad}")
    assert ok


def test_criterion_08_leaking_bound(record_criterion):
    rng = random.Random(808)
    instances, violations, worst = 0, 0, math.inf
    for _ in range(300):
        inst = gen.random_leaking_instance(rng, rng.randint(2, 6))
        if inst is None:
            continue
        chain, i, b = inst
        try:
            rep = leaking_bound_check(chain, i, b, m_max=50)
        except HypothesisViolated:
            continue
        instances += 1
        worst = min(worst, rep.min_margin)
        violations += not rep.holds(1e-12)
    ok = instances > 0 and violations == 0
    record_criterion(8, ok, f"{instances} instances meeting the stated hypotheses, m<=50, "
                            f"violations={violations}, min margin {worst:.3g} (>=-1e-12)")
    assert ok


def test_criterion_09_monte_carlo(record_criterion):
    t0 = time.perf_counter()
    horizon = 10 ** 5
    worst_z, bad = 0.0, 0
    rng = random.Random(909)
    cases = [(P1, delta(2, 1), 42)]
    for k in range(20):
        cases.append((gen.random_irreducible_chain(rng, rng.randint(2, 6), aperiodic=True),
                      None, 1000 + k))
    for chain, pi0, seed in cases:
        pi0 = pi0 or delta(chain.d, 1)
        res = simulate(chain, pi0, seed=seed, horizon=horizon)
        for j in range(1, chain.d + 1):
            p = float(1 / mean_hitting_time(chain, j, {j}))
            sigma = math.sqrt(p * (1 - p) / horizon)
            z = abs(res.occupancy[j - 1] - p) / sigma
            worst_z = max(worst_z, z)
            bad += z > 3
    absorb = simulate(P3, delta(3, 2), seed=7, horizon=10 ** 3, trajectories=10 ** 4)
    freq = absorb.absorption_frequencies
    z_abs = max(abs(f - 0.5) / math.sqrt(0.25 / 10 ** 4) for f in freq)
    bad += z_abs > 3
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed <= 30
    record_criterion(9, ok, f"P1 + 20 irreducible aperiodic chains, horizon 1e5, max |z| = {worst_z:.2f}; "
                            f"P3 absorption {freq[0]:.4f}/{freq[1]:.4f} |z| = {z_abs:.2f} (<=3); {elapsed:.1f}s (<=30s)")
    assert ok


def test_criterion_10_boolean_recurrence(record_criterion):
    rng = random.Random(1010)
    bad = 0
    for _ in range(1000):
        a = gen.random_bool_matrix(rng, rng.randint(1, 8))
        g = graph_of(a)
        via_matrix = recurrent_vertices_via_matrix(a)
        if via_matrix != sf.recurrent_set(g) or via_matrix != oracles.recurrent(g.d, g.edges):
            bad += 1
    # matrices whose only loop has length d, where a sum to d-1 would miss it
    for d in range(1, 9):
        cyc = DirectedGraph(d, [(i, i % d + 1) for i in range(1, d + 1)])
        bad += recurrent_vertices_via_matrix(adjacency(cyc)) != frozenset(range(1, d + 1))
    ok = bad == 0
    record_criterion(10, ok, f"1000 random matrices d<=8 + 8 full cycles, mismatches={bad}")
    assert ok


def test_criterion_11_wall_clock_and_verify(record_criterion):
    proc = subprocess.run([sys.executable, "-m", "graphflow.cli", "verify", "all", "--seed", "1"],
                          capture_output=True, text=True)
    elapsed = time.perf_counter() - SESSION_START
    ok = proc.returncode == 0 and elapsed < 60
    record_criterion(11, ok, f"`verify all --seed 1` exit {proc.returncode}; suite wall-clock {elapsed:.1f}s (<60s)")
    assert ok, proc.stdout[-2000:]
