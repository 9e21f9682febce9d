from __future__ import annotations

import pytest
from hypothesis import given

import oracles
from conftest import G1, G2, G3, G4, G5, graphs
from graphflow.errors import DuplicateEdge, EmptyVertexSet, InvalidPath, VertexOutOfRange
from graphflow.graph import (
    BACKWARD,
    FORWARD,
    build_graph,
    communicating_class_of,
    communicating_classes,
    degrees,
    extended_quotient_graph,
    find_loop,
    invariance_kind,
    is_l_graph,
    make_path,
    maximal_classes,
    orbit,
    quotient_order,
    weakly_connected,
)


class TestBuild:
    def test_g1(self):
        assert G1.d == 2 and G1.edges == ((1, 2), (2, 1))

    def test_edges_sorted(self):
        g = build_graph(3, [(3, 1), (1, 2), (2, 2)])
        assert g.edges == ((1, 2), (2, 2), (3, 1))

    @pytest.mark.parametrize(
        "d, edges, exc",
        [
            (2, [(1, 2), (1, 2)], DuplicateEdge),
            (3, [(1, 4)], VertexOutOfRange),
            (3, [(0, 1)], VertexOutOfRange),
            (0, [], EmptyVertexSet),
        ],
    )
    def test_errors(self, d, edges, exc):
        with pytest.raises(exc):
            build_graph(d, edges)

    def test_equality_and_hash(self):
        assert build_graph(2, [(2, 1), (1, 2)]) == G1
        assert len({G1, build_graph(2, [(1, 2), (2, 1)])}) == 1


@pytest.mark.parametrize("g, i, expected", [(G2, 1, (2, 1)), (G5, 2, (0, 1)), (G1, 1, (1, 1))])
def test_degrees(g, i, expected):
    assert degrees(g, i) == expected


def test_degrees_out_of_range():
    with pytest.raises(VertexOutOfRange):
        degrees(G1, 3)


@pytest.mark.parametrize("g, expected", [(G1, True), (G5, False), (G4, True)])
def test_is_l_graph(g, expected):
    assert is_l_graph(g) is expected


@pytest.mark.parametrize(
    "g, i, direction, expected",
    [(G2, 1, FORWARD, {1, 2}), (G2, 1, BACKWARD, {1}), (G3, 1, FORWARD, {2})],
)
def test_orbit_examples(g, i, direction, expected):
    assert orbit(g, i, direction) == frozenset(expected)


@pytest.mark.parametrize("g, i, expected", [(G1, 1, {1, 2}), (G3, 1, None), (G2, 1, {1})])
def test_communicating_class_of(g, i, expected):
    got = communicating_class_of(g, i)
    assert got == (None if expected is None else frozenset(expected))


class TestCommunicatingClasses:
    def test_g4(self):
        dec = communicating_classes(G4)
        assert dec.classes == (frozenset({2}), frozenset({3}))
        assert dec.transitory == frozenset({1})
        assert dec.order == frozenset({(0, 0), (1, 1)})

    def test_g1(self):
        dec = communicating_classes(G1)
        assert dec.classes == (frozenset({1, 2}),)
        assert dec.transitory == frozenset()

    def test_g5(self):
        dec = communicating_classes(G5)
        assert dec.classes == ()
        assert dec.transitory == frozenset({1, 2})

    def test_tie_break_smallest_member(self):
        # two incomparable classes {3} and {1,2}; both minimal, so smallest member first
        g = build_graph(3, [(1, 2), (2, 1), (3, 3)])
        assert communicating_classes(g).classes == (frozenset({1, 2}), frozenset({3}))

    def test_order_respects_paths(self):
        g = build_graph(3, [(3, 3), (3, 1), (1, 1), (2, 2), (1, 2)])
        dec = communicating_classes(g)
        assert dec.classes == (frozenset({3}), frozenset({1}), frozenset({2}))
        assert dec.strict_order() == [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("g, expected", [(G2, [{2}]), (G4, [{2}, {3}]), (G1, [{1, 2}])])
def test_maximal_classes(g, expected):
    assert maximal_classes(g) == [frozenset(s) for s in expected]


@pytest.mark.parametrize(
    "g, U, expected",
    [
        (G2, {2}, (True, False, False)),
        (G1, {1, 2}, (True, True, True)),
        (G4, {1}, (False, True, False)),
        (G4, set(), (True, True, True)),
    ],
)
def test_invariance_kind(g, U, expected):
    assert tuple(invariance_kind(g, U)) == expected


class TestPaths:
    @pytest.mark.parametrize(
        "g, vs, expected", [(G1, [1, 2, 1], (0, 2)), (G3, [1, 2], None), (G2, [1, 1], (0, 1))]
    )
    def test_find_loop(self, g, vs, expected):
        assert find_loop(make_path(g, vs)) == expected

    def test_find_loop_smallest_start_then_end(self):
        g = build_graph(3, [(1, 2), (2, 1), (2, 2), (1, 3), (3, 1)])
        assert find_loop(make_path(g, [1, 2, 2, 1])) == (0, 3)
        assert find_loop(make_path(g, [2, 2, 1, 2])) == (0, 1)

    def test_invalid_path(self):
        with pytest.raises(InvalidPath):
            make_path(G3, [2, 1])

    def test_length_zero(self):
        p = make_path(G5, [2])
        assert p.length == 0 and find_loop(p) is None

    def test_concatenation(self):
        p = make_path(G1, [1, 2]) + make_path(G1, [2, 1])
        assert p.vertices == (1, 2, 1)
        with pytest.raises(InvalidPath):
            make_path(G1, [1, 2]) + make_path(G1, [1, 2])


class TestQuotient:
    def test_g4(self):
        q = extended_quotient_graph(G4)
        labels = [n.label() for n in q.nodes]
        edges = {(labels[a], labels[b]) for a, b in q.edges}
        assert sorted(labels) == sorted(["C{2}", "C{3}", "t1"])
        assert edges == {("t1", "C{2}"), ("t1", "C{3}"), ("C{2}", "C{2}"), ("C{3}", "C{3}")}

    def test_g3(self):
        q = extended_quotient_graph(G3)
        labels = [n.label() for n in q.nodes]
        assert {(labels[a], labels[b]) for a, b in q.edges} == {("t1", "C{2}"), ("C{2}", "C{2}")}

    def test_idempotent_on_g4(self):
        q = extended_quotient_graph(G4)
        qq = extended_quotient_graph(q.as_graph())
        assert sorted(n.kind for n in qq.nodes) == sorted(n.kind for n in q.nodes)
        assert len(qq.edges) == len(q.edges)

    def test_quotient_order_puts_sources_first(self):
        assert [n.label() for n in quotient_order(G4)] == ["t1", "C{2}", "C{3}"]


def test_weak_connectivity():
    assert weakly_connected(G4)
    assert not weakly_connected(build_graph(2, [(1, 1), (2, 2)]))


# --- properties against the path-enumeration oracle -----------------------------


@given(graphs(max_d=6))
def test_orbits_match_simple_path_oracle(g):
    for i in range(1, g.d + 1):
        assert orbit(g, i) == oracles.forward_orbit(g.d, g.edges, i)
        assert orbit(g, i, BACKWARD) == oracles.backward_orbit(g.d, g.edges, i)


@given(graphs(max_d=6))
def test_classes_and_order_match_oracle(g):
    dec = communicating_classes(g)
    assert set(dec.classes) == oracles.classes(g.d, g.edges)
    assert dec.order == oracles.class_order(g.d, g.edges, dec.classes)


@given(graphs(max_d=6))
def test_class_membership_iff_on_loop(g):
    for i in range(1, g.d + 1):
        on_loop = i in oracles.forward_orbit(g.d, g.edges, i)
        assert (communicating_class_of(g, i) is not None) == on_loop


@given(graphs(max_d=6))
def test_partition_and_partial_order(g):
    dec = communicating_classes(g)
    union = frozenset().union(*dec.classes) if dec.classes else frozenset()
    assert sum(len(c) for c in dec.classes) == len(union)
    assert union | dec.transitory == frozenset(range(1, g.d + 1))
    assert not union & dec.transitory
    o = dec.order
    assert all((a, a) in o for a in range(len(dec.classes)))
    assert not any((b, a) in o for a, b in o if a != b)
    assert all((a, c) in o for a, b in o for b2, c in o if b == b2)
    # canonical order is a linear extension
    assert all(a <= b for a, b in o)


@given(graphs(max_d=6, l_graph=True))
def test_l_graph_orbit_contains_maximal_class(g):
    tops = maximal_classes(g)
    assert tops
    for i in range(1, g.d + 1):
        assert any(c <= orbit(g, i) for c in tops)


@given(graphs(max_d=6, l_graph=True))
def test_maximal_iff_forward_invariant(g):
    tops = set(maximal_classes(g))
    for c in communicating_classes(g).classes:
        assert (c in tops) == invariance_kind(g, c).forward


@given(graphs(max_d=6, l_graph=True))
def test_long_paths_contain_loops(g):
    v, path = 1, [1]
    for _ in range(g.d):
        v = min(j for a, j in g.edges if a == v)
        path.append(v)
    loop = find_loop(make_path(g, path))
    assert loop is not None and path[loop[0]] == path[loop[1]]
