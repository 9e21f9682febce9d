"""Finite directed graphs: orbits, communicating classes, class order, quotients.

Vertices are 1-based at this module's surface and 0-based bit positions
internally. Vertex sets are returned as ``frozenset`` of 1-based ids.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from . import kernels
from .errors import (
    DuplicateEdge,
    EmptyVertexSet,
    InvalidPath,
    VertexOutOfRange,
)

FORWARD = "forward"
BACKWARD = "backward"


def members(mask: int) -> frozenset[int]:
    """1-based ids of the bits set in ``mask``."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def set_key(s: Iterable[int]) -> tuple:
    """Canonical sort key for vertex sets: size, then sorted members."""
    t = tuple(sorted(s))
    return (len(t), t)


class DirectedGraph:
    """A validated graph on vertices ``1..d`` without multi-edges.

    Immutable. ``succ[i]``/``pred[i]`` are bit masks (0-based) of the one-step
    successors/predecessors of vertex ``i + 1``.
    """

    __slots__ = ("d", "edges", "succ", "pred", "kernel", "_rows", "_rrows")

    def __init__(self, d: int, edges: Iterable[tuple[int, int]]):
        if d < 1:
            raise EmptyVertexSet(f"graph needs at least one vertex, got d={d}")
        succ = [0] * d
        pred = [0] * d
        seen = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if not (1 <= i <= d and 1 <= j <= d):
                raise VertexOutOfRange(f"edge ({i},{j}) has an endpoint outside 1..{d}")
            if (i, j) in seen:
                raise DuplicateEdge(f"edge ({i},{j}) given more than once")
            seen.add((i, j))
            succ[i - 1] |= 1 << (j - 1)
            pred[j - 1] |= 1 << (i - 1)
        self.d = d
        self.edges = tuple(sorted(seen))
        self.succ = tuple(succ)
        self.pred = tuple(pred)
        self.kernel = kernels.for_width(d)
        self._rows = self.kernel.prepare(self.succ)
        self._rrows = self.kernel.prepare(self.pred)

    def __repr__(self):
        return f"DirectedGraph(d={self.d}, edges={list(self.edges)})"

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.d == other.d and self.edges == other.edges

    def __hash__(self):
        return hash((self.d, self.edges))

    @property
    def full(self) -> int:
        return (1 << self.d) - 1

    def has_edge(self, i: int, j: int) -> bool:
        self.check_vertex(i)
        self.check_vertex(j)
        return bool(self.succ[i - 1] >> (j - 1) & 1)

    def check_vertex(self, i: int) -> None:
        if not 1 <= i <= self.d:
            raise VertexOutOfRange(f"vertex {i} outside 1..{self.d}")

    def mask(self, vertices: Iterable[int]) -> int:
        m = 0
        for i in vertices:
            self.check_vertex(i)
            m |= 1 << (i - 1)
        return m

    def rows(self, direction: str = FORWARD):
        """Kernel-prepared successor rows (predecessor rows for backward)."""
        if direction == FORWARD:
            return self._rows
        if direction == BACKWARD:
            return self._rrows
        raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")

    def transpose(self) -> "DirectedGraph":
        return DirectedGraph(self.d, [(j, i) for i, j in self.edges])

    def reach_mask(self, mask: int, direction: str = FORWARD) -> int:
        return self.kernel.reach(self.rows(direction), mask)


def build_graph(d: int, edge_list: Iterable[tuple[int, int]]) -> DirectedGraph:
    return DirectedGraph(d, edge_list)


def degrees(g: DirectedGraph, i: int) -> tuple[int, int]:
    """``(out-degree, in-degree)`` of vertex ``i``."""
    g.check_vertex(i)
    return g.succ[i - 1].bit_count(), g.pred[i - 1].bit_count()


def is_l_graph(g: DirectedGraph) -> bool:
    return all(g.succ)


def orbit(g: DirectedGraph, i: int, direction: str = FORWARD) -> frozenset[int]:
    """Vertices reachable from ``i`` (or reaching ``i``) by paths of length >= 1."""
    g.check_vertex(i)
    return members(g.reach_mask(1 << (i - 1), direction))


def set_orbit(g: DirectedGraph, U: Iterable[int], direction: str = FORWARD) -> frozenset[int]:
    """Union of the orbits of the members of ``U``."""
    return members(g.reach_mask(g.mask(U), direction))


def communicating_class_of(g: DirectedGraph, i: int) -> frozenset[int] | None:
    g.check_vertex(i)
    bit = 1 << (i - 1)
    c = g.reach_mask(bit) & g.reach_mask(bit, BACKWARD)
    return members(c) if c else None


@dataclass(frozen=True)
class ClassDecomposition:
    """Communicating classes in canonical order plus the transitory vertices.

    ``order`` holds 0-based index pairs ``(mu, nu)`` meaning class ``mu``
    precedes class ``nu``; it is reflexive.
    """

    classes: tuple[frozenset[int], ...]
    transitory: frozenset[int]
    order: frozenset[tuple[int, int]]

    def strict_order(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a, b in self.order if a != b)

    def maximal_indices(self) -> list[int]:
        return [a for a in range(len(self.classes))
                if not any(x == a and y != a for x, y in self.order)]

    def class_index(self, vertex: int) -> int | None:
        for k, c in enumerate(self.classes):
            if vertex in c:
                return k
        return None


def _class_masks(g: DirectedGraph) -> tuple[list[int], list[int], int]:
    """Class masks (unsorted), forward orbit of each, and the transitory mask."""
    fwd = [g.reach_mask(1 << i) for i in range(g.d)]
    remaining = g.full
    classes, reach = [], []
    transitory = 0
    while remaining:
        low = remaining & -remaining
        i = low.bit_length() - 1
        if not fwd[i] & low:
            transitory |= low
            remaining ^= low
            continue
        c = fwd[i] & g.reach_mask(low, BACKWARD)
        classes.append(c)
        reach.append(fwd[i])
        remaining &= ~c
    return classes, reach, transitory


def _low_member(mask: int) -> int:
    return (mask & -mask).bit_length()


def _canonical_toposort(masks: list[int], above: list[list[int]]) -> list[int]:
    """Kahn's algorithm; ties go to the item whose smallest member is smallest."""
    n = len(masks)
    indeg = [0] * n
    for a in range(n):
        for b in above[a]:
            indeg[b] += 1
    heap = [(_low_member(masks[a]), a) for a in range(n) if indeg[a] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, a = heapq.heappop(heap)
        out.append(a)
        for b in above[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (_low_member(masks[b]), b))
    return out


def communicating_classes(g: DirectedGraph) -> ClassDecomposition:
    masks, reach, transitory = _class_masks(g)
    n = len(masks)
    above = [[b for b in range(n) if b != a and reach[a] & masks[b]] for a in range(n)]
    perm = _canonical_toposort(masks, above)
    rank = {old: new for new, old in enumerate(perm)}
    order = {(k, k) for k in range(n)}
    for a in range(n):
        for b in above[a]:
            order.add((rank[a], rank[b]))
    return ClassDecomposition(
        classes=tuple(members(masks[a]) for a in perm),
        transitory=members(transitory),
        order=frozenset(order),
    )


def maximal_classes(g: DirectedGraph) -> list[frozenset[int]]:
    dec = communicating_classes(g)
    return [dec.classes[k] for k in dec.maximal_indices()]


class InvarianceKind(NamedTuple):
    forward: bool
    backward: bool
    invariant: bool


def invariance_kind(g: DirectedGraph, U: Iterable[int]) -> InvarianceKind:
    u = g.mask(U)
    fwd = not g.reach_mask(u) & ~u
    bwd = not g.reach_mask(u, BACKWARD) & ~u
    return InvarianceKind(fwd, bwd, fwd and bwd)


@dataclass(frozen=True)
class Path:
    """Vertex sequence ``<i_0 ... i_n>``; ``len`` is the number of edges."""

    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def __getitem__(self, p: int) -> int:
        return self.vertices[p]

    def __add__(self, other: "Path") -> "Path":
        if self.vertices[-1] != other.vertices[0]:
            raise InvalidPath(f"cannot concatenate: {self.vertices[-1]} != {other.vertices[0]}")
        return Path(self.vertices + other.vertices[1:])


def make_path(g: DirectedGraph, vertices: Iterable[int]) -> Path:
    vs = tuple(int(v) for v in vertices)
    if not vs:
        raise InvalidPath("a path has at least one vertex")
    for v in vs:
        g.check_vertex(v)
    for a, b in zip(vs, vs[1:]):
        if not g.succ[a - 1] >> (b - 1) & 1:
            raise InvalidPath(f"({a},{b}) is not an edge")
    return Path(vs)


def find_loop(p: Path) -> tuple[int, int] | None:
    """Indices ``(a, b)``, ``a < b``, with ``p[a] == p[b]``; smallest ``a`` then ``b``."""
    first_seen: dict[int, int] = {}
    best = None
    for b, v in enumerate(p.vertices):
        if v in first_seen:
            a = first_seen[v]
            if best is None or a < best[0]:
                best = (a, b)
        else:
            first_seen[v] = b
    return best


@dataclass(frozen=True)
class QuotientNode:
    kind: str  # "class" or "transitory"
    members: frozenset[int]

    def label(self) -> str:
        if self.kind == "transitory":
            return f"t{next(iter(self.members))}"
        return "C{" + ",".join(map(str, sorted(self.members))) + "}"


@dataclass(frozen=True)
class QuotientGraph:
    """Extended quotient graph; ``edges`` are 0-based node index pairs."""

    nodes: tuple[QuotientNode, ...]
    edges: frozenset[tuple[int, int]]

    def as_graph(self) -> DirectedGraph:
        return DirectedGraph(len(self.nodes), [(a + 1, b + 1) for a, b in self.edges])


def quotient_order(g: DirectedGraph, dec: ClassDecomposition | None = None) -> list[QuotientNode]:
    """Classes and transitory vertices in a topological order of the quotient.

    Classes keep their canonical relative order; transitory vertices are
    emitted as soon as all their predecessors are.
    """
    dec = dec or communicating_classes(g)
    nodes = [QuotientNode("class", c) for c in dec.classes]
    nodes += [QuotientNode("transitory", frozenset([v])) for v in sorted(dec.transitory)]
    masks = [g.mask(n.members) for n in nodes]
    n = len(nodes)
    out_mask = [g.kernel.image(g.rows(), m) for m in masks]
    succ = [[b for b in range(n) if b != a and out_mask[a] & masks[b]] for a in range(n)]
    indeg = [0] * n
    for a in range(n):
        for b in succ[a]:
            indeg[b] += 1
    # transitory nodes first (key 0), then classes by canonical rank
    def key(a):
        return (0, _low_member(masks[a])) if nodes[a].kind == "transitory" else (1, a)

    heap = [(key(a), a) for a in range(n) if indeg[a] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, a = heapq.heappop(heap)
        order.append(nodes[a])
        for b in succ[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (key(b), b))
    return order


def extended_quotient_graph(g: DirectedGraph) -> QuotientGraph:
    nodes = quotient_order(g)
    masks = [g.mask(n.members) for n in nodes]
    edges = set()
    for a, ma in enumerate(masks):
        img = g.kernel.image(g.rows(), ma)
        for b, mb in enumerate(masks):
            if img & mb:
                edges.add((a, b))
    return QuotientGraph(tuple(nodes), frozenset(edges))


def weakly_connected(g: DirectedGraph) -> bool:
    """Connectivity of the underlying undirected graph."""
    seen = 1
    frontier = 1
    while frontier:
        nxt = g.kernel.image(g.rows(), frontier) | g.kernel.image(g.rows(BACKWARD), frontier)
        frontier = nxt & ~seen
        seen |= frontier
    return seen == g.full
