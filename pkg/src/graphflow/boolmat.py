"""0/1 matrices under Boolean arithmetic and the cube semiflow they generate.

Rows are stored as bit masks, so a Boolean product row is the OR of the rows
of the right factor selected by the left row's bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from . import kernels
from .errors import (
    DimensionMismatch,
    NotACommunicatingClass,
    NotIrreducible,
    NotSquare,
)
from .graph import BACKWARD, FORWARD, DirectedGraph, communicating_classes, members, quotient_order


class BoolMatrix:
    """Square {0,1} matrix; ``rows[i]`` has bit ``j`` set iff entry ``(i, j)`` is 1."""

    __slots__ = ("d", "rows", "kernel", "_prepared")

    def __init__(self, d: int, rows: Sequence[int]):
        if len(rows) != d:
            raise NotSquare(f"expected {d} rows, got {len(rows)}")
        full = (1 << d) - 1
        for r in rows:
            if r & ~full:
                raise DimensionMismatch(f"row mask {r:#x} wider than {d}")
        self.d = d
        self.rows = tuple(int(r) for r in rows)
        self.kernel = kernels.for_width(d)
        self._prepared = self.kernel.prepare(self.rows)

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "BoolMatrix":
        d = len(entries)
        rows = []
        for row in entries:
            if len(row) != d:
                raise NotSquare(f"row of length {len(row)} in a {d}-row matrix")
            mask = 0
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise ValueError(f"entry {v!r} is not 0 or 1")
                mask |= int(v) << j
            rows.append(mask)
        return cls(d, rows)

    @classmethod
    def identity(cls, d: int) -> "BoolMatrix":
        return cls(d, [1 << i for i in range(d)])

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.d)] for r in self.rows]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __eq__(self, other):
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.d == other.d and self.rows == other.rows

    def __hash__(self):
        return hash((self.d, self.rows))

    def __repr__(self):
        return f"BoolMatrix({self.to_lists()})"

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        if other.d != self.d:
            raise DimensionMismatch(f"{self.d} vs {other.d}")
        return BoolMatrix(self.d, self.kernel.bool_matmul(self._prepared, other._prepared))

    def __or__(self, other: "BoolMatrix") -> "BoolMatrix":
        if other.d != self.d:
            raise DimensionMismatch(f"{self.d} vs {other.d}")
        return BoolMatrix(self.d, [a | b for a, b in zip(self.rows, other.rows)])

    def transpose(self) -> "BoolMatrix":
        cols = [0] * self.d
        for i, r in enumerate(self.rows):
            for j in range(self.d):
                if r >> j & 1:
                    cols[j] |= 1 << i
        return BoolMatrix(self.d, cols)

    def is_all_ones(self) -> bool:
        full = (1 << self.d) - 1
        return all(r == full for r in self.rows)

    def vecmul(self, q: int) -> int:
        """Row vector times matrix, as masks."""
        return self.kernel.image(self._prepared, q)


def adjacency(g: DirectedGraph) -> BoolMatrix:
    return BoolMatrix(g.d, g.succ)


def graph_of(A: BoolMatrix) -> DirectedGraph:
    return DirectedGraph(A.d, [(i + 1, j + 1) for i in range(A.d) for j in range(A.d) if A[i, j]])


def bool_pow(A: BoolMatrix, n: int) -> BoolMatrix:
    if n < 0:
        raise ValueError("power must be nonnegative")
    result = BoolMatrix.identity(A.d)
    base = A
    while n:
        if n & 1:
            result = result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


CubeVertex = tuple[int, ...]


def iota(A: Iterable[int], d: int) -> CubeVertex:
    s = set(A)
    if any(not 1 <= i <= d for i in s):
        raise DimensionMismatch(f"set {sorted(s)} does not fit in dimension {d}")
    return tuple(1 if i in s else 0 for i in range(1, d + 1))


def iota_inv(q: Sequence[int]) -> frozenset[int]:
    if any(x not in (0, 1) for x in q):
        raise ValueError(f"{q!r} is not a cube vertex")
    return frozenset(i + 1 for i, x in enumerate(q) if x)


def _q_mask(q: Sequence[int]) -> int:
    return sum(1 << i for i, x in enumerate(q) if x)


def psi(A: BoolMatrix, n: int, q: Sequence[int], direction: str = FORWARD) -> CubeVertex:
    """``(q^T . A^{n*})^T``; backward uses the transpose of ``A``."""
    if len(q) != A.d:
        raise DimensionMismatch(f"vector of length {len(q)} for a {A.d}x{A.d} matrix")
    if direction == BACKWARD:
        A = A.transpose()
    elif direction != FORWARD:
        raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")
    out = bool_pow(A, n).vecmul(_q_mask(q))
    return tuple((out >> i) & 1 for i in range(A.d))


def transitive_closure(A: BoolMatrix) -> BoolMatrix:
    """Boolean sum of ``A^{n*}`` for ``n = 1..d``."""
    acc = A
    power = A
    for _ in range(A.d - 1):
        power = power @ A
        acc = acc | power
    return acc


def is_irreducible(A: BoolMatrix) -> bool:
    return transitive_closure(A).is_all_ones()


def matrix_period(A: BoolMatrix) -> int:
    """gcd of loop lengths, from breadth-first levels."""
    if not is_irreducible(A):
        raise NotIrreducible("period is defined for irreducible matrices")
    level = [-1] * A.d
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            r = A.rows[u]
            for v in range(A.d):
                if r >> v & 1 and level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    p = 0
    for u in range(A.d):
        r = A.rows[u]
        for v in range(A.d):
            if r >> v & 1:
                p = gcd(p, level[u] + 1 - level[v])
    return p


def wielandt_bound(d: int) -> int:
    return (d - 1) ** 2 + 1


def is_aperiodic(A: BoolMatrix) -> bool:
    if not is_irreducible(A):
        raise NotIrreducible("aperiodicity is defined for irreducible matrices")
    power = A
    for _ in range(wielandt_bound(A.d)):
        if power.is_all_ones():
            return True
        power = power @ A
    return False


def class_period(g: DirectedGraph, C: Iterable[int]) -> int:
    c = frozenset(C)
    if c not in communicating_classes(g).classes:
        raise NotACommunicatingClass(f"{sorted(c)} is not a communicating class")
    keep = sorted(c)
    pos = {v: k for k, v in enumerate(keep)}
    rows = [0] * len(keep)
    for i, j in g.edges:
        if i in pos and j in pos:
            rows[pos[i]] |= 1 << pos[j]
    return matrix_period(BoolMatrix(len(keep), rows))


@dataclass(frozen=True)
class Block:
    start: int  # 0-based, inclusive
    stop: int  # exclusive
    kind: str  # "class" or "transitory"
    members: frozenset[int]


@dataclass(frozen=True)
class BlockForm:
    """``permutation[k]`` is the original 1-based vertex placed at position ``k``."""

    permutation: tuple[int, ...]
    blocks: tuple[Block, ...]

    def permuted(self, A: BoolMatrix) -> BoolMatrix:
        pos = {v - 1: k for k, v in enumerate(self.permutation)}
        rows = [0] * A.d
        for k, v in enumerate(self.permutation):
            r = A.rows[v - 1]
            for j in range(A.d):
                if r >> j & 1:
                    rows[k] |= 1 << pos[j]
        return BoolMatrix(A.d, rows)


def block_form(A: BoolMatrix) -> BlockForm:
    """Block upper-triangular arrangement: classes in canonical order
    (minimal first), transitory vertices as 1x1 blocks."""
    g = graph_of(A)
    perm = []
    blocks = []
    for node in quotient_order(g):
        start = len(perm)
        perm.extend(sorted(node.members))
        blocks.append(Block(start, len(perm), node.kind, node.members))
    return BlockForm(tuple(perm), tuple(blocks))


def is_block_upper_triangular(M: BoolMatrix, blocks: Sequence[Block]) -> bool:
    owner = {}
    for k, b in enumerate(blocks):
        for p in range(b.start, b.stop):
            owner[p] = k
    return all(not (M[i, j] and owner[i] > owner[j]) for i in range(M.d) for j in range(M.d))


def recurrent_vertices_via_matrix(A: BoolMatrix) -> frozenset[int]:
    """Vertices ``i`` with a 1 on the diagonal of the Boolean sum of ``A^{n*}``, ``n = 1..d``."""
    s = transitive_closure(A)
    return members(sum(1 << i for i in range(A.d) if s[i, i]))
