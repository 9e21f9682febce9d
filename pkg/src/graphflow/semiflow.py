"""The power-set semiflow of a graph and its Morse/attractor structure.

``phi(g, n, A)`` is the set of endpoints of length-``n`` paths starting in
``A``. Trajectories of ``A -> phi(g, 1, A)`` live on a finite set, so every
orbit is eventually periodic; limit sets are read off the periodic part.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    EmptySet,
    InvalidMorseDecomposition,
    NotAnAttractor,
    NotAnLGraph,
    NotStrictlyIncreasing,
    ThresholdExceeded,
)
from .graph import (
    BACKWARD,
    FORWARD,
    DirectedGraph,
    _canonical_toposort,
    communicating_classes,
    is_l_graph,
    members,
    set_key,
)

DEFAULT_EXHAUSTIVE_THRESHOLD = 20
# attractor_scan keeps a 2**d table of uint64
HARD_EXHAUSTIVE_LIMIT = 28


def _require_l(g: DirectedGraph) -> None:
    if not is_l_graph(g):
        bad = [i + 1 for i, r in enumerate(g.succ) if not r]
        raise NotAnLGraph(f"vertices with out-degree 0: {bad}")


def phi(g: DirectedGraph, n: int, A: Iterable[int]) -> frozenset[int]:
    if n < 0:
        raise ValueError("time must be nonnegative")
    return members(g.kernel.phi_n(g.rows(), n, g.mask(A)))


def phi_minus(g: DirectedGraph, n: int, A: Iterable[int]) -> frozenset[int]:
    """Backward semiflow: the forward semiflow of the transposed graph."""
    if n < 0:
        raise ValueError("time must be nonnegative")
    return members(g.kernel.phi_n(g.rows(BACKWARD), n, g.mask(A)))


@dataclass(frozen=True)
class TrajectorySummary:
    transient_length: int
    period: int
    cycle_sets: tuple[frozenset[int], ...]


def trajectory_summary(g: DirectedGraph, A: Iterable[int], direction: str = FORWARD) -> TrajectorySummary:
    rows = g.rows(direction)
    k = g.kernel
    start = g.mask(A)
    mu, lam = k.cycle(rows, start)
    x = k.phi_n(rows, mu, start)
    cycle = []
    for _ in range(lam):
        cycle.append(members(x))
        x = k.image(rows, x)
    return TrajectorySummary(mu, lam, tuple(cycle))


def omega_mask(g: DirectedGraph, mask: int, direction: str = FORWARD) -> int:
    return g.kernel.omega(g.rows(direction), mask)


def omega_limit(g: DirectedGraph, A: Iterable[int], direction: str = FORWARD) -> frozenset[int]:
    """Vertices visited at arbitrarily large times from ``A``."""
    return members(omega_mask(g, g.mask(A), direction))


def _singleton_omegas(g: DirectedGraph) -> list[int]:
    return [int(x) for x in g.kernel.omega_singletons(g.rows())]


def recurrent_mask(g: DirectedGraph) -> int:
    om = _singleton_omegas(g)
    return sum(1 << i for i in range(g.d) if om[i] >> i & 1)


def recurrent_set(g: DirectedGraph) -> frozenset[int]:
    return members(recurrent_mask(g))


def _weakly_invariant_mask(g: DirectedGraph, a: int) -> bool:
    k, rows = g.kernel, g.rows()
    mu, lam = k.cycle(rows, a)
    x = a
    for _ in range(mu + lam):
        if not x & a:
            return False
        x = k.image(rows, x)
    return True


def is_weakly_invariant(g: DirectedGraph, A: Iterable[int]) -> bool:
    a = g.mask(A)
    if not a:
        raise EmptySet("weak invariance is defined for nonempty sets")
    return _weakly_invariant_mask(g, a)


@dataclass(frozen=True)
class MorseDecomposition:
    """Morse sets in index order; ``order`` holds reflexive 0-based index pairs."""

    sets: tuple[frozenset[int], ...]
    order: frozenset[tuple[int, int]]

    def strict_order(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a, b in self.order if a != b)


def _transitive_closure(n: int, rel: list[list[bool]]) -> list[list[bool]]:
    r = [row[:] for row in rel]
    for k in range(n):
        for i in range(n):
            if r[i][k]:
                rk = r[k]
                ri = r[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return r


def _overlap_relation(g: DirectedGraph, masks: Sequence[int]) -> list[list[bool]]:
    """``rel[a][b]``: omega of set ``a`` meets set ``b``."""
    om = [omega_mask(g, m) for m in masks]
    return [[bool(om[a] & masks[b]) for b in range(len(masks))] for a in range(len(masks))]


def morse_order(g: DirectedGraph, sets: Sequence[Iterable[int]]) -> frozenset[tuple[int, int]]:
    """Order generated by chains of omega-overlaps between the sets."""
    masks = [g.mask(s) for s in sets]
    n = len(masks)
    closure = _transitive_closure(n, _overlap_relation(g, masks))
    order = {(a, a) for a in range(n)}
    order.update((a, b) for a in range(n) for b in range(n) if closure[a][b])
    return frozenset(order)


def finest_morse_decomposition(g: DirectedGraph) -> MorseDecomposition:
    _require_l(g)
    sets = communicating_classes(g).classes
    return MorseDecomposition(sets, morse_order(g, sets))


class MorseCheck(NamedTuple):
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def is_morse_decomposition(g: DirectedGraph, collection: Sequence[Iterable[int]]) -> MorseCheck:
    """Check the Morse decomposition conditions; report the first one violated.

    Reasons: ``empty-set``, ``not-disjoint``, ``not-weakly-invariant``,
    ``recurrent-not-covered``, ``cycle``.
    """
    _require_l(g)
    masks = [g.mask(s) for s in collection]
    if any(not m for m in masks):
        return MorseCheck(False, "empty-set")
    union = 0
    for m in masks:
        if union & m:
            return MorseCheck(False, "not-disjoint")
        union |= m
    if not all(_weakly_invariant_mask(g, m) for m in masks):
        return MorseCheck(False, "not-weakly-invariant")
    if recurrent_mask(g) & ~union:
        return MorseCheck(False, "recurrent-not-covered")
    n = len(masks)
    rel = _overlap_relation(g, masks)
    for a in range(n):
        rel[a][a] = False
    closure = _transitive_closure(n, rel)
    if any(closure[a][a] for a in range(n)):
        return MorseCheck(False, "cycle")
    return MorseCheck(True)


def is_no_return_set(g: DirectedGraph, A: Iterable[int]) -> bool:
    """Alternative no-cycle notion: points whose forward and backward limit
    sets both meet ``A`` lie in ``A``. Diagnostic only."""
    a = g.mask(A)
    for i in range(g.d):
        bit = 1 << i
        if a & bit:
            continue
        if omega_mask(g, bit) & a and omega_mask(g, bit, BACKWARD) & a:
            return False
    return True


def _up_closed_unions(g: DirectedGraph) -> list[int]:
    """Masks of unions over every up-closed family of communicating classes."""
    dec = communicating_classes(g)
    masks = [g.mask(c) for c in dec.classes]
    n = len(masks)
    above = [[b for b in range(n) if b != a and (a, b) in dec.order] for a in range(n)]
    out = []

    def walk(k: int, chosen: set[int], acc: int) -> None:
        if k < 0:
            out.append(acc)
            return
        walk(k - 1, chosen, acc)
        if all(b in chosen for b in above[k]):
            chosen.add(k)
            walk(k - 1, chosen, acc | masks[k])
            chosen.discard(k)

    walk(n - 1, set(), 0)
    return out


def attractor_masks(g: DirectedGraph, mode: str = "auto",
                    threshold: int = DEFAULT_EXHAUSTIVE_THRESHOLD) -> tuple[list[int], str]:
    """Attractor masks sorted canonically, and the mode actually used."""
    _require_l(g)
    if mode == "auto":
        mode = "exhaustive" if g.d <= threshold else "candidates"
    if mode == "exhaustive":
        if g.d > max(threshold, 0) or g.d > HARD_EXHAUSTIVE_LIMIT:
            raise ThresholdExceeded(f"exhaustive scan refused for d={g.d} > {threshold}")
        found = g.kernel.attractor_scan(_singleton_omegas(g), g.d)
    elif mode == "candidates":
        found = {0}
        for u in _up_closed_unions(g):
            cand = g.reach_mask(u)
            if omega_mask(g, cand) == cand:
                found.add(cand)
    else:
        raise ValueError(f"unknown attractor mode {mode!r}")
    found = sorted({int(a) for a in found}, key=lambda m: set_key(members(m)))
    return found, mode


def attractors(g: DirectedGraph, mode: str = "auto",
               threshold: int = DEFAULT_EXHAUSTIVE_THRESHOLD) -> list[frozenset[int]]:
    """All sets with ``omega(A) == A`` (the empty set included)."""
    found, _ = attractor_masks(g, mode, threshold)
    return [members(a) for a in found]


def _repeller_mask(g: DirectedGraph, a: int, om: Sequence[int] | None = None) -> int:
    om = om if om is not None else _singleton_omegas(g)
    return sum(1 << i for i in range(g.d) if om[i] & ~a)


def complementary_repeller(g: DirectedGraph, A: Iterable[int]) -> frozenset[int]:
    a = g.mask(A)
    if omega_mask(g, a) != a:
        raise NotAnAttractor(f"omega({sorted(members(a))}) != itself")
    return members(_repeller_mask(g, a))


@dataclass(frozen=True)
class AttractorReport:
    attractor: frozenset[int]
    repeller: frozenset[int]


def attractor_repeller_pairs(g: DirectedGraph, mode: str = "auto",
                             threshold: int = DEFAULT_EXHAUSTIVE_THRESHOLD) -> list[AttractorReport]:
    found, _ = attractor_masks(g, mode, threshold)
    om = _singleton_omegas(g)
    return [AttractorReport(members(a), members(_repeller_mask(g, a, om))) for a in found]


def morse_from_attractor_sequence(g: DirectedGraph, seq: Sequence[Iterable[int]]) -> MorseDecomposition:
    """Morse sets ``M_{n-i} = A_{i+1} & repeller(A_i)`` from ``[A_0 = {}, ..., A_n]``."""
    _require_l(g)
    masks = [g.mask(a) for a in seq]
    if not masks or masks[0] != 0:
        raise NotStrictlyIncreasing("sequence must start with the empty set")
    for prev, nxt in zip(masks, masks[1:]):
        if prev & ~nxt or prev == nxt:
            raise NotStrictlyIncreasing(f"{sorted(members(prev))} is not a proper subset of {sorted(members(nxt))}")
    for a in masks:
        if omega_mask(g, a) != a:
            raise NotAnAttractor(f"{sorted(members(a))} is not an attractor")
    om = _singleton_omegas(g)
    n = len(masks) - 1
    sets = [frozenset()] * n
    for i in range(n):
        sets[n - i - 1] = members(masks[i + 1] & _repeller_mask(g, masks[i], om))
    return MorseDecomposition(tuple(sets), morse_order(g, sets))


def attractor_sequence_from_morse(g: DirectedGraph, m: MorseDecomposition | Sequence[Iterable[int]]) -> list[frozenset[int]]:
    """``A_k = O+(M_n | ... | M_{n-k+1})``, prefixed by the empty set."""
    sets = m.sets if isinstance(m, MorseDecomposition) else tuple(frozenset(s) for s in m)
    check = is_morse_decomposition(g, sets)
    if not check:
        raise InvalidMorseDecomposition(check.reason)
    out = [frozenset()]
    acc = 0
    for s in reversed(sets):
        acc |= g.mask(s)
        out.append(members(g.reach_mask(acc)))
    return out


def recurrent_via_attractors(g: DirectedGraph, mode: str = "auto",
                             threshold: int = DEFAULT_EXHAUSTIVE_THRESHOLD) -> frozenset[int]:
    """Intersection of ``A | repeller(A)`` over all attractors."""
    found, _ = attractor_masks(g, mode, threshold)
    om = _singleton_omegas(g)
    acc = g.full
    for a in found:
        acc &= a | _repeller_mask(g, a, om)
    return members(acc)


def phi_connected_components(g: DirectedGraph, B: Iterable[int]) -> list[frozenset[int]]:
    """Maximal subsets of ``B`` joined pairwise by one-step chains inside ``B``."""
    b = g.mask(B)
    rows = g.kernel.prepare([r & b if b >> i & 1 else 0 for i, r in enumerate(g.succ)])
    rrows = g.kernel.prepare([r & b if b >> i & 1 else 0 for i, r in enumerate(g.pred)])
    comps = []
    remaining = b
    while remaining:
        low = remaining & -remaining
        fwd = g.kernel.reach(rows, low) | low
        bwd = g.kernel.reach(rrows, low) | low
        comps.append(fwd & bwd)
        remaining &= ~(fwd & bwd)
    n = len(comps)
    reach = [g.kernel.reach(rows, c) for c in comps]
    above = [[j for j in range(n) if j != i and reach[i] & comps[j]] for i in range(n)]
    return [members(comps[i]) for i in _canonical_toposort(comps, above)]


class Restriction(NamedTuple):
    graph: DirectedGraph
    mapping: tuple[int, ...]  # new vertex k+1 is original mapping[k]


def restrict(g: DirectedGraph, Vp: Iterable[int]) -> Restriction:
    """Induced subgraph on ``Vp``, renumbered by ascending original id."""
    keep = sorted(members(g.mask(Vp)))
    if not keep:
        raise EmptySet("cannot restrict to the empty set")
    new_id = {v: k + 1 for k, v in enumerate(keep)}
    edges = [(new_id[i], new_id[j]) for i, j in g.edges if i in new_id and j in new_id]
    return Restriction(DirectedGraph(len(keep), edges), tuple(keep))
