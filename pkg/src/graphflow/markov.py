"""Finite Markov chains read through their reachability graph.

Chains with rational entries (ints, Fractions, or ``"a/b"``/decimal strings)
are kept exact; anything containing a float is computed in binary floating
point. Linear systems go through :func:`graphflow.linalg.solve`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import linalg
from .boolmat import class_period
from .errors import (
    EmptyTarget,
    HypothesisViolated,
    NegativeEntry,
    NotSquare,
    RowSumViolation,
)
from .graph import (
    BACKWARD,
    ClassDecomposition,
    DirectedGraph,
    Path,
    communicating_classes,
    members,
)

DEFAULT_TOL = 1e-9
INFINITE = math.inf


def _number(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a number: {x!r}") from exc
    v = float(x)
    if not math.isfinite(v):
        raise ValueError(f"non-finite entry {x!r}")
    return v


class TransitionMatrix:
    """Row-stochastic matrix with its underlying graph.

    ``p`` is a tuple of row tuples holding Fractions when ``exact`` and floats
    otherwise.
    """

    __slots__ = ("d", "p", "tol", "exact", "__dict__")

    def __init__(self, p: Sequence[Sequence], tol: float = DEFAULT_TOL):
        d = len(p)
        if d == 0:
            raise NotSquare("empty matrix")
        rows = []
        for row in p:
            if len(row) != d:
                raise NotSquare(f"row of length {len(row)} in a {d}-row matrix")
            rows.append([_number(x) for x in row])
        exact = all(isinstance(x, Fraction) for row in rows for x in row)
        if not exact:
            rows = [[float(x) for x in row] for row in rows]
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if x < 0:
                    raise NegativeEntry(f"p({i + 1},{j + 1}) = {x} < 0")
            s = sum(row)
            if abs(s - 1) > tol:
                raise RowSumViolation(f"row {i + 1} sums to {float(s)!r}")
        self.d = d
        self.p = tuple(tuple(r) for r in rows)
        self.tol = tol
        self.exact = exact

    def __repr__(self):
        return f"TransitionMatrix(d={self.d}, exact={self.exact})"

    @cached_property
    def graph(self) -> DirectedGraph:
        return DirectedGraph(self.d, [(i + 1, j + 1) for i in range(self.d)
                                      for j in range(self.d) if self.p[i][j] > 0])

    @cached_property
    def classes(self) -> ClassDecomposition:
        return communicating_classes(self.graph)

    @cached_property
    def maximal(self) -> tuple[frozenset[int], ...]:
        dec = self.classes
        return tuple(dec.classes[k] for k in dec.maximal_indices())

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.p], dtype=float)

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def one(self):
        return Fraction(1) if self.exact else 1.0


def build_chain(p: Sequence[Sequence], tol: float = DEFAULT_TOL) -> TransitionMatrix:
    return TransitionMatrix(p, tol)


def underlying_graph(chain: TransitionMatrix) -> DirectedGraph:
    return chain.graph


def distribution(weights: Sequence, tol: float = DEFAULT_TOL) -> tuple:
    vals = [_number(w) for w in weights]
    if not all(isinstance(v, Fraction) for v in vals):
        vals = [float(v) for v in vals]
    if any(v < 0 for v in vals):
        raise NegativeEntry("distribution has a negative weight")
    if abs(sum(vals) - 1) > tol:
        raise RowSumViolation(f"distribution sums to {float(sum(vals))!r}")
    return tuple(vals)


def delta(d: int, i: int) -> tuple[Fraction, ...]:
    """Point mass at 1-based state ``i``."""
    if not 1 <= i <= d:
        raise ValueError(f"state {i} outside 1..{d}")
    return tuple(Fraction(int(k == i - 1)) for k in range(d))


def _check_state(chain: TransitionMatrix, i: int) -> None:
    chain.graph.check_vertex(i)


def n_step(chain: TransitionMatrix, n: int) -> list[list]:
    """``P^n`` with ``P^0 = I``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not chain.exact:
        return np.linalg.matrix_power(chain.as_float(), n).tolist()
    result = linalg.identity(chain.d, Fraction(1))
    base = [list(r) for r in chain.p]
    while n:
        if n & 1:
            result = linalg.matmul(result, base)
        n >>= 1
        if n:
            base = linalg.matmul(base, base)
    return result


def evolve(chain: TransitionMatrix, v: Sequence, n: int) -> list:
    """``v^T P^n`` by repeated vector-matrix products."""
    v = list(v)
    for _ in range(n):
        v = [sum(v[k] * chain.p[k][j] for k in range(chain.d)) for j in range(chain.d)]
    return v


def path_probability(chain: TransitionMatrix, pi0: Sequence, gamma: Path | Sequence[int]):
    vs = gamma.vertices if isinstance(gamma, Path) else tuple(gamma)
    for v in vs:
        _check_state(chain, v)
    prob = _number(pi0[vs[0] - 1])
    for a, b in zip(vs, vs[1:]):
        prob = prob * chain.p[a - 1][b - 1]
    return prob


def _target_mask(chain: TransitionMatrix, A: Iterable[int]) -> int:
    a = chain.graph.mask(A)
    if not a:
        raise EmptyTarget("target set is empty")
    return a


def hitting_distribution(chain: TransitionMatrix, i: int, A: Iterable[int], n_max: int) -> list:
    """``[f_1(i,A), ..., f_{n_max}(i,A)]`` via the taboo recursion."""
    _check_state(chain, i)
    a = _target_mask(chain, A)
    d = chain.d
    inside = [bool(a >> k & 1) for k in range(d)]
    f = [sum((chain.p[s][j] for j in range(d) if inside[j]), chain.zero()) for s in range(d)]
    out = []
    for _ in range(n_max):
        out.append(f[i - 1])
        f = [sum((chain.p[s][k] * f[k] for k in range(d) if not inside[k]), chain.zero())
             for s in range(d)]
    return out


def _taboo_structure(chain: TransitionMatrix, a: int) -> tuple[int, int]:
    """Masks (outside states that cannot reach ``A``, outside states with
    hitting probability one)."""
    g = chain.graph
    k = g.kernel
    outside = g.full & ~a
    hopeless = outside & ~k.reach(g.rows(BACKWARD), a)
    taboo_pred = k.prepare([r & outside for r in g.pred])
    leaks = hopeless | (k.reach(taboo_pred, hopeless) & outside)
    return hopeless, outside & ~leaks


def hitting_probabilities(chain: TransitionMatrix, A: Iterable[int]) -> list:
    """``F(i, A)`` for every state, by first-step analysis."""
    a = _target_mask(chain, A)
    d = chain.d
    hopeless, _ = _taboo_structure(chain, a)
    unknown = [k for k in range(d) if not (a >> k & 1) and not (hopeless >> k & 1)]
    idx = {k: n for n, k in enumerate(unknown)}
    p = chain.p
    one, zero = chain.one(), chain.zero()
    direct = [sum((p[s][j] for j in range(d) if a >> j & 1), zero) for s in range(d)]
    mat = [[(one if r == c else zero) - p[r][c] for c in unknown] for r in unknown]
    rhs = [[direct[r]] for r in unknown]
    sol = linalg.solve(mat, rhs) if unknown else []
    h = [zero] * d
    for k, n in idx.items():
        h[k] = sol[n][0]
    out = []
    for s in range(d):
        if s in idx:
            out.append(h[s])
        elif hopeless >> s & 1:
            out.append(zero)
        else:
            out.append(direct[s] + sum((p[s][k] * h[k] for k in unknown), zero))
    return out


def hitting_probability(chain: TransitionMatrix, i: int, A: Iterable[int]):
    _check_state(chain, i)
    return hitting_probabilities(chain, A)[i - 1]


def mean_hitting_times(chain: TransitionMatrix, A: Iterable[int]) -> list:
    """``mu(i, A)`` for every state; ``math.inf`` where ``F(i, A) < 1``."""
    a = _target_mask(chain, A)
    d = chain.d
    _, sure = _taboo_structure(chain, a)
    p = chain.p
    one, zero = chain.one(), chain.zero()
    solvable = [k for k in range(d) if sure >> k & 1]
    mat = [[(one if r == c else zero) - p[r][c] for c in solvable] for r in solvable]
    sol = linalg.solve(mat, [[one] for _ in solvable]) if solvable else []
    m = {k: sol[n][0] for n, k in enumerate(solvable)}
    out = []
    for s in range(d):
        if s in m:
            out.append(m[s])
            continue
        if not a >> s & 1:
            out.append(INFINITE)
            continue
        escapes = [k for k in range(d) if p[s][k] > 0 and not a >> k & 1]
        if all(k in m for k in escapes):
            out.append(one + sum((p[s][k] * m[k] for k in escapes), zero))
        else:
            out.append(INFINITE)
    return out


def mean_hitting_time(chain: TransitionMatrix, i: int, A: Iterable[int]):
    _check_state(chain, i)
    return mean_hitting_times(chain, A)[i - 1]


class StateKind(str, enum.Enum):
    TRANSIENT = "transient"
    POSITIVE_RECURRENT = "positive_recurrent"


@dataclass(frozen=True)
class StateClassification:
    """Per-state tags; ``membership`` is a 0-based index into the chain's
    communicating classes, ``None`` for transitory states."""

    kinds: tuple[StateKind, ...]
    periods: tuple[int | None, ...]
    membership: tuple[int | None, ...]


def classify_states(chain: TransitionMatrix) -> StateClassification:
    dec = chain.classes
    closed = frozenset().union(*chain.maximal) if chain.maximal else frozenset()
    period_of = [class_period(chain.graph, c) for c in dec.classes]
    kinds, periods, membership = [], [], []
    for s in range(1, chain.d + 1):
        k = dec.class_index(s)
        membership.append(k)
        periods.append(None if k is None else period_of[k])
        kinds.append(StateKind.POSITIVE_RECURRENT if s in closed else StateKind.TRANSIENT)
    return StateClassification(tuple(kinds), tuple(periods), tuple(membership))


def _restricted(chain: TransitionMatrix, states: Sequence[int]) -> list[list]:
    return [[chain.p[i - 1][j - 1] for j in states] for i in states]


def invariant_distributions(chain: TransitionMatrix) -> list[tuple[frozenset[int], tuple]]:
    """One invariant distribution per maximal class, supported on that class."""
    out = []
    one, zero = chain.one(), chain.zero()
    for c in chain.maximal:
        states = sorted(c)
        n = len(states)
        pc = _restricted(chain, states)
        # rows of (P_C - I)^T, last equation replaced by normalization
        mat = [[pc[j][i] - (one if i == j else zero) for j in range(n)] for i in range(n)]
        mat[-1] = [one] * n
        rhs = [[zero] for _ in range(n - 1)] + [[one]]
        sol = linalg.solve(mat, rhs)
        weights = [zero] * chain.d
        for k, s in enumerate(states):
            weights[s - 1] = sol[k][0]
        out.append((c, tuple(weights)))
    return out


class Absorption(NamedTuple):
    classes: tuple[frozenset[int], ...]
    probabilities: tuple[tuple, ...]  # [state][class]


def absorption_probabilities(chain: TransitionMatrix) -> Absorption:
    classes = chain.maximal
    d = chain.d
    one, zero = chain.one(), chain.zero()
    owner = {}
    for nu, c in enumerate(classes):
        for s in c:
            owner[s - 1] = nu
    transient = [s for s in range(d) if s not in owner]
    rows: list[list] = [[zero] * len(classes) for _ in range(d)]
    for s, nu in owner.items():
        rows[s][nu] = one
    if transient:
        p = chain.p
        mat = [[(one if r == c else zero) - p[r][c] for c in transient] for r in transient]
        rhs = [[sum((p[r][j] for j in range(d) if owner.get(j) == nu), zero)
                for nu in range(len(classes))] for r in transient]
        sol = linalg.solve(mat, rhs)
        for n, s in enumerate(transient):
            rows[s] = list(sol[n])
    return Absorption(classes, tuple(tuple(r) for r in rows))


class LimitDistribution(NamedTuple):
    weights: tuple
    mode: str  # "pointwise" or "cesaro"
    window: int  # averaging window that converges; 1 when pointwise


def class_weights(chain: TransitionMatrix, pi0: Sequence) -> list:
    """Probability of ending in each maximal class from initial law ``pi0``."""
    absorb = absorption_probabilities(chain)
    pi0 = [_number(x) for x in pi0]
    return [sum((pi0[s] * absorb.probabilities[s][nu] for s in range(chain.d)), chain.zero())
            for nu in range(len(absorb.classes))]


def limit_distribution(chain: TransitionMatrix, pi0: Sequence) -> LimitDistribution:
    weights = class_weights(chain, pi0)
    invariant = invariant_distributions(chain)
    limit = [chain.zero()] * chain.d
    for w, (_, mu) in zip(weights, invariant):
        for s in range(chain.d):
            limit[s] += w * mu[s]
    periods = [class_period(chain.graph, c) for (c, _), w in zip(invariant, weights) if w > 0]
    window = reduce(math.lcm, periods, 1)
    all_aperiodic = all(class_period(chain.graph, c) == 1 for c, _ in invariant)
    mode = "pointwise" if all_aperiodic else "cesaro"
    return LimitDistribution(tuple(limit), mode, 1 if all_aperiodic else window)


def _log(x) -> float:
    """Natural log that survives Fractions far below the float range."""
    if x == 0:
        return -math.inf
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def limit_log_errors(chain: TransitionMatrix, pi0: Sequence, ns: Sequence[int],
                     exact: bool | None = None) -> list[float]:
    """``log ||pi0^T P^n - limit||_1`` for each ``n`` in ``ns`` (ascending).

    By default exact for rational chains and initial laws, so tiny errors are
    not lost to rounding; ``-inf`` marks an exact zero. ``exact=False`` forces
    float evolution, which is far cheaper for large ``n`` (exact denominators
    grow with every step) at the price of a ~1e-16 error floor.
    """
    pi0 = [_number(x) for x in pi0]
    rational = chain.exact and all(isinstance(x, Fraction) for x in pi0)
    exact = rational if exact is None else exact and rational
    limit = limit_distribution(chain, pi0).weights
    if not exact:
        pi0 = [float(x) for x in pi0]
        limit = [float(x) for x in limit]
        chain = TransitionMatrix(chain.as_float().tolist(), chain.tol)
    out = []
    v, at = pi0, 0
    for n in ns:
        v = evolve(chain, v, n - at)
        at = n
        out.append(_log(sum(abs(a - b) for a, b in zip(v, limit))))
    return out


def fitted_decay_rate(log_errors: Sequence[float], ns: Sequence[int]) -> float:
    """Least-squares slope of ``log(error)`` against ``n``.

    Exact zeros are skipped; if fewer than two finite points remain the error
    vanished within the window and the rate is ``-inf``.
    """
    pts = [(n, e) for n, e in zip(ns, log_errors) if e > -math.inf]
    if len(pts) < 2:
        return -math.inf
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    return float(np.polyfit(x, y, 1)[0])


def convergence_rate(chain: TransitionMatrix, pi0: Sequence, lo: int = 10, hi: int = 100) -> float:
    """Empirical geometric rate: fitted slope of the log-error over ``lo..hi``."""
    ns = list(range(lo, hi + 1))
    return fitted_decay_rate(limit_log_errors(chain, pi0, ns), ns)


@dataclass(frozen=True)
class LeakingReport:
    rho: float
    n: int
    path: tuple[int, ...] | None
    margins: tuple[tuple[int, int, float], ...]  # (m, alpha, (1-rho)^m - sup_B p)

    @property
    def min_margin(self) -> float:
        return min(m for _, _, m in self.margins)

    def holds(self, slack: float = 1e-12) -> bool:
        return self.min_margin >= -slack


def _no_return_mask(chain: TransitionMatrix, b: int) -> int:
    g = chain.graph
    return g.full & ~b & ~g.kernel.reach(g.rows(BACKWARD), b)


def _best_escape(chain: TransitionMatrix, i: int, targets: int) -> tuple[int, float, tuple[int, ...]] | None:
    """Shortest length ``n >= 1`` from ``i`` into ``targets`` and the most
    probable path of that length."""
    d = chain.d
    p = chain.p
    best = {i: (1.0, (i + 1,))}
    for n in range(1, d + 1):
        nxt: dict[int, tuple[float, tuple[int, ...]]] = {}
        for s, (pr, path) in best.items():
            for j in range(d):
                q = float(p[s][j])
                if q > 0 and (j not in nxt or pr * q > nxt[j][0]):
                    nxt[j] = (pr * q, path + (j + 1,))
        best = nxt
        hits = [(pr, path) for j, (pr, path) in best.items() if targets >> j & 1]
        if hits:
            pr, path = max(hits, key=lambda h: (h[0], [-v for v in h[1]]))
            return n, pr, path
    return None


def leaking_bound_check(chain: TransitionMatrix, i: int, B: Iterable[int],
                        m_max: int = 50, mode: str = "path") -> LeakingReport:
    """Compare ``sup_{j in B} p_{mn+alpha}(i, j)`` with ``(1 - rho)^m``.

    ``mode="path"``: ``rho`` is the probability of the most likely shortest
    path from ``i`` to a state that cannot return to ``B``. ``mode="uniform"``:
    ``n`` is the longest such shortest escape over all states reachable from
    ``i`` that can still reach ``B``, and ``rho`` the smallest probability,
    over those states, of having left for good after ``n`` steps.
    """
    _check_state(chain, i)
    b = chain.graph.mask(B)
    if not b >> (i - 1) & 1:
        raise HypothesisViolated(f"state {i} is not in B")
    gone = _no_return_mask(chain, b)
    if mode == "path":
        esc = _best_escape(chain, i - 1, gone)
        if esc is None:
            raise HypothesisViolated(f"no path from {i} to a state that never returns to B")
        n, rho, path = esc
    elif mode == "uniform":
        g = chain.graph
        seen = g.reach_mask(1 << (i - 1)) | 1 << (i - 1)
        live = [s for s in range(chain.d) if seen >> s & 1 and not gone >> s & 1]
        lengths = []
        for s in live:
            esc = _best_escape(chain, s, gone)
            if esc is None:
                raise HypothesisViolated(f"state {s + 1} cannot leave for good")
            lengths.append(esc[0])
        n = max(lengths)
        P = chain.as_float()
        Pn = np.linalg.matrix_power(P, n)
        gone_idx = [s for s in range(chain.d) if gone >> s & 1]
        rho = float(min(Pn[s, gone_idx].sum() for s in live))
        path = None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    P = chain.as_float()
    v = np.zeros(chain.d)
    v[i - 1] = 1.0
    in_b = np.array([bool(b >> s & 1) for s in range(chain.d)])
    sup = []
    for _ in range(m_max * n + n):
        sup.append(float(v[in_b].max()))
        v = v @ P
    margins = []
    for m in range(1, m_max + 1):
        bound = (1.0 - rho) ** m
        for alpha in range(n):
            margins.append((m, alpha, bound - sup[m * n + alpha]))
    return LeakingReport(float(rho), n, path, tuple(margins))


def random_ck_check(chain: TransitionMatrix, i: int, j: int, n: int) -> float:
    """``|p_n(i,j) - sum_r f_r(i,j) p_{n-r}(j,j)|``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_state(chain, i)
    _check_state(chain, j)
    f = hitting_distribution(chain, i, [j], n)
    ej = [chain.one() if s == j - 1 else chain.zero() for s in range(chain.d)]
    ei = [chain.one() if s == i - 1 else chain.zero() for s in range(chain.d)]
    pjj = [ej[j - 1]]
    v = ej
    for _ in range(n):
        v = evolve(chain, v, 1)
        pjj.append(v[j - 1])
    pn_ij = evolve(chain, ei, n)[j - 1]
    total = sum((f[r - 1] * pjj[n - r] for r in range(1, n + 1)), chain.zero())
    return abs(float(pn_ij - total))


@dataclass(frozen=True)
class SimulationResult:
    seed: int
    trajectories: int
    horizon: int
    visit_counts: tuple[int, ...]  # N_j(m) summed over trajectories
    hitting_times: tuple[int | None, ...]  # first n >= 1 with X_n in target
    hit_states: tuple[int | None, ...]
    target: frozenset[int]
    absorption_classes: tuple[frozenset[int], ...]
    absorption_counts: tuple[int, ...]

    @property
    def occupancy(self) -> tuple[float, ...]:
        total = self.trajectories * self.horizon
        return tuple(c / total for c in self.visit_counts)

    @property
    def absorption_frequencies(self) -> tuple[float, ...]:
        return tuple(c / self.trajectories for c in self.absorption_counts)


def trajectory_rng(seed: int, t: int) -> np.random.Generator:
    """PCG64 stream for trajectory ``t``: ``SeedSequence(seed, spawn_key=(t,))``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(t,))))


def _clamped_cumsum(row: Sequence[float]) -> np.ndarray:
    c = np.cumsum(np.asarray(row, dtype=float))
    last = max(k for k, x in enumerate(row) if x > 0)
    c[last:] = np.inf
    return c


def simulate(chain: TransitionMatrix, pi0: Sequence, seed: int, horizon: int,
             trajectories: int = 1, target: Iterable[int] | None = None,
             batch: int = 2048) -> SimulationResult:
    """Run ``trajectories`` independent paths of ``horizon`` steps.

    Trajectory ``t`` consumes ``horizon + 1`` uniforms from
    :func:`trajectory_rng`; results do not depend on ``batch`` or backend.
    The default target is the union of the maximal classes, so hitting times
    are absorption times.
    """
    if horizon < 1 or trajectories < 1:
        raise ValueError("horizon and trajectories must be positive")
    g = chain.graph
    pi0 = [float(_number(x)) for x in pi0]
    if len(pi0) != chain.d:
        raise ValueError("initial distribution has the wrong length")
    tset = frozenset().union(*chain.maximal) if target is None else frozenset(target)
    tmask = g.mask(tset)
    cum = np.ascontiguousarray(np.vstack([_clamped_cumsum(r) for r in chain.as_float()]))
    p0 = np.ascontiguousarray(_clamped_cumsum(pi0))
    kernel = g.kernel
    counts = np.zeros(chain.d, dtype=np.int64)
    first_all, where_all = [], []
    for start in range(0, trajectories, batch):
        stop = min(trajectories, start + batch)
        u = np.empty((stop - start, horizon + 1))
        for t in range(start, stop):
            u[t - start] = trajectory_rng(seed, t).random(horizon + 1)
        c, first, where = kernel.simulate(cum, p0, u, tmask)
        counts += c
        first_all.extend(int(x) for x in first)
        where_all.extend(int(x) for x in where)
    classes = chain.maximal
    owner = {s: nu for nu, c in enumerate(classes) for s in c}
    absorbed = [0] * len(classes)
    for w in where_all:
        if w >= 0 and (w + 1) in owner:
            absorbed[owner[w + 1]] += 1
    return SimulationResult(
        seed=seed,
        trajectories=trajectories,
        horizon=horizon,
        visit_counts=tuple(int(x) for x in counts),
        hitting_times=tuple(None if x < 0 else x for x in first_all),
        hit_states=tuple(None if x < 0 else x + 1 for x in where_all),
        target=tset,
        absorption_classes=classes,
        absorption_counts=tuple(absorbed),
    )


def multistable_states(chain: TransitionMatrix) -> frozenset[int]:
    absorb = absorption_probabilities(chain)
    return frozenset(s + 1 for s, row in enumerate(absorb.probabilities)
                     if sum(1 for x in row if x > 0) >= 2)


# --- Fact-by-fact cross checks -------------------------------------------------


@dataclass(frozen=True)
class FactResult:
    fact: int
    ok: bool
    detail: str = ""
    witness: object = None


def _support_powers(chain: TransitionMatrix, n_max: int) -> list[list[int]]:
    """Row supports of ``P^n`` as masks, ``n = 0..n_max`` (exact zero tests)."""
    d = chain.d
    if chain.exact:
        cur = linalg.identity(d, Fraction(1))
        out = []
        for _ in range(n_max + 1):
            out.append([sum(1 << j for j in range(d) if cur[i][j] > 0) for i in range(d)])
            cur = linalg.matmul(cur, [list(r) for r in chain.p])
        return out
    # float chains: propagate exact supports through the positive pattern of P
    pos = (chain.as_float() > 0).astype(np.int64)
    cur = np.eye(d, dtype=np.int64)
    out = []
    for _ in range(n_max + 1):
        out.append([sum(1 << j for j in range(d) if cur[i, j]) for i in range(d)])
        cur = ((cur @ pos) > 0).astype(np.int64)
    return out


def verify_dictionary(chain: TransitionMatrix, threshold: int = 20,
                      subset_limit: int = 10) -> list[FactResult]:
    """Cross-check Facts 1-13 between the chain, its graph and the semiflow.

    Subset-quantified facts (3, 7) are checked exhaustively when
    ``d <= subset_limit`` and on singletons, classes and orbits otherwise.
    """
    from . import semiflow as sf
    from .graph import is_l_graph

    g = chain.graph
    d = chain.d
    k = g.kernel
    horizon = 2 * d + 2
    supp = _support_powers(chain, horizon)
    dec = chain.classes
    results = []

    def phi_mask(n, m):
        return k.phi_n(g.rows(), n, m)

    # Fact 1
    bad = [(i + 1, n) for n in range(horizon + 1) for i in range(d)
           if supp[n][i] != phi_mask(n, 1 << i)]
    results.append(FactResult(1, not bad, "supp P^n(i,.) == Phi(n,{i})", bad[:1] or None))

    # Fact 2
    bad = []
    for i in range(d):
        union = 0
        for n in range(1, d + 1):
            union |= supp[n][i]
        if union != g.reach_mask(1 << i):
            bad.append(i + 1)
    results.append(FactResult(2, not bad, "O+(i) == union of supports", bad[:1] or None))

    if d <= subset_limit:
        subsets = range(1, 1 << d)
    else:
        subsets = sorted({1 << i for i in range(d)} | {g.mask(c) for c in dec.classes}
                         | {g.reach_mask(1 << i) for i in range(d)} - {0})

    # Fact 3
    bad = []
    for a in subsets:
        fwd = not g.reach_mask(a) & ~a
        closed = all(sum((chain.p[i][j] for j in range(d) if a >> j & 1), chain.zero()) >= 1 - chain.tol
                     for i in range(d) if a >> i & 1)
        flow = all(not phi_mask(n, a) & ~a for n in range(1, horizon + 1))
        if not fwd == closed == flow:
            bad.append(sorted(members(a)))
            break
    results.append(FactResult(3, not bad, "forward invariant == stochastically closed == Phi-invariant",
                              bad[0] if bad else None))

    # Fact 4 on singleton targets
    bad = []
    n_check = d + 2
    for j in range(d):
        avoid = g.kernel.prepare([r & ~(1 << j) for r in g.succ])
        F = hitting_probabilities(chain, [j + 1])
        for i in range(d):
            f = hitting_distribution(chain, i + 1, [j + 1], n_check)
            # A-avoiding walks: n-1 steps avoiding j, then one step into j
            cur = 1 << i
            for n in range(1, n_check + 1):
                graph_pos = bool(k.image(g.rows(), cur) >> j & 1)
                if (f[n - 1] > 0) != graph_pos:
                    bad.append((i + 1, j + 1, n))
                cur = k.image(avoid, cur) & ~(1 << j)
            if (F[i] > 0) != bool(g.reach_mask(1 << i) >> j & 1):
                bad.append((i + 1, j + 1, "F"))
    results.append(FactResult(4, not bad, "f_n > 0 iff an avoiding path exists; F > 0 iff reachable",
                              bad[0] if bad else None))

    # Fact 5
    bad = []
    for i in range(d):
        for j in range(d):
            chain_comm = any(supp[n][i] >> j & 1 for n in range(1, d + 1)) and \
                any(supp[m][j] >> i & 1 for m in range(1, d + 1))
            ci = dec.class_index(i + 1)
            graph_comm = ci is not None and ci == dec.class_index(j + 1)
            if chain_comm != graph_comm:
                bad.append((i + 1, j + 1))
    results.append(FactResult(5, not bad, "graph communication == chain communication with n,m >= 1",
                              bad[0] if bad else None))

    # Fact 6
    transitory = sorted(dec.transitory)
    bad = [i for i in range(1, d + 1)
           if (i in dec.transitory) != all(not supp[n][i - 1] >> (i - 1) & 1 for n in range(1, d + 1))]
    results.append(FactResult(6, not bad, f"transitory states: {transitory}", bad[:1] or None))

    # Fact 7
    bad = []
    for a in subsets:
        mu, lam = k.cycle(g.rows(), a)
        span = mu + lam + 1
        chain_side = all(any(supp[n % (horizon + 1)][i] & a for i in range(d) if a >> i & 1)
                         for n in range(min(span, horizon + 1)))
        if span > horizon + 1:
            vec = a
            chain_side = True
            for n in range(span):
                chain_side &= bool(vec & a)
                vec = phi_mask(1, vec)
        if chain_side != sf._weakly_invariant_mask(g, a):
            bad.append(sorted(members(a)))
            break
    results.append(FactResult(7, not bad, "weakly invariant == positive n-step mass inside for all n",
                              bad[0] if bad else None))

    morse = sf.finest_morse_decomposition(g).sets if is_l_graph(g) else ()
    chain_classes = set()
    for i in range(d):
        cls = frozenset(j + 1 for j in range(d)
                        if any(supp[n][i] >> j & 1 for n in range(1, d + 1))
                        and any(supp[n][j] >> i & 1 for n in range(1, d + 1)))
        if cls:
            chain_classes.add(cls)
    ok8 = set(dec.classes) == chain_classes == set(morse)
    results.append(FactResult(8, ok8, "graph classes == nontrivial chain classes == finest Morse sets"))

    # Fact 9
    if d <= threshold:
        atts = [a for a in sf.attractor_masks(g, "exhaustive", threshold)[0] if a]
        minimal = {members(a) for a in atts if not any(b != a and not b & ~a for b in atts)}
        closed_classes = {c for c in dec.classes
                          if all(sum((chain.p[i - 1][j - 1] for j in c), chain.zero()) >= 1 - chain.tol for i in c)}
        ok9 = set(chain.maximal) == closed_classes == minimal
        results.append(FactResult(9, ok9, "attractors: " + str([sorted(members(a)) for a in [0] + atts])))
    else:
        results.append(FactResult(9, True, f"skipped: d={d} above exhaustive threshold"))

    # Fact 10: loop membership, return probabilities along n -> infinity, i in omega({i})
    bad = []
    recurrent = sf.recurrent_mask(g)
    for i in range(d):
        in_class = dec.class_index(i + 1) is not None
        late_return = any(supp[n][i] >> i & 1 for n in range(d + 1, horizon + 1))
        if not in_class == late_return == bool(recurrent >> i & 1):
            bad.append(i + 1)
    results.append(FactResult(10, not bad, "class member == returns at late times == i in omega({i})",
                              bad[:1] or None))

    # Facts 11 and 12
    cls = classify_states(chain)
    bad = []
    for i in range(d):
        F = hitting_probability(chain, i + 1, [i + 1])
        rec = F == 1 if chain.exact else abs(F - 1) <= 1e-9
        if rec != (cls.kinds[i] is StateKind.POSITIVE_RECURRENT):
            bad.append(i + 1)
    results.append(FactResult(11, not bad, "transient == off the maximal classes", bad[:1] or None))
    results.append(FactResult(12, not bad, "F(i,i) = 1 == in a maximal class", bad[:1] or None))

    # Fact 13
    inv = invariant_distributions(chain)
    ok13 = len(inv) == len(chain.maximal)
    for c, mu in inv:
        support = frozenset(s + 1 for s in range(d) if mu[s] > 0)
        residual = max(abs(float(sum((mu[r] * chain.p[r][s] for r in range(d)), chain.zero()) - mu[s]))
                       for s in range(d))
        ok13 = ok13 and support == c and residual <= 1e-12
    results.append(FactResult(13, ok13, f"{len(inv)} extreme invariant distributions"))
    return results
