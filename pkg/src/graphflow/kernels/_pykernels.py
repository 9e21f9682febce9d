"""Pure-Python bit-mask kernels.

Sets of vertices are Python ints: bit ``i`` set means vertex ``i`` (0-based).
A graph is a sequence ``rows`` where ``rows[i]`` is the successor mask of ``i``.
Every function here has a twin in ``_ckernels.pyx`` with identical semantics.
"""
from __future__ import annotations

from bisect import bisect_right

import numpy as np

NAME = "python"
MAX_WIDTH = None  # unbounded, Python ints


def prepare(rows):
    return tuple(int(r) for r in rows)


def image(rows, mask):
    out = 0
    while mask:
        low = mask & -mask
        out |= rows[low.bit_length() - 1]
        mask ^= low
    return out


def phi_n(rows, n, mask):
    for _ in range(n):
        if not mask:
            break
        mask = image(rows, mask)
    return mask


def reach(rows, mask):
    """Vertices reachable from ``mask`` by paths of length >= 1."""
    seen = image(rows, mask)
    frontier = seen
    while frontier:
        frontier = image(rows, frontier) & ~seen
        seen |= frontier
    return seen


def cycle(rows, mask):
    """Brent cycle detection on ``A -> image(A)``; returns ``(mu, lam)``."""
    power = lam = 1
    tortoise = mask
    hare = image(rows, mask)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = image(rows, hare)
        lam += 1
    tortoise = hare = mask
    for _ in range(lam):
        hare = image(rows, hare)
    mu = 0
    while tortoise != hare:
        tortoise = image(rows, tortoise)
        hare = image(rows, hare)
        mu += 1
    return mu, lam


def omega(rows, mask):
    mu, lam = cycle(rows, mask)
    x = phi_n(rows, mu, mask)
    acc = 0
    for _ in range(lam):
        acc |= x
        x = image(rows, x)
    return acc


def omega_singletons(rows):
    return [omega(rows, 1 << i) for i in range(len(rows))]


def attractor_scan(omega_single, d):
    """All masks ``A`` with ``OR(omega_single[i] for i in A) == A``, ascending."""
    size = 1 << d
    om = [0] * size
    found = [0]
    for a in range(1, size):
        low = a & -a
        v = om[a ^ low] | omega_single[low.bit_length() - 1]
        om[a] = v
        if v == a:
            found.append(a)
    return found


def bool_matmul(a_rows, b_rows):
    return tuple(image(b_rows, r) for r in a_rows)


def simulate(cum, pi0_cum, u, target):
    """Step trajectories driven by pre-drawn uniforms.

    ``cum`` is a (d, d) array of row cumulative sums with the tail clamped to
    +inf, ``u`` is (T, m + 1): column 0 draws ``X_0``, column ``n`` draws
    ``X_n``. Returns visit counts over times 1..m, plus for each trajectory
    the first time ``n >= 1`` with ``X_n`` in ``target`` (-1 if none) and the
    state hit then.
    """
    trajectories, width = u.shape
    d = cum.shape[0]
    counts = np.zeros(d, dtype=np.int64)
    first = np.full(trajectories, -1, dtype=np.int64)
    where = np.full(trajectories, -1, dtype=np.int64)
    if trajectories < 64:
        rows = [list(r) for r in cum.tolist()]
        p0 = pi0_cum.tolist()
        local = [0] * d
        for t in range(trajectories):
            ut = u[t].tolist()
            x = bisect_right(p0, ut[0])
            hit = -1
            for n in range(1, width):
                x = bisect_right(rows[x], ut[n])
                local[x] += 1
                if hit < 0 and (target >> x) & 1:
                    hit = n
                    where[t] = x
            first[t] = hit
        counts += np.asarray(local, dtype=np.int64)
        return counts, first, where
    x = (pi0_cum[None, :] <= u[:, :1]).sum(axis=1)
    tmask = np.array([(target >> j) & 1 for j in range(d)], dtype=bool)
    for n in range(1, width):
        x = (cum[x] <= u[:, n : n + 1]).sum(axis=1)
        counts += np.bincount(x, minlength=d)
        new = (first < 0) & tmask[x]
        first[new] = n
        where[new] = x[new]
    return counts, first, where
