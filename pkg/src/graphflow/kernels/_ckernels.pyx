# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bit-mask kernels for graphs with at most 64 vertices.

Mirrors ``_pykernels`` function for function; masks are ``uint64``.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

NAME = "cython"
MAX_WIDTH = 64


def prepare(rows):
    return np.asarray([int(r) for r in rows], dtype=np.uint64)


cdef inline uint64_t _image(const uint64_t[::1] rows, uint64_t mask) noexcept nogil:
    cdef uint64_t out = 0
    while mask:
        out |= rows[__builtin_ctzll(mask)]
        mask &= mask - 1
    return out


cdef inline uint64_t _phi_n(const uint64_t[::1] rows, Py_ssize_t n, uint64_t mask) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(n):
        if not mask:
            break
        mask = _image(rows, mask)
    return mask


cdef void _cycle(const uint64_t[::1] rows, uint64_t mask,
                 Py_ssize_t *mu_out, Py_ssize_t *lam_out) noexcept nogil:
    cdef Py_ssize_t power = 1, lam = 1, mu = 0, k
    cdef uint64_t tortoise = mask, hare = _image(rows, mask)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = _image(rows, hare)
        lam += 1
    tortoise = mask
    hare = mask
    for k in range(lam):
        hare = _image(rows, hare)
    while tortoise != hare:
        tortoise = _image(rows, tortoise)
        hare = _image(rows, hare)
        mu += 1
    mu_out[0] = mu
    lam_out[0] = lam


cdef uint64_t _omega(const uint64_t[::1] rows, uint64_t mask) noexcept nogil:
    cdef Py_ssize_t mu, lam, k
    cdef uint64_t x, acc = 0
    _cycle(rows, mask, &mu, &lam)
    x = _phi_n(rows, mu, mask)
    for k in range(lam):
        acc |= x
        x = _image(rows, x)
    return acc


def image(const uint64_t[::1] rows, uint64_t mask):
    return _image(rows, mask)


def phi_n(const uint64_t[::1] rows, Py_ssize_t n, uint64_t mask):
    return _phi_n(rows, n, mask)


def reach(const uint64_t[::1] rows, uint64_t mask):
    cdef uint64_t seen = _image(rows, mask), frontier
    frontier = seen
    while frontier:
        frontier = _image(rows, frontier) & ~seen
        seen |= frontier
    return seen


def cycle(const uint64_t[::1] rows, uint64_t mask):
    cdef Py_ssize_t mu, lam
    _cycle(rows, mask, &mu, &lam)
    return mu, lam


def omega(const uint64_t[::1] rows, uint64_t mask):
    return _omega(rows, mask)


def omega_singletons(const uint64_t[::1] rows):
    cdef Py_ssize_t i, d = rows.shape[0]
    return [_omega(rows, (<uint64_t>1) << i) for i in range(d)]


def attractor_scan(omega_single, int d):
    cdef uint64_t[::1] single = np.asarray(omega_single, dtype=np.uint64)
    cdef uint64_t size = (<uint64_t>1) << d, a, v
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] om_arr = np.zeros(size, dtype=np.uint64)
    cdef uint64_t[::1] om = om_arr
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] hits_arr = np.zeros(size, dtype=np.uint64)
    cdef uint64_t[::1] hits = hits_arr
    cdef Py_ssize_t count = 1
    with nogil:
        for a in range(1, size):
            v = om[a & (a - 1)] | single[__builtin_ctzll(a)]
            om[a] = v
            if v == a:
                hits[count] = a
                count += 1
    return [int(x) for x in hits_arr[:count]]


def bool_matmul(const uint64_t[::1] a_rows, const uint64_t[::1] b_rows):
    cdef Py_ssize_t i, d = a_rows.shape[0]
    return tuple(_image(b_rows, a_rows[i]) for i in range(d))


def simulate(const double[:, ::1] cum, const double[::1] pi0_cum,
             const double[:, ::1] u, uint64_t target):
    cdef Py_ssize_t trajectories = u.shape[0], width = u.shape[1]
    cdef Py_ssize_t d = cum.shape[0], t, n, x
    cdef double r
    counts_arr = np.zeros(d, dtype=np.int64)
    first_arr = np.full(trajectories, -1, dtype=np.int64)
    where_arr = np.full(trajectories, -1, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef int64_t[::1] first = first_arr
    cdef int64_t[::1] where = where_arr
    with nogil:
        for t in range(trajectories):
            r = u[t, 0]
            x = 0
            while pi0_cum[x] <= r:
                x += 1
            for n in range(1, width):
                r = u[t, n]
                x = _next_state(cum, x, r, d)
                counts[x] += 1
                if first[t] < 0 and (target >> x) & 1:
                    first[t] = n
                    where[t] = x
    return counts_arr, first_arr, where_arr


cdef inline Py_ssize_t _next_state(const double[:, ::1] cum, Py_ssize_t x,
                                   double r, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t j = 0
    while cum[x, j] <= r:
        j += 1
    return j
