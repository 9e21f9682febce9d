"""The compiled kernels and the pure-Python fallback must agree bit for bit."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphflow import kernels
from graphflow.kernels import _pykernels as py

try:
    from graphflow.kernels import _ckernels as cy
except ImportError:  # extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


@st.composite
def rows_and_mask(draw, max_d=12):
    d = draw(st.integers(1, max_d))
    rows = draw(st.lists(st.integers(0, (1 << d) - 1), min_size=d, max_size=d))
    mask = draw(st.integers(0, (1 << d) - 1))
    return d, rows, mask


def test_backend_choice():
    assert kernels.for_width(10 ** 4) is py
    if cy is not None and kernels.BACKEND == "cython":
        assert kernels.for_width(64) is cy
        assert kernels.for_width(65) is py


def test_python_kernel_basics():
    rows = py.prepare([0b010, 0b100, 0b001])  # 3-cycle
    assert py.image(rows, 0b001) == 0b010
    assert py.reach(rows, 0b001) == 0b111
    assert py.cycle(rows, 0b001) == (0, 3)
    assert py.omega(rows, 0b001) == 0b111
    assert py.attractor_scan(py.omega_singletons(rows), 3) == [0, 0b111]


def test_python_kernel_handles_wide_masks():
    d = 100
    rows = py.prepare([1 << ((i + 1) % d) for i in range(d)])
    assert py.phi_n(rows, d, 1) == 1
    assert py.reach(rows, 1) == (1 << d) - 1


@needs_ext
@given(rows_and_mask(), st.integers(0, 20))
def test_mask_kernels_agree(drm, n):
    d, rows, mask = drm
    pr, cr = py.prepare(rows), cy.prepare(rows)
    assert py.image(pr, mask) == cy.image(cr, mask)
    assert py.phi_n(pr, n, mask) == cy.phi_n(cr, n, mask)
    assert py.reach(pr, mask) == cy.reach(cr, mask)
    assert py.cycle(pr, mask) == cy.cycle(cr, mask)
    assert py.omega(pr, mask) == cy.omega(cr, mask)
    assert list(py.omega_singletons(pr)) == list(cy.omega_singletons(cr))


@needs_ext
@given(rows_and_mask(max_d=10))
def test_attractor_scan_agrees(drm):
    d, rows, _ = drm
    om = py.omega_singletons(py.prepare(rows))
    assert list(py.attractor_scan(om, d)) == list(cy.attractor_scan(om, d))


@needs_ext
@given(rows_and_mask(), rows_and_mask())
def test_matmul_agrees(a, b):
    d = min(a[0], b[0])
    full = (1 << d) - 1
    ra = [r & full for r in a[1][:d]]
    rb = [r & full for r in b[1][:d]]
    assert tuple(py.bool_matmul(py.prepare(ra), py.prepare(rb))) == tuple(
        int(x) for x in cy.bool_matmul(cy.prepare(ra), cy.prepare(rb)))


@needs_ext
def test_full_width_masks():
    rows = [1 << ((i + 1) % 64) for i in range(64)]
    top = 1 << 63
    assert cy.image(cy.prepare(rows), top) == py.image(py.prepare(rows), top) == 1
    assert cy.reach(cy.prepare(rows), 1) == (1 << 64) - 1


def _cum(p):
    c = np.cumsum(p, axis=-1)
    c[..., -1] = np.inf
    return np.ascontiguousarray(c)


@needs_ext
@pytest.mark.parametrize("trajectories", [5, 200])  # scalar and vectorized python paths
def test_simulate_agrees(trajectories):
    rng = np.random.default_rng(0)
    p = rng.random((5, 5))
    p /= p.sum(axis=1, keepdims=True)
    cum, p0 = _cum(p), _cum(np.full(5, 0.2))
    u = np.ascontiguousarray(rng.random((trajectories, 300)))
    a = py.simulate(cum, p0, u, 0b10010)
    b = cy.simulate(cum, p0, u, 0b10010)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(np.asarray(x), np.asarray(y))


def test_python_simulate_paths_agree():
    rng = np.random.default_rng(1)
    p = rng.random((4, 4))
    p /= p.sum(axis=1, keepdims=True)
    cum, p0 = _cum(p), _cum(np.full(4, 0.25))
    u = rng.random((70, 50))
    whole = py.simulate(cum, p0, u, 0b1000)
    parts = [py.simulate(cum, p0, u[k:k + 10], 0b1000) for k in range(0, 70, 10)]
    np.testing.assert_array_equal(whole[0], sum(p[0] for p in parts))
    np.testing.assert_array_equal(whole[1], np.concatenate([p[1] for p in parts]))
