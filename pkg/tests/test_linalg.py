from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphflow.errors import SingularSystem
from graphflow.linalg import identity, matmul, residual, solve


def test_exact_solve():
    a = [[F(2), F(1)], [F(1), F(3)]]
    x = solve(a, [[F(3)], [F(5)]])
    assert x == [[F(4, 5)], [F(7, 5)]]


def test_several_right_hand_sides():
    a = [[1.0, 2.0], [3.0, 4.0]]
    x = solve(a, [[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(x, np.linalg.inv(a))


def test_pivoting_handles_leading_zero():
    x = solve([[0.0, 1.0], [1.0, 0.0]], [[2.0], [3.0]])
    assert x == [[3.0], [2.0]]


def test_singular_exact():
    with pytest.raises(SingularSystem) as info:
        solve([[F(1), F(2)], [F(2), F(4)]], [[F(1)], [F(2)]])
    assert info.value.residual == 0


def test_singular_float_threshold():
    with pytest.raises(SingularSystem):
        solve([[1.0, 1.0], [1.0, 1.0 + 1e-14]], [[1.0], [1.0]])


def test_empty():
    assert solve([], []) == []


def test_identity_and_matmul():
    i3 = identity(3, F(1))
    m = [[F(1), F(2), F(0)], [F(0), F(1), F(5)], [F(7), F(0), F(1)]]
    assert matmul(i3, m) == m == matmul(m, i3)
    assert isinstance(i3[0][1], F)


@st.composite
def systems(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    ints = st.integers(-9, 9)
    a = [[F(draw(ints)) for _ in range(n)] for _ in range(n)]
    for i in range(n):  # diagonal dominance keeps the system regular
        a[i][i] = F(10 * n) + abs(a[i][i])
    b = [[F(draw(ints))] for _ in range(n)]
    return a, b


@given(systems())
def test_exact_residual_is_zero(ab):
    a, b = ab
    x = solve(a, b)
    assert residual(a, x, b) == 0
    assert all(isinstance(v, F) for row in x for v in row)


@given(systems())
def test_float_agrees_with_numpy(ab):
    a, b = ab
    af = [[float(v) for v in row] for row in a]
    bf = [[float(v) for v in row] for row in b]
    np.testing.assert_allclose(solve(af, bf), np.linalg.solve(af, bf), rtol=1e-12, atol=1e-12)
