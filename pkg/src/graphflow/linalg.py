"""Gaussian elimination with partial pivoting over floats or Fractions."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import SingularSystem

PIVOT_THRESHOLD = 1e-12


def solve(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    """Solve ``a @ x = b`` for ``x``; ``b`` has one column per right-hand side.

    Entries may be Fractions (exact, singular only on a zero pivot) or floats
    (singular when the best pivot is below ``PIVOT_THRESHOLD`` in magnitude).
    """
    n = len(a)
    if n == 0:
        return []
    exact = all(isinstance(x, (int, Fraction)) for row in a for x in row) and all(
        isinstance(x, (int, Fraction)) for row in b for x in row
    )
    m = [list(a[i]) + list(b[i]) for i in range(n)]
    width = len(m[0])
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        pval = m[piv][col]
        if pval == 0 or (not exact and abs(pval) < PIVOT_THRESHOLD):
            raise SingularSystem(f"pivot {float(pval):.3g} in column {col}", residual=float(abs(pval)))
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        rowc = m[col]
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                f = f / pval
                rowr = m[r]
                for k in range(col, width):
                    rowr[k] -= f * rowc[k]
    x = [[0] * (width - n) for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = m[i]
        for k in range(width - n):
            s = row[n + k]
            for j in range(i + 1, n):
                s -= row[j] * x[j][k]
            x[i][k] = s / row[i]
    return x


def residual(a: Sequence[Sequence], x: Sequence[Sequence], b: Sequence[Sequence]) -> float:
    n = len(a)
    worst = 0.0
    for i in range(n):
        for k in range(len(b[i])):
            s = sum(a[i][j] * x[j][k] for j in range(n)) - b[i][k]
            worst = max(worst, abs(float(s)))
    return worst


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def identity(n: int, one=1) -> list[list]:
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]
