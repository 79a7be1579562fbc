"""Exact integer / rational matrix helpers.

Matrices are tuples of row tuples.  Everything here stays in exact
arithmetic; the only float is the optional norm estimate used to seed
:func:`operator_norm_bound`, whose result is then verified exactly.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

IntMatrix = tuple[tuple[int, ...], ...]


def identity(d: int) -> IntMatrix:
    return tuple(tuple(int(r == c) for c in range(d)) for r in range(d))


def as_matrix(rows) -> IntMatrix:
    return tuple(tuple(row) for row in rows)


def transpose(m):
    return tuple(zip(*m))


def matmul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(m, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def det(m) -> int | Fraction:
    """Determinant by fraction-free (Bareiss) elimination.

    Integer input gives an exact integer result; rational input works too.
    """
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(m) -> tuple[tuple[Fraction, ...], ...]:
    """Exact rational inverse by Gauss-Jordan elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(r == c)) for c in range(n)]
         for r, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def integer_inverse(m) -> IntMatrix:
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    inv = inverse(m)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def is_psd(m) -> bool:
    """Exact positive-semidefiniteness test of a symmetric matrix (all principal minors >= 0)."""
    n = len(m)
    for size in range(1, n + 1):
        for idx in itertools.combinations(range(n), size):
            sub = [[m[r][c] for c in idx] for r in idx]
            if det(sub) < 0:
                return False
    return True


def ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def operator_norm_bound(m: IntMatrix) -> Fraction:
    """Rational upper bound on the Euclidean operator norm of ``m``.

    Starts from ``ceil(sqrt(||m||_1 * ||m||_inf))`` and tries to tighten it
    to a dyadic value just above the floating-point spectral norm; the
    tightened value is kept only if ``N^2 I - m^T m`` is verified PSD exactly.
    """
    n = len(m)
    norm1 = max(sum(abs(m[r][c]) for r in range(n)) for c in range(n))
    norminf = max(sum(abs(x) for x in row) for row in m)
    coarse = Fraction(ceil_sqrt(norm1 * norminf))
    est = float(np.linalg.norm(np.array(m, dtype=float), 2))
    candidate = Fraction(math.ceil(est * 1024), 1024)
    if candidate >= coarse:
        return coarse
    mtm = matmul(transpose(m), m)
    c2 = candidate * candidate
    gap = [[(c2 if r == c else 0) - mtm[r][c] for c in range(n)] for r in range(n)]
    return candidate if is_psd(gap) else coarse
