"""Exact integer and rational matrix helpers.

Matrices here are lists of rows. Everything is plain Python int / Fraction;
these routines back every exactness claim in the package, so they stay free of
floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import RankError


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    """Exact matrix product; works for int and Fraction entries."""
    n, k = len(a), len(b)
    m = len(b[0]) if k else 0
    out = []
    for i in range(n):
        row_a = a[i]
        row = [0] * m
        for t in range(k):
            ait = row_a[t]
            if ait == 0:
                continue
            row_b = b[t]
            for j in range(m):
                row[j] += ait * row_b[j]
        out.append(row)
    return out


def mat_vec(a, v):
    return [sum(a[i][t] * v[t] for t in range(len(v))) for i in range(len(a))]


def congruent_transform(gram, u):
    """Gram matrix of transformed columns: u^T . gram . u, exact."""
    return mat_mul(transpose(u), mat_mul(gram, u))


def transpose(a):
    return [list(col) for col in zip(*a)]


def bareiss_det(matrix) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    n = len(matrix)
    if n == 0:
        return 1
    m = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for j in range(n - 1):
        if m[j][j] == 0:
            for i in range(j + 1, n):
                if m[i][j] != 0:
                    m[j], m[i] = m[i], m[j]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(j + 1, n):
            for t in range(j + 1, n):
                m[i][t] = (m[i][t] * m[j][j] - m[i][j] * m[j][t]) // prev
            m[i][j] = 0
        prev = m[j][j]
    return sign * m[n - 1][n - 1]


def fraction_matrix_inverse(matrix) -> list[list[Fraction]]:
    """Exact inverse via Gauss-Jordan; raises RankError if singular."""
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if aug[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            raise RankError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def solve_exact(matrix, rhs) -> list[Fraction]:
    """Solve matrix @ x = rhs exactly (square, nonsingular)."""
    inv = fraction_matrix_inverse(matrix)
    return mat_vec(inv, [Fraction(x) for x in rhs])


def unimodular_inverse(u: list[list[int]]) -> list[list[int]]:
    """Exact integer inverse of a unimodular matrix."""
    inv = fraction_matrix_inverse(u)
    out = []
    for row in inv:
        int_row = []
        for x in row:
            if x.denominator != 1:
                raise RankError("matrix is not unimodular")
            int_row.append(int(x))
        out.append(int_row)
    return out


def content(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, abs(int(v)))
        if g == 1:
            return 1
    return g


def unimodular_completion(z: list[int]) -> list[list[int]]:
    """Return a unimodular integer matrix whose first column is z.

    Requires gcd(z) = 1. Built from the xgcd chain: elementary 2x2 blocks that
    fold z down to e_1 are inverted in reverse order.
    """
    k = len(z)
    if k == 0:
        raise RankError("empty vector")
    if content(z) != 1:
        raise RankError("coefficient vector is not primitive")
    u = identity_matrix(k)
    # u starts as I; fold positions 1..k-1 into position 0, applying the
    # inverse of each fold to u's columns 0 and i so that u @ e_1 tracks z.
    g = z[0]
    for i in range(1, k):
        zi = z[i]
        if zi == 0:
            continue
        g2, x, y = xgcd(g, zi)
        # fold matrix F acts on rows (0, i): F = [[x, y], [-zi/g2, g/g2]],
        # F @ (g, zi) = (g2, 0); its inverse is [[g/g2, -y], [zi/g2, x]].
        a, b = g // g2, zi // g2
        for r in range(k):
            c0, ci = u[r][0], u[r][i]
            u[r][0] = c0 * a + ci * b
            u[r][i] = -c0 * y + ci * x
        g = g2
    # now u[:, 0] == z up to sign of the final gcd (which is 1 by primitivity)
    if [u[r][0] for r in range(k)] != list(z):
        for r in range(k):
            u[r][0] = -u[r][0]
    if [u[r][0] for r in range(k)] != list(z):
        raise RankError("completion failed")  # unreachable for primitive z
    return u


def round_half_up(x: Fraction) -> int:
    """Nearest integer, ties toward +infinity (deterministic for mu = 1/2)."""
    num = 2 * x.numerator + x.denominator
    return num // (2 * x.denominator)
