"""Exact lattice reduction in the LLL sense, driven from the Gram matrix.

All arithmetic is over Fractions, so the Lovasz condition and the size
bounds hold exactly in the output, not merely up to float drift. The
worker operates on quadratic forms; `lll_reduce` wraps it for bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParamError, RankError
from ..intmath import identity_matrix, round_half_up


@dataclass
class LLLResult:
    """Unimodular transform plus the reduced form and its orthogonalization."""

    u: list            # integer columns: reduced basis = original . u
    gram: list         # transformed Gram matrix (Fractions)
    mu: list           # lower-triangular orthogonalization coefficients
    bstar_sq: list     # squared orthogonalized norms
    swaps: int


def _mu_r_from_gram(gram):
    n = len(gram)
    mu = [[Fraction(0)] * i for i in range(n)]
    r = [Fraction(0)] * n
    for i in range(n):
        for j in range(i + 1):
            acc = Fraction(gram[i][j])
            for t in range(j):
                acc -= mu[i][t] * mu[j][t] * r[t]
            if j < i:
                if r[j] == 0:
                    raise RankError("form is degenerate")
                mu[i][j] = acc / r[j]
            else:
                if acc <= 0:
                    raise RankError("form is not positive definite")
                r[i] = acc
    return mu, r


def _col_op(gram, u, mu, k, j, q):
    """Column operation x_k <- x_k - q x_j, applied to all state."""
    n = len(gram)
    for row in u:
        row[k] -= q * row[j]
    gkk = gram[k][k] - 2 * q * gram[k][j] + q * q * gram[j][j]
    for t in range(n):
        gram[k][t] -= q * gram[j][t]
        gram[t][k] = gram[k][t]
    gram[k][k] = gkk
    for t in range(j):
        mu[k][t] -= q * mu[j][t]
    mu[k][j] -= q


def _swap(gram, u, mu, r, k):
    """Swap columns k-1 and k, updating mu and r in place."""
    n = len(gram)
    for row in u:
        row[k - 1], row[k] = row[k], row[k - 1]
    for t in range(n):
        gram[k - 1][t], gram[k][t] = gram[k][t], gram[k - 1][t]
    for t in range(n):
        gram[t][k - 1], gram[t][k] = gram[t][k], gram[t][k - 1]
    mu_old = mu[k][k - 1]
    r_up = r[k] + mu_old * mu_old * r[k - 1]
    mu[k][k - 1] = mu_old * r[k - 1] / r_up
    r[k] = r[k - 1] * r[k] / r_up
    r[k - 1] = r_up
    for j in range(k - 1):
        mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
    for i in range(k + 1, n):
        t = mu[i][k]
        mu[i][k] = mu[i][k - 1] - mu_old * t
        mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]


def lll_transform(gram, eps=Fraction(1, 100)):
    """Reduce a positive definite form; returns an LLLResult.

    eps controls the reduction quality target delta = 1/(1+eps); eps must
    be positive. eps <= 1/3 keeps the classical 2^(n/2) length guarantee.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ParamError("eps must be positive")
    delta = 1 / (1 + eps)
    n = len(gram)
    gram = [[Fraction(v) for v in row] for row in gram]
    u = identity_matrix(n)
    if n <= 1:
        mu, r = _mu_r_from_gram(gram)
        return LLLResult(u, gram, mu, r, 0)
    mu, r = _mu_r_from_gram(gram)
    swaps = 0
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round_half_up(mu[k][j])
            if q:
                _col_op(gram, u, mu, k, j, q)
        if r[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * r[k - 1]:
            k += 1
        else:
            _swap(gram, u, mu, r, k)
            swaps += 1
            k = max(k - 1, 1)
    return LLLResult(u, gram, mu, r, swaps)


def lll_reduce(basis, eps=Fraction(1, 100)):
    """LLL-reduce a basis; returns (new_basis, LLLResult).

    The result's gram/mu/bstar_sq describe the integer Gram matrix of the
    new basis columns, i.e. the basis Gram divided by scale squared.
    """
    res = lll_transform(basis.gram_int(), eps)
    return basis.transform(res.u), res
