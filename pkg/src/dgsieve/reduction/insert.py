"""Turning an oracle's coefficient vector into a basis column.

A short vector found inside a block is expressed as integer coefficients
of that block's columns. Extending those coefficients to a unimodular
matrix makes the vector the block's first column while leaving the rest a
basis of the same lattice. The reversed-dual variant converts a transform
on the dual block into the matching primal one.
"""

from __future__ import annotations

from ..errors import ParamError
from ..intmath import (content, identity_matrix, transpose,
                       unimodular_completion, unimodular_inverse)


def primitive_part(coeffs):
    """Divide out the gcd so the coefficient vector can start a basis."""
    c = content(coeffs)
    if c == 0:
        raise ParamError("coefficient vector is zero")
    if c == 1:
        return list(coeffs)
    return [v // c for v in coeffs]


def insert_transform(n, lo, hi, coeffs):
    """Unimodular n x n matrix sending column lo to the combination
    sum(coeffs[t] * col[lo+t]) and fixing all columns outside [lo, hi)."""
    if not (0 <= lo < hi <= n):
        raise ParamError(f"bad block bounds [{lo}, {hi}) for rank {n}")
    if len(coeffs) != hi - lo:
        raise ParamError("coefficient count does not match the block")
    block = unimodular_completion(primitive_part(coeffs))
    u = identity_matrix(n)
    k = hi - lo
    for a in range(k):
        for b in range(k):
            u[lo + a][lo + b] = block[a][b]
    return u


def insert_block_vector(basis, lo, hi, coeffs):
    """Rewrite the basis so the block's first column is the given
    combination of block columns. Returns (new_basis, transform)."""
    u = insert_transform(basis.rank, lo, hi, coeffs)
    return basis.transform(u), u


def primal_from_dual_transform(ud):
    """Primal block transform matching a reversed-dual block transform.

    If D is the reversed dual of block basis B, then applying the returned
    matrix U to B changes its reversed dual by exactly ud: the reversed
    dual of B.U equals D.ud. Concretely U = R ud^(-T) R with R the index
    reversal.
    """
    k = len(ud)
    inv_t = transpose(unimodular_inverse(ud))
    return [[inv_t[k - 1 - i][k - 1 - j] for j in range(k)]
            for i in range(k)]
