"""Mutable integer Gram state threaded through block reduction sweeps.

The basis never materializes inside the loops. Every step is an integer
column transform tracked next to the exact Gram matrix; orthogonalized
data is recomputed on demand at a mantissa wide enough for the ranks in
play, and exact determinants of leading principal minors supply the audit
values the drivers compare and log.
"""

from __future__ import annotations

import numpy as np

from ..errors import ParamError
from ..gso import default_mantissa, gso_from_gram, size_reduce_transform
from ..intmath import (bareiss_det, congruent_transform, identity_matrix,
                       mat_mul, unimodular_completion)
from .insert import insert_transform, primal_from_dual_transform, primitive_part
from .oracle import projected_block_basis

from ..basis import dual_reversed


def _unit_head(coeffs) -> bool:
    return abs(coeffs[0]) == 1 and not any(coeffs[1:])


def _embed(n, lo, block_u):
    u = identity_matrix(n)
    k = len(block_u)
    for a in range(k):
        for b in range(k):
            u[lo + a][lo + b] = block_u[a][b]
    return u


class GramState:
    """Exact Gram matrix plus the accumulated column transform."""

    def __init__(self, basis=None, gram=None):
        if (basis is None) == (gram is None):
            raise ParamError("pass exactly one of basis or gram")
        if basis is not None:
            if basis.rank == 0:
                raise ParamError("empty basis")
            self.gram = [list(r) for r in basis.gram_int()]
        else:
            if not gram:
                raise ParamError("empty Gram matrix")
            self.gram = [list(r) for r in gram]
        self.base = basis
        self.n = len(self.gram)
        self.u = identity_matrix(self.n)
        self.bits = default_mantissa(self.n)

    @classmethod
    def from_gram(cls, gram) -> "GramState":
        return cls(gram=gram)

    def apply(self, step) -> None:
        self.gram = congruent_transform(self.gram, step)
        self.u = mat_mul(self.u, step)

    def size_reduce(self) -> None:
        self.apply(size_reduce_transform(self.gram, self.bits))

    def gso(self):
        return gso_from_gram(self.gram, self.bits)

    def gso_exact(self):
        return gso_from_gram(self.gram, "exact")

    def leading_det(self, j: int) -> int:
        """Exact squared volume of the first j columns (1 for j = 0)."""
        if j == 0:
            return 1
        return bareiss_det([row[:j] for row in self.gram[:j]])

    def current_basis(self):
        if self.base is None:
            raise ParamError("state was built from a bare Gram matrix")
        return self.base.transform(self.u)

    def block_floats(self, gso, lo, hi):
        mu = gso.mu
        r = gso.bstar_sq
        mu_b = [[float(mu[lo + i][lo + j]) for j in range(i)]
                for i in range(hi - lo)]
        r_b = [float(r[lo + i]) for i in range(hi - lo)]
        return mu_b, r_b

    # one step = one oracle query; callers own the call accounting

    def primal_step(self, lo, hi, oracle) -> bool:
        """Visit a block with a primal oracle; True if columns moved."""
        if oracle.backend == "enum":
            mu_b, r_b = self.block_floats(self.gso(), lo, hi)
            coeffs = oracle.shortest_from_floats(mu_b, r_b)
        else:
            coeffs = oracle.shortest_from_basis(
                projected_block_basis(self.current_basis(), lo, hi))
        if _unit_head(coeffs):
            return False
        self.apply(insert_transform(self.n, lo, hi, coeffs))
        return True

    def primal_step_exact(self, lo, hi, oracle) -> bool:
        """Primal visit through exact block data.

        Used where the promise factor is 1 and a float tie could hand back
        the wrong vector.
        """
        from ..gso import block_gram_from_gso

        if oracle.backend == "sieve":
            return self.primal_step(lo, hi, oracle)
        block = block_gram_from_gso(self.gso_exact(), lo, hi)
        coeffs = oracle.shortest_from_gram(block)
        if _unit_head(coeffs):
            return False
        self.apply(insert_transform(self.n, lo, hi, coeffs))
        return True

    def dual_step(self, lo, hi, oracle) -> bool:
        """Visit a block with a dual oracle; True if columns moved."""
        coeffs = self.dual_coeffs(lo, hi, oracle)
        if _unit_head(coeffs):
            return False
        self.apply(self.dual_transform(lo, coeffs))
        return True

    def dual_coeffs(self, lo, hi, oracle):
        """Oracle answer on the block's reversed dual."""
        if oracle.backend == "enum":
            mu_b, r_b = self.block_floats(self.gso(), lo, hi)
            dual = _reversed_dual_floats(mu_b, r_b)
            dgso = gso_from_gram(dual, 53)
            return oracle.shortest_from_floats(dgso.mu_float(),
                                               dgso.bstar_sq_float())
        emb = dual_reversed(projected_block_basis(self.current_basis(), lo, hi))
        return oracle.shortest_from_basis(emb)

    def dual_transform(self, lo, coeffs):
        """Column transform realizing a reversed-dual head insertion."""
        ud = unimodular_completion(primitive_part(list(coeffs)))
        return _embed(self.n, lo, primal_from_dual_transform(ud))


def _reversed_dual_floats(mu_b, r_b):
    """Reversed dual Gram of a block, from its orthogonalized data."""
    d = len(r_b)
    m = np.eye(d)
    for i in range(d):
        for j in range(i):
            m[i, j] = mu_b[i][j]
    g = (m * np.asarray(r_b)) @ m.T
    ginv = np.linalg.inv(g)
    rev = ginv[::-1, ::-1]
    rev = (rev + rev.T) / 2.0
    return [[float(rev[i, j]) for j in range(d)] for i in range(d)]
