"""Exact shortest-vector search by depth-first enumeration.

The search tree is walked in double precision by the kernel backend with a
1e-9 relative safety margin on the pruning radius; every surviving
candidate is then re-evaluated in exact arithmetic, so the returned
minimum is certified, not a float guess. Every search above rank one gets
one exact reduction pass first to keep the tree small and the floats well
behaved; without it a badly conditioned form can push the tree past the
node budget even at tiny rank.
"""

from __future__ import annotations

from fractions import Fraction

from .. import _kernel
from ..errors import BudgetError, ParamError
from ..intmath import mat_vec
from .lll import lll_transform

MAX_RANK = 45


def _form_value_exact(gram, x):
    n = len(x)
    acc = 0
    for a in range(n):
        xa = x[a]
        if not xa:
            continue
        row = gram[a]
        acc += row[a] * xa * xa
        for b in range(a):
            if x[b]:
                acc += 2 * row[b] * xa * x[b]
    return acc


def _float_gso(gram):
    # exact orthogonalization, converted to doubles for the search kernel
    from ..gso import gso_from_gram

    gso = gso_from_gram([[Fraction(v) for v in row] for row in gram],
                        "exact")
    return gso.mu_float(), gso.bstar_sq_float()


def shortest_vector_gram(gram, max_nodes=50_000_000):
    """Certified minimum of a positive definite form over nonzero integers.

    Returns (coeffs, norm_sq, nodes) with norm_sq exact (int or Fraction).
    Among tied minima the lexicographically smallest coefficient vector of
    the canonical sign pair is returned.
    """
    n = len(gram)
    if n == 0:
        raise ParamError("form must have positive rank")
    if n > MAX_RANK:
        raise ParamError(f"rank {n} exceeds the enumeration limit {MAX_RANK}")
    if n == 1:
        if gram[0][0] <= 0:
            raise ParamError("form is not positive definite")
        return [1], gram[0][0], 1
    pre = lll_transform(gram)
    u0, work = pre.u, pre.gram
    mu, r = _float_gso(work)
    radius = min(float(work[i][i]) for i in range(n)) * (1.0 + 1e-6)
    cands, nodes, truncated = _kernel.enumerate_gram(
        mu, r, radius, collect_limit=1000, shrink=True, max_nodes=max_nodes)
    if truncated:
        raise BudgetError(f"enumeration exceeded {max_nodes} nodes")
    best_x = None
    best = None
    for coeffs, _ in cands:
        val = _form_value_exact(work, coeffs)
        if best is None or val < best or (val == best
                                          and list(coeffs) < best_x):
            best = val
            best_x = list(coeffs)
    if best_x is None:
        # diagonal entries are attainable, so this cannot happen for a
        # positive definite form; guard anyway
        raise BudgetError("enumeration returned no candidates")
    if u0 is not None:
        best_x = mat_vec(u0, best_x)
    return _canonical_sign(best_x), best, nodes


def _canonical_sign(x):
    """Negate the vector if its last nonzero entry is negative."""
    for v in reversed(x):
        if v:
            return [-a for a in x] if v < 0 else x
    return x


def short_vectors_gram(gram, radius_sq, limit=100_000,
                       max_nodes=50_000_000):
    """All form values <= radius_sq over canonical nonzero sign pairs.

    radius_sq is exact (int or Fraction); the float search runs slightly
    wide and candidates are filtered by exact comparison. Returns a list
    of (coeffs, norm_sq) sorted by (norm_sq, coeffs). Raises BudgetError
    if the candidate count exceeds `limit` or the tree exceeds max_nodes.
    """
    n = len(gram)
    if n == 0:
        raise ParamError("form must have positive rank")
    if n > MAX_RANK:
        raise ParamError(f"rank {n} exceeds the enumeration limit {MAX_RANK}")
    radius_sq = Fraction(radius_sq)
    if radius_sq <= 0:
        return []
    if n > 1:
        pre = lll_transform(gram)
        u0, work = pre.u, pre.gram
    else:
        u0, work = None, gram
    if n == 1:
        out = []
        g = work[0][0]
        k = 1
        while g * k * k <= radius_sq:
            out.append(([k], g * k * k))
            k += 1
    else:
        mu, r = _float_gso(work)
        cands, _, truncated = _kernel.enumerate_gram(
            mu, r, float(radius_sq) * (1.0 + 1e-6), collect_limit=limit,
            shrink=False, max_nodes=max_nodes)
        if truncated:
            raise BudgetError(
                f"short-vector listing exceeded limit={limit} or "
                f"max_nodes={max_nodes}")
        out = []
        for coeffs, _ in cands:
            val = _form_value_exact(work, coeffs)
            if val <= radius_sq:
                out.append((list(coeffs), val))
    if u0 is not None:
        out = [(mat_vec(u0, x), v) for x, v in out]
    out = [(_canonical_sign(x), v) for x, v in out]
    out.sort(key=lambda it: (it[1], it[0]))
    return out


def svp_exact(basis, max_nodes=50_000_000):
    """Certified shortest nonzero vector of a basis.

    Returns (vector, coeffs, norm_sq): the ambient vector (Fractions), its
    integer coefficients, and its exact squared length.
    """
    coeffs, val, _ = shortest_vector_gram(basis.gram_int(),
                                          max_nodes=max_nodes)
    norm_sq = Fraction(val) * basis.scale * basis.scale
    return basis.apply_coords(coeffs), coeffs, norm_sq


def first_minimum_sq(basis, max_nodes=50_000_000):
    """Exact squared length of the shortest nonzero lattice vector."""
    return svp_exact(basis, max_nodes=max_nodes)[2]
