"""Fully recursive reduction: every orthogonalized vector is a certified
shortest vector of the lattice it projects into."""

from __future__ import annotations

from ..gso import block_gram_from_gso, gso_compute, size_reduce
from .enumerate import shortest_vector_gram
from .insert import insert_block_vector


def hkz_reduce(basis, max_nodes=50_000_000):
    """Return a basis where, for every i, the i-th orthogonalized squared
    norm equals the exact first minimum of the block projected past the
    first i columns, with size reduction applied at the end."""
    b = basis
    n = b.rank
    for i in range(n):
        gso = gso_compute(b, "exact")
        block = block_gram_from_gso(gso, i, n)
        coeffs, _, _ = shortest_vector_gram(block, max_nodes=max_nodes)
        b, _ = insert_block_vector(b, i, n, coeffs)
    return size_reduce(b, "exact")


def is_hkz_reduced(basis, max_nodes=50_000_000):
    """Exact check of the projected-minimum property for every index."""
    gso = gso_compute(basis, "exact")
    n = basis.rank
    for i in range(n):
        block = block_gram_from_gso(gso, i, n)
        _, lam_sq, _ = shortest_vector_gram(block, max_nodes=max_nodes)
        if gso.bstar_sq[i] != lam_sq:
            return False
    return True
