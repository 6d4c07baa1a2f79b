"""Shared helpers for the test suite: seeded generators for random inputs."""

import numpy as np

from dgsieve.basis import Basis


def rng_for(seed):
    return np.random.default_rng(seed)


def random_unimodular(n, rng, steps=30, bound=3):
    """Random unimodular integer matrix built from elementary column ops."""
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        q = int(rng.integers(-bound, bound + 1))
        for row in u:
            row[i] += q * row[j]
    for _ in range(n):
        i, j = rng.integers(0, n, size=2)
        if i != j and rng.integers(0, 2):
            for row in u:
                row[i], row[j] = row[j], row[i]
    if rng.integers(0, 2):
        for row in u:
            row[0] = -row[0]
    return u


def random_basis(n, rng, entry_bound=20, ambient=None, denom_log2=0):
    """Random full-rank integer basis with entries in [-entry_bound, entry_bound]."""
    m = ambient or n
    while True:
        cols = [[int(rng.integers(-entry_bound, entry_bound + 1)) for _ in range(m)]
                for _ in range(n)]
        try:
            return Basis.from_int_columns(cols, denom_log2, ambient=m)
        except Exception:
            continue


def scrambled_identity(n, rng, steps=40, bound=2):
    u = random_unimodular(n, rng, steps=steps, bound=bound)
    return Basis(u)  # columns of a unimodular matrix: a basis of Z^n
