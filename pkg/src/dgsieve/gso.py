"""Gram-Schmidt data, size reduction, and projected blocks.

Everything is derived from the exact Gram matrix. Precision modes:
  "exact"   Fractions end to end;
  bits<=53  hardware doubles;
  bits>53   gmpy2.mpfr at that mantissa width.
Reduction drivers default to bits = 2n + 53.
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction

from .basis import Basis
from .errors import ParamError, RankError
from .intmath import round_half_up


@contextmanager
def mpfr_precision(bits: int):
    """Run gmpy2 arithmetic at the given mantissa width."""
    import gmpy2

    saved = gmpy2.get_context()
    gmpy2.set_context(gmpy2.context(precision=bits))
    try:
        yield gmpy2
    finally:
        gmpy2.set_context(saved)


def default_mantissa(rank: int) -> int:
    return 2 * rank + 53


class GSOData:
    """mu[i][j] (j < i) and squared orthogonalized norms, one arithmetic mode."""

    __slots__ = ("rank", "mode", "mu", "bstar_sq")

    def __init__(self, rank, mode, mu, bstar_sq):
        self.rank = rank
        self.mode = mode
        self.mu = mu
        self.bstar_sq = bstar_sq

    def mu_float(self):
        return [[float(x) for x in row] for row in self.mu]

    def bstar_sq_float(self):
        return [float(x) for x in self.bstar_sq]

    def max_bstar_sq(self):
        return max(self.bstar_sq) if self.rank else 0

    def min_bstar_sq(self):
        return min(self.bstar_sq) if self.rank else 0

    def det_sq(self):
        out = self.bstar_sq[0] if self.rank else 1
        for v in self.bstar_sq[1:]:
            out = out * v
        return out


def _gso_recurrence(g, n, mode):
    mu = [[0] * i for i in range(n)]
    r = [[0] * (i + 1) for i in range(n)]
    bstar_sq = [0] * n
    for i in range(n):
        for j in range(i):
            v = g[i][j]
            row_j = r[j]
            mu_i = mu[i]
            for t in range(j):
                v = v - mu_i[t] * row_j[t]
            r[i][j] = v
            if bstar_sq[j] == 0:
                raise RankError("zero orthogonalized norm (dependent columns)")
            mu[i][j] = v / bstar_sq[j]
        v = g[i][i]
        for t in range(i):
            v = v - mu[i][t] * r[i][t]
        r[i][i] = v
        bstar_sq[i] = v
        if mode == "exact" and v <= 0:
            raise RankError("Gram matrix is not positive definite")
    return GSOData(n, mode, mu, bstar_sq)


def gso_from_gram(gram, mode="exact") -> GSOData:
    """GSO recurrence on an exact Gram matrix, in the requested arithmetic."""
    n = len(gram)
    if mode == "exact":
        g = [[Fraction(x) for x in row] for row in gram]
        return _gso_recurrence(g, n, mode)
    if not isinstance(mode, int):
        raise ParamError(f"unknown precision mode {mode!r}")
    if mode < 10:
        raise ParamError("mantissa width too small")
    if mode <= 53:
        g = [[float(x) for x in row] for row in gram]
        return _gso_recurrence(g, n, mode)
    with mpfr_precision(mode) as gmpy2:
        g = [[gmpy2.mpfr(x.numerator) / gmpy2.mpfr(x.denominator)
              if isinstance(x, Fraction) else gmpy2.mpfr(x)
              for x in row] for row in gram]
        return _gso_recurrence(g, n, mode)


def gso_compute(basis: Basis, mode="exact") -> GSOData:
    return gso_from_gram(basis.gram(), mode)


def size_reduce(basis: Basis, mode="exact") -> Basis:
    """Make all |mu_{i,j}| <= 1/2 by integer column operations.

    Exact mode certifies the bound; float modes certify it up to rounding of
    mu and are meant for interior loops.
    """
    u = size_reduce_transform(basis.gram() if mode == "exact" else basis.gram_int(),
                              mode)
    return basis.transform(u)


def size_reduce_transform(gram, mode="exact"):
    """Unimodular U (as rows) such that gram of B @ U is size-reduced."""
    if isinstance(mode, int) and mode > 53:
        with mpfr_precision(mode):
            return _size_reduce_transform_inner(gram, mode)
    return _size_reduce_transform_inner(gram, mode)


def _size_reduce_transform_inner(gram, mode):
    n = len(gram)
    gso = gso_from_gram(gram, mode)
    mu = gso.mu
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for i in range(1, n):
        for j in range(i - 1, -1, -1):
            mij = mu[i][j]
            q = round_half_up(mij) if isinstance(mij, Fraction) else round(float(mij))
            if q == 0:
                continue
            # column op: b_i <- b_i - q b_j, tracked on u's columns
            for rrow in u:
                rrow[i] -= q * rrow[j]
            mu_i, mu_j = mu[i], mu[j]
            for t in range(j):
                mu_i[t] -= q * mu_j[t]
            mu_i[j] -= q
    return u


class ProjectedBlock:
    """Block B_[lo, hi) projected orthogonally to the first lo basis vectors.

    Represented by its exact rational Gram matrix; block algorithms return
    integer transforms that callers apply to the parent's columns lo..hi-1.
    """

    __slots__ = ("gram", "lo", "hi", "rank")

    def __init__(self, gram, lo, hi):
        self.gram = gram
        self.lo = lo
        self.hi = hi
        self.rank = hi - lo

    def gso(self, mode="exact") -> GSOData:
        return gso_from_gram(self.gram, mode)

    def det_sq(self) -> Fraction:
        return self.gso("exact").det_sq()


def project_block(basis_or_gso, lo: int, hi: int) -> ProjectedBlock:
    """Exact Gram of the projected block, from a Basis or an exact GSOData."""
    if isinstance(basis_or_gso, Basis):
        gso = gso_compute(basis_or_gso, "exact")
    else:
        gso = basis_or_gso
        if gso.mode != "exact":
            raise ParamError("projected blocks need exact GSO data")
    if not 0 <= lo < hi <= gso.rank:
        raise ParamError(f"bad block bounds [{lo}, {hi})")
    return ProjectedBlock(block_gram_from_gso(gso, lo, hi), lo, hi)


def block_gram_from_gso(gso: GSOData, lo: int, hi: int):
    """Gram of pi_lo applied to b_lo..b_{hi-1}: sum of mu-weighted r terms."""
    k = hi - lo
    mu, r = gso.mu, gso.bstar_sq
    out = [[0] * k for _ in range(k)]
    for a in range(k):
        for b in range(a + 1):
            u, v = lo + a, lo + b
            acc = 0
            for t in range(lo, v):
                acc = acc + mu[u][t] * mu[v][t] * r[t]
            # t = v term: mu[v][v] = 1
            acc = acc + (mu[u][v] if u != v else 1) * r[v]
            out[a][b] = acc
            out[b][a] = acc
    return out
