"""Shortest-vector oracles for projected blocks, and one-block reduction.

An oracle is a metered black box: handed a positive definite form, it
returns integer coefficients of a vector whose length meets a stated
promise. The enumeration backend is exact and certified; the sieve
backend runs the randomized sampling pipeline on an integer embedding of
the projected block; a callable backend lets tests inject stubs. Every
query bumps a counter so drivers can audit call counts against budgets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .. import _kernel
from ..basis import Basis, dual_reversed
from ..errors import BudgetError, ParamError, ScaleError, SolverFailure
from ..gso import block_gram_from_gso, gso_compute, size_reduce_transform
from ..intmath import (bareiss_det, fraction_matrix_inverse, identity_matrix,
                       mat_mul, solve_exact, unimodular_completion)
from .enumerate import MAX_RANK, shortest_vector_gram
from .insert import insert_transform, primal_from_dual_transform, primitive_part
from .lll import lll_transform

_MODES = ("svp", "hsvp", "dsvp", "dhsvp")


def _sieve_svp_gamma(rank: int) -> float:
    # just above the driver's admission floor
    return 1.25 * math.sqrt(rank * max(math.log2(rank) if rank > 1 else 1.0, 1.0))


def _sieve_hsvp_gamma(rank: int) -> float:
    lg = max(math.log2(rank) if rank > 1 else 1.0, 1.0)
    return 1.25 * math.sqrt(rank * lg ** 3)


class OracleSpec:
    """Approximate shortest-vector solver with a promise and a call meter.

    kind      "svp" (length against the first minimum) or "hsvp" (length
              against the determinant root)
    backend   "enum" for certified enumeration, "sieve" for the randomized
              pipeline, or a callable mapping a Gram matrix to coefficients
    delta     promised approximation factor; None picks the backend default
              (1 for exact search used as SVP, sqrt(rank) used as HSVP)
    max_rank  largest block rank the oracle accepts; beyond it, ScaleError
    """

    def __init__(self, kind="svp", backend="enum", max_rank=MAX_RANK,
                 delta=None, seed=0):
        if kind not in ("svp", "hsvp"):
            raise ParamError(f"unknown oracle kind {kind!r}")
        if backend not in ("enum", "sieve") and not callable(backend):
            raise ParamError(f"unknown oracle backend {backend!r}")
        if callable(backend) and delta is None:
            raise ParamError("a callable backend needs an explicit delta")
        if delta is not None and delta < 1:
            raise ParamError("promise factor must be at least 1")
        self.kind = kind
        self.backend = backend
        self.max_rank = int(max_rank)
        self.delta = None if delta is None else float(delta)
        self.seed = int(seed)
        self.calls = 0

    def delta_for(self, rank: int) -> float:
        """Promised factor when queried on a block of the given rank."""
        if self.delta is not None:
            return self.delta
        if self.backend == "enum":
            return 1.0 if self.kind == "svp" else math.sqrt(rank)
        if self.kind == "svp":
            return _sieve_svp_gamma(rank)
        return _sieve_hsvp_gamma(rank)

    def delta_sq_pow(self, rank: int, power: int) -> Fraction:
        """delta ** (2 * power) as an exact rational, for threshold checks."""
        if self.delta is not None:
            return Fraction(self.delta) ** (2 * power)
        if self.backend == "enum" and self.kind == "hsvp":
            return Fraction(rank) ** power
        return Fraction(self.delta_for(rank)) ** (2 * power)

    def _admit(self, rank: int) -> None:
        if rank < 1:
            raise ParamError("oracle queried on an empty block")
        if rank > self.max_rank:
            raise ScaleError(
                f"block rank {rank} exceeds the oracle limit {self.max_rank}")

    def shortest_from_gram(self, gram) -> list[int]:
        """Coefficients of an oracle-quality vector of the exact form."""
        self._admit(len(gram))
        self.calls += 1
        if self.backend == "enum":
            coeffs, _, _ = shortest_vector_gram(gram)
            return list(coeffs)
        if callable(self.backend):
            out = [int(v) for v in self.backend(gram)]
            if len(out) != len(gram) or not any(out):
                raise SolverFailure("callable oracle returned a bad vector")
            return out
        raise ParamError("the sieve backend needs an embedded block basis")

    def shortest_from_floats(self, mu, r) -> list[int]:
        """Fast query against orthogonalized data in doubles.

        mu holds the lower-triangular coefficient rows of the block and r
        its squared orthogonal norms. Enumeration backend only; the caller
        owns the precision story.
        """
        self._admit(len(r))
        if self.backend != "enum":
            raise ParamError("float-path queries need the enumeration backend")
        self.calls += 1
        n = len(r)
        if n == 1:
            return [1]
        # the attainable diagonal bounds the search radius
        radius = None
        for i in range(n):
            di = r[i] + sum(mu[i][j] * mu[i][j] * r[j] for j in range(i))
            if radius is None or di < radius:
                radius = di
        cands, _, truncated = _kernel.enumerate_gram(
            mu, r, radius * (1.0 + 1e-6), collect_limit=1000, shrink=True)
        if truncated:
            raise BudgetError("block enumeration exceeded its node budget")
        best = min(cands, key=lambda it: (it[1], list(it[0])))
        return list(best[0])

    def shortest_from_basis(self, block: Basis) -> list[int]:
        """Query on an actual lattice basis (the sieve backend needs one)."""
        self._admit(block.rank)
        if self.backend != "sieve":
            return self.shortest_from_gram(block.gram_int())
        self.calls += 1
        from ..sieve import hsvp_approx, svp_approx

        run_seed = self.seed * 1000003 + self.calls
        gamma = self.delta_for(block.rank)
        if self.kind == "svp":
            out = svp_approx(block, gamma, seed=run_seed)
        else:
            out = hsvp_approx(block, gamma, seed=run_seed)
        return list(out.coeffs)


def projected_block_basis(basis: Basis, lo: int, hi: int) -> Basis:
    """The projected block as an honest integer-column lattice.

    Projecting columns lo..hi-1 orthogonally to the first lo columns gives
    rational vectors whose denominators divide the prefix Gram determinant
    D, so D times the projection has integer columns. The returned basis
    spans D * pi(block) up to the stored scale; uniform scaling preserves
    every length ratio the oracles compare.
    """
    n = basis.rank
    if not (0 <= lo < hi <= n):
        raise ParamError(f"bad block bounds [{lo}, {hi}) for rank {n}")
    if lo == 0:
        return Basis([list(c) for c in basis.cols[:hi]], basis.scale)
    gram = basis.gram_int()
    gp = [row[:lo] for row in gram[:lo]]
    det = bareiss_det(gp)
    cols = []
    for t in range(lo, hi):
        rhs = [gram[s][t] for s in range(lo)]
        y = solve_exact(gp, rhs)
        w = []
        for s in range(lo):
            ys = y[s] * det
            if ys.denominator != 1:
                raise SolverFailure(
                    "projection denominator escaped the prefix determinant")
            w.append(int(ys))
        col = [det * basis.cols[t][i]
               - sum(w[s] * basis.cols[s][i] for s in range(lo))
               for i in range(basis.ambient)]
        cols.append(col)
    return Basis(cols, basis.scale / det)


def reversed_dual_gram(gram):
    """Gram matrix of the reversed dual of the lattice with this Gram."""
    ginv = fraction_matrix_inverse(gram)
    d = len(gram)
    return [[ginv[d - 1 - i][d - 1 - j] for j in range(d)] for i in range(d)]


@dataclass(frozen=True)
class BlockStep:
    """Outcome of one oracle visit to a projected block."""

    basis: Basis
    transform: tuple
    changed: bool
    mode: str
    bstar_growth: float


def _embed_block(n, lo, block_u):
    u = identity_matrix(n)
    k = len(block_u)
    for a in range(k):
        for b in range(k):
            u[lo + a][lo + b] = block_u[a][b]
    return u


def _is_identity(u):
    return all(u[i][j] == (1 if i == j else 0)
               for i in range(len(u)) for j in range(len(u)))


def block_reduce(basis: Basis, lo: int, size: int, mode: str,
                 oracle: OracleSpec) -> BlockStep:
    """One oracle visit to the projected block [lo, lo+size).

    Primal modes ("svp", "hsvp") insert an oracle-quality vector as the
    block's first column; dual modes ("dsvp", "dhsvp") shorten the first
    vector of the block's reversed dual, which pushes the block's last
    orthogonal norm up. The output spans the same lattice, is size-reduced,
    and keeps orthogonal norms outside the block untouched. Inside the
    block the worst-case growth envelope 2**size is enforced.
    """
    mode = mode.lower()
    if mode not in _MODES:
        raise ParamError(f"unknown block mode {mode!r}")
    n = basis.rank
    hi = lo + size
    if not (0 <= lo < hi <= n):
        raise ParamError(f"bad block bounds [{lo}, {hi}) for rank {n}")
    gso = gso_compute(basis, "exact")
    before_max = max(gso.bstar_sq[lo:hi])
    block_gram = block_gram_from_gso(gso, lo, hi)

    if mode in ("svp", "hsvp"):
        if oracle.backend == "sieve":
            coeffs = oracle.shortest_from_basis(
                projected_block_basis(basis, lo, hi))
        else:
            coeffs = oracle.shortest_from_gram(block_gram)
        u = insert_transform(n, lo, hi, coeffs)
    else:
        if oracle.backend == "sieve":
            emb = dual_reversed(projected_block_basis(basis, lo, hi))
            dual_coeffs = oracle.shortest_from_basis(emb)
        else:
            dual_coeffs = oracle.shortest_from_gram(
                reversed_dual_gram(block_gram))
        ud = unimodular_completion(primitive_part(dual_coeffs))
        u = _embed_block(n, lo, primal_from_dual_transform(ud))

    work = basis.transform(u) if not _is_identity(u) else basis
    # clean the block up; swaps here only improve the ends the mode cares
    # about, and never raise the block's largest orthogonal norm
    gso_mid = gso_compute(work, "exact")
    pre = lll_transform(block_gram_from_gso(gso_mid, lo, hi))
    u2 = _embed_block(n, lo, pre.u)
    if not _is_identity(u2):
        work = work.transform(u2)
    u3 = size_reduce_transform(work.gram(), "exact")
    out = work.transform(u3)
    total = mat_mul(mat_mul(u, u2), u3)
    changed = not _is_identity(total)

    gso_after = gso_compute(out, "exact")
    after_max = max(gso_after.bstar_sq[lo:hi])
    if after_max > before_max * (4 ** size):
        raise SolverFailure("block step grew orthogonal norms past the "
                            f"2^{size} envelope")
    growth = math.sqrt(float(Fraction(after_max) / Fraction(before_max)))
    return BlockStep(out, tuple(tuple(r) for r in total), changed, mode, growth)
