"""Smoothing widths: the s beyond which the lattice Gaussian looks flat.

The defining quantity is the dual lattice's nonzero mass at width 1/s,
which is strictly decreasing in s; the threshold where it crosses eps is
found by certified bisection. Also provided: the minimum of the threshold
over all sublattices, bounded from both sides by short-vector and
fully-reduced-prefix witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .basis import Basis, dual_reversed
from .errors import ParamError, SolverFailure
from .gaussmass import MASS_MAX_RANK, gaussian_mass
from .reduction import first_minimum_sq, hkz_reduce, lll_reduce


@dataclass
class SmoothingResult:
    s: float        # midpoint of the final bracket
    lo: float       # certified: dual nonzero mass at lo is > eps
    hi: float       # certified: dual nonzero mass at hi is < eps
    eps: float
    evaluations: int


def dual_nonzero_mass(basis, s, rel_tol=1e-9, abs_floor=0.0):
    """Mass of the dual lattice minus the origin, at width 1/s."""
    dual, _ = lll_reduce(dual_reversed(basis))
    return gaussian_mass(dual, 1 / Fraction(s), exclude_origin=True,
                         rel_tol=rel_tol, abs_floor=abs_floor)


def smoothing_param(basis, eps, rel_tol=1e-6, max_evals=200):
    """Certified bracket for the smoothing width at quality eps.

    Bisection on s; each comparison of the dual nonzero mass against eps
    is decided from a certified interval. eps must lie in (0, 1).
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ParamError("eps must lie in (0, 1)")
    if basis.rank == 0:
        raise ParamError("rank must be positive")
    if basis.rank > MASS_MAX_RANK:
        raise ParamError(f"rank {basis.rank} exceeds the mass enumeration "
                         f"cap {MASS_MAX_RANK}")
    dual, _ = lll_reduce(dual_reversed(basis))
    evals = 0

    def mass_above(s):
        nonlocal evals
        evals += 1
        est = gaussian_mass(dual, 1 / Fraction(s), exclude_origin=True,
                            rel_tol=1e-9, abs_floor=eps * 1e-9)
        return est.midpoint() >= eps

    # the pair +-w of a shortest dual vector alone already outweighs eps
    # at this width, giving a certified lower end without an evaluation
    lam_dual_sq = float(first_minimum_sq(dual))
    lo = math.sqrt(math.log(2.0 / eps) / math.pi / lam_dual_sq)
    if mass_above(lo):
        hi = lo * 2.0
        while mass_above(hi):
            lo = hi
            hi *= 2.0
            if evals > max_evals:
                raise SolverFailure("smoothing bracket search did not "
                                    "terminate")
    else:
        # the analytic lower end was already above the threshold width
        hi = lo
        lo = hi / 2.0
        while not mass_above(lo):
            hi = lo
            lo /= 2.0
            if evals > max_evals:
                raise SolverFailure("smoothing bracket search did not "
                                    "terminate")
    while hi - lo > rel_tol * lo:
        if evals > max_evals:
            raise SolverFailure("smoothing bisection exceeded its budget")
        mid = 0.5 * (lo + hi)
        if mass_above(mid):
            lo = mid
        else:
            hi = mid
    return SmoothingResult(0.5 * (lo + hi), lo, hi, eps, evals)


def eta_z(eps, rel_tol=1e-6):
    """Smoothing width of the integers."""
    return smoothing_param(Basis([[1]]), eps, rel_tol=rel_tol)


@dataclass
class SublatticeSmoothingBound:
    lower: float
    upper: float
    eps: float
    witness: str
    candidates: list = field(default_factory=list)


def min_sublattice_smoothing(basis, eps, rel_tol=1e-4):
    """Bounds on the minimum smoothing width over all sublattices.

    Lower: first minimum over sqrt(rank). Upper: the best witness among
    a shortest-vector line (width scales with the vector length) and the
    prefixes of a fully recursively reduced basis; prefixes of rank
    above the mass cap use the classical bound
    sqrt(ln(2k(1+1/eps))/pi) * max column length.
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ParamError("eps must lie in (0, 1)")
    n = basis.rank
    if n == 0:
        raise ParamError("rank must be positive")
    lam_sq = first_minimum_sq(basis)
    lower = math.sqrt(float(lam_sq) / n)
    candidates = []
    z_hi = eta_z(eps, rel_tol=rel_tol).hi
    candidates.append(("shortest-line", math.sqrt(float(lam_sq)) * z_hi))
    h = hkz_reduce(basis)
    gram_int = h.gram_int()
    scale_sq = h.scale * h.scale
    best = candidates[0][1]
    for k in range(1, n + 1):
        long_col = math.sqrt(max(float(gram_int[i][i] * scale_sq)
                                 for i in range(k)))
        bound = math.sqrt(math.log(2 * k * (1 + 1 / eps)) / math.pi)
        # a certified box-sum bisection only pays off when the classical
        # bound does not already lose to the running minimum
        if k <= MASS_MAX_RANK and bound * long_col < best:
            prefix = Basis(list(h.cols[:k]), scale=h.scale,
                           ambient=h.ambient)
            est = smoothing_param(prefix, eps, rel_tol=rel_tol)
            candidates.append((f"reduced-prefix-{k}", est.hi))
        else:
            candidates.append((f"prefix-bound-{k}", bound * long_col))
        best = min(best, candidates[-1][1])
    witness, upper = min(candidates, key=lambda it: it[1])
    return SublatticeSmoothingBound(lower, upper, eps, witness, candidates)
