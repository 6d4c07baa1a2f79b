"""Certified Gaussian mass sums over low-rank lattices.

The mass sum_{v in L} exp(-pi ||v - t||^2 / s^2) is computed by box
enumeration in orthogonalized coordinates. The box is grown until the
certified bound on everything outside it is small enough, so the result
is a genuine interval [value, value + tail], not a heuristic estimate.
Rank is capped at 8: the box has exponential volume in the rank and this
code is meant for blocks, duals of blocks, and test lattices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .basis import dual_reversed
from .errors import BudgetError, ParamError
from .gso import gso_from_gram
from .intmath import solve_exact

MASS_MAX_RANK = 8


@dataclass
class MassEstimate:
    value: float   # enumerated sum; a lower bound on the true mass
    tail: float    # certified bound on the mass outside the box
    terms: int     # lattice points enumerated

    @property
    def lower(self) -> float:
        return self.value

    @property
    def upper(self) -> float:
        return self.value + self.tail

    def midpoint(self) -> float:
        return self.value + 0.5 * self.tail


def _theta_bound(a: float) -> float:
    """sup over offsets d of sum_{z in Z+d} exp(-a z^2).

    Two valid bounds: the offset-0 sum dominated by a geometric series,
    and max term plus the full integral. Take the smaller.
    """
    q = math.exp(-a)
    geom = math.inf if q >= 1.0 else 1.0 + 2.0 * q / (1.0 - q)
    integral = 1.0 + math.sqrt(math.pi / a)
    return min(geom, integral)


def _tail_1d(a: float, k: int) -> float:
    """sup over offsets of sum over |z| > k of exp(-a z^2), z in Z+d."""
    top = 2.0 * math.exp(-a * k * k)
    denom = 1.0 - math.exp(-2.0 * a * k)
    return math.inf if denom <= 0.0 else top / denom


def _initial_k(a: float) -> int:
    k = 1
    while _tail_1d(a, k) > 1e-6 and k < 10_000:
        k += 1 + k // 2
    return k


def _box_sum(mu, r, s, center, k_by_level, exclude_origin, max_terms):
    """Enumerate the box and sum the Gaussian weights.

    mu/r: orthogonalization of the coefficient Gram matrix (floats),
    center: real coefficient vector of the shift, k_by_level: per-level
    half-widths in orthogonalized units. Returns (fsum, terms).
    """
    n = len(r)
    inv_s2 = math.pi / (s * s)
    values = []
    x = [0] * n
    terms = 0

    def descend(t, partial):
        nonlocal terms
        m = center[t]
        for u in range(t + 1, n):
            m -= mu[u][t] * (x[u] - center[u])
        half = k_by_level[t]
        lo = math.ceil(m - half)
        hi = math.floor(m + half)
        for xt in range(lo, hi + 1):
            y = xt - m
            cost = partial + r[t] * y * y
            x[t] = xt
            if t == 0:
                terms += 1
                if terms > max_terms:
                    raise BudgetError(
                        f"mass enumeration exceeded {max_terms} points")
                if exclude_origin and all(v == 0 for v in x):
                    continue
                values.append(math.exp(-inv_s2 * cost))
            else:
                descend(t - 1, cost)
        x[t] = 0

    descend(n - 1, 0.0)
    return math.fsum(values), terms


def mass_over_gram(gram, s, center=None, rel_tol=1e-9, abs_floor=0.0,
                   exclude_origin=False, max_terms=2_000_000):
    """Certified mass of the form's lattice of integer coefficient vectors.

    gram: exact positive definite matrix (int/Fraction entries);
    center: real coefficient shift (defaults to 0). The sum runs over
    x in Z^n of exp(-pi (x-c)^T G (x-c) / s^2); the certificate stops when
    tail <= max((exp(rel_tol)-1) * value, abs_floor).
    """
    n = len(gram)
    if n > MASS_MAX_RANK:
        raise ParamError(f"rank {n} exceeds the mass enumeration cap "
                         f"{MASS_MAX_RANK}")
    s = float(s)
    if not s > 0.0:
        raise ParamError("width s must be positive")
    if n == 0:
        if exclude_origin:
            return MassEstimate(0.0, 0.0, 0)
        return MassEstimate(1.0, 0.0, 1)
    if center is None:
        center = [0.0] * n
    else:
        center = [float(v) for v in center]
        if len(center) != n:
            raise ParamError("center length does not match rank")
    if exclude_origin and any(v != 0.0 for v in center):
        raise ParamError("origin exclusion requires a zero center")
    gso = gso_from_gram([[Fraction(v) for v in row] for row in gram],
                        "exact")
    mu = gso.mu_float()
    r = gso.bstar_sq_float()
    a = [math.pi * rt / (s * s) for rt in r]
    theta = [_theta_bound(at) for at in a]
    # half-widths are in y units: |x_t - level center| <= K_t
    k_lv = [_initial_k(at) for at in a]
    theta_prod = math.prod(theta)
    for _ in range(80):
        # union bound: first level whose coordinate leaves the box
        tail = 0.0
        for t in range(n):
            others = theta_prod / theta[t]
            tail += _tail_1d(a[t], k_lv[t]) * others
        value, terms = _box_sum(mu, r, s, center, k_lv, exclude_origin,
                                max_terms)
        if tail <= max((math.exp(rel_tol) - 1.0) * value, abs_floor):
            return MassEstimate(value, tail, terms)
        k_lv = [k + 1 + k // 2 for k in k_lv]
    raise BudgetError("mass certificate did not converge")


def gaussian_mass(basis, s, center=None, rel_tol=1e-9, abs_floor=0.0,
                  exclude_origin=False, max_terms=2_000_000):
    """Certified Gaussian mass of a lattice given by a basis.

    center is an ambient rational vector; its component orthogonal to the
    lattice span factors out of the sum exactly.
    """
    n = basis.rank
    if n > MASS_MAX_RANK:
        raise ParamError(f"rank {n} exceeds the mass enumeration cap "
                         f"{MASS_MAX_RANK}")
    s_f = float(s)
    if not s_f > 0.0:
        raise ParamError("width s must be positive")
    perp_factor = 1.0
    coeff_center = None
    if center is not None:
        center = [Fraction(v) for v in center]
        if len(center) != basis.ambient:
            raise ParamError("center length does not match the ambient "
                             "dimension")
        if n == 0:
            dist_sq = sum(v * v for v in center)
            val = math.exp(-math.pi * float(dist_sq) / (s_f * s_f))
            if exclude_origin:
                raise ParamError("origin exclusion requires a zero center")
            return MassEstimate(val, 0.0, 1)
        cols = basis.real_columns()
        gram = basis.gram()
        rhs = [sum(cols[j][i] * center[i] for i in range(basis.ambient))
               for j in range(n)]
        c = solve_exact(gram, rhs)
        span_sq = sum(c[i] * rhs[i] for i in range(n))
        perp_sq = sum(v * v for v in center) - span_sq
        if perp_sq < 0:
            perp_sq = Fraction(0)
        perp_factor = math.exp(-math.pi * float(perp_sq) / (s_f * s_f))
        if exclude_origin and any(v != 0 for v in c):
            raise ParamError("origin exclusion requires a zero center")
        coeff_center = [float(v) for v in c]
    if n == 0:
        if exclude_origin:
            return MassEstimate(0.0, 0.0, 0)
        return MassEstimate(1.0, 0.0, 1)
    est = mass_over_gram(basis.gram(), s_f, center=coeff_center,
                         rel_tol=rel_tol, abs_floor=abs_floor,
                         exclude_origin=exclude_origin, max_terms=max_terms)
    if perp_factor != 1.0:
        return MassEstimate(est.value * perp_factor, est.tail * perp_factor,
                            est.terms)
    return est


def poisson_identity_sides(basis, s, rel_tol=1e-8):
    """Both sides of the duality identity for the total mass.

    Returns ((lo, hi), (lo, hi)): the direct mass of the lattice at width
    s, and s^rank / covolume times the dual lattice's mass at width 1/s.
    The two intervals must agree for a correct mass routine.
    """
    s = Fraction(s)
    left = gaussian_mass(basis, s, rel_tol=rel_tol)
    dual = dual_reversed(basis)
    right = gaussian_mass(dual, 1 / s, rel_tol=rel_tol)
    covol = math.sqrt(float(basis.det_sq()))
    factor = float(s) ** basis.rank / covol
    return ((left.lower, left.upper),
            (right.lower * factor, right.upper * factor))
