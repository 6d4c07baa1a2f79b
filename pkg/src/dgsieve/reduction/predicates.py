"""Reducedness predicates measured exactly on orthogonalized data.

Quality targets here involve rational powers of a promise factor, so a
direct comparison would need irrational roots. Raising both sides of each
inequality to a suitable even power turns every check into a comparison of
exact rationals: callers hand in target_pow = T ** (2e) for the smallest
integer e that makes it rational (e = 1 for plain factors, e = k - 1 for
the head window target). Each check also reports the measured slack as a
float ratio, 1.0 being the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..basis import Basis
from ..errors import ParamError
from ..gso import block_gram_from_gso, gso_compute
from .enumerate import shortest_vector_gram


def _log2_fraction(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


def block_vol_sq(gso, lo: int, hi: int) -> Fraction:
    """Exact squared volume of the projected block [lo, hi)."""
    out = Fraction(1)
    for i in range(lo, hi):
        out *= Fraction(gso.bstar_sq[i])
    return out


def hsvp_check(gso, lo: int, hi: int, target_pow: Fraction, e: int):
    """Head shortness: bstar[lo] <= T * vol(block)^(1/d).

    Returns (ok, ratio) with ok decided exactly and ratio the measured
    slack in floats.
    """
    d = hi - lo
    head = Fraction(gso.bstar_sq[lo])
    vol = block_vol_sq(gso, lo, hi)
    ok = head ** (d * e) <= target_pow ** d * vol ** e
    log_ratio = 0.5 * _log2_fraction(head) \
        - _log2_fraction(target_pow) / (2 * e) \
        - _log2_fraction(vol) / (2 * d)
    return ok, 2.0 ** log_ratio


def dhsvp_check(gso, lo: int, hi: int, target_pow: Fraction, e: int):
    """Tail fullness: vol(block)^(1/d) <= T * bstar[hi-1]."""
    d = hi - lo
    last = Fraction(gso.bstar_sq[hi - 1])
    vol = block_vol_sq(gso, lo, hi)
    ok = vol ** e <= target_pow ** d * last ** (d * e)
    log_ratio = _log2_fraction(vol) / (2 * d) \
        - _log2_fraction(target_pow) / (2 * e) \
        - 0.5 * _log2_fraction(last)
    return ok, 2.0 ** log_ratio


def svp_check(gso, lo: int, hi: int, delta_sq: Fraction):
    """Head shortness against the block's exact first minimum."""
    block = block_gram_from_gso(gso, lo, hi)
    _, lam_sq, _ = shortest_vector_gram(block)
    head = Fraction(gso.bstar_sq[lo])
    allowed = Fraction(delta_sq) * lam_sq
    ok = head <= allowed
    return ok, math.sqrt(2.0 ** _log2_fraction(head / allowed))


def twin_gap_check(gso, lo: int, hi: int, target_pow: Fraction, e: int):
    """Decay across a twin block of size d+1: the head orthogonal norm is
    within T^(2d/(d-1)) of the tail one. A consequence of the two block
    conditions, measured directly."""
    d = hi - lo - 1
    if d < 2:
        raise ParamError("twin blocks need size at least 3")
    head = Fraction(gso.bstar_sq[lo])
    tail = Fraction(gso.bstar_sq[lo + d])
    ok = head ** ((d - 1) * e) <= target_pow ** (2 * d) * tail ** ((d - 1) * e)
    log_ratio = 0.5 * (_log2_fraction(head) - _log2_fraction(tail)) \
        - d / ((d - 1) * e) * _log2_fraction(target_pow)
    return ok, 2.0 ** log_ratio


@dataclass(frozen=True)
class PredicateCheck:
    label: str
    ok: bool
    measured: float


@dataclass(frozen=True)
class SlideVerdict:
    ok: bool
    checks: tuple
    p: int
    q: int

    def failing(self):
        return [c for c in self.checks if not c.ok]


def _split(n: int, k: int, ell: int):
    if k < 2 or ell < 2:
        raise ParamError("block size and tail rank must be at least 2")
    body = n - ell
    if body < k:
        raise ParamError(f"rank {n} cannot host block size {k} plus tail {ell}")
    return body // k, body % k


def is_slide_reduced(basis: Basis, k: int, ell: int, delta_h_sq=None,
                     delta_s_sq=Fraction(1), eps=Fraction(0)) -> SlideVerdict:
    """Full constraint report for the twin-block layout.

    delta_h_sq is the squared promise of the interior oracle (defaults to
    k, the exact-search promise at rank k) and delta_s_sq the squared
    promise of the tail oracle. eps widens every interior target by the
    factor (1 + eps), matching what the reduction driver guarantees.
    """
    n = basis.rank
    p, q = _split(n, k, ell)
    dh_sq = Fraction(k) if delta_h_sq is None else Fraction(delta_h_sq)
    eps = Fraction(eps)
    eff_sq = (1 + eps) ** 2 * dh_sq

    gso = gso_compute(basis, "exact")
    checks = []

    worst = Fraction(0)
    for i in range(1, n):
        for j in range(i):
            m = abs(Fraction(gso.mu[i][j]))
            if m > worst:
                worst = m
    checks.append(PredicateCheck("size-reduced", worst <= Fraction(1, 2),
                                 float(worst * 2)))

    # head window of rank k+q inside its twin block of size k+q+1
    head_pow = eff_sq ** (k + q - 1)
    ok, ratio = hsvp_check(gso, 0, k + q, head_pow, k - 1)
    checks.append(PredicateCheck("head-hsvp", ok, ratio))
    ok, ratio = dhsvp_check(gso, 1, k + q + 1, head_pow, k - 1)
    checks.append(PredicateCheck("head-dhsvp", ok, ratio))

    # interior twin blocks of size k+1
    for i in range(1, p):
        lo = i * k + q
        ok, ratio = hsvp_check(gso, lo, lo + k, eff_sq, 1)
        checks.append(PredicateCheck(f"twin{i}-hsvp", ok, ratio))
        ok, ratio = dhsvp_check(gso, lo + 1, lo + k + 1, eff_sq, 1)
        checks.append(PredicateCheck(f"twin{i}-dhsvp", ok, ratio))

    ok, ratio = svp_check(gso, p * k + q, n, Fraction(delta_s_sq))
    checks.append(PredicateCheck("tail-svp", ok, ratio))

    return SlideVerdict(ok=all(c.ok for c in checks), checks=tuple(checks),
                        p=p, q=q)
