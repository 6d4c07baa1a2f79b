"""Randomized rounding over a basis: discrete Gaussian coefficient draws.

Coordinates are drawn back to front; each one is an integer Gaussian
centered at the residual of the previous choices, with width s divided by
the orthogonalized norm. Above the safe width threshold the output
distribution is within negligible distance of the lattice Gaussian; the
threshold check can be disabled for experiments that probe the failure
regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .errors import ParamError
from .gso import gso_compute

TRUNCATION_WIDTHS = 12.0   # matches the kernel's 1-d support cutoff


def min_safe_width(gso) -> float:
    """Smallest width with a proven negligible sampling error.

    sqrt(10 log2 n) times the largest orthogonalized norm; n = 1 needs no
    headroom beyond the norm itself.
    """
    n = gso.rank
    factor = math.sqrt(10.0 * math.log2(n)) if n > 1 else 1.0
    return factor * math.sqrt(gso.max_bstar_sq())


def klein_sample(basis, s, rng, count=1, center_coeffs=None,
                 enforce_width=True, gso=None):
    """Draw `count` integer coefficient vectors; rows index draws.

    center_coeffs: real coefficients of the target point (default 0).
    The generator is consumed coordinate by coordinate, last coordinate
    first, one uniform batch per coordinate.
    """
    if count < 0:
        raise ParamError("count must be nonnegative")
    n = basis.rank
    if n == 0:
        raise ParamError("rank must be positive")
    s = float(s)
    if not s > 0.0:
        raise ParamError("width s must be positive")
    if gso is None:
        gso = gso_compute(basis, "exact")
    mu = gso.mu_float()
    r = gso.bstar_sq_float()
    if enforce_width:
        floor = min_safe_width(gso)
        if s < floor * (1.0 - 1e-12):
            raise ParamError(
                f"width {s:.6g} is below the safe threshold {floor:.6g}; "
                "pass enforce_width=False to sample anyway")
    if center_coeffs is None:
        center = np.zeros(n)
    else:
        center = np.asarray([float(v) for v in center_coeffs])
        if center.shape != (n,):
            raise ParamError("center length does not match rank")
    out = np.zeros((count, n), dtype=np.int64)
    if count == 0:
        return out
    resid = out.astype(np.float64) - center[None, :]
    for i in range(n - 1, -1, -1):
        m = np.full(count, center[i])
        for u in range(i + 1, n):
            mui = mu[u][i]
            if mui:
                m -= mui * resid[:, u]
        sigma = s / math.sqrt(r[i])
        draws = _kernel.sample_gaussian_1d_batch(m, sigma, rng.random(count))
        out[:, i] = draws
        resid[:, i] = draws - center[i]
    return out


def coeff_norms_sq(basis, coeffs):
    """Squared lengths of coefficient rows, in floating point."""
    g = np.array([[float(v) for v in row] for row in basis.gram()])
    c = np.asarray(coeffs, dtype=np.float64)
    return np.einsum("ij,jk,ik->i", c, g, c)


# ---------------------------------------------------------- distributions


def gaussian_probs_z(s, center=0.0, radius=None):
    """Reference probabilities of the integer Gaussian, as {k: p}.

    Normalized over a window wide enough that the truncated mass is below
    1e-15 of the total.
    """
    s = float(s)
    if radius is None:
        radius = int(math.ceil(7.0 * s + abs(center))) + 2
    ks = range(int(math.floor(center)) - radius,
               int(math.floor(center)) + radius + 1)
    w = {k: math.exp(-math.pi * (k - center) ** 2 / (s * s)) for k in ks}
    total = math.fsum(w.values())
    return {k: v / total for k, v in w.items()}


def product_probs(prob_dicts):
    """Product distribution over tuples from per-coordinate tables."""
    out = {(): 1.0}
    for probs in prob_dicts:
        nxt = {}
        for prefix, pp in out.items():
            for k, p in probs.items():
                nxt[prefix + (k,)] = pp * p
        out = nxt
    return out


def empirical_tv(samples, ref_probs):
    """Total variation between empirical draws and a reference table.

    samples: iterable of tuples (or a 2-d array); ref_probs: {tuple: p}.
    Mass the reference table does not cover is charged in full, so the
    result is an upper bound on the true distance to the full reference.
    """
    counts = {}
    n = 0
    for row in samples:
        key = tuple(int(v) for v in row)
        counts[key] = counts.get(key, 0) + 1
        n += 1
    if n == 0:
        raise ParamError("no samples")
    acc = 0.0
    for key, p in ref_probs.items():
        acc += abs(counts.get(key, 0) / n - p)
    stray = sum(c for key, c in counts.items() if key not in ref_probs)
    acc += stray / n
    tail = max(0.0, 1.0 - math.fsum(ref_probs.values()))
    return 0.5 * acc + 0.5 * tail


@dataclass
class PointCheck:
    point: tuple
    p: float          # reference probability
    p_hat: float      # empirical frequency
    log_ratio: float  # ln(p_hat / p); +-inf when one side is zero
    conf: float       # binomial half-width of the log ratio estimate


def similarity_report(samples, ref_probs, min_expected=100.0, z=5.0):
    """Pointwise multiplicative comparison against a reference table.

    Only points whose expected count is at least min_expected are scored;
    conf approximates z standard deviations of ln(p_hat/p) under the
    reference. The caller decides what maximum |log_ratio| - conf means.
    """
    counts = {}
    n = 0
    for row in samples:
        key = tuple(int(v) for v in row)
        counts[key] = counts.get(key, 0) + 1
        n += 1
    if n == 0:
        raise ParamError("no samples")
    checks = []
    for key, p in sorted(ref_probs.items()):
        if p * n < min_expected:
            continue
        c = counts.get(key, 0)
        p_hat = c / n
        if p_hat == 0.0:
            ratio = -math.inf
        else:
            ratio = math.log(p_hat / p)
        conf = z * math.sqrt((1.0 - p) / (p * n))
        checks.append(PointCheck(key, p, p_hat, ratio, conf))
    return checks
