"""Pure Python/numpy fallback implementations of the hot kernels.

Contract-identical to the compiled module in `_native.pyx`: same candidate
ordering for enumeration, same pairing output, same sampler support and CDF
walk. Integer results are bit-identical across backends; float payloads may
differ in the last ulp.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"


def enumerate_gram(mu, r, radius_sq, collect_limit=1000, shrink=True,
                   max_nodes=50_000_000):
    """Depth-first search for short vectors of a quadratic form.

    mu:  lower-triangular coefficient rows (list of lists, floats)
    r:   squared orthogonalized norms (list of floats, all > 0)
    radius_sq: initial squared search radius (float)
    shrink: if True, tighten the radius to each new record (shortest-vector
            search); if False, keep it fixed and collect everything inside.
    Returns (candidates, nodes, truncated): candidates are
    (coeff tuple, float squared norm) in discovery order; with shrink the
    last entry is the float-best. The x/-x symmetry is halved by forcing
    the highest nonzero coefficient positive. Candidates within a 1e-9
    relative margin of the running bound are kept so an exact re-check can
    pick the true minimum afterwards.
    """
    n = len(r)
    if n == 0:
        return [], 0, False
    for rt in r:
        if not rt > 0.0:
            raise ValueError("quadratic form must be positive definite")
    fudge = 1.0 + 1e-9
    bound = radius_sq * fudge
    x = [0] * n
    c = [0.0] * n
    cost = [0.0] * (n + 1)
    cnt = [0] * n        # zigzag step count per level
    base = [0] * n       # first (nearest) candidate per level
    side = [True] * n    # True: first zigzag move is +1
    za = [False] * n     # all coefficients above this level are zero
    out = []
    nodes = 0
    truncated = False
    t = n - 1
    c[t] = 0.0
    base[t] = 0
    side[t] = True
    cnt[t] = 0
    x[t] = 0
    za[t] = True
    while True:
        nodes += 1
        if nodes > max_nodes:
            truncated = True
            break
        d = x[t] - c[t]
        cost[t] = cost[t + 1] + r[t] * d * d
        if cost[t] <= bound:
            if t > 0:
                t -= 1
                acc = 0.0
                zero = True
                for u in range(t + 1, n):
                    xu = x[u]
                    if xu:
                        acc -= mu[u][t] * xu
                        zero = False
                c[t] = acc
                b = math.floor(acc + 0.5)
                base[t] = b
                side[t] = b <= acc
                cnt[t] = 0
                x[t] = b
                za[t] = zero
                continue
            if cost[0] > 0.0:
                out.append((tuple(x), cost[0]))
                if len(out) > collect_limit:
                    if not shrink:
                        truncated = True
                        break
                    del out[0]
                if shrink and cost[0] * fudge < bound:
                    bound = cost[0] * fudge
            # fall through: advance level 0
        else:
            # zigzag distances never decrease, so the level is exhausted
            t += 1
            if t == n:
                break
        if za[t]:
            x[t] += 1
        else:
            cnt[t] += 1
            j = cnt[t]
            k = (j + 1) // 2
            if (j % 2 == 1) == side[t]:
                x[t] = base[t] + k
            else:
                x[t] = base[t] - k
    return out, nodes, truncated


def sample_gaussian_1d_batch(mus, sigma, u):
    """Inverse-CDF draws from the integers with Gaussian weights.

    mus: centers (float array, shape (m,)); sigma: common width;
    u: uniforms in [0,1), shape (m,). Support is truncated to
    |z - mu| <= 12 sigma; if that window underflows entirely, the nearest
    integer is returned. Returns an int64 array of z values.
    """
    mus = np.asarray(mus, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    m = mus.shape[0]
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    sigma = float(sigma)
    w = 12.0 * sigma
    half = int(math.floor(w)) + 1
    base = np.floor(mus + 0.5).astype(np.int64)
    out = np.empty(m, dtype=np.int64)
    window = 2 * half + 1
    # chunk the (rows x window) weight table to bound memory
    chunk = max(1, 10_000_000 // window)
    offs = np.arange(-half, half + 1, dtype=np.int64)
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        z = base[lo:hi, None] + offs[None, :]
        dist = z.astype(np.float64) - mus[lo:hi, None]
        weights = np.exp((-math.pi / (sigma * sigma)) * dist * dist)
        weights[np.abs(dist) > w] = 0.0
        cdf = np.cumsum(weights, axis=1)
        total = cdf[:, -1]
        target = u[lo:hi] * total
        idx = (cdf <= target[:, None]).sum(axis=1)
        idx = np.minimum(idx, window - 1)
        picked = z[np.arange(hi - lo), idx]
        dead = total <= 0.0
        if np.any(dead):
            picked = np.where(dead, base[lo:hi], picked)
        out[lo:hi] = picked
    return out


def pair_scan(keys, max_pairs):
    """Deterministic greedy pairing of equal keys, in index order.

    Walk i ascending; an unused i is paired with the smallest unused j != i
    holding the same key. Stops after max_pairs pairs. Returns an int64
    array of shape (k, 2) with k <= max_pairs.
    """
    keys = np.asarray(keys)
    m = keys.shape[0]
    if max_pairs <= 0 or m == 0:
        return np.zeros((0, 2), dtype=np.int64)
    buckets: dict[int, list[int]] = {}
    for i, key in enumerate(keys.tolist()):
        buckets.setdefault(key, []).append(i)
    ptr = dict.fromkeys(buckets, 0)
    used = bytearray(m)
    pairs = []
    for i in range(m):
        if used[i]:
            continue
        key = int(keys[i])
        bucket = buckets[key]
        p = ptr[key]
        while p < len(bucket) and (used[bucket[p]] or bucket[p] <= i):
            p += 1
        ptr[key] = p
        if p == len(bucket):
            continue
        j = bucket[p]
        used[i] = 1
        used[j] = 1
        pairs.append((i, j))
        if len(pairs) == max_pairs:
            break
    return np.array(pairs, dtype=np.int64).reshape(len(pairs), 2)
