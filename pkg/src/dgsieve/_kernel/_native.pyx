# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Mirrors `pure.py` exactly: same candidate ordering, same pairing output,
same sampler support and CDF walk. See that module for the contracts.
"""

from libc.math cimport floor, exp, fabs

import numpy as np


BACKEND = "native"


def enumerate_gram(mu, r, double radius_sq, Py_ssize_t collect_limit=1000,
                   bint shrink=True, long long max_nodes=50_000_000):
    cdef Py_ssize_t n = len(r)
    if n == 0:
        return [], 0, False
    # rows may be ragged (row u holding columns < u); pad to a square
    mu_sq = np.zeros((n, n), dtype=np.float64)
    for _u, _row in enumerate(mu):
        for _t, _val in enumerate(_row):
            if _t < _u:
                mu_sq[_u, _t] = _val
    cdef double[:, ::1] mu_arr = mu_sq
    cdef double[::1] r_arr = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t t, u
    for t in range(n):
        if not r_arr[t] > 0.0:
            raise ValueError("quadratic form must be positive definite")
    cdef double fudge = 1.0 + 1e-9
    cdef double bound = radius_sq * fudge
    cdef long long[::1] x = np.zeros(n, dtype=np.int64)
    cdef double[::1] c = np.zeros(n, dtype=np.float64)
    cdef double[::1] cost = np.zeros(n + 1, dtype=np.float64)
    cdef long long[::1] cnt = np.zeros(n, dtype=np.int64)
    cdef long long[::1] base = np.zeros(n, dtype=np.int64)
    cdef unsigned char[::1] side = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] za = np.zeros(n, dtype=np.uint8)
    cdef list out = []
    cdef list vec
    cdef long long nodes = 0
    cdef bint truncated = False
    cdef double d, acc
    cdef long long xu, b, j, k
    cdef bint zero
    t = n - 1
    c[t] = 0.0
    base[t] = 0
    side[t] = 1
    cnt[t] = 0
    x[t] = 0
    za[t] = 1
    while True:
        nodes += 1
        if nodes > max_nodes:
            truncated = True
            break
        d = x[t] - c[t]
        cost[t] = cost[t + 1] + r_arr[t] * d * d
        if cost[t] <= bound:
            if t > 0:
                t -= 1
                acc = 0.0
                zero = True
                for u in range(t + 1, n):
                    xu = x[u]
                    if xu != 0:
                        acc -= mu_arr[u, t] * xu
                        zero = False
                c[t] = acc
                b = <long long>floor(acc + 0.5)
                base[t] = b
                side[t] = 1 if b <= acc else 0
                cnt[t] = 0
                x[t] = b
                za[t] = 1 if zero else 0
                continue
            if cost[0] > 0.0:
                vec = []
                for u in range(n):
                    vec.append(x[u])
                out.append((tuple(vec), cost[0]))
                if len(out) > collect_limit:
                    if not shrink:
                        truncated = True
                        break
                    del out[0]
                if shrink and cost[0] * fudge < bound:
                    bound = cost[0] * fudge
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
            if (j % 2 == 1) == (side[t] == 1):
                x[t] = base[t] + k
            else:
                x[t] = base[t] - k
    return out, int(nodes), truncated


def sample_gaussian_1d_batch(mus, double sigma, u):
    cdef double[::1] mu_arr = np.ascontiguousarray(mus, dtype=np.float64)
    cdef double[::1] u_arr = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = mu_arr.shape[0]
    out_arr = np.empty(m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    if m == 0:
        return out_arr
    cdef double w = 12.0 * sigma
    cdef long long half = <long long>floor(w) + 1
    cdef double inv = -3.141592653589793238462643 / (sigma * sigma)
    cdef Py_ssize_t i
    cdef long long base, z, zlo, zhi, pick
    cdef double center, total, target, acc, dist
    for i in range(m):
        center = mu_arr[i]
        base = <long long>floor(center + 0.5)
        zlo = base - half
        zhi = base + half
        total = 0.0
        for z in range(zlo, zhi + 1):
            dist = z - center
            if fabs(dist) <= w:
                total += exp(inv * dist * dist)
        if total <= 0.0:
            out[i] = base
            continue
        target = u_arr[i] * total
        acc = 0.0
        pick = zhi
        for z in range(zlo, zhi + 1):
            dist = z - center
            if fabs(dist) <= w:
                acc += exp(inv * dist * dist)
                if acc > target:
                    pick = z
                    break
        out[i] = pick
    return out_arr


def pair_scan(keys, Py_ssize_t max_pairs):
    cdef long long[::1] key_arr = np.ascontiguousarray(keys, dtype=np.int64)
    cdef Py_ssize_t m = key_arr.shape[0]
    if max_pairs <= 0 or m == 0:
        return np.zeros((0, 2), dtype=np.int64)
    cdef dict buckets = {}
    cdef dict ptr = {}
    cdef Py_ssize_t i, p, j
    cdef long long key
    cdef list bucket
    for i in range(m):
        key = key_arr[i]
        if key in buckets:
            (<list>buckets[key]).append(i)
        else:
            buckets[key] = [i]
            ptr[key] = 0
    cdef unsigned char[::1] used = np.zeros(m, dtype=np.uint8)
    pairs_arr = np.empty((max_pairs, 2), dtype=np.int64)
    cdef long long[:, ::1] pairs = pairs_arr
    cdef Py_ssize_t count = 0
    for i in range(m):
        if used[i]:
            continue
        key = key_arr[i]
        bucket = <list>buckets[key]
        p = ptr[key]
        while p < len(bucket) and (used[<Py_ssize_t>bucket[p]]
                                   or <Py_ssize_t>bucket[p] <= i):
            p += 1
        ptr[key] = p
        if p == len(bucket):
            continue
        j = <Py_ssize_t>bucket[p]
        used[i] = 1
        used[j] = 1
        pairs[count, 0] = i
        pairs[count, 1] = j
        count += 1
        if count == max_pairs:
            break
    return np.ascontiguousarray(pairs_arr[:count])
