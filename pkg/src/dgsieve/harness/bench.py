"""Timing comparison of the compiled hot kernels against the pure fallback.

Three workloads mirror where the package spends its time: depth-first
enumeration of a quadratic form, batched one-dimensional Gaussian draws,
and the greedy key-pairing scan. Both backends run the same inputs; the
report records per-op times, the speedup, and an agreement flag from
comparing outputs exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .. import _kernel
from ..basis import Basis
from ..errors import ParamError
from ..gso import gso_from_gram
from ..reduction import lll_reduce


def available_backends() -> dict:
    """Name -> module for every importable kernel backend."""
    out = {"pure": _kernel.pure}
    try:
        from .._kernel import _native
        out["native"] = _native
    except ImportError:
        pass
    return out


def _enum_workload(rank: int, seed: int):
    rng = np.random.default_rng(seed)
    while True:
        m = rng.integers(-6, 7, size=(rank, rank))
        cols = [[int(x) for x in row] for row in m.T.tolist()]
        try:
            basis = Basis(cols)
        except Exception:
            continue
        if basis.rank == rank:
            break
    red, res = lll_reduce(basis)
    gso = gso_from_gram([[x for x in row] for row in red.gram()], 53)
    mu = gso.mu_float()
    r = gso.bstar_sq_float()
    radius = min(r) * 2.5  # wide enough to visit a real tree
    return mu, r, radius


def _sample_workload(count: int, seed: int):
    rng = np.random.default_rng(seed)
    mus = rng.uniform(-5.0, 5.0, size=count)
    u = rng.random(count)
    return mus, 3.0, u


def _pair_workload(count: int, seed: int):
    rng = np.random.default_rng(seed)
    keys = rng.integers(0, max(2, count // 8), size=count)
    return keys, count


@dataclass(frozen=True)
class BenchReport:
    active_backend: str
    repeat: int
    times: dict          # op -> {backend -> best seconds}
    speedups: dict       # op -> native time / pure time (when both ran)
    agree: dict          # op -> exact output agreement across backends

    def jsonable(self) -> dict:
        return {"active_backend": self.active_backend, "repeat": self.repeat,
                "times": self.times, "speedups": self.speedups,
                "agree": self.agree}


def _best_time(fn, repeat: int) -> tuple:
    best = None
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        if best is None or dt < best:
            best = dt
    return best, out


def _normalize(op: str, out):
    if op == "enumerate":
        cands, nodes, truncated = out
        return (sorted((tuple(c), round(v, 6)) for c, v in cands),
                truncated)
    return np.asarray(out).tolist()


def bench_kernels(rank: int = 13, count: int = 20000, repeat: int = 3,
                  seed: int = 0) -> BenchReport:
    """Run every available backend over the three workloads."""
    if rank < 2 or count < 1 or repeat < 1:
        raise ParamError("rank, count, and repeat must all be positive")
    backends = available_backends()
    mu, r, radius = _enum_workload(rank, seed)
    mus, sigma, u = _sample_workload(count, seed + 1)
    keys, max_pairs = _pair_workload(count, seed + 2)

    workloads = {
        "enumerate": lambda mod: mod.enumerate_gram(
            mu, r, radius, collect_limit=5000, shrink=False),
        "sample_batch": lambda mod: mod.sample_gaussian_1d_batch(
            mus, sigma, u),
        "pair_scan": lambda mod: mod.pair_scan(keys, max_pairs),
    }

    times = {op: {} for op in workloads}
    outputs = {op: {} for op in workloads}
    for name, mod in backends.items():
        for op, fn in workloads.items():
            best, out = _best_time(lambda m=mod, f=fn: f(m), repeat)
            times[op][name] = best
            outputs[op][name] = _normalize(op, out)

    speedups = {}
    agree = {}
    for op in workloads:
        got = outputs[op]
        agree[op] = len({repr(v) for v in got.values()}) == 1
        if "native" in times[op] and times[op]["native"] > 0:
            speedups[op] = times[op]["pure"] / times[op]["native"]
    return BenchReport(active_backend=_kernel.BACKEND, repeat=repeat,
                       times=times, speedups=speedups, agree=agree)
