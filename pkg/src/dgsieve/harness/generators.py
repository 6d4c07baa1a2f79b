"""Deterministic lattice instance generators for experiments and tests.

Four families cover the corpus: modular ("qary") lattices with an exact
determinant, subset-sum style lattices with one heavy coordinate,
diagonal lattices with a planted short vector, and scrambled copies of
the integer lattice. Every instance is a pure function of its spec, and
plants record their ground truth so reports can grade solver output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..basis import Basis
from ..errors import ParamError

KINDS = ("qary", "knapsack", "diagonal-planted", "scrambled-identity")

_PARAM_KEYS = {
    "qary": {"q", "k_sis"},
    "knapsack": {"bound"},
    "diagonal-planted": {"t"},
    "scrambled-identity": {"depth"},
}


@dataclass(frozen=True)
class LatticeSpec:
    """Recipe for one instance: family, rank, seed, family parameters."""

    kind: str
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParamError(f"unknown lattice kind {self.kind!r}")
        if self.n < 1:
            raise ParamError("rank must be positive")
        stray = set(self.params) - _PARAM_KEYS[self.kind]
        if stray:
            raise ParamError(
                f"{self.kind} does not take parameters {sorted(stray)}")

    def jsonable(self) -> dict:
        return {"kind": self.kind, "n": self.n, "seed": self.seed,
                "params": dict(self.params)}


@dataclass(frozen=True)
class Instance:
    """A generated basis with whatever ground truth the family implies.

    truth keys: det_sq always (exact Fraction); lambda1_sq and
    short_vector when the construction plants one.
    """

    spec: LatticeSpec
    basis: Basis
    truth: dict


def _big_uniform(rng, bound: int) -> int:
    """Uniform integer in [1, bound] from 32-bit limbs, any magnitude."""
    bits = bound.bit_length() + 64
    limbs = (bits + 31) // 32
    x = 0
    for v in rng.integers(0, 2 ** 32, size=limbs, dtype=np.int64):
        x = (x << 32) | int(v)
    return x % bound + 1


def _gen_qary(spec: LatticeSpec) -> Instance:
    n = spec.n
    q = spec.params.get("q")
    if q is None:
        raise ParamError("qary needs a modulus q")
    q = int(q)
    if q <= 1:
        raise ParamError("modulus must exceed 1")
    k = int(spec.params.get("k_sis", n // 2))
    if not 1 <= k < n:
        raise ParamError(f"k_sis must lie in [1, {n})")
    rng = np.random.default_rng(spec.seed)
    a = rng.integers(0, q, size=(n - k, k))
    cols = []
    for j in range(k):
        col = [0] * n
        col[j] = 1
        for i in range(n - k):
            col[k + i] = int(a[i][j])
        cols.append(col)
    for j in range(k, n):
        col = [0] * n
        col[j] = q
        cols.append(col)
    truth = {"det_sq": Fraction(q) ** (2 * (n - k))}
    return Instance(spec, Basis(cols), truth)


def _gen_knapsack(spec: LatticeSpec) -> Instance:
    n = spec.n
    if n < 2:
        raise ParamError("knapsack needs rank at least 2")
    bound = int(spec.params.get("bound", 2 ** (2 * n)))
    if bound <= 1:
        raise ParamError("weight bound must exceed 1")
    rng = np.random.default_rng(spec.seed)
    weights = [_big_uniform(rng, bound) for _ in range(n - 1)]
    cols = []
    for j in range(n - 1):
        col = [0] * n
        col[j] = 1
        col[n - 1] = weights[j]
        cols.append(col)
    last = [0] * n
    last[n - 1] = bound
    cols.append(last)
    truth = {"det_sq": Fraction(bound) ** 2}
    return Instance(spec, Basis(cols), truth)


def _gen_planted(spec: LatticeSpec) -> Instance:
    n = spec.n
    if n < 2:
        raise ParamError("diagonal plant needs rank at least 2")
    t = spec.params.get("t")
    if t is None:
        raise ParamError("diagonal-planted needs a plant length t")
    t = int(t)
    if t <= 0:
        raise ParamError("plant length must be positive")
    # diag(1/t, t, 1, ..., 1), held as integer columns over a 1/t scale
    diag = [1, t * t] + [t] * (n - 2)
    cols = []
    for j in range(n):
        col = [0] * n
        col[j] = diag[j]
        cols.append(col)
    basis = Basis(cols, Fraction(1, t))
    short = tuple(Fraction(1, t) if i == 0 else Fraction(0) for i in range(n))
    truth = {"det_sq": Fraction(1), "lambda1_sq": Fraction(1, t * t),
             "short_vector": short}
    return Instance(spec, basis, truth)


def _gen_scrambled(spec: LatticeSpec) -> Instance:
    n = spec.n
    depth = int(spec.params.get("depth", 40))
    if depth < 0:
        raise ParamError("scramble depth must be nonnegative")
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    rng = np.random.default_rng(spec.seed)
    done = 0 if n > 1 else depth  # rank 1 admits no shear at all
    while done < depth:
        i, j = (int(x) for x in rng.integers(0, n, size=2))
        c = int(rng.integers(-2, 3))
        if i == j or c == 0:
            continue
        for row in u:
            row[i] += c * row[j]
        done += 1
    basis = Basis(u)
    short = tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(n))
    truth = {"det_sq": Fraction(1), "lambda1_sq": Fraction(1),
             "short_vector": short}
    return Instance(spec, basis, truth)


_GENERATORS = {
    "qary": _gen_qary,
    "knapsack": _gen_knapsack,
    "diagonal-planted": _gen_planted,
    "scrambled-identity": _gen_scrambled,
}


def generate(spec: LatticeSpec) -> Instance:
    """Instance for a spec; deterministic in (kind, n, seed, params)."""
    return _GENERATORS[spec.kind](spec)


def gen_lattice(spec: LatticeSpec) -> Basis:
    """Just the basis, for callers that track ground truth elsewhere."""
    return generate(spec).basis
