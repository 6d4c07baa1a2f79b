import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from dgsieve import _kernel
from dgsieve._kernel import pure
from dgsieve.gso import gso_from_gram

from conftest import random_basis, rng_for

BACKENDS = [pure]
if _kernel.BACKEND == "native":
    BACKENDS.append(_kernel)


def _form_value(gram, x):
    n = len(x)
    return sum(gram[a][b] * x[a] * x[b] for a in range(n) for b in range(n))


def _coeff_ranges(basis, radius):
    """Rigorous per-coordinate bounds: |x_t| <= sqrt(radius * (G^-1)_tt)."""
    from dgsieve.intmath import fraction_matrix_inverse

    inv = fraction_matrix_inverse([[Fraction(v) for v in row]
                                   for row in basis.gram_int()])
    n = basis.rank
    return [int(math.isqrt(int(Fraction(radius) * inv[t][t]))) + 1
            for t in range(n)]


@pytest.mark.parametrize("impl", BACKENDS)
def test_enumerate_identity_form(impl):
    mu = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    r = [1.0, 1.0, 1.0]
    cands, nodes, truncated = impl.enumerate_gram(mu, r, 1.0, shrink=False)
    assert not truncated
    assert nodes > 0
    coords = {c for c, _ in cands}
    assert coords == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    for _, nrm in cands:
        assert nrm == pytest.approx(1.0)


@pytest.mark.parametrize("impl", BACKENDS)
def test_enumerate_known_2d_minimum(impl):
    # form 4x^2 + 4xy + 3y^2: minimum 3 at (0,1) and (-1,1)
    gram = [[4, 2], [2, 3]]
    gso = gso_from_gram([[Fraction(v) for v in row] for row in gram], "exact")
    mu = gso.mu_float()
    r = gso.bstar_sq_float()
    cands, _, truncated = impl.enumerate_gram(mu, r, 4.0, shrink=True)
    assert not truncated
    best = min(nrm for _, nrm in cands)
    assert best == pytest.approx(3.0, rel=1e-12)
    winners = {c for c, nrm in cands if nrm < 3.5}
    assert winners <= {(0, 1), (-1, 1)}
    for c in winners:
        assert _form_value(gram, c) == 3


@pytest.mark.parametrize("impl", BACKENDS)
def test_enumerate_matches_brute_force(impl):
    rng = rng_for(1402)
    checked = 0
    for _ in range(40):
        b = random_basis(3, rng, entry_bound=5)
        gram = b.gram_int()
        gso = gso_from_gram(b.gram(), "exact")
        mu = gso.mu_float()
        r = gso.bstar_sq_float()
        radius = min(gram[i][i] for i in range(3))
        ranges = _coeff_ranges(b, radius)
        if math.prod(2 * k + 1 for k in ranges) > 400_000:
            continue
        cands, _, truncated = impl.enumerate_gram(mu, r, float(radius),
                                                  shrink=True)
        assert not truncated
        assert cands
        true_min = min(
            _form_value(gram, x)
            for x in product(*(range(-k, k + 1) for k in ranges))
            if any(x)
        )
        found = min(_form_value(gram, c) for c, _ in cands)
        assert found == true_min
        checked += 1
    assert checked >= 20


@pytest.mark.parametrize("impl", BACKENDS)
def test_enumerate_collect_counts_match_brute_force(impl):
    rng = rng_for(77)
    checked = 0
    for _ in range(20):
        b = random_basis(3, rng, entry_bound=4)
        gram = b.gram_int()
        gso = gso_from_gram(b.gram(), "exact")
        # pick a radius strictly between attainable values so the float
        # boundary is unambiguous
        radius = 2 * min(gram[i][i] for i in range(3)) + 0.5
        ranges = _coeff_ranges(b, radius)
        if math.prod(2 * k + 1 for k in ranges) > 400_000:
            continue
        cands, _, truncated = impl.enumerate_gram(
            gso.mu_float(), gso.bstar_sq_float(), radius,
            collect_limit=100000, shrink=False)
        assert not truncated
        # brute force counts each +-pair twice; the kernel emits one of each
        brute = sum(
            1 for x in product(*(range(-k, k + 1) for k in ranges))
            if any(x) and _form_value(gram, x) <= radius
        )
        assert brute == 2 * len(cands)
        seen = set(c for c, _ in cands)
        assert len(seen) == len(cands)
        for coeffs, nrm in cands:
            exact = _form_value(gram, coeffs)
            assert exact <= radius
            assert nrm == pytest.approx(float(exact), rel=1e-9)
        checked += 1
    assert checked >= 10


def test_enumerate_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("native kernel not built")
    rng = rng_for(9)
    for _ in range(10):
        b = random_basis(5, rng, entry_bound=6)
        gso = gso_from_gram(b.gram(), "exact")
        mu = gso.mu_float()
        r = gso.bstar_sq_float()
        radius = float(min(b.gram_int()[i][i] for i in range(5)))
        got = [impl.enumerate_gram(mu, r, radius, shrink=True)
               for impl in BACKENDS]
        assert [c for c, _ in got[0][0]] == [c for c, _ in got[1][0]]
        assert got[0][1] == got[1][1]


def test_enumerate_node_budget():
    mu = [[1.0, 0.0], [0.3, 1.0]]
    r = [1.0, 0.5]
    _, nodes, truncated = pure.enumerate_gram(mu, r, 50.0, max_nodes=5)
    assert truncated
    assert nodes == 6


@pytest.mark.parametrize("impl", BACKENDS)
def test_enumerate_rejects_degenerate_form(impl):
    with pytest.raises(ValueError):
        impl.enumerate_gram([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0], 1.0)


@pytest.mark.parametrize("impl", BACKENDS)
def test_sampler_matches_gaussian_weights(impl):
    rng = rng_for(31337)
    n_draws = 200_000
    sigma = 2.0
    center = 0.3
    u = rng.random(n_draws)
    z = impl.sample_gaussian_1d_batch(np.full(n_draws, center), sigma, u)
    total = sum(math.exp(-math.pi * (k - center) ** 2 / sigma**2)
                for k in range(-30, 31))
    for k in range(-4, 6):
        p = math.exp(-math.pi * (k - center) ** 2 / sigma**2) / total
        if p < 1e-4:
            continue
        hat = float(np.mean(z == k))
        slack = 5.0 * math.sqrt(p * (1 - p) / n_draws)
        assert abs(hat - p) <= slack, (k, hat, p)


@pytest.mark.parametrize("impl", BACKENDS)
def test_sampler_truncation_window(impl):
    rng = rng_for(5)
    sigma = 0.4
    centers = rng.uniform(-3, 3, size=5000)
    z = impl.sample_gaussian_1d_batch(centers, sigma, rng.random(5000))
    assert np.all(np.abs(z - centers) <= 12.0 * sigma + 1e-9)


@pytest.mark.parametrize("impl", BACKENDS)
def test_sampler_underflow_returns_nearest(impl):
    # support window excludes every integer: fall back to the nearest one
    z = impl.sample_gaussian_1d_batch(np.array([0.4]), 1e-3, np.array([0.7]))
    assert z.tolist() == [0]
    z = impl.sample_gaussian_1d_batch(np.array([0.6]), 1e-3, np.array([0.2]))
    assert z.tolist() == [1]


def test_sampler_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("native kernel not built")
    rng = rng_for(12)
    centers = rng.uniform(-5, 5, size=20000)
    u = rng.random(20000)
    a = pure.sample_gaussian_1d_batch(centers, 1.7, u)
    b = _kernel.sample_gaussian_1d_batch(centers, 1.7, u)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("impl", BACKENDS)
def test_pair_scan_frozen(impl):
    keys = np.array([5, 7, 5, 5, 7, 9, 5], dtype=np.int64)
    pairs = impl.pair_scan(keys, 10)
    assert pairs.tolist() == [[0, 2], [1, 4], [3, 6]]
    pairs = impl.pair_scan(keys, 2)
    assert pairs.tolist() == [[0, 2], [1, 4]]
    assert impl.pair_scan(keys, 0).shape == (0, 2)
    assert impl.pair_scan(np.array([1, 2, 3], dtype=np.int64), 5).shape == (0, 2)


@pytest.mark.parametrize("impl", BACKENDS)
def test_pair_scan_properties(impl):
    rng = rng_for(2025)
    for _ in range(50):
        m = int(rng.integers(1, 200))
        keys = rng.integers(0, 8, size=m).astype(np.int64)
        cap = int(rng.integers(1, m + 1))
        pairs = impl.pair_scan(keys, cap)
        flat = pairs.ravel().tolist()
        assert len(flat) == len(set(flat))
        for i, j in pairs.tolist():
            assert i < j
            assert keys[i] == keys[j]
        # greedy count: each key class of size c yields floor(c/2) pairs
        _, counts = np.unique(keys, return_counts=True)
        achievable = int(np.sum(counts // 2))
        assert pairs.shape[0] == min(cap, achievable)
        again = impl.pair_scan(keys, cap)
        assert np.array_equal(pairs, again)


def test_pair_scan_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("native kernel not built")
    rng = rng_for(4)
    keys = rng.integers(0, 50, size=5000).astype(np.int64)
    a = pure.pair_scan(keys, 2000)
    b = _kernel.pair_scan(keys, 2000)
    assert np.array_equal(a, b)
