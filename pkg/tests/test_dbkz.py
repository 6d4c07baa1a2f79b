import math
from fractions import Fraction

import pytest

from dgsieve.basis import Basis
from dgsieve.errors import ParamError, SolverFailure
from dgsieve.gso import gso_compute
from dgsieve.reduction import (OracleSpec, calls_for_schedule, dbkz,
                               planned_tours)
from dgsieve.reduction.dbkz import head_meets_target, reduce_head
from dgsieve.reduction.state import GramState

from conftest import random_basis, rng_for, scrambled_identity


# ---------------------------------------------------------------- schedule


def test_planned_tours_guards():
    with pytest.raises(ParamError):
        planned_tours(6, 1, 0.5, 10.0)
    with pytest.raises(ParamError):
        planned_tours(6, 6, 0.5, 10.0)
    with pytest.raises(ParamError):
        planned_tours(6, 3, 0.0, 10.0)
    with pytest.raises(ParamError):
        planned_tours(6, 3, 1.5, 10.0)


def test_planned_tours_monotonicity():
    assert planned_tours(8, 4, 0.1, 10.0) >= planned_tours(8, 4, 1.0, 10.0)
    assert planned_tours(12, 4, 0.5, 10.0) > planned_tours(8, 4, 0.5, 10.0)
    assert planned_tours(8, 4, 0.5, 1e6) >= planned_tours(8, 4, 0.5, 2.0)
    # even a degenerate start length yields a positive budget
    assert planned_tours(5, 2, 1.0, 0.0) >= 1


def test_calls_for_schedule_formula():
    assert calls_for_schedule(6, 3, 87) == 87 * 7 + 1
    assert calls_for_schedule(8, 4, 0) == 1
    assert calls_for_schedule(10, 9, 5) == 5 * 3 + 1


# ----------------------------------------------------------------- sweeps


def test_dbkz_identity_fixed_point():
    n = 6
    b = Basis([[int(i == j) for i in range(n)] for j in range(n)])
    out, rep = dbkz(b, 3, eps=0.5)
    assert out.gram_int() == b.gram_int()
    assert rep.oracle_calls == calls_for_schedule(n, 3, rep.tours_run)
    assert rep.tours_run == rep.tours_planned
    assert not rep.capped
    assert rep.first_norm == 1.0
    assert rep.bound_ok


def test_dbkz_call_count_is_exact():
    rng = rng_for(91)
    for n, k in [(6, 3), (7, 3), (8, 4)]:
        b = random_basis(n, rng, entry_bound=8)
        orc = OracleSpec("hsvp", "enum")
        out, rep = dbkz(b, k, eps=1.0, oracle=orc)
        assert rep.oracle_calls == calls_for_schedule(n, k, rep.tours_run)
        assert orc.calls == rep.oracle_calls
        assert out.same_lattice_as(b)


def test_dbkz_head_meets_hermite_style_bound():
    rng = rng_for(92)
    for seed in range(4):
        b = random_basis(8, rng, entry_bound=10)
        out, rep = dbkz(b, 4, eps=1.0)
        assert rep.bound_ok
        root = float(b.det_sq()) ** (1.0 / 16)
        want = 2.0 * rep.delta ** (7.0 / 3.0) * root
        assert rep.hermite_bound == pytest.approx(want, rel=1e-12)
        assert rep.first_norm <= rep.hermite_bound * (1 + 1e-9)
        assert rep.delta == 2.0  # default promise at rank 4
        gso = gso_compute(out, "exact")
        for i in range(1, 8):
            for j in range(i):
                assert abs(gso.mu[i][j]) <= Fraction(1, 2)


def test_dbkz_scrambled_identity_recovers_unit_head():
    rng = rng_for(93)
    b = scrambled_identity(7, rng)
    out, rep = dbkz(b, 3, eps=1.0)
    assert out.gram()[0][0] == 1
    assert rep.bound_ok


def test_dbkz_tour_cap_is_reported():
    rng = rng_for(94)
    b = random_basis(8, rng, entry_bound=9)
    out, rep = dbkz(b, 4, eps=0.25, max_tours=2)
    assert rep.capped
    assert rep.tours_run == 2
    assert rep.tours_planned > 2
    assert rep.oracle_calls == calls_for_schedule(8, 4, 2)
    assert out.same_lattice_as(b)


def test_dbkz_parameter_guards():
    rng = rng_for(95)
    b = random_basis(6, rng, entry_bound=5)
    with pytest.raises(ParamError):
        dbkz(b, 1)
    with pytest.raises(ParamError):
        dbkz(b, 6)
    wild = OracleSpec("hsvp", "enum", delta=300.0)
    with pytest.raises(ParamError):
        dbkz(b, 3, oracle=wild)  # promise exceeds 2^k


# ------------------------------------------------------------ head driver


def test_head_target_check_matches_direct_inequality():
    rng = rng_for(96)
    b = random_basis(6, rng, entry_bound=8)
    state = GramState(b)
    w, e = 5, 2
    target_pow = Fraction(81)  # T = 3 with T**(2e) rational
    head = Fraction(state.gram[0][0])
    vol = Fraction(state.leading_det(w))
    want = head ** (w * e) <= target_pow ** w * vol ** e
    assert head_meets_target(state, w, e, target_pow) == want


def test_reduce_head_reaches_target_early():
    rng = rng_for(97)
    for _ in range(4):
        b = random_basis(7, rng, entry_bound=9)
        state = GramState(b)
        state.size_reduce()
        orc = OracleSpec("hsvp", "enum")
        # window of rank 5 driven by rank-3 blocks: T = eta = 3**((5-1)/(3-1))
        target_pow = Fraction(3) ** 4
        tours = reduce_head(state, 5, 3, 0.5, orc, target_pow, 2)
        assert head_meets_target(state, 5, 2, target_pow)
        assert tours <= planned_tours(5, 3, 0.5, 1000.0)


def test_reduce_head_single_block_window():
    rng = rng_for(98)
    b = random_basis(5, rng, entry_bound=7)
    state = GramState(b)
    orc = OracleSpec("hsvp", "enum")
    tours = reduce_head(state, 3, 3, 0.5, orc, Fraction(3), 1)
    assert tours == 0
    assert head_meets_target(state, 3, 1, Fraction(3))


def test_reduce_head_rejects_a_lying_oracle():
    # an oracle that never moves anything cannot meet a strict target
    b = Basis([[4, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    state = GramState(b)
    idle = OracleSpec("hsvp", lambda g: [1] + [0] * (len(g) - 1), delta=1.0)
    with pytest.raises(SolverFailure):
        reduce_head(state, 4, 2, 0.5, idle, Fraction(1), 1)
