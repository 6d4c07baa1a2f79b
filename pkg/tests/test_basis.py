from fractions import Fraction

import pytest

from conftest import random_basis, random_unimodular, rng_for
from dgsieve.basis import (Basis, basis_from_json, basis_from_text, basis_to_json,
                           basis_to_text, dual_reversed)
from dgsieve.errors import MembershipError, ParamError, RankError, ScaleError


def test_construction_and_canonical_scale():
    b = Basis.from_int_columns([[2, 0], [0, 4]], 1)
    # content 2 folds into the scale: minimal denominator exponent is 0
    assert b.denom_log2 == 0
    assert b.real_columns() == [[1, 0], [0, 2]]
    assert b.det_sq() == 4


def test_rank_checks():
    with pytest.raises(RankError):
        Basis([[1, 2], [2, 4]])
    with pytest.raises(RankError):
        Basis([[1, 0], [0, 1], [1, 1]])
    with pytest.raises(ParamError):
        Basis([], scale=1)
    b = Basis([], scale=1, ambient=3)
    assert b.rank == 0 and b.ambient == 3 and b.det_sq() == 1


def test_membership_frozen():
    # columns (2,0) and (1,1); (1,0) is in the span but not the lattice
    b = Basis([[2, 0], [1, 1]])
    assert b.coordinates_of([1, 0]) == [Fraction(1, 2), Fraction(0)]
    assert not b.contains([1, 0])
    assert b.contains([3, 1])
    assert b.integer_coordinates_of([3, 1]) == [1, 1]
    with pytest.raises(MembershipError):
        b.integer_coordinates_of([1, 0])
    assert b.integer_coordinates_of([0, 0]) == [0, 0]


def test_membership_off_span():
    b = Basis([[1, 0, 0], [0, 1, 0]])
    assert b.contains([2, 3, 0])
    assert b.coordinates_of([0, 0, 1]) is None


def test_coordinates_roundtrip_random():
    rng = rng_for(10)
    for _ in range(40):
        n = int(rng.integers(1, 7))
        b = random_basis(n, rng, denom_log2=int(rng.integers(0, 3)),
                         ambient=n + int(rng.integers(0, 3)))
        z = [int(x) for x in rng.integers(-6, 7, size=n)]
        v = b.apply_coords(z)
        assert b.integer_coordinates_of(v) == z


def test_transform_preserves_lattice():
    rng = rng_for(11)
    for _ in range(25):
        n = int(rng.integers(1, 6))
        b = random_basis(n, rng)
        u = random_unimodular(n, rng)
        c = b.transform(u)
        assert c.same_lattice_as(b)
        assert c.det_sq() == b.det_sq()


def test_dual_reversed_frozen():
    b = Basis([[2, 0], [0, 1]])
    d = dual_reversed(b)
    assert d.real_columns() == [[0, 1], [Fraction(1, 2), 0]]
    assert d.det_sq() == Fraction(1, 4)


def test_dual_reversed_non_dyadic_and_involution():
    b = Basis([[1, 1], [0, 3]])
    d = dual_reversed(b)
    assert not d.is_dyadic
    with pytest.raises(ScaleError):
        d.dyadic_form()
    dd = dual_reversed(d)
    assert dd.same_lattice_as(b)
    # dual det is the reciprocal
    assert d.det_sq() * b.det_sq() == 1


def test_dual_reversed_random_involution():
    rng = rng_for(12)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        b = random_basis(n, rng, entry_bound=8,
                         denom_log2=int(rng.integers(0, 2)))
        d = dual_reversed(b)
        assert d.det_sq() * b.det_sq() == 1
        assert dual_reversed(d).same_lattice_as(b)
        # dual pairing: <d_i, b_j> integer, and the reversed pairing is I
        for i in range(n):
            for j in range(n):
                ip = sum(x * y for x, y in zip(d.column(i), b.column(j)))
                expected = 1 if i + j == n - 1 else 0
                assert ip == expected


def test_text_roundtrip():
    b = Basis.from_int_columns([[2, 0], [1, 1]], 0)
    text = basis_to_text(b)
    assert text.splitlines()[0] == "2 2 0"
    assert basis_from_text(text) == b
    rng = rng_for(13)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        b = random_basis(n, rng, ambient=n + int(rng.integers(0, 2)),
                         denom_log2=int(rng.integers(0, 4)))
        assert basis_from_text(basis_to_text(b)) == b
        assert basis_from_json(basis_to_json(b)) == b


def test_text_rejects_malformed():
    with pytest.raises(ParamError):
        basis_from_text("")
    with pytest.raises(ParamError):
        basis_from_text("2 2\n1 0\n0 1\n")
    with pytest.raises(ParamError):
        basis_from_text("2 2 0\n1 0\n0\n")
    with pytest.raises(ParamError):
        basis_from_text("1 2 0\n1 0\n0 1\n")
    with pytest.raises(ParamError):
        basis_from_text("2 2 0\n1 x\n0 1\n")


def test_non_dyadic_scale_representation():
    b = Basis([[1, 0], [0, 10000]], scale=Fraction(1, 100))
    assert not b.is_dyadic
    assert b.column(0) == (Fraction(1, 100), 0)
    assert b.column(1) == (0, 100)
    assert b.det_sq() == 1
