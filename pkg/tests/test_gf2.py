from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamspan.gf2 import (
    BitMatrix,
    BitVector,
    EchelonBasis,
    StructureError,
    lowbit,
    null_space,
    rank,
    row_reduce,
    span_coefficients,
    span_contains,
)
from oracles import naive_rank


@st.composite
def matrices(draw, max_rows=12, max_cols=24):
    ncols = draw(st.integers(1, max_cols))
    nrows = draw(st.integers(0, max_rows))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), min_size=nrows, max_size=nrows))
    return BitMatrix(ncols, tuple(rows))


def test_bitvector_basics():
    v = BitVector.from_string("1101")
    assert v.to_list() == [1, 1, 0, 1]
    assert v.indices() == [0, 1, 3]
    assert v.weight() == 3
    assert str(v) == "1101"
    assert (v ^ v).weight() == 0
    assert v.dot(BitVector.from_string("0101")) == 0
    with pytest.raises(IndexError):
        v[4]
    with pytest.raises(IndexError):
        BitVector.from_indices(3, [3])
    with pytest.raises(StructureError):
        BitVector(2, 0b100)
    with pytest.raises(StructureError):
        v ^ BitVector.zeros(3)


def test_identity_keeps_full_rank():
    m = BitMatrix.identity(3)
    red, r = row_reduce(m)
    assert r == 3
    assert red.rows == m.rows


def test_xor_dependent_rows():
    m = BitMatrix.from_lists([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert row_reduce(m)[1] == 2


def test_empty_matrix():
    red, r = row_reduce(BitMatrix(4))
    assert r == 0 and red.nrows == 0
    assert null_space(BitMatrix(4)).nrows == 4


def test_unequal_rows_rejected():
    with pytest.raises(StructureError):
        BitMatrix.from_lists([[1, 0], [1, 0, 1]])


def test_random_rank_matches_naive():
    rng = random.Random(7)
    for _ in range(50):
        rows = [[rng.randint(0, 1) for _ in range(40)] for _ in range(20)]
        assert row_reduce(BitMatrix.from_lists(rows))[1] == naive_rank(rows)


def test_span_examples():
    basis, _ = row_reduce(BitMatrix.from_lists([[1, 0, 0], [0, 1, 0]]))
    assert span_contains(basis, BitVector(3, 0))
    assert span_contains(basis, BitVector.from_string("110"))
    assert not span_contains(basis, BitVector.from_string("001"))
    with pytest.raises(StructureError):
        span_contains(basis, BitVector(4, 0))
    with pytest.raises(StructureError):
        span_contains(BitMatrix(3, (1,)), BitVector(3, 1))  # not reduced


def test_span_of_constructed_combination():
    rng = random.Random(3)
    for _ in range(30):
        rows = [rng.getrandbits(30) for _ in range(8)]
        basis, _ = row_reduce(BitMatrix(30, tuple(rows)))
        pick = rng.sample(range(basis.nrows), min(3, basis.nrows))
        v = 0
        for i in pick:
            v ^= basis.rows[i]
        coeffs = span_coefficients(basis, BitVector(30, v))
        assert sorted(coeffs) == sorted(pick)


def test_null_space_examples():
    assert null_space(BitMatrix(5, (0, 0))).nrows == 5
    assert null_space(BitMatrix.identity(5)).nrows == 0
    rng = random.Random(11)
    for _ in range(20):
        m = BitMatrix(30, tuple(rng.getrandbits(30) for _ in range(10)))
        ns = null_space(m)
        assert ns.nrows == 30 - rank(m)
        for x in ns.rows:
            assert all((x & r).bit_count() % 2 == 0 for r in m.rows)


@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + null_space(m).nrows == m.ncols


@given(matrices())
def test_rows_lie_in_span(m):
    red, _ = row_reduce(m)
    for r in m.rows:
        assert span_contains(red, BitVector(m.ncols, r))


@given(matrices())
def test_reduce_is_idempotent_and_pivots_increase(m):
    red, r = row_reduce(m)
    again, r2 = row_reduce(red)
    assert again.rows == red.rows and r == r2
    piv = red.pivots()
    assert piv == sorted(set(piv))
    # fully reduced: each pivot column is zero in every other row
    for i, row in enumerate(red.rows):
        for j, other in enumerate(red.rows):
            if i != j:
                assert not (other >> lowbit(row)) & 1


@given(matrices())
def test_rank_matches_naive_oracle(m):
    assert rank(m) == naive_rank(m.to_lists()) if m.nrows else rank(m) == 0


@given(matrices())
def test_echelon_basis_tracks_rank(m):
    eb = EchelonBasis(m.ncols)
    for r in m.rows:
        eb.insert(r)
    assert eb.rank == rank(m)
    assert all(eb.contains(r) for r in m.rows)
    assert eb.to_matrix().rows == row_reduce(m)[0].rows


def test_mul_vector():
    m = BitMatrix.from_lists([[1, 1, 0], [0, 1, 1]])
    assert m.mul_vector(BitVector.from_string("110")).to_list() == [0, 1]
