import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codeloop.errors import DimensionError
from codeloop.f2algebra import (
    BitMatrix,
    BitVec,
    add,
    meet,
    parity,
    rank,
    reverse_bits,
    rref,
    span_array,
    span_iter,
    weight,
)

bv = BitVec.from_string


def vectors(length):
    return st.integers(0, (1 << length) - 1).map(lambda b: BitVec(length, b))


@pytest.mark.parametrize("text, w", [("11110000", 4), ("00000000", 0), ("11111111", 8)])
def test_weight(text, w):
    assert weight(bv(text)) == w
    assert bv(text).weight == w


def test_string_form_lists_coordinate_zero_first():
    v = bv("1000")
    assert v.bits == 1 and v[0] == 1 and v[3] == 0
    assert str(v) == "1000"
    assert BitVec.from_indices(4, [1, 3]) == bv("0101")


def test_meet_and_add_examples():
    a, b = bv("11110000"), bv("00111100")
    assert meet(a, b) == bv("00110000")
    assert add(a, b) == bv("11001100")
    assert a & b == meet(a, b) and a + b == add(a, b)
    zero = bv("00000000")
    assert meet(a, zero) == zero
    assert meet(a, a) == a
    assert add(a, a) == zero
    assert add(a, zero) == a


def test_length_mismatch_is_an_error():
    with pytest.raises(DimensionError):
        meet(bv("101"), bv("1010"))
    with pytest.raises(DimensionError):
        add(bv("101"), bv("1010"))
    with pytest.raises(DimensionError):
        BitMatrix.from_strings(["101", "10"])
    with pytest.raises(DimensionError):
        BitVec(2, 0b100)


def test_rref_examples():
    basis, r = rref(BitMatrix.from_strings(["11110000", "11110000"]))
    assert r == 1 and [str(v) for v in basis] == ["11110000"]
    basis, r = rref(BitMatrix.from_strings(["10", "01"]))
    assert r == 2 and [str(v) for v in basis] == ["10", "01"]
    m = BitMatrix.from_strings(["110", "011", "101"])
    assert rank(m) == 2
    assert len({v.bits for v in span_iter(rref(m)[0])}) == 4


def test_span_iter_examples():
    assert [str(v) for v in span_iter(BitMatrix.from_strings(["10", "01"]))] == ["00", "10", "01", "11"]
    assert [str(v) for v in span_iter(BitMatrix(3, ()))] == ["000"]
    rows = BitMatrix.from_strings(["11110000", "11001100", "10101010", "11111111"])
    assert len({v.bits for v in span_iter(rows)}) == 16


def test_span_array_matches_span_iter():
    rows = BitMatrix.from_strings(["1100", "0110", "0011"])
    assert span_array(rows).tolist() == [v.bits for v in span_iter(rows)]


def test_parity_and_reverse_bits():
    assert parity(0b1011) == 1
    assert parity(np.array([0, 3, 7])).tolist() == [0, 0, 1]
    assert reverse_bits(0b0001, 4) == 0b1000
    assert reverse_bits(0b0110, 4) == 0b0110


@given(st.integers(1, 40).flatmap(lambda n: st.tuples(vectors(n), vectors(n))))
def test_inclusion_exclusion(pair):
    v, w = pair
    assert weight(add(v, w)) == weight(v) + weight(w) - 2 * weight(meet(v, w))


@given(st.integers(1, 12).flatmap(lambda n: st.lists(vectors(n), min_size=0, max_size=8).map(lambda r: (n, r))))
def test_rref_properties(data):
    n, rows = data
    m = BitMatrix(n, tuple(rows))
    basis, r = rref(m)
    assert rref(basis)[0] == basis
    assert r == basis.nrows
    pivots = [(v.bits & -v.bits).bit_length() - 1 for v in basis]
    assert pivots == sorted(pivots) and len(set(pivots)) == r
    for i, v in enumerate(basis):
        for j, p in enumerate(pivots):
            assert v[p] == (i == j)
    # same span as the input rows
    assert set(span_array(basis).tolist()) == set(span_array(m.ints() or [0]).tolist())


@given(st.integers(1, 10).flatmap(lambda n: st.lists(vectors(n), max_size=6).map(lambda r: (n, r))))
def test_span_closed_under_addition(data):
    n, rows = data
    basis, r = rref(BitMatrix(n, tuple(rows)))
    words = span_array(basis)
    assert len(set(words.tolist())) == 1 << r
    assert 0 in words
    s = set(words.tolist())
    assert all((a ^ b) in s for a in words.tolist() for b in words.tolist())
