import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codeloop.codes import builtin, parse_code, serialize_code, validate_doubly_even
from codeloop.errors import DimensionError, ParseError, ValidationError
from codeloop.f2algebra import BitMatrix, BitVec, span_array


def test_parse_two_blocks():
    code = parse_code("11110000\n00001111\n")
    assert (code.length, code.dim) == (8, 2)


def test_parse_rejects_weight_three_with_witness():
    with pytest.raises(ValidationError) as err:
        parse_code("1110\n")
    assert str(err.value.witness) == "1110"
    assert err.value.witness.weight == 3


def test_parse_reduces_duplicate_rows():
    assert parse_code("11110000\n11110000\n").dim == 1


def test_parse_comments_and_whitespace():
    code = parse_code("# a comment\n\n11110000   \n# more\n00001111\n")
    assert code.dim == 2


def test_parse_errors_report_line_numbers():
    with pytest.raises(ParseError, match="line 2"):
        parse_code("1111\n11x1\n")
    with pytest.raises(DimensionError, match="line 2"):
        parse_code("11110000\n1111\n")
    with pytest.raises(ParseError):
        parse_code("# only comments\n")


def test_validator_examples():
    ham = BitMatrix.from_strings(["11110000", "11001100", "10101010", "11111111"])
    r = validate_doubly_even(ham)
    assert r.valid and r.mode == "basis-criterion+exhaustive"
    bad = validate_doubly_even(BitMatrix.from_strings(["11100000"]))
    assert not bad.valid and bad.witness.weight == 3
    assert validate_doubly_even(BitMatrix(8, ())).valid


def test_validator_catches_odd_meet_witness():
    # both rows weight 4, meet weight 1: their sum has weight 6
    r = validate_doubly_even(BitMatrix.from_strings(["11110000", "10001110"]))
    assert not r.valid and r.witness.weight % 4 == 2


def test_builtin_hamming8():
    code = builtin("hamming8")
    assert (code.length, code.dim) == (8, 4)
    assert code.weight_distribution() == {0: 1, 4: 14, 8: 1}
    assert [str(r) for r in code.basis] == ["11110000", "11001100", "10101010", "11111111"]


def test_builtin_sub3_is_first_three_rows():
    code = builtin("hamming8_sub3")
    assert [str(r) for r in code.basis] == ["11110000", "11001100", "10101010"]


def test_builtin_golay24():
    code = builtin("golay24")
    assert (code.length, code.dim) == (24, 12)
    assert code.weight_distribution() == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


def test_builtin_zero_k():
    assert [str(r) for r in builtin("zero_2").basis] == ["11110000", "00001111"]
    assert builtin("zero_5").dim == 5


def test_unknown_builtin():
    with pytest.raises(LookupError):
        builtin("hamming7")


@pytest.mark.parametrize("name", ["hamming8", "hamming8_sub3", "golay24", "zero_3"])
def test_serialize_round_trip(name):
    code = builtin(name)
    again = parse_code(serialize_code(code))
    assert again.length == code.length
    assert set(again.codewords().tolist()) == set(code.codewords().tolist())
    assert parse_code(serialize_code(again)).basis == again.basis


rows_strategy = st.integers(4, 16).flatmap(
    lambda m: st.lists(st.integers(0, (1 << m) - 1), min_size=1, max_size=8).map(lambda r: (m, r))
)


@settings(max_examples=300)
@given(rows_strategy)
def test_basis_criterion_matches_enumeration(data):
    m, rows = data
    from codeloop.f2algebra import rref

    basis, _ = rref(BitMatrix(m, tuple(BitVec(m, r) for r in rows)))
    words = span_array(basis)
    truth = bool((np.bitwise_count(words) % 4 == 0).all())
    # the validator itself raises if its two modes disagree
    assert validate_doubly_even(basis).valid == truth
