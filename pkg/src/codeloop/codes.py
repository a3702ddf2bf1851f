"""Doubly even binary codes: parsing, validation and built-in instances."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParseError, ValidationError
from .f2algebra import BitMatrix, BitVec, rref, span_array

EXHAUSTIVE_LIMIT = 4096

_ROW = re.compile(r"^[01]+$")


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    mode: str
    witness: BitVec | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class DoublyEvenCode:
    """A doubly even code given by an independent generator basis.

    The order of the basis rows is significant: it fixes the basis of the
    associated cubic space and hence every structure constant.
    """

    length: int
    basis: BitMatrix
    name: str = field(default="", compare=False)

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @classmethod
    def from_rows(cls, rows: BitMatrix, name: str = "", reduce: bool = True) -> "DoublyEvenCode":
        """Validate and wrap generator rows.

        With ``reduce`` the rows are replaced by their reduced echelon form;
        otherwise they must already be independent and are kept as given.
        """
        basis, r = rref(rows)
        if not reduce:
            if r != rows.nrows:
                raise ValidationError("generator rows are linearly dependent")
            basis = rows
        report = validate_doubly_even(basis)
        if not report.valid:
            raise ValidationError(f"code is not doubly even: {report.reason}", report.witness)
        return cls(rows.ncols, basis, name)

    def codewords(self) -> np.ndarray:
        """All codewords as packed ints, indexed by coefficient mask."""
        return span_array(self.basis)

    def weight_distribution(self) -> dict[int, int]:
        weights = np.bitwise_count(self.codewords())
        return dict(sorted(Counter(weights.tolist()).items()))


def validate_doubly_even(basis: BitMatrix, exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> ValidationReport:
    """Check that the span of ``basis`` has all weights divisible by 4.

    Always applies the basis criterion (each row weight divisible by 4 and
    each pairwise meet of even weight).  When the span has at most
    ``exhaustive_limit`` words it is also enumerated, as a guard on the
    criterion.
    """
    rows = basis.ints()
    n = basis.ncols
    verdict, witness, reason = True, None, ""
    for i, r in enumerate(rows):
        if r.bit_count() % 4:
            verdict, witness = False, BitVec(n, r)
            reason = f"row {i + 1} has weight {r.bit_count()}"
            break
    if verdict:
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                if (rows[i] & rows[j]).bit_count() % 2:
                    w = rows[i] ^ rows[j]
                    verdict, witness = False, BitVec(n, w)
                    reason = f"rows {i + 1} and {j + 1} meet in odd weight; their sum has weight {w.bit_count()}"
                    break
            if not verdict:
                break

    mode = "basis-criterion"
    if len(rows) <= 62 and (1 << len(rows)) <= exhaustive_limit and n <= 63:
        mode = "basis-criterion+exhaustive"
        words = span_array(rows)
        bad = np.nonzero(np.bitwise_count(words) % 4)[0]
        exhaustive_ok = bad.size == 0
        if exhaustive_ok != verdict:
            raise AssertionError("basis criterion disagrees with exhaustive enumeration")
        if not exhaustive_ok and witness is None:
            witness = BitVec(n, int(words[bad[0]]))
    return ValidationReport(verdict, mode, witness, reason)


def parse_code(text: str, name: str = "") -> DoublyEvenCode:
    rows: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not _ROW.match(line):
            raise ParseError(f"expected a string over {{0,1}}, got {line!r}", lineno)
        if rows and len(line) != len(rows[0]):
            raise DimensionError(f"line {lineno}: row length {len(line)} differs from {len(rows[0])}")
        rows.append(line)
    if not rows:
        raise ParseError("no generator rows")
    return DoublyEvenCode.from_rows(BitMatrix.from_strings(rows), name=name)


def serialize_code(code: DoublyEvenCode) -> str:
    lines = [f"# length {code.length} dimension {code.dim}"]
    lines += [str(r) for r in code.basis]
    return "\n".join(lines) + "\n"


# Extended Hamming [8,4]; the row order defines the basis b_1..b_4.
HAMMING8_ROWS = ("11110000", "11001100", "10101010", "11111111")

# x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1 generates the cyclic Golay code of
# length 23; shifts plus an overall parity bit give the extended code.
_GOLAY_POLY = (1 << 11) | (1 << 10) | (1 << 6) | (1 << 5) | (1 << 4) | (1 << 2) | 1


def _golay_rows() -> list[int]:
    rows = []
    for shift in range(12):
        r = _GOLAY_POLY << shift
        rows.append(r | ((r.bit_count() & 1) << 23))
    return rows


def builtin(name: str) -> DoublyEvenCode:
    """Reference codes: hamming8, hamming8_sub3, golay24, zero_<k>."""
    if name == "hamming8":
        return DoublyEvenCode.from_rows(BitMatrix.from_strings(HAMMING8_ROWS), name, reduce=False)
    if name == "hamming8_sub3":
        return DoublyEvenCode.from_rows(BitMatrix.from_strings(HAMMING8_ROWS[:3]), name, reduce=False)
    if name == "golay24":
        rows = tuple(BitVec(24, r) for r in _golay_rows())
        return DoublyEvenCode.from_rows(BitMatrix(24, rows), name)
    m = re.fullmatch(r"zero_(\d+)", name)
    if m:
        k = int(m.group(1))
        rows = tuple(BitVec(4 * k, 0b1111 << (4 * i)) for i in range(k))
        return DoublyEvenCode(4 * k, BitMatrix(4 * k, rows), name)
    raise LookupError(f"unknown built-in code {name!r}")


BUILTIN_NAMES = ("hamming8", "hamming8_sub3", "golay24", "zero_k")
