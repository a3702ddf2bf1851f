"""Moufang code loops built from doubly even codes through groups with triality."""

from .codes import DoublyEvenCode, builtin, parse_code, validate_doubly_even
from .cubic import CubicSpace, from_code, parse_cubic, random_space, serialize_cubic
from .errors import (
    CapacityError,
    CodeLoopError,
    ContextError,
    DimensionError,
    ParseError,
    StructuralError,
    ValidationError,
)
from .f2algebra import BitMatrix, BitVec
from .moufang import CodeLoop, LoopElement
from .triality import RHO, SIGMA, GroupElement, TrialityGroup, TrialityMap

__all__ = [
    "BitMatrix", "BitVec", "CapacityError", "CodeLoop", "CodeLoopError", "ContextError", "CubicSpace",
    "DimensionError", "DoublyEvenCode", "GroupElement", "LoopElement", "ParseError", "RHO", "SIGMA",
    "StructuralError", "TrialityGroup", "TrialityMap", "ValidationError", "builtin", "from_code",
    "parse_code", "parse_cubic", "random_space", "serialize_cubic", "validate_doubly_even",
]
