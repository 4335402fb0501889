"""Exact arithmetic backend: fields, series, jets and residues."""

from .field import (
    QQ,
    SYMBOLS,
    DescriptorMismatch,
    FieldDescriptor,
    FieldElement,
    NestedExtension,
    NotASquare,
    Q,
    adjoin_sqrt,
    decode_element,
    encode_element,
    parse_rational,
    symbolic,
    to_fmpq,
    unify,
)
from .hbar import EVEN, MIXED, ODD, HbarSeries
from .jet import Jet
from .laurent import INF, LaurentSeries, TruncationError, laurent_expand, principal_part_order, residue
from .numeric import LogExpression, evaluate
from .poly import Polynomial, RationalFunction, numerator_denominator, rational_function

__all__ = [
    "QQ", "SYMBOLS", "DescriptorMismatch", "FieldDescriptor", "FieldElement", "NestedExtension",
    "NotASquare", "Q", "adjoin_sqrt", "decode_element", "encode_element", "parse_rational", "symbolic", "to_fmpq", "unify",
    "EVEN", "MIXED", "ODD", "HbarSeries", "Jet", "INF", "LaurentSeries", "TruncationError",
    "laurent_expand", "principal_part_order", "residue", "LogExpression", "evaluate",
    "Polynomial", "RationalFunction", "numerator_denominator", "rational_function",
]
