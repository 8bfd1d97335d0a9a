"""
Johnson-counter codec.

Main Classes:
    JcWord: One n-bit codeword, LSB first
    OracleCounter: Integer ground truth for multi-digit counters

Exceptions:
    CodecError: Base exception for codec errors
    InvalidCodewordError: Bit pattern is not a JC state
    ValueRangeError: Value or step out of range
"""

from .jc import (
    INVALID,
    CodecError,
    InvalidCodewordError,
    JcWord,
    OracleCounter,
    ValueRangeError,
    codeword_table,
    decode,
    decode_columns,
    digits_lsd_first,
    encode,
    hamming,
    is_valid,
    oracle_kary_add,
    oracle_kary_sub,
)

__all__ = [
    # Types
    "JcWord",
    "OracleCounter",
    # Exceptions
    "CodecError",
    "InvalidCodewordError",
    "ValueRangeError",
    # Codec
    "encode",
    "decode",
    "is_valid",
    "codeword_table",
    "decode_columns",
    "INVALID",
    # Oracle
    "oracle_kary_add",
    "oracle_kary_sub",
    "digits_lsd_first",
    "hamming",
]
