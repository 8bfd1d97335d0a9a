"""
Matrix and vector kernels built on counter banks.

Main Classes:
    TensorEngine: Sizes fabrics and banks per kernel call
    MaskMatrix: Binary or power-of-two-sliced mask rows
    HostInput: Validated integer input matrix
    KernelResult: Decoded values plus command tally

Exceptions:
    TensorError: Base exception for tensor kernels
    ShapeError: Operand shapes disagree
    DomainError: Operand outside a kernel's domain
"""

from .engine import TensorEngine
from .kernels import KernelResult, accumulate_row, gemm, gemv, relu, shift_left, vector_add
from .matrices import (
    DomainError,
    HostInput,
    MaskMatrix,
    ShapeError,
    TensorError,
    binary_slice,
    csd_slice,
    digits_for,
    digits_of,
    load_matrix_csv,
    naf,
    random_inputs,
)

__all__ = [
    # Primary classes
    "TensorEngine",
    "MaskMatrix",
    "HostInput",
    "KernelResult",
    # Exceptions
    "TensorError",
    "ShapeError",
    "DomainError",
    # Kernels
    "gemv",
    "gemm",
    "shift_left",
    "relu",
    "vector_add",
    "accumulate_row",
    # Host-side helpers
    "digits_of",
    "digits_for",
    "naf",
    "csd_slice",
    "binary_slice",
    "load_matrix_csv",
    "random_inputs",
]
