"""
Alternative CIM primitive sets and the ripple-carry baseline.

Main Classes:
    BackendKind: AMBIT, PINATUBO or MAGIC
    ArrayExecutor: Runs Pinatubo/MAGIC programs on a Subarray
    BackendRows: Scratch rows for non-Ambit digit updates
    RcaAccumulator: Bit-serial binary accumulator per column

Exceptions:
    BackendError: Base exception for backend errors
    UnsupportedBackendError: Primitive not available on the backend
"""

from .arrays import BACKEND_KINDS, ArrayExecutor, apply_increment, executor_for
from .programs import (
    PINATUBO_FLAG_OPS,
    BackendError,
    BackendKind,
    BackendRows,
    UnsupportedBackendError,
    gen_increment,
    increment_ops,
    magic_ops,
    pinatubo_ops,
)
from .rca import RCA_BIT_OPS, RcaAccumulator, gen_rca_add, rca_add, rca_ecc_ops, rca_ops, rca_tmr_ops

__all__ = [
    # Primary classes
    "BackendKind",
    "ArrayExecutor",
    "BackendRows",
    "RcaAccumulator",
    # Exceptions
    "BackendError",
    "UnsupportedBackendError",
    # Programs
    "gen_increment",
    "apply_increment",
    "executor_for",
    "increment_ops",
    "pinatubo_ops",
    "PINATUBO_FLAG_OPS",
    "magic_ops",
    "BACKEND_KINDS",
    # Ripple-carry baseline
    "rca_add",
    "gen_rca_add",
    "rca_ops",
    "rca_ecc_ops",
    "rca_tmr_ops",
    "RCA_BIT_OPS",
]
