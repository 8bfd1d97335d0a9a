"""
CIM fabric model.

Main Classes:
    Subarray: Bit-accurate subarray with AAP/AP commands
    MultiRowAddress: Symbolic address resolving to 1-3 rows
    FaultModel: Per-column fault injection
    OpTally: AAP/AP counters

Exceptions:
    FabricError: Base exception for fabric errors
    IllegalAddressError: Address width unsuitable for the command
    ConstantRowWriteError: Write to C0/C1
    RowAllocationError: D-group exhausted
"""

from .addresses import (
    B_ADDRESSES,
    C0,
    C0_ADDR,
    C1,
    C1_ADDR,
    D_BASE,
    DCC0,
    DCC0_N,
    DCC1,
    DCC1_N,
    T0,
    T1,
    T2,
    T3,
    MultiRowAddress,
    b,
    d,
    parse_label,
    row_address,
)
from .faults import FaultModel
from .snapshot import dump_state, load_state, save_state
from .subarray import (
    DEFAULT_COLS,
    ConstantRowWriteError,
    FabricError,
    IllegalAddressError,
    OpTally,
    RowAllocationError,
    Subarray,
)

__all__ = [
    # Primary classes
    "Subarray",
    "MultiRowAddress",
    "FaultModel",
    "OpTally",
    # Exceptions
    "FabricError",
    "IllegalAddressError",
    "ConstantRowWriteError",
    "RowAllocationError",
    # Address map
    "B_ADDRESSES",
    "b",
    "d",
    "row_address",
    "parse_label",
    "C0_ADDR",
    "C1_ADDR",
    "T0",
    "T1",
    "T2",
    "T3",
    "DCC0",
    "DCC0_N",
    "DCC1",
    "DCC1_N",
    "C0",
    "C1",
    "D_BASE",
    "DEFAULT_COLS",
    # Snapshots
    "dump_state",
    "load_state",
    "save_state",
]
