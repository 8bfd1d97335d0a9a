"""
Bit-accurate model of one Ambit-style CIM subarray.

The subarray executes two command sequences:

    AAP src dst   row clone, optionally through a DCC complement port
    AP  triple    triple-row activation; all three rows take MAJ3 of
                  their prior contents, optionally copied into ``dst``

Scheduling lives in ``jc_cim.uprog``; this module is mechanism only.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

import numpy as np

from .addresses import C0, C1, D_BASE, MIN_ROWS, PORTS, MultiRowAddress, row_address
from .faults import FaultModel

logger = logging.getLogger(__name__)

DEFAULT_COLS = 512


@dataclass
class OpTally:
    """AAP/AP command counts."""

    aap: int = 0
    ap: int = 0

    @property
    def total(self) -> int:
        return self.aap + self.ap

    def __add__(self, other: "OpTally") -> "OpTally":
        return OpTally(self.aap + other.aap, self.ap + other.ap)

    def __sub__(self, other: "OpTally") -> "OpTally":
        return OpTally(self.aap - other.aap, self.ap - other.ap)

    def copy(self) -> "OpTally":
        return OpTally(self.aap, self.ap)

    def as_tuple(self):
        return (self.aap, self.ap)


class Subarray:
    """
    One subarray: a rows x cols bit matrix plus the B/C/D group map.

    Rows 5 and 7 have no storage of their own; they are complement ports of
    DCC0 (row 4) and DCC1 (row 6).
    """

    def __init__(self, rows: int, cols: int = DEFAULT_COLS, fault_model: Optional[FaultModel] = None):
        if rows < MIN_ROWS:
            raise FabricError(f"a subarray needs at least {MIN_ROWS} rows, got {rows}")
        if cols < 1:
            raise FabricError(f"row width must be positive, got {cols}")
        self.rows = rows
        self.cols = cols
        self.faults = fault_model or FaultModel()
        self.cells = np.zeros((rows, cols), dtype=bool)
        self.cells[C1] = True
        self.tally = OpTally()
        self._free: List[int] = list(range(D_BASE, rows))
        self._armed: Dict[int, np.ndarray] = {}

    # ------------------------------------------------------------------
    # Row allocation
    # ------------------------------------------------------------------

    @property
    def free_rows(self) -> int:
        return len(self._free)

    def allocate(self, count: int) -> List[int]:
        """Reserve ``count`` D-group rows, lowest first."""
        if count > len(self._free):
            raise RowAllocationError(f"requested {count} rows, {len(self._free)} free of {self.rows}")
        taken, self._free = self._free[:count], self._free[count:]
        return taken

    def release(self, rows: Iterable[int]) -> None:
        self._free = sorted(set(self._free).union(rows))

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def aap(self, src: MultiRowAddress, dst: MultiRowAddress) -> None:
        """Clone one row into 1-2 rows, inverting through DCC ports."""
        if src.width != 1:
            raise IllegalAddressError(f"AAP source {src} resolves to {src.width} rows")
        if dst.width > 2:
            raise IllegalAddressError(f"AAP destination {dst} resolves to {dst.width} rows")
        self._check_writable(dst)
        value = self.cells[src.targets[0]] ^ src.dcc_flags[0]
        value = value ^ self.faults.flips(self.cols, self.faults.p_read)
        self._store(dst, value)
        self.tally.aap += 1

    def ap(self, addr: MultiRowAddress, dst: Optional[MultiRowAddress] = None) -> None:
        """
        Triple-row activation.

        The sensed majority flips per column before write-back, so a fault
        lands identically in all three rows. With ``dst`` the sensed value
        is also copied out during the same activation.
        """
        if addr.width != 3:
            raise IllegalAddressError(f"AP address {addr} resolves to {addr.width} rows, need 3")
        if dst is not None:
            if dst.width > 2:
                raise IllegalAddressError(f"AP destination {dst} resolves to {dst.width} rows")
            self._check_writable(dst)
        a, b, c = (self.cells[r] ^ f for r, f in zip(addr.targets, addr.dcc_flags))
        maj = (a & b) | (a & c) | (b & c)
        maj = maj ^ self._activation_flips(a, b, c)
        self._store(addr, maj)
        if dst is not None:
            self._store(dst, maj)
        self.tally.ap += 1

    def read_row(self, row: int) -> np.ndarray:
        """Read a row (port rows read the complement); plumbing, not counted."""
        storage, inverted = self._resolve(row)
        value = self.cells[storage] ^ inverted
        return value ^ self.faults.flips(self.cols, self.faults.p_read)

    def peek_row(self, row: int) -> np.ndarray:
        """Fault-free view of a row."""
        storage, inverted = self._resolve(row)
        return self.cells[storage] ^ inverted

    def write_row(self, row: int, bits) -> None:
        """Host write of a full row (test setup, mask loads); not counted."""
        if row in (C0, C1):
            raise ConstantRowWriteError(f"row {row} is a constant row")
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (self.cols,):
            raise FabricError(f"row write expects {self.cols} bits, got shape {bits.shape}")
        self._store(row_address(row), bits)

    def clear_rows(self, rows: Iterable[int]) -> None:
        for r in rows:
            self.write_row(r, np.zeros(self.cols, dtype=bool))

    # ------------------------------------------------------------------
    # Fault hooks
    # ------------------------------------------------------------------

    def arm_fault(self, ap_ordinal: int, columns) -> None:
        """
        Force a flip on a future AP.

        Args:
            ap_ordinal: How many APs from now (0 = the next one)
            columns: Boolean mask or index list of columns to flip
        """
        mask = np.zeros(self.cols, dtype=bool)
        mask[columns] = True
        self._armed[self.tally.ap + ap_ordinal] = mask

    def _activation_flips(self, a, b, c) -> np.ndarray:
        fm = self.faults
        if fm.data_dependent and fm.p_likely != fm.p_read:
            equal = (a == b) & (b == c)
            p = np.where(equal, fm.p_read, fm.p_likely)
            flips = fm.flips(self.cols, p) if (fm.p_likely or fm.p_read) else np.zeros(self.cols, dtype=bool)
        else:
            flips = fm.flips(self.cols, fm.p_likely)
        forced = self._armed.pop(self.tally.ap, None)
        if forced is not None:
            logger.debug("injecting forced fault on AP #%d (%d columns)", self.tally.ap, int(forced.sum()))
            flips = flips ^ forced
        return flips

    # ------------------------------------------------------------------
    # Internals
    # ------------------------------------------------------------------

    def _resolve(self, row: int):
        if not 0 <= row < self.rows:
            raise FabricError(f"row {row} outside [0, {self.rows})")
        if row in PORTS:
            return PORTS[row], True
        return row, False

    def _check_writable(self, addr: MultiRowAddress) -> None:
        for r in addr.targets:
            if r in (C0, C1):
                raise ConstantRowWriteError(f"{addr} includes constant row {r}")
            if not 0 <= r < self.rows:
                raise FabricError(f"{addr} refers to row {r} outside [0, {self.rows})")

    def _store(self, addr: MultiRowAddress, value: np.ndarray) -> None:
        for r, flag in zip(addr.targets, addr.dcc_flags):
            self.cells[r] = value ^ flag


class FabricError(Exception):
    """Base exception for fabric errors."""

    pass


class IllegalAddressError(FabricError):
    """Raised when an address resolves to the wrong number of rows."""

    pass


class ConstantRowWriteError(FabricError):
    """Raised on any write to C0 or C1."""

    pass


class RowAllocationError(FabricError):
    """Raised when the D-group has too few free rows."""

    pass
