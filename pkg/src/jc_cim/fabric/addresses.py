"""
Row numbering and the Ambit-style B-group address map.

Physical rows 0-3 are T0-T3, row 4 is DCC0 and row 6 is DCC1. Rows 5 and 7
are the complement ports of the two dual-contact cells: reading them returns
the negated cell and writing them stores the negated value. Rows 8 and 9
are the constant rows C0 and C1; data rows start at 10.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

T0, T1, T2, T3 = 0, 1, 2, 3
DCC0, DCC0_N, DCC1, DCC1_N = 4, 5, 6, 7
C0, C1 = 8, 9
D_BASE = 10
B_GROUP_ROWS = 8
MIN_ROWS = 10

PORTS = {DCC0_N: DCC0, DCC1_N: DCC1}

ROW_NAMES = {
    T0: "T0",
    T1: "T1",
    T2: "T2",
    T3: "T3",
    DCC0: "DCC0",
    DCC0_N: "~DCC0",
    DCC1: "DCC1",
    DCC1_N: "~DCC1",
    C0: "C0",
    C1: "C1",
}


@dataclass(frozen=True)
class MultiRowAddress:
    """
    A symbolic row address resolving to 1-3 physical rows.

    ``targets`` are storage rows; ``dcc_flags`` marks targets reached
    through a complement port.
    """

    label: str
    targets: Tuple[int, ...]
    dcc_flags: Tuple[bool, ...]

    def __post_init__(self):
        if not 1 <= len(self.targets) <= 3:
            raise ValueError(f"{self.label}: address must resolve to 1-3 rows")
        if len(self.dcc_flags) != len(self.targets):
            raise ValueError(f"{self.label}: one dcc flag per target required")

    @property
    def width(self) -> int:
        return len(self.targets)

    def __str__(self) -> str:
        return self.label


def _b(label: str, *entries: Tuple[int, bool]) -> MultiRowAddress:
    return MultiRowAddress(label, tuple(r for r, _ in entries), tuple(f for _, f in entries))


# B11 activates {T0, T1, DCC0} rather than Ambit's {T0, T1, T2}.
B_ADDRESSES: Dict[str, MultiRowAddress] = {
    a.label: a
    for a in (
        _b("B0", (T0, False)),
        _b("B1", (T1, False)),
        _b("B2", (T2, False)),
        _b("B3", (T3, False)),
        _b("B4", (DCC0, False)),
        _b("B5", (DCC0, True)),
        _b("B6", (DCC1, False)),
        _b("B7", (DCC1, True)),
        _b("B8", (DCC0, True), (T0, False)),
        _b("B9", (DCC1, True), (T1, False)),
        _b("B10", (T2, False), (T3, False)),
        _b("B11", (T0, False), (T1, False), (DCC0, False)),
        _b("B12", (T0, False), (T1, False), (T2, False)),
        _b("B13", (T1, False), (T2, False), (T3, False)),
        _b("B14", (DCC0, False), (T1, False), (T2, False)),
        _b("B15", (DCC1, False), (T0, False), (T3, False)),
    )
}

C0_ADDR = MultiRowAddress("C0", (C0,), (False,))
C1_ADDR = MultiRowAddress("C1", (C1,), (False,))


def b(index: int) -> MultiRowAddress:
    """B-group address by number, e.g. ``b(11)``."""
    try:
        return B_ADDRESSES[f"B{index}"]
    except KeyError:
        raise ValueError(f"no B-group address B{index}") from None


def d(row: int) -> MultiRowAddress:
    """Single data row address."""
    if row < D_BASE:
        raise ValueError(f"row {row} is not in the D-group")
    return MultiRowAddress(f"D{row}", (row,), (False,))


def row_address(row: int) -> MultiRowAddress:
    """Single-row address for any physical or port row index."""
    if row >= D_BASE:
        return d(row)
    if row == C0:
        return C0_ADDR
    if row == C1:
        return C1_ADDR
    if row in PORTS:
        return MultiRowAddress(ROW_NAMES[row], (PORTS[row],), (True,))
    return MultiRowAddress(ROW_NAMES[row], (row,), (False,))


def parse_label(label: str) -> MultiRowAddress:
    """Resolve a listing label (``B11``, ``C0``, ``D42``)."""
    label = label.strip().upper()
    if label in B_ADDRESSES:
        return B_ADDRESSES[label]
    if label == "C0":
        return C0_ADDR
    if label == "C1":
        return C1_ADDR
    if label.startswith("D") and label[1:].isdigit():
        return d(int(label[1:]))
    raise ValueError(f"unknown row address {label!r}")
