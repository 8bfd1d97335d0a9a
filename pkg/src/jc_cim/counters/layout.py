"""Row layout of a multi-digit counter bank inside one subarray."""

from dataclasses import dataclass, field
from typing import List, Optional

from ..fabric import Subarray


@dataclass
class CounterLayout:
    """
    Row indices for a bank of C counters (one per column).

    Each digit owns n bit rows (LSB first) and one O_next row; signed banks
    add an O_sign row. ``shadow_rows`` receive a digit's new bits during a
    k-ary program and are swapped with that digit's bit rows afterwards, so
    bit rows move between digits over time. ``mask_row`` and ``aux_row`` are
    scratch rows for computed masks.
    """

    n: int
    D: int
    signed: bool
    bit_rows: List[List[int]]
    onext_rows: List[int]
    osign_row: Optional[int]
    shadow_rows: List[int]
    mask_row: int
    aux_row: int
    extra_rows: List[int] = field(default_factory=list)

    @classmethod
    def allocate(cls, sub: Subarray, n: int, D: int, signed: bool = False) -> "CounterLayout":
        if n < 1 or D < 1:
            raise LayoutError(f"need n >= 1 and D >= 1, got n={n}, D={D}")
        needed = cls.rows_needed(n, D, signed)
        if needed > sub.free_rows:
            raise LayoutError(f"bank needs {needed} rows, subarray has {sub.free_rows} free")
        rows = sub.allocate(needed)
        it = iter(rows)
        bit_rows, onext = [], []
        for _ in range(D):
            bit_rows.append([next(it) for _ in range(n)])
            onext.append(next(it))
        osign = next(it) if signed else None
        shadow = [next(it) for _ in range(n)]
        return cls(n, D, signed, bit_rows, onext, osign, shadow, next(it), next(it))

    @staticmethod
    def rows_needed(n: int, D: int, signed: bool) -> int:
        return D * (n + 1) + int(signed) + n + 2

    @property
    def radix(self) -> int:
        return 2 * self.n

    @property
    def capacity(self) -> int:
        return self.radix**self.D

    @property
    def counter_rows(self) -> List[int]:
        """Rows holding counter state (bits, O_next, O_sign)."""
        rows = [r for digit in self.bit_rows for r in digit] + list(self.onext_rows)
        if self.osign_row is not None:
            rows.append(self.osign_row)
        return rows

    @property
    def all_rows(self) -> List[int]:
        return self.counter_rows + list(self.shadow_rows) + [self.mask_row, self.aux_row] + self.extra_rows

    def msb_row(self, digit: int) -> int:
        return self.bit_rows[digit][self.n - 1]

    def check_digit(self, digit: int) -> None:
        if not 0 <= digit < self.D:
            raise LayoutError(f"digit {digit} outside [0, {self.D})")

    def commit_shadow(self, digit: int) -> None:
        """Swap a digit's bit rows with the shadow set (host remap, no ops)."""
        self.bit_rows[digit], self.shadow_rows = self.shadow_rows, self.bit_rows[digit]


class CounterError(Exception):
    """Base exception for counter-bank errors."""

    pass


class LayoutError(CounterError):
    """Raised when a layout cannot be allocated or addressed."""

    pass


class CapacityError(CounterError):
    """Raised when an input stream cannot fit the bank's capacity."""

    pass


class DirectionError(CounterError):
    """Raised when counting direction changes with unresolved flags."""

    pass
