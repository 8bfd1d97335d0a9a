"""
Multi-digit Johnson-counter banks living in one subarray.

A bank holds one counter per column. Digits are updated with masked k-ary
μPrograms; carries are parked in per-digit O_next rows and moved to the
next digit by ``ripple``.
"""

import logging
from collections import Counter
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from ..codec import INVALID, decode_columns, digits_lsd_first, encode
from ..fabric import C0, C1, OpTally, Subarray
from ..uprog import (
    Direction,
    MicroProgram,
    ProgramExecutor,
    gen_clear,
    gen_copy,
    gen_kary_program,
    gen_maj,
    gen_sign_fold,
)
from .iarm import ADD, RIPPLE, VirtualCounter, flush, plan
from .layout import CapacityError, CounterError, CounterLayout, DirectionError, LayoutError

logger = logging.getLogger(__name__)


class Policy(str, Enum):
    FULL_RIPPLE = "full_ripple"
    IARM = "iarm"


class CounterBank:
    """
    A bank of C = fabric.cols counters sharing one layout.

    Attributes:
        fabric: Subarray holding the rows
        layout: Row layout (bit rows rotate through the shadow set)
        scheduler: Virtual counter for the IARM policy, if attached
        policy: Default accumulation policy
        direction: Current counting direction
        pending: Whether any O_next row may hold a flag
        saturated: Columns that carried out of the MSD of an unsigned bank
        stats: Invocation counters (digit_increments, ripples, programs)
    """

    def __init__(
        self,
        fabric: Subarray,
        layout: CounterLayout,
        scheduler: Optional[VirtualCounter] = None,
        policy: Policy = Policy.FULL_RIPPLE,
        executor: Optional[ProgramExecutor] = None,
    ):
        if scheduler is not None and not scheduler.strict:
            raise CounterError("a bank scheduler must plan on mask-safe bounds (strict=True)")
        self.fabric = fabric
        self.layout = layout
        self.scheduler = scheduler
        self.policy = policy
        self.executor = executor or ProgramExecutor(fabric)
        self.direction = Direction.UP
        self.pending = False
        self.saturated = np.zeros(fabric.cols, dtype=bool)
        self.stats: Counter = Counter()

    @classmethod
    def alloc(
        cls,
        fabric: Subarray,
        n: int,
        D: int,
        signed: bool = False,
        policy: Policy = Policy.FULL_RIPPLE,
        executor: Optional[ProgramExecutor] = None,
    ) -> "CounterBank":
        """
        Allocate a zeroed bank.

        Args:
            fabric: Target subarray
            n: Bits per digit (radix 2n)
            D: Digit count
            signed: Allocate an O_sign row
            policy: Default accumulation policy; IARM attaches a mask-safe
                scheduler
        """
        layout = CounterLayout.allocate(fabric, n, D, signed)
        fabric.clear_rows(layout.all_rows)
        scheduler = VirtualCounter(n, D, signed=signed, strict=True) if policy is Policy.IARM else None
        return cls(fabric, layout, scheduler, policy, executor)

    def release(self) -> None:
        self.fabric.release(self.layout.all_rows)

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def D(self) -> int:
        return self.layout.D

    @property
    def C(self) -> int:
        return self.fabric.cols

    @property
    def signed(self) -> bool:
        return self.layout.signed

    @property
    def radix(self) -> int:
        return self.layout.radix

    @property
    def capacity(self) -> int:
        return self.layout.capacity

    # ------------------------------------------------------------------
    # Digit operations
    # ------------------------------------------------------------------

    def run(self, program: MicroProgram) -> OpTally:
        self.stats["programs"] += 1
        return self.executor.run(program)

    def _apply(self, digit: int, k: int, mask_row: int, direction: Direction) -> None:
        self.run(gen_kary_program(self.layout, k, digit, mask_row, direction))
        self.layout.commit_shadow(digit)
        self.stats["digit_increments"] += 1
        self.pending = True

    def increment_digit(self, digit: int, k: int, mask_row: int = C1) -> None:
        """Masked k-ary add on one digit with sticky O_next update."""
        self.layout.check_digit(digit)
        self._ensure_direction(Direction.UP)
        self._note_direct(digit, k)
        self._apply(digit, k, mask_row, Direction.UP)

    def decrement_digit(self, digit: int, k: int, mask_row: int = C1) -> None:
        """Masked k-ary subtract on one digit; O_next marks a pending borrow."""
        self.layout.check_digit(digit)
        self._ensure_direction(Direction.DOWN)
        self._note_direct(digit, k)
        self._apply(digit, k, mask_row, Direction.DOWN)

    def _note_direct(self, digit: int, k: int) -> None:
        if self.scheduler is not None:
            self.scheduler.digits[digit] += k
            self.scheduler.bounds[digit] += k

    def ripple(self, digit: int) -> None:
        """
        Move digit's pending flags into digit+1 and clear its O_next row.

        At the MSD a signed bank folds the flag into O_sign; an unsigned
        bank marks the columns as saturated and stays wrapped.
        """
        self.layout.check_digit(digit)
        flag = self.layout.onext_rows[digit]
        if digit < self.D - 1:
            self._apply(digit + 1, 1, flag, self.direction)
        elif self.signed:
            self.run(gen_sign_fold(self.layout, flag, self.direction))
        else:
            self._signal_saturation(flag)
        self.run(gen_clear(flag, purpose="clear_onext"))
        self.stats["ripples"] += 1

    def _signal_saturation(self, flag_row: int) -> None:
        hit = self.fabric.read_row(flag_row)
        if hit.any():
            self.saturated |= hit
            logger.warning(
                "bank saturated: %d column(s) carried out of the most significant digit", int(hit.sum())
            )

    def _ensure_direction(self, direction: Direction) -> None:
        if direction is self.direction:
            return
        if self.pending:
            if not self.signed:
                raise DirectionError(
                    f"switching to {direction.value} with unresolved flags needs a signed bank"
                )
            self.resolve()
        logger.debug("counting direction %s -> %s", self.direction.value, direction.value)
        self.direction = direction
        if self.scheduler is not None:
            self.scheduler.reset_unknown()

    def resolve(self) -> None:
        """Ripple every pending flag out so each digit is canonical."""
        if not self.pending:
            return
        if self.scheduler is not None:
            steps, self.scheduler = flush(self.scheduler)
            for step in steps:
                self.ripple(step.digit)
        else:
            for i in reversed(range(self.D)):
                self.ripple(i)
            for i in range(self.D):
                self.ripple(i)
        self.pending = False

    # ------------------------------------------------------------------
    # Accumulation
    # ------------------------------------------------------------------

    def accumulate_value(
        self,
        x: int,
        mask_row: int = C1,
        policy: Optional[Policy] = None,
        unit: bool = False,
    ) -> OpTally:
        """
        Add x to every column selected by mask_row.

        Args:
            x: Signed input; negative values count down
            mask_row: Row selecting the columns (C1 for all)
            policy: FULL_RIPPLE or IARM (defaults to the bank's policy)
            unit: Add each digit as d unit increments instead of one k-ary step

        Returns:
            AAP/AP commands consumed
        """
        before = self.fabric.tally.copy()
        if x == 0:
            return OpTally()
        policy = policy or self.policy
        direction = Direction.UP if x > 0 else Direction.DOWN
        magnitude = abs(x)
        self._check_range(x)
        digits = digits_lsd_first(magnitude, self.radix, self.D)
        self._ensure_direction(direction)

        if policy is Policy.IARM:
            if self.scheduler is None:
                raise CounterError("IARM policy needs an attached scheduler")
            steps, self.scheduler = plan(self.scheduler, digits)
            for step in steps:
                if step.kind == RIPPLE:
                    self.ripple(step.digit)
                elif step.kind == ADD:
                    self._add_digit(step.digit, step.amount, mask_row, direction, unit)
            self.pending = any(self.scheduler.level(i) >= self.radix for i in range(self.D))
        else:
            for i, amount in enumerate(digits):
                if amount:
                    self._add_digit(i, amount, mask_row, direction, unit)
                self.ripple(i)
            self.pending = False
        return self.fabric.tally - before

    def _add_digit(self, digit: int, amount: int, mask_row: int, direction: Direction, unit: bool) -> None:
        if unit:
            for _ in range(amount):
                self._apply(digit, 1, mask_row, direction)
        else:
            self._apply(digit, amount, mask_row, direction)

    def _check_range(self, x: int) -> None:
        if abs(x) >= self.capacity:
            raise CapacityError(f"|{x}| does not fit capacity {self.capacity}")
        if x < 0 and not self.signed:
            raise CapacityError("negative input on an unsigned bank")

    # ------------------------------------------------------------------
    # Counter-to-counter addition
    # ------------------------------------------------------------------

    def jc_add(self, other: "CounterBank", digit: int = 0, other_digit: Optional[int] = None) -> None:
        """
        Add one digit of ``other`` into one digit of this bank.

        Forward pass: with theta = MSB(C2), for each bit b of C2 from MSB to
        LSB unit-increment C1 under mask b | theta. Reverse pass: for each
        bit from LSB to MSB unit-increment under ~b & theta. Together the
        passes issue exactly C2's value in unit increments per column.
        """
        other_digit = digit if other_digit is None else other_digit
        if other.n != self.n:
            raise LayoutError(f"width mismatch: n={self.n} vs n={other.n}")
        if other is self and other_digit == digit:
            raise LayoutError("jc_add of a digit onto itself needs a snapshot bank")
        self.layout.check_digit(digit)
        other.layout.check_digit(other_digit)
        self._ensure_direction(Direction.UP)

        bits = list(other.layout.bit_rows[other_digit])
        theta = bits[-1]
        mask = self.layout.mask_row
        for j in reversed(range(self.n)):
            self.run(gen_maj(bits[j], theta, C1, mask, purpose="mask_or"))
            self._apply(digit, 1, mask, Direction.UP)
        for j in range(self.n):
            self.run(gen_maj(bits[j], theta, C0, mask, invert_x=True, purpose="mask_andnot"))
            self._apply(digit, 1, mask, Direction.UP)

    def vector_add(self, other: "CounterBank") -> None:
        """
        C1 <- C1 + C2 over all digits, rippling after each digit; for signed
        banks the MSD carry c gives the new sign MAJ(~c, s1, s2).
        """
        if (other.n, other.D) != (self.n, self.D):
            raise LayoutError(f"bank shapes differ: ({self.n},{self.D}) vs ({other.n},{other.D})")
        other.resolve()
        self.resolve()
        self._ensure_direction(Direction.UP)
        for i in range(self.D):
            self.jc_add(other, i, i)
            if i < self.D - 1 or not (self.signed and other.signed):
                self.ripple(i)
        if self.signed and other.signed:
            flag = self.layout.onext_rows[-1]
            s = self.layout.osign_row
            self.run(gen_maj(flag, s, other.layout.osign_row, s, invert_x=True, purpose="sign_add"))
            self.run(gen_clear(flag, purpose="clear_onext"))
            self.stats["ripples"] += 1
        self.pending = False

    def copy_from(self, other: "CounterBank") -> OpTally:
        """Row-clone every counter row of ``other`` into this bank."""
        if (other.n, other.D, other.signed) != (self.n, self.D, self.signed):
            raise LayoutError("copy between banks of different shape")
        before = self.fabric.tally.copy()
        pairs = list(zip(other.layout.counter_rows, self.layout.counter_rows))
        for src, dst in pairs:
            self.run(gen_copy(src, dst))
        self.direction = other.direction
        self.pending = other.pending
        return self.fabric.tally - before

    def load_values(self, values) -> None:
        """Host write of canonical counters (setup only, no ops charged)."""
        values = [int(v) for v in values]
        if len(values) > self.C:
            raise LayoutError(f"{len(values)} values for {self.C} columns")
        values += [0] * (self.C - len(values))
        low = -self.capacity if self.signed else 0
        bits = np.zeros((self.D, self.n, self.C), dtype=bool)
        sign = np.zeros(self.C, dtype=bool)
        for col, v in enumerate(values):
            if not low <= v < self.capacity:
                raise CapacityError(f"{v} outside [{low}, {self.capacity})")
            if v < 0:
                sign[col] = True
                v += self.capacity
            for i, digit in enumerate(digits_lsd_first(v, self.radix, self.D)):
                bits[i, :, col] = encode(digit, self.n).bits
        for i, rows in enumerate(self.layout.bit_rows):
            for j, row in enumerate(rows):
                self.fabric.write_row(row, bits[i, j])
        self.fabric.clear_rows(self.layout.onext_rows)
        if self.signed:
            self.fabric.write_row(self.layout.osign_row, sign)
        self.pending = False
        if self.scheduler is not None:
            self.scheduler.reset_unknown()

    # ------------------------------------------------------------------
    # Readout
    # ------------------------------------------------------------------

    def digit_values(self) -> np.ndarray:
        """(D, C) physical digit values, INVALID where a codeword is broken."""
        out = np.empty((self.D, self.C), dtype=np.int64)
        for i, rows in enumerate(self.layout.bit_rows):
            slab = np.stack([self.fabric.read_row(r) for r in rows])
            out[i] = decode_columns(slab)
        return out

    def flag_values(self) -> np.ndarray:
        return np.stack([self.fabric.read_row(r) for r in self.layout.onext_rows])

    def read_counters(self) -> List[Optional[int]]:
        """
        Decode every column, folding O_next flags (value + 2n per flag at
        that digit) and O_sign. Columns with a broken codeword read as None.
        """
        digits = self.digit_values()
        flags = self.flag_values()
        sign = self.fabric.read_row(self.layout.osign_row) if self.signed else np.zeros(self.C, dtype=bool)
        r = self.radix
        values: List[Optional[int]] = []
        invalid = 0
        for col in range(self.C):
            column = digits[:, col]
            if (column == INVALID).any():
                values.append(None)
                invalid += 1
                continue
            total = 0
            for i in reversed(range(self.D)):
                total = total * r + int(column[i]) + r * int(flags[i, col])
            values.append(total - self.capacity * int(sign[col]))
        if invalid:
            logger.warning("%d column(s) hold invalid codewords", invalid)
        return values

    def dump_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        """Counter dump with header ``column,digit,value,o_next``."""
        digits = self.digit_values()
        flags = self.flag_values()
        lines = ["column,digit,value,o_next"]
        for col in range(self.C):
            for i in range(self.D):
                v = int(digits[i, col])
                lines.append(f"{col},{i},{'invalid' if v == INVALID else v},{int(flags[i, col])}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    def copy_out(self, clear: bool = True):
        """
        Read the counters out and reset the bank for the next output row.

        Args:
            clear: Reset the rows afterwards; the last output row of a
                kernel stays in place for dumps

        Returns:
            (values, charge): decoded values and the AAP charge of cloning
            every counter row to another subarray
        """
        values = self.read_counters()
        charge = OpTally(aap=len(self.layout.counter_rows))
        if not clear:
            return values, charge
        self.fabric.clear_rows(self.layout.counter_rows)
        if self.scheduler is not None:
            self.scheduler.reset()
        self.direction = Direction.UP
        self.pending = False
        self.saturated[:] = False
        return values, charge
