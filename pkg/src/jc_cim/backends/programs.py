"""
Counter μPrograms for the non-Ambit primitive sets.

Both backends compute the same masked transition as Ambit,
shadow_i = (b_i & ~m) | (s_i' & m), and the same sticky flag update,
into the same shadow rows:

* Pinatubo: nonstateful AND / OR / NOT / NOR into a destination row.
  Every step costs the same: an inverted source folds into a NOR.
  The overflow check is PINATUBO_FLAG_OPS of the total.
* MAGIC: bulk INIT-to-1 plus NOR, which can only pull an initialized
  output row down.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

from ..fabric import Subarray
from ..uprog import Direction, MicroOp, MicroProgram, OpKind, TransitionPattern, add_step, gen_kary_program

logger = logging.getLogger(__name__)

PINATUBO_FLAG_OPS = 3


class BackendKind(str, Enum):
    AMBIT = "ambit"
    PINATUBO = "pinatubo"
    MAGIC = "magic"


@dataclass
class BackendRows:
    """Scratch rows for one digit update: ~m, per-bit temporaries and flag terms."""

    not_mask: int
    t1: List[int]
    t2: List[int]
    t3: List[int]
    f1: int
    f2: int
    f3: int
    f4: int

    @classmethod
    def allocate(cls, fabric: Subarray, n: int) -> "BackendRows":
        rows = fabric.allocate(3 * n + 5)
        return cls(rows[0], rows[1 : n + 1], rows[n + 1 : 2 * n + 1], rows[2 * n + 1 : 3 * n + 1], *rows[3 * n + 1 :])

    @property
    def all_rows(self) -> List[int]:
        return [self.not_mask, *self.t1, *self.t2, *self.t3, self.f1, self.f2, self.f3, self.f4]


def _op(kind: OpKind, inputs, outputs) -> MicroOp:
    return MicroOp.rows(kind, inputs, outputs)


def _flag_operands(layout, digit: int, direction: Direction):
    # g = p & ~q for k <= n and m & (p | ~q) for k > n
    theta = layout.msb_row(digit)
    msb_new = layout.shadow_rows[layout.n - 1]
    return (theta, msb_new) if direction is Direction.UP else (msb_new, theta)


# ----------------------------------------------------------------------
# Pinatubo
# ----------------------------------------------------------------------


def pinatubo_increment(layout, rows: BackendRows, k: int, digit: int, m: int, direction: Direction) -> List[MicroOp]:
    n = layout.n
    bits = layout.bit_rows[digit]
    pattern = TransitionPattern.from_step(n, add_step(n, k, direction))
    ops = [_op(OpKind.NOT, [m], [rows.not_mask])]
    for i, (j, inverted) in enumerate(pattern.sources):
        # feed term s' & m; an inverted source is ~(b_j | ~m)
        ops.append(_op(OpKind.AND, [bits[i], rows.not_mask], [rows.t1[i]]))
        if inverted:
            ops.append(_op(OpKind.NOR, [bits[j], rows.not_mask], [rows.t2[i]]))
        else:
            ops.append(_op(OpKind.AND, [bits[j], m], [rows.t2[i]]))
        ops.append(_op(OpKind.OR, [rows.t1[i], rows.t2[i]], [layout.shadow_rows[i]]))
    return ops + _pinatubo_flag(layout, rows, k, digit, m, direction, pattern)


def _pinatubo_flag(layout, rows: BackendRows, k, digit, m, direction, pattern) -> List[MicroOp]:
    n = layout.n
    p, q = _flag_operands(layout, digit, direction)
    onext = layout.onext_rows[digit]
    j, _ = pattern.sources[n - 1]
    if k <= n:
        ops = [_op(OpKind.NOT, [q], [rows.f1]), _op(OpKind.AND, [p, rows.f1], [rows.f3])]
    elif direction is Direction.UP:
        # the new MSB is ~b_j under m, so p | ~q = theta | b_j
        ops = [_op(OpKind.OR, [p, layout.bit_rows[digit][j]], [rows.f2]), _op(OpKind.AND, [rows.f2, m], [rows.f3])]
    else:
        # m & (b_j | ~theta): the MSB feed term or'd with ~(theta | ~m)
        ops = [_op(OpKind.NOR, [q, rows.not_mask], [rows.f2]), _op(OpKind.OR, [rows.t2[n - 1], rows.f2], [rows.f3])]
    ops.append(_op(OpKind.OR, [onext, rows.f3], [onext]))
    return ops


def pinatubo_ops(n: int, k: int) -> int:
    """3n + 1 for counting and PINATUBO_FLAG_OPS for the overflow check, for every k."""
    return 3 * n + 1 + PINATUBO_FLAG_OPS


# ----------------------------------------------------------------------
# MAGIC
# ----------------------------------------------------------------------


def magic_increment(layout, rows: BackendRows, k: int, digit: int, m: int, direction: Direction) -> List[MicroOp]:
    n = layout.n
    bits = layout.bit_rows[digit]
    pattern = TransitionPattern.from_step(n, add_step(n, k, direction))
    ops = [
        _op(OpKind.INIT, [], [rows.not_mask]),
        _op(OpKind.NOR, [m], [rows.not_mask]),
    ]
    for i, (j, inverted) in enumerate(pattern.sources):
        # shadow_i = NOR(NOR(b_i, m), NOR(s', ~m))
        shadow = layout.shadow_rows[i]
        if inverted:
            ops.append(_op(OpKind.INIT, [], [rows.t1[i], rows.t2[i], rows.t3[i], shadow]))
            ops.append(_op(OpKind.NOR, [bits[j]], [rows.t3[i]]))
            feed = rows.t3[i]
        else:
            ops.append(_op(OpKind.INIT, [], [rows.t1[i], rows.t2[i], shadow]))
            feed = bits[j]
        ops.append(_op(OpKind.NOR, [bits[i], m], [rows.t1[i]]))
        ops.append(_op(OpKind.NOR, [feed, rows.not_mask], [rows.t2[i]]))
        ops.append(_op(OpKind.NOR, [rows.t1[i], rows.t2[i]], [shadow]))

    p, q = _flag_operands(layout, digit, direction)
    onext = layout.onext_rows[digit]
    if k <= n:
        # g = NOR(~p, q)
        ops.append(_op(OpKind.INIT, [], [rows.f1, rows.f3, rows.f4]))
        ops.append(_op(OpKind.NOR, [p], [rows.f1]))
        ops.append(_op(OpKind.NOR, [rows.f1, q], [rows.f3]))
    else:
        # h = NOR(p, ~q) = ~(p | ~q); g = NOR(~m, h)
        ops.append(_op(OpKind.INIT, [], [rows.f1, rows.f2, rows.f3, rows.f4]))
        ops.append(_op(OpKind.NOR, [q], [rows.f1]))
        ops.append(_op(OpKind.NOR, [p, rows.f1], [rows.f2]))
        ops.append(_op(OpKind.NOR, [rows.not_mask, rows.f2], [rows.f3]))
    ops.append(_op(OpKind.NOR, [onext, rows.f3], [rows.f4]))
    ops.append(_op(OpKind.INIT, [], [onext]))
    ops.append(_op(OpKind.NOR, [rows.f4], [onext]))
    return ops


def magic_ops(n: int, k: int) -> int:
    """2 for ~m, 4 per bit (5 with an inverted source), 6 or 7 for the flag."""
    inverted = TransitionPattern.from_step(n, k).inverted_count
    return 2 + 4 * n + inverted + (6 if k <= n else 7)


# ----------------------------------------------------------------------
# Dispatch
# ----------------------------------------------------------------------


def gen_increment(
    backend: BackendKind,
    layout,
    k: int,
    digit: int = 0,
    rows: Optional[BackendRows] = None,
    mask_row: Optional[int] = None,
    direction: Direction = Direction.UP,
) -> MicroProgram:
    """
    Masked k-ary digit update with flag check for the given backend.

    Ambit ignores ``rows``; the other backends need scratch rows from
    ``BackendRows.allocate``.
    """
    backend = BackendKind(backend)
    if backend is BackendKind.AMBIT:
        return gen_kary_program(layout, k, digit, mask_row, direction)
    if rows is None:
        raise BackendError(f"{backend.value} programs need scratch rows")
    n = layout.n
    if not 1 <= k <= 2 * n - 1:
        raise BackendError(f"step {k} outside [1, {2 * n - 1}] for n={n}")
    layout.check_digit(digit)
    m = layout.mask_row if mask_row is None else mask_row
    builder = pinatubo_increment if backend is BackendKind.PINATUBO else magic_increment
    ops = builder(layout, rows, k, digit, m, direction)
    purpose = "kary_inc" if direction is Direction.UP else "kary_dec"
    return MicroProgram.build(ops, purpose, digit=digit, k=k, backend=backend.value)


def increment_ops(backend: BackendKind, n: int, k: int) -> int:
    backend = BackendKind(backend)
    if backend is BackendKind.AMBIT:
        return 7 * n + 7
    if backend is BackendKind.PINATUBO:
        return pinatubo_ops(n, k)
    return magic_ops(n, k)


class BackendError(Exception):
    """Base exception for backend errors."""

    pass


class UnsupportedBackendError(BackendError):
    """Raised when a program uses a primitive its backend lacks."""

    pass
