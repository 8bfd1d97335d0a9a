"""
Fixed μProgram templates for Johnson-counter arithmetic on Ambit.

Each generator returns an immutable MicroProgram. The masked step computes

    b' = MAJ(b & ~m, b | m, s')        s' = s or ~s

which equals (b & ~m) | (s' & m): with m=1 the first two operands are
(0, 1) and s' decides, with m=0 both are b.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Tuple

from ..fabric import C0, C0_ADDR, C1, MultiRowAddress, b, d, row_address
from .program import MicroOp, MicroProgram, ProgramError

if TYPE_CHECKING:
    from ..counters.layout import CounterLayout

logger = logging.getLogger(__name__)

MASKED_STEP_OPS = 7
OVERFLOW_CHECK_OPS = 7
MAJ_OPS = 4


class Direction(str, Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class TransitionPattern:
    """
    Per-bit sources of a k-ary JC transition.

    ``sources[i]`` is ``(j, inverted)``: new bit i takes old bit j,
    complemented when ``inverted`` is set.
    """

    n: int
    k: int
    sources: Tuple[Tuple[int, bool], ...]

    @classmethod
    def from_step(cls, n: int, k: int) -> "TransitionPattern":
        if not 1 <= k <= 2 * n - 1:
            raise ProgramError(f"step {k} outside [1, {2 * n - 1}] for n={n}")
        sources = []
        if k <= n:
            for i in range(n):
                sources.append((i - k, False) if i >= k else (n - k + i, True))
        else:
            kk = k - n
            for i in range(n):
                sources.append((i - kk, True) if i >= kk else (n - kk + i, False))
        return cls(n, k, tuple(sources))

    @property
    def inverted_count(self) -> int:
        return sum(inv for _, inv in self.sources)

    def apply(self, bits: Tuple[int, ...]) -> Tuple[int, ...]:
        """Unmasked transition on a bit tuple (host-side reference)."""
        return tuple(bits[j] ^ int(inv) for j, inv in self.sources)


def add_step(n: int, k: int, direction: Direction) -> int:
    """Forward step realising +k or -k on a radix-2n digit."""
    return k if direction is Direction.UP else 2 * n - k


# ----------------------------------------------------------------------
# Building blocks
# ----------------------------------------------------------------------


def _src(row: int) -> MultiRowAddress:
    return row_address(row)


def maj_ops(x: int, y: int, z: int, dst: int, invert_x: bool = False) -> List[MicroOp]:
    """MAJ(x', y, z) -> dst through DCC0/T1/T2 (B14); x' = ~x when invert_x."""
    return [
        MicroOp.aap(_src(x), b(5) if invert_x else b(4)),
        MicroOp.aap(_src(y), b(1)),
        MicroOp.aap(_src(z), b(2)),
        MicroOp.ap(b(14), d(dst)),
    ]


def gen_maj(x: int, y: int, z: int, dst: int, invert_x: bool = False, purpose: str = "maj") -> MicroProgram:
    """
    General MAJ3 with an optionally inverted first operand.

    With z = C0 this is AND, with z = C1 it is OR.
    """
    return MicroProgram.build(maj_ops(x, y, z, dst, invert_x), purpose)


def gen_clear(row: int, purpose: str = "clear") -> MicroProgram:
    return MicroProgram.build([MicroOp.aap(C0_ADDR, d(row))], purpose)


def gen_copy(src: int, dst: int, purpose: str = "copy") -> MicroProgram:
    return MicroProgram.build([MicroOp.aap(_src(src), d(dst))], purpose)


# ----------------------------------------------------------------------
# Counter templates
# ----------------------------------------------------------------------


def masked_step_ops(target_old: int, source: int, inverted: bool, mask: int, dst: int) -> List[MicroOp]:
    return [
        MicroOp.aap(_src(mask), b(9)),  # T1 = m, DCC1 = ~m
        MicroOp.aap(C0_ADDR, b(8)),  # T0 = 0, DCC0 = 1
        MicroOp.aap(_src(target_old), b(10)),  # T2 = T3 = b
        MicroOp.ap(b(15)),  # b & ~m
        MicroOp.ap(b(14)),  # b | m
        MicroOp.aap(_src(source), b(5) if inverted else b(4)),
        MicroOp.ap(b(11), d(dst)),
    ]


def gen_masked_step(
    layout: "CounterLayout",
    i: int,
    src: int,
    inverted: bool,
    digit: int = 0,
    mask_row: Optional[int] = None,
) -> MicroProgram:
    """
    One masked bit update: shadow_i <- (b_i & ~m) | (src' & m).

    Args:
        layout: Bank layout
        i: Target bit index
        src: Source bit index within the same digit
        inverted: Take the source through the DCC complement port
        digit: Digit index
        mask_row: Mask row (defaults to the layout's scratch mask row)

    Returns:
        A 7-op program writing the new bit into the shadow row
    """
    layout.check_digit(digit)
    rows = layout.bit_rows[digit]
    mask = layout.mask_row if mask_row is None else mask_row
    ops = masked_step_ops(rows[i], rows[src], inverted, mask, layout.shadow_rows[i])
    return MicroProgram.build(ops, "masked_step", digit=digit)


def overflow_check_ops(
    theta: int, msb_new: int, onext: int, zero_or_mask: int, direction: Direction
) -> List[MicroOp]:
    if direction is Direction.UP:
        first, second = msb_new, theta  # g = MAJ(theta, ~MSB', z)
    else:
        first, second = theta, msb_new  # g = MAJ(~theta, MSB', z)
    return [
        MicroOp.aap(_src(first), b(7)),
        MicroOp.aap(_src(second), b(0)),
        MicroOp.aap(_src(zero_or_mask), b(3)),
        MicroOp.ap(b(15)),
        MicroOp.aap(C0_ADDR, b(5)),  # DCC0 = 1
        MicroOp.aap(_src(onext), b(1)),
        MicroOp.ap(b(11), d(onext)),  # O' = O | g
    ]


def gen_overflow_check(
    layout: "CounterLayout",
    digit: int = 0,
    k: int = 1,
    mask_row: Optional[int] = None,
    direction: Direction = Direction.UP,
) -> MicroProgram:
    """
    Sticky O_next update after a k-ary program has filled the shadow rows.

    Increment: O |= theta & ~MSB' (k <= n), O |= MAJ(theta, ~MSB', m) (k > n).
    Decrement: O |= ~theta & MSB' (k <= n), O |= MAJ(~theta, MSB', m) (k > n).
    theta is the old MSB, still in place because results go to shadow rows.
    """
    layout.check_digit(digit)
    mask = layout.mask_row if mask_row is None else mask_row
    z = mask if k > layout.n else C0
    ops = overflow_check_ops(
        layout.msb_row(digit), layout.shadow_rows[layout.n - 1], layout.onext_rows[digit], z, direction
    )
    return MicroProgram.build(ops, "overflow_check" if direction is Direction.UP else "underflow_check", digit=digit, k=k)


def gen_underflow_check(layout: "CounterLayout", digit: int = 0, k: int = 1, mask_row: Optional[int] = None):
    return gen_overflow_check(layout, digit, k, mask_row, Direction.DOWN)


def gen_kary_program(
    layout: "CounterLayout",
    k: int,
    digit: int = 0,
    mask_row: Optional[int] = None,
    direction: Direction = Direction.UP,
) -> MicroProgram:
    """
    Masked k-ary increment (or decrement) of one digit plus its flag update.

    The program writes into the shadow rows; the caller commits them with
    ``layout.commit_shadow(digit)`` after execution. Length is 7n + 7 for
    every k.
    """
    n = layout.n
    if not 1 <= k <= 2 * n - 1:
        raise ProgramError(f"step {k} outside [1, {2 * n - 1}] for n={n}")
    layout.check_digit(digit)
    pattern = TransitionPattern.from_step(n, add_step(n, k, direction))
    mask = layout.mask_row if mask_row is None else mask_row
    rows = layout.bit_rows[digit]
    ops: List[MicroOp] = []
    for i, (j, inverted) in enumerate(pattern.sources):
        ops.extend(masked_step_ops(rows[i], rows[j], inverted, mask, layout.shadow_rows[i]))
    ops.extend(gen_overflow_check(layout, digit, k, mask, direction).ops)
    purpose = "kary_inc" if direction is Direction.UP else "kary_dec"
    return MicroProgram.build(ops, purpose, digit=digit, k=k)


def gen_unit_rowclone(layout: "CounterLayout", digit: int = 0) -> MicroProgram:
    """
    Unmasked in-place unit increment with plain row clones: save ~MSB into
    DCC0, shift every bit up by one, feed DCC0 back into b1. n + 1 ops.
    """
    layout.check_digit(digit)
    rows = layout.bit_rows[digit]
    ops = [MicroOp.aap(d(rows[-1]), b(5))]
    for i in range(layout.n - 1, 0, -1):
        ops.append(MicroOp.aap(d(rows[i - 1]), d(rows[i])))
    ops.append(MicroOp.aap(b(4), d(rows[0])))
    return MicroProgram.build(ops, "unit_rowclone", digit=digit, k=1)


def gen_sign_fold(layout: "CounterLayout", flag_row: int, direction: Direction) -> MicroProgram:
    """
    Fold an MSD carry into O_sign.

    Carry out of the MSD (counting up) clears the sign; a borrow out of the
    MSD (counting down) sets it.
    """
    if layout.osign_row is None:
        raise ProgramError("sign fold on a bank without O_sign")
    s = layout.osign_row
    if direction is Direction.UP:
        return gen_maj(flag_row, s, C0, s, invert_x=True, purpose="sign_fold")
    return gen_maj(flag_row, s, C1, s, purpose="sign_fold")


# Program registry - maps purpose tags to generators
PROGRAM_REGISTRY: Dict[str, Callable[..., MicroProgram]] = {
    "masked_step": gen_masked_step,
    "kary": gen_kary_program,
    "overflow_check": gen_overflow_check,
    "underflow_check": gen_underflow_check,
    "unit_rowclone": gen_unit_rowclone,
    "sign_fold": gen_sign_fold,
    "maj": gen_maj,
    "clear": gen_clear,
    "copy": gen_copy,
}


def get_generator(name: str) -> Optional[Callable[..., MicroProgram]]:
    """
    Get the generator registered under a purpose tag.

    Args:
        name: Registry key

    Returns:
        Generator function or None if not found
    """
    return PROGRAM_REGISTRY.get(name)


def list_available_programs() -> List[str]:
    """Return all registered generator names."""
    return list(PROGRAM_REGISTRY.keys())
