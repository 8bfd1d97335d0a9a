"""
Broadcast-and-accumulate kernels on a live CounterBank.

Every kernel returns a KernelResult with the decoded values and the
AAP/AP commands the fabric spent; host-side work (radix conversion,
slicing, shifts) is free.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..counters import CounterBank, Policy
from ..fabric import C0, OpTally
from ..uprog import gen_clear, gen_maj
from .matrices import DomainError, MaskMatrix, ShapeError

logger = logging.getLogger(__name__)


@dataclass
class KernelResult:
    values: List[Optional[int]]
    tally: OpTally = field(default_factory=OpTally)

    def as_array(self) -> np.ndarray:
        """Values as an object array (None marks invalid columns)."""
        return np.array(self.values, dtype=object)


def _slice_order(x: Sequence[int], masks: MaskMatrix) -> List[tuple]:
    """(slice index, signed contribution) pairs, positives first, zeros skipped."""
    pairs = []
    for s, (w, src) in enumerate(zip(masks.weights, masks.sources)):
        v = int(x[src]) * w
        if v:
            pairs.append((s, v))
    pairs.sort(key=lambda p: p[1] < 0)
    return pairs


def accumulate_row(
    bank: CounterBank,
    x: Sequence[int],
    masks: MaskMatrix,
    mask_rows: Sequence[int],
    policy: Optional[Policy] = None,
    unit: bool = False,
) -> OpTally:
    """Accumulate x_i * w_s under every slice row s, then resolve."""
    if len(x) != masks.K:
        raise ShapeError(f"input has {len(x)} entries, mask matrix has {masks.K} rows")
    if len(mask_rows) != masks.slice_count:
        raise ShapeError("mask matrix is not stored in the fabric")
    before = bank.fabric.tally.copy()
    for s, v in _slice_order(x, masks):
        bank.accumulate_value(v, mask_rows[s], policy=policy, unit=unit)
    bank.resolve()
    return bank.fabric.tally - before


def gemv(
    bank: CounterBank,
    x: Sequence[int],
    masks: MaskMatrix,
    mask_rows: Sequence[int],
    policy: Optional[Policy] = None,
    unit: bool = False,
) -> KernelResult:
    """Y = sum_i x_i * Z_i over the first N columns of the bank."""
    tally = accumulate_row(bank, x, masks, mask_rows, policy, unit)
    return KernelResult(bank.read_counters()[: masks.N], tally)


def gemm(
    bank: CounterBank,
    X,
    masks: MaskMatrix,
    mask_rows: Sequence[int],
    policy: Optional[Policy] = None,
    unit: bool = False,
) -> KernelResult:
    """
    Output rows computed one at a time in the same counter rows; each
    finished row is copied out at (n+1)*D (+1 signed) AAPs and the bank reset.
    The last row is left in the bank.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    tally = OpTally()
    rows: List[List[Optional[int]]] = []
    for o, x in enumerate(X):
        tally = tally + accumulate_row(bank, x, masks, mask_rows, policy, unit)
        values, charge = bank.copy_out(clear=o < len(X) - 1)
        tally = tally + charge
        rows.append(values[: masks.N])
        logger.debug("gemm row %d done, %d ops so far", o, tally.total)
    return KernelResult([v for row in rows for v in row], tally)


def shift_left(bank: CounterBank, i: int, scratch: Optional[CounterBank] = None) -> KernelResult:
    """
    Multiply every counter by 2^i by adding the bank to a copy of itself
    i times. Results past capacity wrap and raise the saturation signal.
    """
    if i < 0:
        raise DomainError(f"shift amount must be non-negative, got {i}")
    before = bank.fabric.tally.copy()
    own = scratch is None and i > 0
    if own:
        scratch = CounterBank.alloc(bank.fabric, bank.n, bank.D, bank.signed)
    try:
        for _ in range(i):
            bank.resolve()
            scratch.copy_from(bank)
            bank.vector_add(scratch)
    finally:
        if own:
            scratch.release()
    return KernelResult(bank.read_counters(), bank.fabric.tally - before)


def relu(bank: CounterBank) -> KernelResult:
    """Zero every column whose O_sign is set: b <- b & ~s for each bit row."""
    if not bank.signed:
        raise DomainError("relu needs a signed bank")
    before = bank.fabric.tally.copy()
    bank.resolve()
    s = bank.layout.osign_row
    for rows in bank.layout.bit_rows:
        for row in rows:
            bank.run(gen_maj(s, row, C0, row, invert_x=True, purpose="relu_mask"))
    bank.run(gen_clear(s, purpose="relu_sign"))
    return KernelResult(bank.read_counters(), bank.fabric.tally - before)


def vector_add(bank: CounterBank, other: CounterBank) -> KernelResult:
    """C1 <- C1 + C2 across all digits."""
    before = bank.fabric.tally.copy()
    bank.vector_add(other)
    return KernelResult(bank.read_counters(), bank.fabric.tally - before)
