"""
Bit-serial ripple-carry accumulation on Ambit, the binary baseline.

Per accumulator bit j with addend bit a and carry c:

    t1  = MAJ(~c, a, s_j)
    c'  = MAJ(a, s_j, c)
    s_j = MAJ(~c', t1, c)
    c   = c'

Addend bits above the addend width read C0, so every add walks all w
accumulator bits whatever the addend's value.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..fabric import C0, OpTally, Subarray, d, row_address
from ..uprog import MAJ_OPS, MicroOp, MicroProgram, ProgramExecutor, gen_clear, maj_ops
from .programs import BackendError, BackendKind, UnsupportedBackendError

RCA_BIT_OPS = 13


def rca_ops(width: int) -> int:
    """One carry clear plus 13 ops per accumulator bit."""
    return RCA_BIT_OPS * width + 1


def gen_rca_add(addend_rows: Sequence[int], acc_rows: Sequence[int], carry: int, t1: int, t2: int) -> MicroProgram:
    if len(addend_rows) > len(acc_rows):
        raise BackendError(f"{len(addend_rows)}-bit addend does not fit a {len(acc_rows)}-bit accumulator")
    ops: List[MicroOp] = list(gen_clear(carry).ops)
    for j, s in enumerate(acc_rows):
        a = addend_rows[j] if j < len(addend_rows) else C0
        ops += maj_ops(carry, a, s, t1, invert_x=True)
        ops += maj_ops(a, s, carry, t2)
        ops += maj_ops(t2, t1, carry, s, invert_x=True)
        ops.append(MicroOp.aap(row_address(t2), d(carry)))
    return MicroProgram.build(ops, "rca_add", backend=BackendKind.AMBIT.value)


def rca_add(
    backend: BackendKind,
    fabric: Subarray,
    addend_rows: Sequence[int],
    acc_rows: Sequence[int],
    scratch: Sequence[int],
    executor: Optional[ProgramExecutor] = None,
) -> OpTally:
    """
    acc += addend, both bit-sliced LSB first, one value per column.

    Args:
        scratch: Three rows for the carry and the two temporaries

    Returns:
        Commands spent, always ``rca_ops(len(acc_rows))``
    """
    if BackendKind(backend) is not BackendKind.AMBIT:
        raise UnsupportedBackendError("the ripple-carry baseline is built from Ambit MAJ operations")
    carry, t1, t2 = scratch
    executor = executor or ProgramExecutor(fabric)
    return executor.run(gen_rca_add(addend_rows, acc_rows, carry, t1, t2))


@dataclass
class RcaAccumulator:
    """A w-bit binary accumulator per column, for side-by-side runs."""

    fabric: Subarray
    width: int

    def __post_init__(self):
        self.acc_rows = self.fabric.allocate(self.width)
        self.scratch = self.fabric.allocate(3)
        self.executor = ProgramExecutor(self.fabric)
        self.fabric.clear_rows(self.acc_rows)

    def add(self, addend_rows: Sequence[int]) -> OpTally:
        return rca_add(BackendKind.AMBIT, self.fabric, addend_rows, self.acc_rows, self.scratch, self.executor)

    def load_addend(self, values: Sequence[int], rows: Sequence[int]) -> None:
        """Host write of bit-sliced addends into ``rows``."""
        vals = np.zeros(self.fabric.cols, dtype=np.int64)
        vals[: len(values)] = values
        for j, r in enumerate(rows):
            self.fabric.write_row(r, ((vals >> j) & 1).astype(bool))

    def read(self) -> List[int]:
        weights = [1 << j for j in range(self.width)]
        bits = np.stack([self.fabric.peek_row(r) for r in self.acc_rows]).astype(object)
        return [int(sum(int(b) * w for b, w in zip(bits[:, c], weights))) for c in range(self.fabric.cols)]


def rca_ecc_ops(width: int, r: int) -> int:
    """
    Ripple-carry add with every MAJ embedded in a checked XOR: each of the
    three gates per bit adds its complementary IR2 and r FR recomputations,
    one MAJ each.
    """
    if r < 1:
        raise BackendError(f"r must be positive, got {r}")
    return rca_ops(width) + 3 * width * MAJ_OPS * (1 + r)


def rca_tmr_ops(width: int) -> int:
    """Three ripple-carry adds into replicas plus a MAJ vote per bit."""
    return 3 * rca_ops(width) + MAJ_OPS * width
