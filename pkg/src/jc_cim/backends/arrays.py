"""
Array models for the Pinatubo and MAGIC primitive sets.

Both reuse the Subarray bit matrix and its fault model; only the command
semantics differ. Every row-list op counts as one command.
"""

import logging
from typing import Optional

import numpy as np

from ..fabric import C0, C1, OpTally, Subarray
from ..uprog import MAGIC_KINDS, PINATUBO_KINDS, Direction, MicroProgram, OpKind, ProgramExecutor
from .programs import BackendKind, UnsupportedBackendError, gen_increment

logger = logging.getLogger(__name__)

BACKEND_KINDS = {
    BackendKind.PINATUBO: PINATUBO_KINDS,
    BackendKind.MAGIC: MAGIC_KINDS,
}


class ArrayExecutor:
    """
    Runs row-list programs of one backend on a Subarray.

    Pinatubo ops, NOR included, sense their inputs and write the result
    into the output row. MAGIC NOR can only reset cells, so an output row holds
    ``out & ~(a | b | ...)``; INIT sets its outputs to 1.
    """

    def __init__(self, fabric: Subarray, backend: BackendKind):
        backend = BackendKind(backend)
        if backend is BackendKind.AMBIT:
            raise UnsupportedBackendError("Ambit programs run on ProgramExecutor")
        self.fabric = fabric
        self.backend = backend
        self.kinds = BACKEND_KINDS[backend]

    def run(self, program: MicroProgram) -> OpTally:
        before = self.fabric.tally.copy()
        for op in program.ops:
            if op.kind not in self.kinds:
                raise UnsupportedBackendError(f"{op.kind.value} is not a {self.backend.value} primitive")
            self._apply(op.kind, op.inputs, op.outputs)
            self.fabric.tally.aap += 1
        used = self.fabric.tally - before
        logger.debug("ran %s on %s: %d ops", program.meta.purpose, self.backend.value, used.total)
        return used

    def _sense(self, rows) -> np.ndarray:
        return np.stack([self.fabric.peek_row(r) for r in rows])

    def _apply(self, kind: OpKind, inputs, outputs) -> None:
        fab = self.fabric
        if kind is OpKind.INIT:
            for r in outputs:
                fab.write_row(r, np.ones(fab.cols, dtype=bool))
            return
        vals = self._sense(inputs)
        if kind is OpKind.AND:
            result = vals.all(axis=0)
        elif kind is OpKind.OR:
            result = vals.any(axis=0)
        elif kind is OpKind.NOT:
            result = ~vals[0]
        else:
            result = ~vals.any(axis=0)
        p = fab.faults.p_likely if len(inputs) > 1 else fab.faults.p_read
        result = result ^ fab.faults.flips(fab.cols, p)
        for r in outputs:
            if r in (C0, C1):
                raise UnsupportedBackendError(f"{kind.value} writes constant row {r}")
            if kind is OpKind.NOR and self.backend is BackendKind.MAGIC:
                fab.write_row(r, fab.peek_row(r) & result)
            else:
                fab.write_row(r, result)


def executor_for(fabric: Subarray, backend: BackendKind, executor: Optional[ProgramExecutor] = None):
    """ProgramExecutor for Ambit, ArrayExecutor otherwise."""
    backend = BackendKind(backend)
    if backend is BackendKind.AMBIT:
        return executor or ProgramExecutor(fabric)
    return ArrayExecutor(fabric, backend)


def apply_increment(
    backend: BackendKind,
    fabric: Subarray,
    layout,
    k: int,
    digit: int = 0,
    rows=None,
    mask_row: Optional[int] = None,
    direction: Direction = Direction.UP,
    executor=None,
) -> OpTally:
    """Generate, run and commit one masked k-ary digit update on any backend."""
    program = gen_increment(backend, layout, k, digit, rows, mask_row, direction)
    used = (executor or executor_for(fabric, backend)).run(program)
    layout.commit_shadow(digit)
    return used
