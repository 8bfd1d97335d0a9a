"""
Triple modular redundancy baseline for counter μPrograms.

The unprotected k-ary program runs three times into replica rows and a
MAJ vote per bit writes the shadow rows and O_next. Nothing is detected
or retried; a column is wrong when the vote is.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from ..fabric import C0, C1, D_BASE, FaultModel, Subarray, d, row_address
from ..uprog import MAJ_OPS, Direction, MicroOp, MicroProgram, ProgramExecutor, gen_kary_program, maj_ops
from .rates import UNLIKELY_FLOOR, RateRow, wilson_interval

logger = logging.getLogger(__name__)

REPLICAS = 3


@dataclass
class TmrRows:
    """Per replica: n result bits and a private O_next copy."""

    bits: List[List[int]]
    flags: List[int]

    @classmethod
    def allocate(cls, fabric: Subarray, n: int) -> "TmrRows":
        rows = fabric.allocate(REPLICAS * (n + 1))
        bits = [rows[t * n : (t + 1) * n] for t in range(REPLICAS)]
        return cls(bits, rows[REPLICAS * n :])


def tmr_program_ops(n: int) -> int:
    """Three flag copies and k-ary programs (7n + 8 each) plus n + 1 votes."""
    return REPLICAS * (7 * n + 8) + MAJ_OPS * (n + 1)


def gen_tmr_program(
    layout,
    rows: TmrRows,
    k: int,
    digit: int = 0,
    mask_row: Optional[int] = None,
    direction: Direction = Direction.UP,
) -> MicroProgram:
    """
    Triplicated masked k-ary program with per-bit voting.

    Like ``gen_kary_program`` the voted bits land in the shadow rows and
    the caller commits them.
    """
    layout.check_digit(digit)
    onext = layout.onext_rows[digit]
    ops: List[MicroOp] = []
    for t in range(REPLICAS):
        flags = list(layout.onext_rows)
        flags[digit] = rows.flags[t]
        view = replace(layout, shadow_rows=rows.bits[t], onext_rows=flags)
        ops.append(MicroOp.aap(row_address(onext), d(rows.flags[t])))
        ops.extend(gen_kary_program(view, k, digit, mask_row, direction).ops)
    for i, dst in enumerate(layout.shadow_rows):
        ops.extend(maj_ops(rows.bits[0][i], rows.bits[1][i], rows.bits[2][i], dst))
    ops.extend(maj_ops(rows.flags[0], rows.flags[1], rows.flags[2], onext))
    purpose = "tmr_inc" if direction is Direction.UP else "tmr_dec"
    return MicroProgram.build(ops, purpose, digit=digit, k=k)


def tmr_increment(
    bank,
    rows: TmrRows,
    k: int,
    digit: int = 0,
    mask_row: int = C1,
    direction: Direction = Direction.UP,
):
    """TMR counterpart of ``CounterBank.increment_digit``/``decrement_digit``."""
    tally = bank.executor.run(gen_tmr_program(bank.layout, rows, k, digit, mask_row, direction))
    bank.layout.commit_shadow(digit)
    bank.pending = True
    bank.stats["digit_increments"] += 1
    return tally


def rates_tmr_analytic(p: float, floor: float = UNLIKELY_FLOOR):
    """
    (error_rate, detect_rate) of a voted masking AND.

    Three in four input pairs activate mixed. A lone wrong replica escapes
    when the vote flips, two wrong replicas escape unless it flips, and
    three agree wrongly with a vote that cannot fault.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    q = 1.0 - p
    error = 0.75 * (6 * p * p * q * q + p**3)
    return max(error, floor), 0.0


def rates_tmr_montecarlo(
    p: float,
    trials: int,
    seed: int = 0,
    cols: int = 1024,
    progress: bool = False,
) -> RateRow:
    """Run ``trials`` voted AND gates, one per column, and count wrong votes."""
    rng = np.random.default_rng(seed)
    fabric = Subarray(D_BASE + 6, cols, FaultModel(p_likely=p, p_read=0.0, seed=seed + 1, data_dependent=True))
    a_row, b_row, out, *replicas = fabric.allocate(6)
    executor = ProgramExecutor(fabric)
    ops: List[MicroOp] = []
    for rep in replicas:
        ops.extend(maj_ops(a_row, b_row, C0, rep))
    ops.extend(maj_ops(*replicas, out))
    gate = MicroProgram.build(ops, "mc_tmr_gate")

    errors = done = 0
    for _ in tqdm(range(-(-trials // cols)), desc=f"tmr p={p:g}", disable=not progress, leave=False):
        width = min(cols, trials - done)
        a = rng.random(cols) < 0.5
        b = rng.random(cols) < 0.5
        fabric.write_row(a_row, a)
        fabric.write_row(b_row, b)
        executor.run(gate)
        errors += int((fabric.peek_row(out) != (a & b))[:width].sum())
        done += width
    lo, hi = wilson_interval(errors, done)
    logger.debug("tmr monte carlo p=%g: %d errors in %d trials", p, errors, done)
    return RateRow(p, 0, errors / done if done else 0.0, 0.0, lo, hi, "mc", "jc_tmr", done)
