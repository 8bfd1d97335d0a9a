"""
Per-bit error and detection rates of a protected gate.

The analytic model enumerates faults in IR1, IR2 and the r FR
recomputations for uniformly random inputs. Activations whose three
inputs agree only fault in the unlikely mode, which is bounded by
``floor``. One Monte-Carlo estimate runs the same gate on a fabric, the
other scores the masking gates of generated k-ary programs.
"""

import csv
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np
from tqdm import tqdm

from ..codec import encode
from ..counters import CounterLayout
from ..fabric import C0, D_BASE, FaultModel, Subarray
from ..uprog import MicroProgram, ProgramExecutor, maj_ops
from .protect import ProtectionConfig, ShieldRows, XorTriple, gate_ops, gen_protected_program

logger = logging.getLogger(__name__)

UNLIKELY_FLOOR = 1e-20
RATE_FIELDS = ["p", "r", "error_rate", "detect_rate", "ci_low", "ci_high", "source", "scheme", "trials", "ops"]


@dataclass
class RateRow:
    p: float
    r: int
    error_rate: float
    detect_rate: float
    ci_low: float = float("nan")
    ci_high: float = float("nan")
    source: str = "analytic"
    scheme: str = "jc_ecc"
    trials: int = 0
    ops: int = 0


def rates_analytic(p: float, r: int, floor: float = UNLIKELY_FLOOR):
    """
    (error_rate, detect_rate) per protected bit.

    error = p^(r+1) * (3/2 - p); below ten times ``floor`` the unlikely
    fault mode dominates and ``floor`` is reported instead.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    q = 1.0 - p
    error = p ** (r + 1) * (1.5 - p)
    if error < 10 * floor:
        error = floor
    passed = 0.5 * (q ** (r + 1) + p ** (r + 1)) + 0.5 * (q ** (r + 2) + 2 * p ** (r + 1) * q)
    return error, 1.0 - passed


def wilson_interval(hits: int, trials: int, z: float = 3.0):
    if trials == 0:
        return 0.0, 1.0
    phat = hits / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def rates_montecarlo(
    p: float,
    r: int,
    trials: int,
    seed: int = 0,
    cols: int = 1024,
    progress: bool = False,
) -> RateRow:
    """
    Run ``trials`` protected XOR gates (one per column) and count silent
    errors and detections.

    A trial is detected when any FR differs from a ^ b, and an error when
    IR1 or IR2 is wrong and no FR check caught it.
    """
    rng = np.random.default_rng(seed)
    fabric = Subarray(D_BASE + 5, cols, FaultModel(p_likely=p, p_read=0.0, seed=seed + 1, data_dependent=True))
    a_row, b_row, ir1, ir2, fr = fabric.allocate(5)
    triple = XorTriple(ir1, ir2, fr)
    executor = ProgramExecutor(fabric)
    gate = MicroProgram.build(gate_ops(a_row, False, b_row, triple), "mc_gate")
    check = MicroProgram.build(maj_ops(ir1, ir2, C0, fr, invert_x=True), "mc_fr")

    errors = detected = done = 0
    batches = range(-(-trials // cols))
    for _ in tqdm(batches, desc=f"p={p:g} r={r}", disable=not progress, leave=False):
        width = min(cols, trials - done)
        a = rng.random(cols) < 0.5
        b = rng.random(cols) < 0.5
        fabric.write_row(a_row, a)
        fabric.write_row(b_row, b)
        executor.run(gate)
        caught = np.zeros(cols, dtype=bool)
        for _ in range(r):
            executor.run(check)
            caught |= fabric.peek_row(fr) != (a ^ b)
        wrong = (fabric.peek_row(ir1) != (a & b)) | (fabric.peek_row(ir2) != (a | b))
        errors += int((wrong & ~caught)[:width].sum())
        detected += int(caught[:width].sum())
        done += width
    lo, hi = wilson_interval(errors, done)
    logger.debug("monte carlo p=%g r=%d: %d errors, %d detections in %d trials", p, r, errors, detected, done)
    return RateRow(p, r, errors / done if done else 0.0, detected / done if done else 0.0, lo, hi, "mc", trials=done)


def rates_montecarlo_program(
    p: float,
    r: int,
    trials: int,
    n: int = 4,
    seed: int = 0,
    cols: int = 256,
    progress: bool = False,
) -> RateRow:
    """
    Error and detection rates of the masking gates inside real protected
    k-ary programs.

    Each batch loads random counter states and masks, generates the
    program for a random step and runs its feed and keep gates in place,
    scoring every gate column as one trial against its operands. Blocks
    are not retried, so every FR check is scored.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    rng = np.random.default_rng(seed)
    fm = FaultModel(p_likely=p, p_read=0.0, seed=seed + 1, data_dependent=True)
    fabric = Subarray(D_BASE + CounterLayout.rows_needed(n, 1, False) + 2 * n + 5, cols, fm)
    layout = CounterLayout.allocate(fabric, n, 1)
    rows = ShieldRows.allocate(fabric, n)
    executor = ProgramExecutor(fabric)
    cfg = ProtectionConfig(fr_checks=r)
    words = np.array([encode(v, n).bits for v in range(2 * n)], dtype=bool)

    errors = detected = done = 0
    with tqdm(total=trials, desc=f"program p={p:g} r={r}", disable=not progress, leave=False) as bar:
        while done < trials:
            states = rng.integers(0, 2 * n, size=cols)
            for i, row in enumerate(layout.bit_rows[0]):
                fabric.write_row(row, words[states, i])
            fabric.write_row(layout.mask_row, rng.random(cols) < 0.5)
            prog = gen_protected_program(layout, rows, int(rng.integers(1, 2 * n)), cfg=cfg)
            for blk in prog.blocks:
                if not blk.label.startswith(("feed", "keep")):
                    continue
                (x, inv), (y, _) = blk.checks[0].operands
                a = fabric.peek_row(x) ^ inv
                b = fabric.peek_row(y)
                ops, start = blk.program.ops, 0
                caught = np.zeros(cols, dtype=bool)
                for chk in blk.checks:
                    executor.run(MicroProgram.build(ops[start : chk.after], "mc_program_gate"))
                    start = chk.after
                    caught |= fabric.peek_row(chk.row) != (a ^ b)
                ir1, ir2 = blk.records
                wrong = (fabric.peek_row(ir1) != (a & b)) | (fabric.peek_row(ir2) != (a | b))
                width = min(cols, trials - done)
                errors += int((wrong & ~caught)[:width].sum())
                detected += int(caught[:width].sum())
                done += width
                bar.update(width)
                if done >= trials:
                    break
    lo, hi = wilson_interval(errors, done)
    logger.debug("program monte carlo p=%g r=%d: %d errors, %d detections in %d trials", p, r, errors, detected, done)
    return RateRow(p, r, errors / done, detected / done, lo, hi, "mc_program", trials=done)


def write_rate_csv(rows: Iterable[RateRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RATE_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
    return path
