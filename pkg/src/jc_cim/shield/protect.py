"""
Parity-protected counter μPrograms.

Every masking AND is computed as the IR1 half of a gate that also
produces the complementary OR (IR2). FR = IR2 & ~IR1 equals the XOR of the
gate inputs, so its check bits must equal the XOR of the inputs' check
bits. FR is recomputed and checked r times; a mismatch restarts the gate's
block. The per-bit OR combine and the O_next merge have mutually exclusive
operands, so they are XORs as well and are checked directly, with no extra
operations.

``protected_program_ops`` is the CIM-operation cost of a protected digit
increment; ``protected_schedule_ops`` counts the Ambit commands the
generator emits for the same work.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ..fabric import C0, C0_ADDR, C1, C1_ADDR, OpTally, Subarray, b, d, row_address
from ..uprog import Direction, MicroOp, MicroProgram, ProgramExecutor, TransitionPattern, add_step, maj_ops
from .parity import ParityState

logger = logging.getLogger(__name__)

GATE_OPS = 7
FR_OPS = 4
COMBINE_OPS = 4
PAIR_OPS = 8
MERGE_COMMIT_OPS = 1


@dataclass(frozen=True)
class XorTriple:
    """Rows receiving IR1 (the AND), IR2 (the OR) and FR (their XOR)."""

    ir1: int
    ir2: int
    fr: int


@dataclass(frozen=True)
class ProtectionConfig:
    fr_checks: int = 2
    max_retries: int = 3
    demorgan: bool = False

    def __post_init__(self):
        if self.fr_checks < 1:
            raise ShieldError(f"fr_checks must be at least 1, got {self.fr_checks}")
        if self.max_retries < 0:
            raise ShieldError(f"max_retries must be non-negative, got {self.max_retries}")


@dataclass
class ShieldRows:
    """
    Scratch rows of a protected program: one feed and one keep term per bit,
    two overflow terms, two IR2 rows and the FR row.
    """

    feed: List[int]
    keep: List[int]
    g: int
    g2: int
    ir2: int
    ir2b: int
    fr: int

    @classmethod
    def allocate(cls, fabric: Subarray, n: int) -> "ShieldRows":
        rows = fabric.allocate(2 * n + 5)
        return cls(rows[:n], rows[n : 2 * n], *rows[2 * n :])

    @property
    def all_rows(self) -> List[int]:
        return self.feed + self.keep + [self.g, self.g2, self.ir2, self.ir2b, self.fr]


@dataclass(frozen=True)
class ParityCheck:
    """After ``after`` ops of a block, ``row`` must carry the XOR parity of ``operands``."""

    after: int
    row: int
    operands: Tuple[Tuple[int, bool], ...]


@dataclass(frozen=True)
class ProtectedBlock:
    label: str
    program: MicroProgram
    checks: Tuple[ParityCheck, ...] = ()
    records: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.program)


@dataclass
class ProtectedProgram:
    blocks: List[ProtectedBlock]
    purpose: str = "protected"
    digit: int = 0
    k: int = 1

    def __len__(self) -> int:
        return sum(len(blk) for blk in self.blocks)

    @property
    def ops(self) -> List[MicroOp]:
        return [op for blk in self.blocks for op in blk.program.ops]


@dataclass
class ProtectionReport:
    tally: OpTally = field(default_factory=OpTally)
    retries: int = 0
    detected: int = 0


# ----------------------------------------------------------------------
# Block builders
# ----------------------------------------------------------------------


def gate_ops(x: int, x_inverted: bool, y: int, triple: XorTriple) -> List[MicroOp]:
    """IR1 = x' & y and IR2 = x' | y from one load of the B group."""
    return [
        MicroOp.aap(row_address(x), b(7) if x_inverted else b(6)),
        MicroOp.aap(row_address(x), b(5) if x_inverted else b(4)),
        MicroOp.aap(C0_ADDR, b(0)),
        MicroOp.aap(C1_ADDR, b(1)),
        MicroOp.aap(row_address(y), b(10)),
        MicroOp.ap(b(15), d(triple.ir1)),
        MicroOp.ap(b(14), d(triple.ir2)),
    ]


def protected_gate(x: int, x_inverted: bool, y: int, triple: XorTriple, r: int, label: str) -> ProtectedBlock:
    """Gate plus r FR checks: FR = MAJ(~IR1, IR2, 0) must match P(x') ^ P(y)."""
    ops = gate_ops(x, x_inverted, y, triple)
    checks = []
    operands = ((x, x_inverted), (y, False))
    for t in range(r):
        ops.extend(maj_ops(triple.ir1, triple.ir2, C0, triple.fr, invert_x=True))
        checks.append(ParityCheck(GATE_OPS + FR_OPS * (t + 1), triple.fr, operands))
    program = MicroProgram.build(ops, "protected_gate")
    return ProtectedBlock(label, program, tuple(checks), (triple.ir1, triple.ir2))


def combine_block(a: int, b_row: int, dst: int, label: str) -> ProtectedBlock:
    """dst = a | b for disjoint a and b, checked as an XOR."""
    program = MicroProgram.build(maj_ops(a, b_row, C1, dst), "protected_combine")
    check = ParityCheck(COMBINE_OPS, dst, ((a, False), (b_row, False)))
    return ProtectedBlock(label, program, (check,), (dst,))


def pair_block(bj: int, m: int, keep: int, feed: int, fr: int, r: int, label: str) -> ProtectedBlock:
    """
    De Morgan pair for an inverted feedback source b_j: keep = b_j & ~m and
    feed = ~b_j & m are disjoint and their OR is b_j ^ m, so one FR covers
    both terms.
    """
    ops = maj_ops(m, bj, C0, keep, invert_x=True) + maj_ops(bj, m, C0, feed, invert_x=True)
    checks = []
    for t in range(r):
        ops.extend(maj_ops(keep, feed, C1, fr))
        checks.append(ParityCheck(PAIR_OPS + FR_OPS * (t + 1), fr, ((bj, False), (m, False))))
    program = MicroProgram.build(ops, "protected_pair")
    return ProtectedBlock(label, program, tuple(checks), (keep, feed))


# ----------------------------------------------------------------------
# Program generation
# ----------------------------------------------------------------------


def protected_step_ops(r: int) -> int:
    return 2 * (GATE_OPS + FR_OPS * r) + COMBINE_OPS


def protected_program_ops(n: int, r: int, inverted: int = 0, demorgan: bool = False) -> int:
    """
    Cost of a protected digit increment in CIM operations: n(3 + 5r) + 6 + 5r,
    so 13n+16, 23n+26 and 33n+36 for r = 2, 4, 6.

    A De Morgan pair halves the protection overhead (5r - 4 per bit) of each
    inverted-feedback bit.
    """
    total = n * (3 + 5 * r) + 6 + 5 * r
    if demorgan:
        total -= inverted * ((5 * r - 4) // 2)
    return total


def protected_schedule_ops(n: int, r: int, inverted: int = 0, demorgan: bool = False) -> int:
    """
    Ambit commands emitted by ``gen_protected_program``: n bit updates plus
    the flag update at 18 + 8r each, and one commit of the merged flag. A
    De Morgan pair saves 6 + 4r per inverted bit.
    """
    total = (n + 1) * protected_step_ops(r) + MERGE_COMMIT_OPS
    if demorgan:
        total -= inverted * (2 * GATE_OPS + 2 * FR_OPS * r - PAIR_OPS - FR_OPS * r)
    return total


def gen_protected_step(
    layout,
    rows: ShieldRows,
    i: int,
    src: int,
    inverted: bool,
    digit: int = 0,
    mask_row: Optional[int] = None,
    cfg: ProtectionConfig = ProtectionConfig(),
) -> List[ProtectedBlock]:
    """
    Protected masked bit update: shadow_i <- (src' & m) | (b_i & ~m).

    Returns:
        Feed gate, keep gate and the checked OR combine
    """
    layout.check_digit(digit)
    bits = layout.bit_rows[digit]
    m = layout.mask_row if mask_row is None else mask_row
    r = cfg.fr_checks
    return [
        protected_gate(bits[src], inverted, m, XorTriple(rows.feed[i], rows.ir2, rows.fr), r, f"feed b{i}"),
        protected_gate(m, True, bits[i], XorTriple(rows.keep[i], rows.ir2, rows.fr), r, f"keep b{i}"),
        combine_block(rows.feed[i], rows.keep[i], layout.shadow_rows[i], f"combine b{i}"),
    ]


def gen_protected_program(
    layout,
    rows: ShieldRows,
    k: int,
    digit: int = 0,
    mask_row: Optional[int] = None,
    direction: Direction = Direction.UP,
    cfg: ProtectionConfig = ProtectionConfig(),
) -> ProtectedProgram:
    """
    Protected masked k-ary program. Results land in the shadow rows; the
    caller commits them with ``layout.commit_shadow(digit)``.
    """
    layout.check_digit(digit)
    n = layout.n
    r = cfg.fr_checks
    bits = layout.bit_rows[digit]
    m = layout.mask_row if mask_row is None else mask_row
    pattern = TransitionPattern.from_step(n, add_step(n, k, direction))
    blocks: List[ProtectedBlock] = []
    have_feed, have_keep = set(), set()

    if cfg.demorgan:
        for i, (j, inv) in enumerate(pattern.sources):
            if inv:
                blocks.append(pair_block(bits[j], m, rows.keep[j], rows.feed[i], rows.fr, r, f"pair b{j}/b{i}"))
                have_feed.add(i)
                have_keep.add(j)

    for i, (j, inv) in enumerate(pattern.sources):
        if i not in have_feed:
            triple = XorTriple(rows.feed[i], rows.ir2, rows.fr)
            blocks.append(protected_gate(bits[j], inv, m, triple, r, f"feed b{i}"))
        if i not in have_keep:
            triple = XorTriple(rows.keep[i], rows.ir2, rows.fr)
            blocks.append(protected_gate(m, True, bits[i], triple, r, f"keep b{i}"))
        blocks.append(combine_block(rows.feed[i], rows.keep[i], layout.shadow_rows[i], f"combine b{i}"))

    blocks.extend(_protected_flag_update(layout, rows, k, digit, m, direction, r))
    purpose = "protected_inc" if direction is Direction.UP else "protected_dec"
    return ProtectedProgram(blocks, purpose, digit, k)


def _protected_flag_update(layout, rows: ShieldRows, k, digit, m, direction, r) -> List[ProtectedBlock]:
    # g = theta & ~MSB' (k <= n) or m & (theta | ~MSB') (k > n); mirrored counting down
    theta = layout.msb_row(digit)
    msb_new = layout.shadow_rows[layout.n - 1]
    onext = layout.onext_rows[digit]
    if direction is Direction.UP:
        x, y = msb_new, theta
    else:
        x, y = theta, msb_new
    first = protected_gate(x, True, y, XorTriple(rows.g, rows.ir2, rows.fr), r, "flag term")
    source = rows.g if k <= layout.n else rows.ir2
    second = protected_gate(source, False, m, XorTriple(rows.g2, rows.ir2b, rows.fr), r, "flag mask")
    return [first, second, merge_block(rows.g2, onext, rows.fr, "flag merge")]


def merge_block(g: int, flag: int, scratch: int, label: str) -> ProtectedBlock:
    """
    flag |= g staged through ``scratch``. A new overflow never meets a
    pending one in the same column, so the OR is checked as an XOR.
    """
    ops = maj_ops(g, flag, C1, scratch) + [MicroOp.aap(row_address(scratch), d(flag))]
    check = ParityCheck(COMBINE_OPS, scratch, ((g, False), (flag, False)))
    return ProtectedBlock(label, MicroProgram.build(ops, "flag_merge"), (check,), (flag,))


# ----------------------------------------------------------------------
# Execution
# ----------------------------------------------------------------------


def execute_protected(
    prog: ProtectedProgram,
    fabric: Subarray,
    cfg: ProtectionConfig = ProtectionConfig(),
    parity: Optional[ParityState] = None,
    executor: Optional[ProgramExecutor] = None,
) -> ProtectionReport:
    """
    Run a protected program block by block.

    A failed check re-executes only its block, up to ``cfg.max_retries``
    times.

    Raises:
        UnrecoverableFaultError: A block kept failing its checks
    """
    parity = parity or ParityState(fabric.cols)
    executor = executor or ProgramExecutor(fabric)
    parity.sync(fabric, _program_inputs(prog))

    report = ProtectionReport()
    before = fabric.tally.copy()
    for blk in prog.blocks:
        attempt = 0
        while not _run_block(blk, fabric, executor, parity):
            report.detected += 1
            attempt += 1
            if attempt > cfg.max_retries:
                raise UnrecoverableFaultError(
                    f"block '{blk.label}' of {prog.purpose} failed {attempt} times (digit {prog.digit})"
                )
            report.retries += 1
            logger.warning("parity mismatch in '%s', retry %d/%d", blk.label, attempt, cfg.max_retries)
        for row in blk.records:
            parity.record(row, fabric.peek_row(row))
    report.tally = fabric.tally - before
    return report


def _program_inputs(prog: ProtectedProgram) -> List[int]:
    # rows a check reads before any block of the program records them
    produced, inputs = set(), []
    for blk in prog.blocks:
        for chk in blk.checks:
            for row, _ in chk.operands:
                if row not in produced and row not in inputs:
                    inputs.append(row)
        produced.update(blk.records)
    return inputs


def _run_block(blk: ProtectedBlock, fabric: Subarray, executor: ProgramExecutor, parity: ParityState) -> bool:
    ops = blk.program.ops
    start = 0
    for chk in blk.checks:
        executor.run(MicroProgram.build(ops[start : chk.after], blk.program.meta.purpose))
        start = chk.after
        expected = parity.expected_xor(*chk.operands)
        if parity.mismatches(fabric.read_row(chk.row), expected).size:
            return False
    if start < len(ops):
        executor.run(MicroProgram.build(ops[start:], blk.program.meta.purpose))
    return True


def protected_increment(
    bank,
    rows: ShieldRows,
    k: int,
    digit: int = 0,
    mask_row: int = C1,
    direction: Direction = Direction.UP,
    cfg: ProtectionConfig = ProtectionConfig(),
    parity: Optional[ParityState] = None,
) -> ProtectionReport:
    """Protected counterpart of ``CounterBank.increment_digit``/``decrement_digit``."""
    prog = gen_protected_program(bank.layout, rows, k, digit, mask_row, direction, cfg)
    report = execute_protected(prog, bank.fabric, cfg, parity, bank.executor)
    bank.layout.commit_shadow(digit)
    bank.pending = True
    bank.stats["digit_increments"] += 1
    return report


def masked_or_is_xor_check(fabric: Subarray, a_row: int, b_row: int, m_row: Optional[int] = None) -> bool:
    """
    Whether a | b equals a ^ b for these rows. With ``m_row`` the stronger
    condition a <= m and b <= ~m is checked.
    """
    a = fabric.peek_row(a_row)
    bb = fabric.peek_row(b_row)
    if m_row is None:
        return not (a & bb).any()
    m = fabric.peek_row(m_row)
    return not (a & ~m).any() and not (bb & m).any()


class ShieldError(Exception):
    """Base exception for fault protection."""

    pass


class UnrecoverableFaultError(ShieldError):
    """Raised when a protected block exhausts its retries."""

    pass
