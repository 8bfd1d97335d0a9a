import unittest

import numpy as np

from jc_cim.backends import (
    PINATUBO_FLAG_OPS,
    ArrayExecutor,
    BackendError,
    BackendKind,
    BackendRows,
    RcaAccumulator,
    UnsupportedBackendError,
    apply_increment,
    executor_for,
    gen_increment,
    gen_rca_add,
    increment_ops,
    magic_ops,
    pinatubo_ops,
    rca_add,
    rca_ecc_ops,
    rca_ops,
    rca_tmr_ops,
)
from jc_cim.codec import OracleCounter, decode_columns, encode, oracle_kary_add, oracle_kary_sub
from jc_cim.counters import CounterLayout
from jc_cim.fabric import D_BASE, Subarray
from jc_cim.uprog import PINATUBO_KINDS, Direction, OpKind, ProgramExecutor, TransitionPattern, add_step


def _fabric(n, cols):
    sub = Subarray(D_BASE + CounterLayout.rows_needed(n, 1, False) + 3 * n + 5, cols)
    layout = CounterLayout.allocate(sub, n, 1)
    return sub, layout, BackendRows.allocate(sub, n)


class TestOpCounts(unittest.TestCase):
    def test_closed_forms(self):
        self.assertEqual(pinatubo_ops(5, 1), 19)
        self.assertEqual({pinatubo_ops(5, k) for k in range(1, 10)}, {19})
        self.assertEqual([pinatubo_ops(n, 1) for n in (2, 4, 8)], [10, 16, 28])
        self.assertEqual(magic_ops(5, 1), 29)
        self.assertEqual(increment_ops(BackendKind.AMBIT, 5, 3), 42)
        self.assertEqual(increment_ops("magic", 5, 1), 29)

    def test_generated_lengths(self):
        n = 5
        _, layout, rows = _fabric(n, 4)
        for backend in (BackendKind.PINATUBO, BackendKind.MAGIC):
            for k in range(1, 2 * n):
                prog = gen_increment(backend, layout, k, rows=rows)
                self.assertEqual(len(prog), increment_ops(backend, n, k), f"{backend.value} k={k}")
                self.assertEqual(prog.meta.backend, backend.value)

    def test_pinatubo_flag_tail(self):
        n = 5
        _, layout, rows = _fabric(n, 4)
        for direction in Direction:
            for k in range(1, 2 * n):
                ops = gen_increment(BackendKind.PINATUBO, layout, k, rows=rows, direction=direction).ops
                self.assertTrue(all(op.kind in PINATUBO_KINDS for op in ops))
                tail = ops[-PINATUBO_FLAG_OPS:]
                self.assertEqual(tail[-1].outputs, (layout.onext_rows[0],))
                self.assertTrue(all(layout.shadow_rows[0] not in op.outputs for op in tail))
                nors = sum(op.kind is OpKind.NOR for op in ops[:-PINATUBO_FLAG_OPS])
                self.assertEqual(nors, TransitionPattern.from_step(n, add_step(n, k, direction)).inverted_count)


class TestArrayExecution(unittest.TestCase):
    def _check(self, backend, n, k, direction):
        cols = 4 * n
        sub, layout, rows = _fabric(n, cols)
        rng = np.random.default_rng(100 + k)
        start = rng.integers(0, 2 * n, size=cols)
        mask = rng.random(cols) < 0.5
        flags = rng.random(cols) < 0.2
        slab = np.stack([encode(int(v), n).bits for v in start], axis=1).astype(bool)
        for i, r in enumerate(layout.bit_rows[0]):
            sub.write_row(r, slab[i])
        sub.write_row(layout.mask_row, mask)
        sub.write_row(layout.onext_rows[0], flags)

        used = apply_increment(backend, sub, layout, k, rows=rows, direction=direction)
        self.assertEqual(used.total, increment_ops(backend, n, k))

        got = decode_columns(np.stack([sub.peek_row(r) for r in layout.bit_rows[0]]))
        got_flags = sub.peek_row(layout.onext_rows[0])
        step = oracle_kary_add if direction is Direction.UP else oracle_kary_sub
        for c in range(cols):
            want = step(OracleCounter(n, 1, digits=[int(start[c])], pending_overflow=[bool(flags[c])]), k, int(mask[c]))
            msg = f"{backend.value} k={k} col {c}"
            self.assertEqual(got[c], want.digits[0], msg)
            self.assertEqual(bool(got_flags[c]), want.pending_overflow[0], msg)

    def test_pinatubo_matches_oracle(self):
        for k in range(1, 10):
            self._check(BackendKind.PINATUBO, 5, k, Direction.UP)
        for k in range(1, 8):
            self._check(BackendKind.PINATUBO, 4, k, Direction.DOWN)

    def test_magic_matches_oracle(self):
        for k in range(1, 10):
            self._check(BackendKind.MAGIC, 5, k, Direction.UP)
        for k in range(1, 8):
            self._check(BackendKind.MAGIC, 4, k, Direction.DOWN)

    def test_primitive_sets_are_enforced(self):
        sub, layout, rows = _fabric(3, 4)
        magic = gen_increment(BackendKind.MAGIC, layout, 1, rows=rows)
        with self.assertRaises(UnsupportedBackendError):
            ArrayExecutor(sub, BackendKind.PINATUBO).run(magic)
        with self.assertRaises(UnsupportedBackendError):
            ArrayExecutor(sub, BackendKind.AMBIT)

    def test_dispatch(self):
        sub, layout, rows = _fabric(3, 4)
        self.assertIsInstance(executor_for(sub, "ambit"), ProgramExecutor)
        self.assertIsInstance(executor_for(sub, "magic"), ArrayExecutor)
        with self.assertRaises(BackendError):
            gen_increment(BackendKind.PINATUBO, layout, 1)
        with self.assertRaises(BackendError):
            gen_increment(BackendKind.MAGIC, layout, 6, rows=rows)
        with self.assertRaises(ValueError):
            BackendKind("reram")


class TestRippleCarry(unittest.TestCase):
    def test_op_count(self):
        self.assertEqual(rca_ops(8), 105)

    def test_protected_op_counts(self):
        self.assertEqual(rca_ecc_ops(8, 2), 105 + 24 * 4 * 3)
        self.assertEqual(rca_ecc_ops(32, 4) - rca_ecc_ops(32, 2), 2 * 96 * 4)
        self.assertEqual(rca_tmr_ops(8), 3 * 105 + 32)
        with self.assertRaises(BackendError):
            rca_ecc_ops(8, 0)

    def test_accumulates(self):
        cols, width = 6, 8
        sub = Subarray(D_BASE + width + 3 + 4, cols)
        acc = RcaAccumulator(sub, width)
        addend = sub.allocate(4)
        rng = np.random.default_rng(13)
        total = np.zeros(cols, dtype=np.int64)
        for _ in range(10):
            xs = rng.integers(0, 16, size=cols)
            acc.load_addend(xs.tolist(), addend)
            used = acc.add(addend)
            self.assertEqual(used.total, rca_ops(width))
            total += xs
        self.assertEqual(acc.read(), total.tolist())

    def test_wraps_at_width(self):
        sub = Subarray(D_BASE + 4 + 3 + 4, 2)
        acc = RcaAccumulator(sub, 4)
        addend = sub.allocate(4)
        for _ in range(2):
            acc.load_addend([15, 9], addend)
            acc.add(addend)
        self.assertEqual(acc.read(), [30 % 16, 18 % 16])

    def test_errors(self):
        sub = Subarray(D_BASE + 10, 2)
        rows = sub.allocate(10)
        with self.assertRaises(BackendError):
            gen_rca_add(rows[:5], rows[5:7], *rows[7:])
        with self.assertRaises(UnsupportedBackendError):
            rca_add(BackendKind.PINATUBO, sub, rows[:2], rows[2:7], rows[7:])
