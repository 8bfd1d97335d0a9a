import unittest

import numpy as np

from jc_cim.codec import OracleCounter, decode_columns, encode, oracle_kary_add
from jc_cim.counters import CounterBank, CounterLayout
from jc_cim.fabric import D_BASE, Subarray
from jc_cim.shield import (
    EvenParityCode,
    ParityState,
    ProtectionConfig,
    ShieldError,
    ShieldRows,
    TmrRows,
    UnrecoverableFaultError,
    execute_protected,
    gen_protected_program,
    gen_tmr_program,
    masked_or_is_xor_check,
    protected_increment,
    protected_program_ops,
    protected_schedule_ops,
    protected_step_ops,
    rates_analytic,
    rates_montecarlo,
    rates_montecarlo_program,
    rates_tmr_analytic,
    rates_tmr_montecarlo,
    tmr_increment,
    tmr_program_ops,
    wilson_interval,
)
from jc_cim.uprog import OpKind, TransitionPattern


def _fabric(n, cols, cls=Subarray):
    sub = cls(D_BASE + CounterLayout.rows_needed(n, 1, False) + 2 * n + 5, cols)
    layout = CounterLayout.allocate(sub, n, 1)
    rows = ShieldRows.allocate(sub, n)
    return sub, layout, rows


def _load(sub, layout, values, mask):
    slab = np.stack([encode(int(v), layout.n).bits for v in values], axis=1).astype(bool)
    for i, r in enumerate(layout.bit_rows[0]):
        sub.write_row(r, slab[i])
    sub.write_row(layout.mask_row, np.asarray(mask, dtype=bool))


def _digits(sub, layout):
    return decode_columns(np.stack([sub.peek_row(r) for r in layout.bit_rows[0]]))


class RecordingSubarray(Subarray):
    """Keeps, per activation, the columns whose three inputs disagreed."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.mixed = []

    def _activation_flips(self, a, b, c):
        self.mixed.append(~((a == b) & (b == c)))
        return super()._activation_flips(a, b, c)


class TestAnalyticRates(unittest.TestCase):
    TABLE = {
        2: [(1e-1, 1.4e-3, 3.1e-1), (1e-2, 1.5e-6, 3.5e-2), (1e-4, 1.5e-12, 3.5e-4)],
        4: [(1e-1, 1.4e-5, 4.4e-1), (1e-2, 1.5e-10, 5.4e-2), (1e-4, 1e-20, 5.5e-4)],
        6: [(1e-1, 1.4e-7, 5.5e-1), (1e-2, 1.5e-14, 7.3e-2), (1e-4, 1e-20, 7.5e-4)],
    }

    def test_table(self):
        for r, rows in self.TABLE.items():
            for p, error, detect in rows:
                got_error, got_detect = rates_analytic(p, r)
                np.testing.assert_allclose(got_error, error, rtol=0.05, err_msg=f"p={p} r={r}")
                np.testing.assert_allclose(got_detect, detect, rtol=0.05, err_msg=f"p={p} r={r}")

    def test_more_checks_lower_error(self):
        errors = [rates_analytic(0.05, r)[0] for r in (1, 2, 3, 4)]
        self.assertEqual(errors, sorted(errors, reverse=True))

    def test_bad_arguments(self):
        with self.assertRaises(ValueError):
            rates_analytic(0.0, 2)
        with self.assertRaises(ValueError):
            rates_analytic(0.1, 0)


class TestMonteCarlo(unittest.TestCase):
    def test_wilson_interval(self):
        self.assertEqual(wilson_interval(0, 0), (0.0, 1.0))
        lo, hi = wilson_interval(50, 100)
        self.assertLess(lo, 0.5)
        self.assertGreater(hi, 0.5)
        np.testing.assert_allclose(0.5 - lo, hi - 0.5)
        lo, hi = wilson_interval(0, 1000)
        self.assertEqual(lo, 0.0)
        self.assertGreater(hi, 0.0)

    def test_fault_free_gate(self):
        row = rates_montecarlo(0.0, 2, trials=100, cols=64)
        self.assertEqual((row.error_rate, row.detect_rate, row.source), (0.0, 0.0, "mc"))

    def test_noisy_gate_is_detected(self):
        row = rates_montecarlo(0.2, 2, trials=2048, seed=1, cols=256)
        self.assertGreater(row.detect_rate, 0.1)
        self.assertLessEqual(row.ci_low, row.error_rate)
        self.assertLessEqual(row.error_rate, row.ci_high)

    def test_program_gates_match_analytic(self):
        for p, seed in ((0.2, 5), (0.1, 6)):
            row = rates_montecarlo_program(p, 2, trials=40_000, seed=seed)
            self.assertEqual((row.source, row.trials), ("mc_program", 40_000))
            error, detect = rates_analytic(p, 2)
            self.assertLessEqual(row.ci_low, error, f"p={p}")
            self.assertLessEqual(error, row.ci_high, f"p={p}")
            lo, hi = wilson_interval(round(row.detect_rate * row.trials), row.trials)
            self.assertLessEqual(lo, detect, f"p={p}")
            self.assertLessEqual(detect, hi, f"p={p}")

    def test_fault_free_program_gates(self):
        row = rates_montecarlo_program(0.0, 2, trials=500, n=3, seed=2, cols=64)
        self.assertEqual((row.error_rate, row.detect_rate), (0.0, 0.0))
        with self.assertRaises(ValueError):
            rates_montecarlo_program(0.1, 2, trials=0)


class TestParity(unittest.TestCase):
    def test_segments(self):
        code = EvenParityCode(8)
        bits = np.array([1, 1, 1, 0, 0, 0, 0, 0, 1, 0], dtype=bool)
        np.testing.assert_array_equal(code.encode(bits), [True, True])

    def test_complement_matches_inverted_row(self):
        rng = np.random.default_rng(4)
        code = EvenParityCode(8)
        for cols in (8, 11, 13, 24):
            bits = rng.random(cols) < 0.5
            np.testing.assert_array_equal(code.complement(code.encode(bits), cols), code.encode(~bits))

    def test_xor_homomorphic(self):
        rng = np.random.default_rng(8)
        state = ParityState(20)
        a, b = rng.random(20) < 0.5, rng.random(20) < 0.5
        state.record(1, a)
        state.record(2, b)
        expected = state.expected_xor((1, False), (2, True))
        self.assertEqual(state.mismatches(a ^ ~b, expected).size, 0)
        corrupt = a ^ ~b
        corrupt[17] ^= True
        np.testing.assert_array_equal(state.mismatches(corrupt, expected), [2])

    def test_unknown_row(self):
        with self.assertRaises(KeyError):
            ParityState(8).parity(3)

    def test_bad_segment(self):
        with self.assertRaises(ValueError):
            EvenParityCode(0)


class TestProgramShape(unittest.TestCase):
    def test_op_counts(self):
        self.assertEqual([protected_program_ops(5, r) for r in (2, 4, 6)], [81, 141, 201])
        for n in range(2, 9):
            self.assertEqual(protected_program_ops(n, 2), 13 * n + 16)
            self.assertEqual(protected_program_ops(n, 4), 23 * n + 26)
            self.assertEqual(protected_program_ops(n, 6), 33 * n + 36)
        # a De Morgan pair halves the 5r - 4 protection overhead of its bit
        self.assertEqual(protected_program_ops(5, 2, inverted=2, demorgan=True), 81 - 2 * 3)
        self.assertEqual(protected_program_ops(5, 4, inverted=1, demorgan=True), 141 - 8)

    def test_schedule_counts(self):
        self.assertEqual(protected_step_ops(2), 34)
        self.assertEqual(protected_schedule_ops(5, 2), 6 * 34 + 1)
        self.assertEqual(protected_schedule_ops(5, 2, inverted=2, demorgan=True), 6 * 34 + 1 - 2 * 14)

    def test_generated_length(self):
        n = 5
        _, layout, rows = _fabric(n, 4)
        for demorgan in (False, True):
            cfg = ProtectionConfig(fr_checks=2, demorgan=demorgan)
            for k in range(1, 2 * n):
                prog = gen_protected_program(layout, rows, k, cfg=cfg)
                inverted = TransitionPattern.from_step(n, k).inverted_count
                self.assertEqual(len(prog), protected_schedule_ops(n, 2, inverted, demorgan), f"k={k}")

    def test_every_activation_is_checked(self):
        n = 4
        _, layout, rows = _fabric(n, 4)
        for demorgan in (False, True):
            prog = gen_protected_program(layout, rows, 3, cfg=ProtectionConfig(fr_checks=2, demorgan=demorgan))
            for blk in prog.blocks:
                self.assertTrue(blk.checks, blk.label)
                last_ap = max(i for i, op in enumerate(blk.program.ops) if op.kind is OpKind.AP)
                self.assertGreaterEqual(blk.checks[-1].after, last_ap + 1, blk.label)

    def test_config_checks(self):
        with self.assertRaises(ShieldError):
            ProtectionConfig(fr_checks=0)
        with self.assertRaises(ShieldError):
            ProtectionConfig(max_retries=-1)


class TestProtectedExecution(unittest.TestCase):
    def _check(self, n, k, demorgan):
        cols = 16
        sub, layout, rows = _fabric(n, cols)
        rng = np.random.default_rng(k)
        start = rng.integers(0, 2 * n, size=cols)
        mask = rng.random(cols) < 0.5
        _load(sub, layout, start, mask)
        cfg = ProtectionConfig(fr_checks=1, demorgan=demorgan)
        prog = gen_protected_program(layout, rows, k, cfg=cfg)
        report = execute_protected(prog, sub, cfg)
        layout.commit_shadow(0)
        self.assertEqual(report.retries, 0)
        self.assertEqual(report.tally.total, len(prog))
        got = _digits(sub, layout)
        flags = sub.peek_row(layout.onext_rows[0])
        for c in range(cols):
            want = oracle_kary_add(OracleCounter(n, 1, digits=[int(start[c])]), k, int(mask[c]))
            self.assertEqual(got[c], want.digits[0], f"k={k} col {c}")
            self.assertEqual(bool(flags[c]), want.pending_overflow[0], f"k={k} col {c}")

    def test_matches_oracle(self):
        for k in range(1, 8):
            self._check(4, k, demorgan=False)

    def test_demorgan_matches_oracle(self):
        for k in range(1, 8):
            self._check(4, k, demorgan=True)

    def _faulted(self, max_retries, ordinals):
        n, cols = 4, 8
        sub, layout, rows = _fabric(n, cols)
        _load(sub, layout, [3] * cols, np.ones(cols, dtype=bool))
        cfg = ProtectionConfig(fr_checks=1, max_retries=max_retries)
        prog = gen_protected_program(layout, rows, 1, cfg=cfg)
        # with an all-ones mask IR2 is 1, so a flipped IR1 always flips FR
        for ordinal in ordinals:
            sub.arm_fault(ordinal, [3])
        return sub, layout, prog, cfg

    def test_detected_fault_is_retried(self):
        sub, layout, prog, cfg = self._faulted(2, [0])
        with self.assertLogs("jc_cim.shield.protect", level="WARNING"):
            report = execute_protected(prog, sub, cfg)
        layout.commit_shadow(0)
        self.assertEqual((report.retries, report.detected), (1, 1))
        self.assertEqual(report.tally.total, len(prog) + len(prog.blocks[0]))
        np.testing.assert_array_equal(_digits(sub, layout), [4] * 8)

    def test_retries_run_out(self):
        # the retry's IR1 is the fourth AP
        sub, _, prog, cfg = self._faulted(1, [0, 3])
        with self.assertRaises(UnrecoverableFaultError):
            execute_protected(prog, sub, cfg)

    def test_protected_increment_on_bank(self):
        n, D, cols = 5, 2, 6
        sub = Subarray(D_BASE + CounterLayout.rows_needed(n, D, False) + 2 * n + 5, cols)
        bank = CounterBank.alloc(sub, n, D)
        rows = ShieldRows.allocate(sub, n)
        values = [0, 6, 7, 9, 42, 55]
        bank.load_values(values)
        report = protected_increment(bank, rows, 4)
        bank.resolve()
        self.assertEqual(report.retries, 0)
        self.assertEqual(bank.read_counters(), [v + 4 for v in values])


class TestSingleFaultCoverage(unittest.TestCase):
    """A flip on any activation with disagreeing inputs is caught and repaired."""

    def _cover(self, n, k, demorgan, seed):
        cols = 8
        rng = np.random.default_rng(seed)
        start = rng.integers(0, 2 * n, size=cols)
        mask = rng.random(cols) < 0.5
        cfg = ProtectionConfig(fr_checks=2, max_retries=1, demorgan=demorgan)
        want = [oracle_kary_add(OracleCounter(n, 1, digits=[int(v)]), k, int(m)) for v, m in zip(start, mask)]

        clean, layout, rows = _fabric(n, cols, RecordingSubarray)
        _load(clean, layout, start, mask)
        execute_protected(gen_protected_program(layout, rows, k, cfg=cfg), clean, cfg)
        self.assertGreater(len(clean.mixed), 0)

        for ordinal, mixed in enumerate(clean.mixed):
            if not mixed.any():
                continue
            col = int(rng.choice(np.flatnonzero(mixed)))
            sub, layout, rows = _fabric(n, cols)
            _load(sub, layout, start, mask)
            prog = gen_protected_program(layout, rows, k, cfg=cfg)
            sub.arm_fault(ordinal, [col])
            with self.assertLogs("jc_cim.shield.protect", level="WARNING"):
                report = execute_protected(prog, sub, cfg)
            layout.commit_shadow(0)
            where = f"k={k} demorgan={demorgan} AP {ordinal} col {col}"
            self.assertEqual(report.detected, 1, where)
            self.assertEqual(_digits(sub, layout)[col], want[col].digits[0], where)
            flag = bool(sub.peek_row(layout.onext_rows[0])[col])
            self.assertEqual(flag, want[col].pending_overflow[0], where)

    def test_every_activation(self):
        for k in (1, 3, 5, 7):
            self._cover(4, k, demorgan=False, seed=k)

    def test_every_activation_with_demorgan(self):
        for k in (1, 6):
            self._cover(4, k, demorgan=True, seed=10 + k)


class TestDisjointOr(unittest.TestCase):
    def test_masked_or_is_xor(self):
        sub = Subarray(D_BASE + 3, 4)
        a, b, m = sub.allocate(3)
        sub.write_row(a, [1, 0, 0, 0])
        sub.write_row(b, [0, 1, 0, 0])
        sub.write_row(m, [1, 0, 1, 0])
        self.assertTrue(masked_or_is_xor_check(sub, a, b))
        self.assertTrue(masked_or_is_xor_check(sub, a, b, m))
        sub.write_row(b, [1, 1, 0, 0])
        self.assertFalse(masked_or_is_xor_check(sub, a, b))
        self.assertFalse(masked_or_is_xor_check(sub, a, b, m))


class TestTmr(unittest.TestCase):
    def _bank(self, n, D, cols):
        sub = Subarray(D_BASE + CounterLayout.rows_needed(n, D, False) + 3 * (n + 1), cols)
        bank = CounterBank.alloc(sub, n, D)
        return sub, bank, TmrRows.allocate(sub, n)

    def test_program_length(self):
        n = 5
        _, bank, rows = self._bank(n, 1, 4)
        self.assertEqual(tmr_program_ops(n), 153)
        for k in range(1, 2 * n):
            self.assertEqual(len(gen_tmr_program(bank.layout, rows, k)), tmr_program_ops(n), f"k={k}")

    def test_increment_on_bank(self):
        values = [0, 6, 7, 9, 42, 55]
        _, bank, rows = self._bank(5, 2, 6)
        bank.load_values(values)
        tally = tmr_increment(bank, rows, 4)
        bank.resolve()
        self.assertEqual(tally.total, tmr_program_ops(5))
        self.assertEqual(bank.read_counters(), [v + 4 for v in values])

    def test_single_replica_fault_is_outvoted(self):
        sub, bank, rows = self._bank(4, 1, 8)
        bank.load_values([3] * 8)
        # third AP of the first replica writes its new b0
        sub.arm_fault(2, list(range(8)))
        tmr_increment(bank, rows, 1)
        bank.resolve()
        self.assertEqual(bank.read_counters(), [4] * 8)

    def test_rates(self):
        error, detect = rates_tmr_analytic(0.1)
        np.testing.assert_allclose(error, 0.75 * (6 * 0.01 * 0.81 + 0.001))
        self.assertEqual(detect, 0.0)
        self.assertEqual(rates_tmr_analytic(1e-12)[0], 1e-20)
        for p in (1e-1, 1e-2, 1e-4):
            self.assertGreater(rates_tmr_analytic(p)[0], rates_analytic(p, 2)[0])
        with self.assertRaises(ValueError):
            rates_tmr_analytic(0.0)

    def test_monte_carlo_matches_analytic(self):
        row = rates_tmr_montecarlo(0.2, 20_000, seed=3)
        self.assertEqual((row.scheme, row.trials, row.detect_rate), ("jc_tmr", 20_000, 0.0))
        error, _ = rates_tmr_analytic(0.2)
        self.assertLessEqual(row.ci_low, error)
        self.assertLessEqual(error, row.ci_high)
