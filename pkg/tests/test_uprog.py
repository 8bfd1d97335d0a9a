import unittest

import numpy as np

from jc_cim.codec import OracleCounter, decode_columns, encode, oracle_kary_add, oracle_kary_sub
from jc_cim.counters import CounterLayout
from jc_cim.fabric import D_BASE, Subarray
from jc_cim.uprog import (
    Direction,
    MicroProgram,
    ProgramError,
    ProgramExecutor,
    TransitionPattern,
    count_ops,
    format_listing,
    gen_clear,
    gen_kary_program,
    gen_maj,
    gen_masked_step,
    gen_unit_rowclone,
    get_generator,
    list_available_programs,
)


def _fabric(n, D=1, cols=None):
    cols = cols or 2 * n
    sub = Subarray(D_BASE + CounterLayout.rows_needed(n, D, False) + 4, cols)
    layout = CounterLayout.allocate(sub, n, D)
    return sub, layout


def _load_digit(sub, layout, values, digit=0):
    slab = np.stack([encode(int(v), layout.n).bits for v in values], axis=1).astype(bool)
    for i, r in enumerate(layout.bit_rows[digit]):
        sub.write_row(r, slab[i])


def _read_digit(sub, layout, digit=0):
    return decode_columns(np.stack([sub.peek_row(r) for r in layout.bit_rows[digit]]))


class TestTransitionPattern(unittest.TestCase):
    def test_matches_codec_for_every_step(self):
        for n in (2, 3, 5):
            for k in range(1, 2 * n):
                pattern = TransitionPattern.from_step(n, k)
                for v in range(2 * n):
                    got = pattern.apply(encode(v, n).bits)
                    self.assertEqual(got, encode((v + k) % (2 * n), n).bits, f"n={n} k={k} v={v}")

    def test_inverted_count(self):
        self.assertEqual(TransitionPattern.from_step(5, 2).inverted_count, 2)
        self.assertEqual(TransitionPattern.from_step(5, 7).inverted_count, 3)

    def test_step_range(self):
        with self.assertRaises(ProgramError):
            TransitionPattern.from_step(5, 10)


class TestProgramShape(unittest.TestCase):
    def test_kary_length_is_constant(self):
        _, layout = _fabric(5)
        for k in range(1, 10):
            prog = gen_kary_program(layout, k)
            self.assertEqual(len(prog), 42)
            self.assertEqual(count_ops(prog).as_tuple(), (30, 12))

    def test_masked_step_is_seven_ops(self):
        _, layout = _fabric(4)
        self.assertEqual(len(gen_masked_step(layout, 0, 3, True)), 7)

    def test_unit_rowclone(self):
        sub, layout = _fabric(5)
        prog = gen_unit_rowclone(layout)
        self.assertEqual(len(prog), 6)
        _load_digit(sub, layout, range(10))
        ProgramExecutor(sub).run(prog)
        np.testing.assert_array_equal(_read_digit(sub, layout), [(v + 1) % 10 for v in range(10)])

    def test_listing_round_trip_runs(self):
        sub, layout = _fabric(3)
        listing = format_listing(gen_maj(layout.bit_rows[0][0], layout.bit_rows[0][1], 9, layout.aux_row))
        self.assertTrue(listing.startswith("# maj"))
        ex = ProgramExecutor(sub)
        used = ex.execute(listing)
        self.assertEqual(used.as_tuple(), (3, 1))

    def test_bad_listing(self):
        sub, _ = _fabric(3)
        with self.assertRaises(ProgramError):
            ProgramExecutor(sub).parse("AP B1 D10")

    def test_registry(self):
        self.assertIn("kary", list_available_programs())
        self.assertIs(get_generator("clear"), gen_clear)
        self.assertIsNone(get_generator("nope"))

    def test_then_concatenates(self):
        a = gen_clear(10)
        joined = a.then(gen_clear(11), "two_clears")
        self.assertIsInstance(joined, MicroProgram)
        self.assertEqual(len(joined), 2)
        self.assertEqual(joined.meta.purpose, "two_clears")


class TestKaryExecution(unittest.TestCase):
    def _check(self, n, k, direction):
        cols = 4 * n
        sub, layout = _fabric(n, cols=cols)
        rng = np.random.default_rng(k)
        start = rng.integers(0, 2 * n, size=cols)
        mask = rng.random(cols) < 0.5
        _load_digit(sub, layout, start)
        sub.write_row(layout.mask_row, mask)
        ProgramExecutor(sub).run(gen_kary_program(layout, k, direction=direction))
        layout.commit_shadow(0)
        step = oracle_kary_add if direction is Direction.UP else oracle_kary_sub
        for c in range(cols):
            want = step(OracleCounter(n, 1, digits=[int(start[c])]), k, int(mask[c]))
            self.assertEqual(_read_digit(sub, layout)[c], want.digits[0], f"col {c}")
            self.assertEqual(bool(sub.peek_row(layout.onext_rows[0])[c]), want.pending_overflow[0], f"col {c}")

    def test_increment_every_step(self):
        for k in range(1, 10):
            self._check(5, k, Direction.UP)

    def test_decrement_every_step(self):
        for k in range(1, 8):
            self._check(4, k, Direction.DOWN)

    def test_flag_is_sticky(self):
        sub, layout = _fabric(3, cols=2)
        _load_digit(sub, layout, [5, 0])
        sub.write_row(layout.onext_rows[0], np.array([False, True]))
        sub.write_row(layout.mask_row, np.ones(2, dtype=bool))
        ProgramExecutor(sub).run(gen_kary_program(layout, 1))
        layout.commit_shadow(0)
        np.testing.assert_array_equal(_read_digit(sub, layout), [0, 1])
        np.testing.assert_array_equal(sub.peek_row(layout.onext_rows[0]), [True, True])
