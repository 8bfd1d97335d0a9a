import unittest

import numpy as np

from jc_cim.codec import (
    INVALID,
    InvalidCodewordError,
    JcWord,
    OracleCounter,
    ValueRangeError,
    codeword_table,
    decode,
    decode_columns,
    digits_lsd_first,
    encode,
    hamming,
    is_valid,
    oracle_kary_add,
    oracle_kary_sub,
)


class TestCodewords(unittest.TestCase):
    def test_five_bit_cycle(self):
        expected = [
            "00000", "10000", "11000", "11100", "11110",
            "11111", "01111", "00111", "00011", "00001",
        ]
        self.assertEqual([str(encode(v, 5)) for v in range(10)], expected)

    def test_neighbours_differ_in_one_bit(self):
        for n in (1, 2, 3, 5, 8):
            words = [encode(v, n).bits for v in range(2 * n)]
            for v in range(2 * n):
                self.assertEqual(hamming(words[v], words[(v + 1) % (2 * n)]), 1)

    def test_decode_inverts_encode(self):
        for n in (2, 4, 6):
            for v in range(2 * n):
                self.assertEqual(decode(encode(v, n)), v)

    def test_invalid_pattern(self):
        word = JcWord.parse("10100")
        self.assertFalse(is_valid(word))
        with self.assertRaises(InvalidCodewordError):
            decode(word)

    def test_range_checks(self):
        with self.assertRaises(ValueRangeError):
            encode(10, 5)
        with self.assertRaises(ValueRangeError):
            encode(-1, 5)

    def test_table_has_exactly_2n_entries(self):
        table = codeword_table(4)
        self.assertEqual(int((table != INVALID).sum()), 8)

    def test_decode_columns(self):
        slab = np.stack([encode(v, 3).bits for v in (0, 4, 5)] + [(1, 0, 1)], axis=1)
        np.testing.assert_array_equal(decode_columns(slab), [0, 4, 5, INVALID])


class TestOracle(unittest.TestCase):
    def test_sticky_overflow(self):
        c = OracleCounter(5, 2, digits=[8, 0])
        c = oracle_kary_add(c, 3, 1)
        self.assertEqual(c.digits, [1, 0])
        self.assertEqual(c.pending_overflow, [True, False])
        self.assertEqual(c.total(), 11)
        c = oracle_kary_add(c, 9, 1)
        self.assertEqual(c.digits[0], 0)
        self.assertTrue(c.pending_overflow[0])

    def test_mask_zero_is_identity(self):
        c = OracleCounter(5, 1, digits=[4])
        self.assertEqual(oracle_kary_add(c, 7, 0).digits, [4])

    def test_subtract_marks_borrow(self):
        c = oracle_kary_sub(OracleCounter(5, 1, digits=[2]), 5, 1)
        self.assertEqual(c.digits, [7])
        self.assertEqual(c.pending_overflow, [True])

    def test_add_value_wraps(self):
        c = OracleCounter(5, 2, digits=[9, 9]).add_value(3)
        self.assertEqual(c.digits, [2, 0])

    def test_digits_lsd_first(self):
        self.assertEqual(digits_lsd_first(1234, 10, 5), [4, 3, 2, 1, 0])
