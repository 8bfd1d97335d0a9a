import tempfile
import unittest
from pathlib import Path

import numpy as np

from jc_cim.counters import Policy
from jc_cim.tensor import (
    DomainError,
    HostInput,
    MaskMatrix,
    ShapeError,
    TensorEngine,
    binary_slice,
    csd_slice,
    digits_for,
    digits_of,
    load_matrix_csv,
    naf,
    random_inputs,
)


class TestDigits(unittest.TestCase):
    def test_digits_of(self):
        self.assertEqual(digits_of(0, 10), [])
        self.assertEqual(digits_of(1234, 10), [4, 3, 2, 1])
        self.assertEqual(digits_of(-17, 8), [1, 2])

    def test_digits_for(self):
        self.assertEqual(digits_for(999, 10), 3)
        self.assertEqual(digits_for(1000, 10), 4)
        self.assertEqual(digits_for(0, 10), 1)


class TestSlicing(unittest.TestCase):
    def test_naf(self):
        self.assertEqual(naf(7), {0: -1, 3: 1})
        self.assertEqual(naf(0), {})
        for v in range(-200, 200):
            digits = naf(v)
            self.assertEqual(sum(d << j for j, d in digits.items()), v)
            positions = sorted(digits)
            self.assertTrue(all(b - a > 1 for a, b in zip(positions, positions[1:])), v)

    def test_csd_reconstructs_within_bound(self):
        rng = np.random.default_rng(5)
        Z = rng.integers(-15, 16, size=(6, 9))
        masks = csd_slice(Z, 4)
        np.testing.assert_array_equal(masks.reconstruct(), Z)
        self.assertTrue(all(c <= 2 * (4 + 1) for c in masks.rows_per_logical_row()))

    def test_binary_reconstructs(self):
        rng = np.random.default_rng(6)
        Z = rng.integers(0, 16, size=(5, 7))
        masks = binary_slice(Z, 4)
        np.testing.assert_array_equal(masks.reconstruct(), Z)
        self.assertTrue(all(w in (1, 2, 4, 8) for w in masks.weights))

    def test_slicing_domains(self):
        with self.assertRaises(DomainError):
            binary_slice([[-1, 2]], 4)
        with self.assertRaises(DomainError):
            csd_slice([[16]], 4)

    def test_mask_matrix_checks(self):
        with self.assertRaises(DomainError):
            MaskMatrix(np.ones((1, 3)), [3], [0], 1)
        with self.assertRaises(ShapeError):
            MaskMatrix(np.ones((2, 3)), [1], [0], 1)
        with self.assertRaises(DomainError):
            MaskMatrix.from_binary([[0, 2]])


class TestHostInputs(unittest.TestCase):
    def test_width_and_sign(self):
        HostInput([[255, 0]], bits=8)
        with self.assertRaises(DomainError):
            HostInput([[256]], bits=8)
        with self.assertRaises(DomainError):
            HostInput([[-1]], bits=8)
        HostInput([[-1]], bits=8, signed=True)

    def test_load_matrix_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "z.csv"
            path.write_text("2,3\n1,0,1\n0,1,1\n")
            np.testing.assert_array_equal(load_matrix_csv(path), [[1, 0, 1], [0, 1, 1]])
            path.write_text("3,3\n1,0,1\n")
            with self.assertRaises(ShapeError):
                load_matrix_csv(path)

    def test_random_inputs(self):
        spec = {"M": 3, "K": 5, "N": 4, "bits": 4, "sparsity": 0.5, "seed": 9}
        X, Z = random_inputs(spec)
        self.assertEqual(X.shape, (3, 5))
        self.assertEqual(Z.shape, (5, 4))
        self.assertTrue(((X >= 0) & (X < 16)).all())
        self.assertTrue(np.isin(Z, (0, 1)).all())
        X2, _ = random_inputs(spec)
        np.testing.assert_array_equal(X, X2)
        with self.assertRaises(ShapeError):
            random_inputs({"M": 1})


class TestEngine(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(21)

    def test_gemv(self):
        x = self.rng.integers(0, 16, size=6)
        Z = self.rng.integers(0, 2, size=(6, 5))
        result = TensorEngine(n=3).gemv(x, Z)
        self.assertEqual(result.values, (x @ Z).tolist())
        self.assertGreater(result.tally.total, 0)

    def test_gemm_full_ripple_and_iarm(self):
        X = self.rng.integers(0, 32, size=(3, 5))
        Z = self.rng.integers(0, 2, size=(5, 4))
        for policy in (Policy.FULL_RIPPLE, Policy.IARM):
            result = TensorEngine(n=5, policy=policy).gemm(X, Z)
            self.assertEqual(result.values, (X @ Z).ravel().tolist(), policy)

    def test_iarm_is_cheaper(self):
        X = self.rng.integers(0, 64, size=(2, 8))
        Z = np.ones((8, 3), dtype=np.int64)
        full = TensorEngine(n=5).gemm(X, Z)
        iarm = TensorEngine(n=5, policy=Policy.IARM).gemm(X, Z)
        self.assertEqual(full.values, iarm.values)
        self.assertLess(iarm.tally.total, full.tally.total)

    def test_gemm_int_signed(self):
        X = self.rng.integers(0, 8, size=(2, 4))
        Z = self.rng.integers(-7, 8, size=(4, 3))
        result = TensorEngine(n=4).gemm_int(X, Z, 3)
        self.assertEqual(result.values, (X @ Z).ravel().tolist())

    def test_gemm_int_unsigned(self):
        X = self.rng.integers(0, 8, size=(2, 4))
        Z = self.rng.integers(0, 8, size=(4, 3))
        result = TensorEngine(n=4).gemm_int(X, Z, 3)
        self.assertEqual(result.values, (X @ Z).ravel().tolist())

    def test_gemm_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            TensorEngine().gemm(np.ones((1, 3), dtype=np.int64), np.ones((4, 2), dtype=np.int64))

    def test_relu(self):
        result = TensorEngine(n=5).relu([5, -3, 0, -40, 17])
        self.assertEqual(result.values, [5, 0, 0, 0, 17])

    def test_relu_needs_signed_bank(self):
        from jc_cim.tensor import relu
        from jc_cim.counters import CounterBank, CounterLayout
        from jc_cim.fabric import D_BASE, Subarray

        sub = Subarray(D_BASE + CounterLayout.rows_needed(5, 1, False), 2)
        with self.assertRaises(DomainError):
            relu(CounterBank.alloc(sub, 5, 1))

    def test_shift_left(self):
        result = TensorEngine(n=5).shift_left([3, 0, 12, 7], 3)
        self.assertEqual(result.values, [24, 0, 96, 56])

    def test_vector_add(self):
        result = TensorEngine(n=5).vector_add([14, -20, 3], [-9, 5, 40])
        self.assertEqual(result.values, [5, -15, 43])

    def test_vector_add_lengths(self):
        with self.assertRaises(ShapeError):
            TensorEngine().vector_add([1, 2], [3])

    def test_iarm_gemv_random_masks(self):
        cases = [np.array([34, 29, 2, 7, 42, 38, 34, 7])]
        cases += [self.rng.integers(0, 48, size=8) for _ in range(12)]
        for n in (2, 3, 4, 5):
            for x in cases:
                Z = self.rng.integers(0, 2, size=(8, 3))
                result = TensorEngine(n=n, policy=Policy.IARM).gemv(x, Z)
                self.assertEqual(result.values, (x @ Z).tolist(), f"n={n} x={x.tolist()}")

    def test_last_row_stays_in_bank(self):
        engine = TensorEngine(n=5)
        result = engine.gemv([3, 4], [[1, 0], [1, 1]])
        self.assertEqual(result.values, [7, 4])
        self.assertEqual(engine.last_bank.read_counters(), [7, 4])
        X = self.rng.integers(0, 16, size=(3, 4))
        Z = self.rng.integers(0, 2, size=(4, 5))
        engine.gemm(X, Z)
        self.assertEqual(engine.last_bank.read_counters(), (X[-1] @ Z).tolist())

    def test_fabric_budget(self):
        engine = TensorEngine(n=5, cols=16, rows=64)
        result = engine.gemv([3, 4], [[1, 0], [1, 1]])
        self.assertEqual(result.values, [7, 4])
        self.assertEqual((engine.last_bank.fabric.rows, engine.last_bank.C), (64, 16))
        self.assertEqual(engine.relu([-2, 9]).values, [0, 9])
        with self.assertRaises(ShapeError):
            TensorEngine(n=5, cols=1).gemv([3, 4], [[1, 0], [1, 1]])
        with self.assertRaises(ShapeError):
            TensorEngine(n=5, rows=12).gemv([3, 4], [[1, 0], [1, 1]])


class TestRandomKernels(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(31)

    def test_gemm_signed_ternary(self):
        shapes = [(32, 32, 32)] + [
            (int(self.rng.integers(1, 5)), int(self.rng.integers(1, 33)), int(self.rng.integers(1, 33))) for _ in range(99)
        ]
        for M, K, N in shapes:
            X = self.rng.integers(-7, 8, size=(M, K))
            Z = self.rng.integers(-1, 2, size=(K, N))
            result = TensorEngine(n=4, policy=Policy.IARM).gemm_int(X, Z, 1)
            np.testing.assert_array_equal(np.array(result.values).reshape(M, N), X @ Z, err_msg=f"{M}x{K}x{N}")

    def test_gemv_binary(self):
        for _ in range(100):
            K, N = (int(v) for v in self.rng.integers(1, 33, size=2))
            x = self.rng.integers(0, 64, size=K)
            Z = self.rng.integers(0, 2, size=(K, N))
            result = TensorEngine(n=5).gemv(x, Z)
            np.testing.assert_array_equal(result.values, x @ Z)

    def test_counter_kernels(self):
        engine = TensorEngine(n=5)
        for _ in range(100):
            size = int(self.rng.integers(1, 33))
            a = self.rng.integers(-200, 201, size=size)
            b = self.rng.integers(-200, 201, size=size)
            np.testing.assert_array_equal(engine.vector_add(a, b).values, a + b)
            np.testing.assert_array_equal(engine.relu(a).values, np.maximum(a, 0))

    def test_zero_input_costs_only_the_copy_out(self):
        engine = TensorEngine(n=5)
        Z = self.rng.integers(0, 2, size=(8, 6))
        result = engine.gemv(np.zeros(8, dtype=np.int64), Z)
        self.assertEqual(result.values, [0] * 6)
        self.assertEqual(result.tally.total, len(engine.last_bank.layout.counter_rows))
        self.assertEqual(engine.last_bank.fabric.tally.total, 0)
