"""
TensorEngine: sizes a subarray and a counter bank for each kernel call.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np

from ..counters import CounterBank, CounterLayout, Policy
from ..fabric import D_BASE, FaultModel, Subarray
from . import kernels
from .kernels import KernelResult
from .matrices import MaskMatrix, ShapeError, binary_slice, csd_slice, digits_for

logger = logging.getLogger(__name__)

MatrixLike = Union[MaskMatrix, np.ndarray, Sequence[Sequence[int]]]


class TensorEngine:
    """
    Runs kernels on freshly allocated fabrics.

    Args:
        n: Bits per counter digit (radix 2n)
        D: Digit count; derived from the operands when None
        policy: Accumulation policy
        unit: Unit increments instead of k-ary steps
        fault_model: Fault model shared by every fabric
        cols: Row width; defaults to the operand width
        rows: Subarray height; defaults to the rows the kernel needs
    """

    def __init__(
        self,
        n: int = 5,
        D: Optional[int] = None,
        policy: Policy = Policy.FULL_RIPPLE,
        unit: bool = False,
        fault_model: Optional[FaultModel] = None,
        cols: Optional[int] = None,
        rows: Optional[int] = None,
    ):
        self.n = n
        self.D = D
        self.policy = policy
        self.unit = unit
        self.fault_model = fault_model
        self.cols = cols
        self.rows = rows
        self.last_bank: Optional[CounterBank] = None

    @property
    def radix(self) -> int:
        return 2 * self.n

    def _digits(self, bound: int) -> int:
        return self.D or digits_for(bound, self.radix)

    def _setup(self, width: int, D: int, signed: bool, extra_rows: int = 0, banks: int = 1):
        cols = self.cols or max(width, 1)
        if cols < width:
            raise ShapeError(f"{width} output columns do not fit a {cols}-column subarray")
        rows = D_BASE + banks * CounterLayout.rows_needed(self.n, D, signed) + extra_rows
        if self.rows is not None:
            if rows > self.rows:
                raise ShapeError(f"kernel needs {rows} rows, the subarray has {self.rows}")
            rows = self.rows
        fabric = Subarray(rows, cols, self.fault_model)
        bank = CounterBank.alloc(fabric, self.n, D, signed, policy=self.policy)
        self.last_bank = bank
        logger.debug("fabric %dx%d, bank n=%d D=%d signed=%s", rows, cols, self.n, D, signed)
        return fabric, bank

    # ------------------------------------------------------------------
    # Matrix kernels
    # ------------------------------------------------------------------

    def gemv(self, x: Sequence[int], Z: MatrixLike) -> KernelResult:
        return self.gemm(np.atleast_2d(np.asarray(x, dtype=np.int64)), Z)

    def gemm(self, X, Z: MatrixLike) -> KernelResult:
        """Y = X @ Z with Z binary or already sliced."""
        masks = Z if isinstance(Z, MaskMatrix) else MaskMatrix.from_binary(Z)
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        if X.shape[1] != masks.K:
            raise ShapeError(f"X has {X.shape[1]} columns, Z has {masks.K} rows")
        pos, neg = _contribution_bounds(X, masks)
        signed = neg > 0
        D = self._digits(max(pos, neg))
        fabric, bank = self._setup(masks.N, D, signed, extra_rows=masks.slice_count)
        mask_rows = masks.store(fabric)
        return kernels.gemm(bank, X, masks, mask_rows, unit=self.unit)

    def gemm_int(self, X, Zint, p: int) -> KernelResult:
        """Integer Z: binary bit slices when non-negative, CSD otherwise."""
        Zint = np.atleast_2d(np.asarray(Zint, dtype=np.int64))
        masks = csd_slice(Zint, p) if (Zint < 0).any() else binary_slice(Zint, p)
        return self.gemm(X, masks)

    # ------------------------------------------------------------------
    # Counter kernels
    # ------------------------------------------------------------------

    def _loaded(self, values: Sequence[int], bound: int, extra_banks: int = 0, signed: bool = False):
        values = [int(v) for v in values]
        signed = signed or any(v < 0 for v in values)
        D = self._digits(bound)
        fabric, bank = self._setup(len(values), D, signed, banks=1 + extra_banks)
        bank.load_values(values)
        return fabric, bank

    def relu(self, values: Sequence[int]) -> KernelResult:
        bound = max((abs(int(v)) for v in values), default=0)
        _, bank = self._loaded(values, bound, signed=True)
        return _trimmed(kernels.relu(bank), len(values))

    def shift_left(self, values: Sequence[int], i: int) -> KernelResult:
        bound = max((abs(int(v)) for v in values), default=0) << i
        _, bank = self._loaded(values, bound, extra_banks=1)
        return _trimmed(kernels.shift_left(bank, i), len(values))

    def vector_add(self, a: Sequence[int], b: Sequence[int]) -> KernelResult:
        if len(a) != len(b):
            raise ShapeError(f"vector lengths differ: {len(a)} vs {len(b)}")
        a = [int(v) for v in a]
        b = [int(v) for v in b]
        signed = any(v < 0 for v in a + b)
        bound = max([abs(v) for v in a + b] + [abs(x + y) for x, y in zip(a, b)] + [0])
        D = self._digits(bound)
        fabric, bank = self._setup(len(a), D, signed, banks=2)
        other = CounterBank.alloc(fabric, self.n, D, signed)
        bank.load_values(a)
        other.load_values(b)
        return _trimmed(kernels.vector_add(bank, other), len(a))


def _trimmed(result: KernelResult, width: int) -> KernelResult:
    return KernelResult(result.values[:width], result.tally)


def _contribution_bounds(X: np.ndarray, masks: MaskMatrix):
    """Largest per-row sums of positive and of negative contributions."""
    pos = neg = 0
    w = np.array(masks.weights, dtype=np.int64)
    src = np.array(masks.sources, dtype=np.int64)
    for x in X:
        contrib = x[src] * w if len(src) else np.zeros(0, dtype=np.int64)
        pos = max(pos, int(contrib[contrib > 0].sum()))
        neg = max(neg, int(-contrib[contrib < 0].sum()))
    return pos, neg
