"""
Host-side operands: inputs, mask matrices and their power-of-two slicing.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Tuple, Union

import numpy as np

from ..fabric import Subarray

logger = logging.getLogger(__name__)


def digits_of(x: int, radix: int) -> List[int]:
    """Base-``radix`` digits of |x|, LSD first; zero has no digits."""
    if radix < 2:
        raise DomainError(f"radix must be at least 2, got {radix}")
    x = abs(int(x))
    out = []
    while x:
        x, d = divmod(x, radix)
        out.append(d)
    return out


def digits_for(bound: int, radix: int) -> int:
    """Smallest digit count whose capacity exceeds ``bound``."""
    D = 1
    while radix**D <= bound:
        D += 1
    return D


@dataclass
class HostInput:
    """Integer input matrix X with its declared width."""

    X: np.ndarray
    bits: int
    signed: bool = False

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.int64))
        limit = 1 << self.bits
        if np.any(np.abs(self.X) >= limit):
            raise DomainError(f"input entries must satisfy |x| < 2^{self.bits}")
        if not self.signed and np.any(self.X < 0):
            raise DomainError("negative entries in an unsigned input")


@dataclass
class MaskMatrix:
    """
    Binary mask rows with their weights.

    A plain binary Z has one slice per logical row with weight 1. A sliced
    integer Z has several slices per row, each weighted ±2^j, and
    ``sum(weight * mask)`` over a row's slices reconstructs that row.

    Attributes:
        masks: (S, N) boolean slice rows
        weights: Signed power-of-two weight per slice
        sources: Logical row index per slice
        K: Logical row count
    """

    masks: np.ndarray
    weights: List[int]
    sources: List[int]
    K: int
    stored_rows: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.masks = np.asarray(self.masks, dtype=bool)
        if self.masks.ndim != 2:
            raise ShapeError(f"masks must be 2-D, got shape {self.masks.shape}")
        if not (len(self.weights) == len(self.sources) == self.masks.shape[0]):
            raise ShapeError("masks, weights and sources disagree in length")
        for w in self.weights:
            if w == 0 or abs(w) & (abs(w) - 1):
                raise DomainError(f"slice weight {w} is not a signed power of two")

    @classmethod
    def from_binary(cls, Z) -> "MaskMatrix":
        Z = np.atleast_2d(np.asarray(Z))
        if not np.isin(Z, (0, 1)).all():
            raise DomainError("binary mask matrix holds values other than 0/1")
        K = Z.shape[0]
        return cls(Z.astype(bool), [1] * K, list(range(K)), K)

    @property
    def N(self) -> int:
        return self.masks.shape[1]

    @property
    def slice_count(self) -> int:
        return self.masks.shape[0]

    def rows_per_logical_row(self) -> List[int]:
        counts = [0] * self.K
        for s in self.sources:
            counts[s] += 1
        return counts

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((self.K, self.N), dtype=np.int64)
        for mask, w, src in zip(self.masks, self.weights, self.sources):
            out[src] += w * mask.astype(np.int64)
        return out

    def store(self, fabric: Subarray) -> List[int]:
        """Write every slice into freshly allocated rows; host load, free."""
        if self.N > fabric.cols:
            raise ShapeError(f"{self.N} mask columns do not fit a {fabric.cols}-column row")
        rows = fabric.allocate(self.slice_count)
        for row, mask in zip(rows, self.masks):
            bits = np.zeros(fabric.cols, dtype=bool)
            bits[: self.N] = mask
            fabric.write_row(row, bits)
        self.stored_rows = rows
        return rows


def naf(v: int) -> Dict[int, int]:
    """Non-adjacent form of v as {bit position: +1 or -1}."""
    digits: Dict[int, int] = {}
    j = 0
    while v:
        if v & 1:
            d = 2 - (v & 3)
            digits[j] = d
            v -= d
        v >>= 1
        j += 1
    return digits


def binary_slice(Z, p: int) -> MaskMatrix:
    """Unsigned integer Z as up to p bit-plane masks per row (weights 2^j)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.int64))
    if np.any(Z < 0) or np.any(Z >= 1 << p):
        raise DomainError(f"binary slicing needs entries in [0, 2^{p})")
    masks, weights, sources = [], [], []
    for i, row in enumerate(Z):
        for j in range(p):
            plane = (row >> j) & 1
            if plane.any():
                masks.append(plane.astype(bool))
                weights.append(1 << j)
                sources.append(i)
    return _sliced(masks, weights, sources, Z.shape)


def csd_slice(Z, p: int) -> MaskMatrix:
    """
    Signed integer Z in canonical signed digit form.

    Every row gets one mask per nonzero (position, sign) pair it uses. NAF
    digits of a value below 2^p occupy positions 0..p, so a row needs at
    most 2(p+1) slices; each value itself has the minimal number of nonzero digits.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.int64))
    if np.any(np.abs(Z) >= 1 << p):
        raise DomainError(f"CSD slicing needs |entries| < 2^{p}")
    masks, weights, sources = [], [], []
    for i, row in enumerate(Z):
        planes: Dict[Tuple[int, int], np.ndarray] = {}
        for col, v in enumerate(row):
            for j, d in naf(int(v)).items():
                planes.setdefault((j, d), np.zeros(Z.shape[1], dtype=bool))[col] = True
        for (j, d), plane in sorted(planes.items()):
            masks.append(plane)
            weights.append(d << j)
            sources.append(i)
    return _sliced(masks, weights, sources, Z.shape)


def _sliced(masks, weights, sources, shape) -> MaskMatrix:
    K, N = shape
    arr = np.array(masks, dtype=bool) if masks else np.zeros((0, N), dtype=bool)
    return MaskMatrix(arr, weights, sources, K)


def load_matrix_csv(path: Union[str, Path]) -> np.ndarray:
    """
    Load a dense integer matrix whose first line is the ``rows,cols``
    header, e.g. ``M,K`` for X or ``K,N`` for Z.
    """
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ShapeError(f"{path} is empty")
    try:
        rows, cols = (int(t) for t in lines[0].split(","))
    except ValueError:
        raise ShapeError(f"{path}: header must be two integers, got {lines[0]!r}") from None
    data = np.array([[int(t) for t in ln.split(",")] for ln in lines[1:]], dtype=np.int64)
    if data.shape != (rows, cols):
        raise ShapeError(f"{path}: header says {rows}x{cols}, data is {data.shape}")
    return data


def random_inputs(spec: Mapping) -> Tuple[np.ndarray, np.ndarray]:
    """
    Random X (M x K) and binary Z (K x N) from a dimensions spec with keys
    M, K, N, bits, signed, sparsity, seed.
    """
    missing = {"M", "K", "N"} - set(spec)
    if missing:
        raise ShapeError(f"random input spec lacks {sorted(missing)}")
    rng = np.random.default_rng(spec.get("seed", 0))
    bits = int(spec.get("bits", 8))
    M, K, N = int(spec["M"]), int(spec["K"]), int(spec["N"])
    if spec.get("signed", False):
        X = rng.integers(-(1 << (bits - 1)), 1 << (bits - 1), size=(M, K))
    else:
        X = rng.integers(0, 1 << bits, size=(M, K))
    sparsity = float(spec.get("sparsity", 0.0))
    if not 0.0 <= sparsity <= 1.0:
        raise DomainError(f"sparsity {sparsity} outside [0, 1]")
    X[rng.random((M, K)) < sparsity] = 0
    Z = rng.integers(0, 2, size=(K, N))
    return X.astype(np.int64), Z.astype(np.int64)


class TensorError(Exception):
    """Base exception for tensor kernels."""

    pass


class ShapeError(TensorError):
    """Raised when operand shapes disagree."""

    pass


class DomainError(TensorError):
    """Raised when operands fall outside a kernel's domain."""

    pass
