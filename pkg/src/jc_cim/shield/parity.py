"""Parity metadata for protected rows. Codes are linear, so XOR-homomorphic."""

from abc import ABC, abstractmethod
from typing import Dict, Iterable, Optional

import numpy as np

from ..fabric import Subarray


class ParityCode(ABC):
    """A linear check code over one row."""

    @abstractmethod
    def encode(self, bits: np.ndarray) -> np.ndarray:
        """Check bits of a row."""

    @abstractmethod
    def complement(self, checks: np.ndarray, cols: int) -> np.ndarray:
        """Check bits of the complemented row, given those of the row."""

    def combine(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a ^ b


class EvenParityCode(ParityCode):
    """One even-parity bit per ``segment`` data bits."""

    def __init__(self, segment: int = 8):
        if segment < 1:
            raise ValueError(f"segment must be positive, got {segment}")
        self.segment = segment

    def _segments(self, cols: int) -> int:
        return -(-cols // self.segment)

    def encode(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits, dtype=bool)
        padded = np.zeros(self._segments(bits.size) * self.segment, dtype=bool)
        padded[: bits.size] = bits
        return np.bitwise_xor.reduce(padded.reshape(-1, self.segment), axis=1)

    def complement(self, checks: np.ndarray, cols: int) -> np.ndarray:
        lengths = np.full(self._segments(cols), self.segment)
        lengths[-1] = cols - self.segment * (len(lengths) - 1)
        return checks ^ (lengths % 2 == 1)


class ParityState:
    """
    Check bits for the rows a protected program reads, kept in step with
    the data. Recorded values stand in for the ECC stored beside each row.
    """

    def __init__(self, cols: int, code: Optional[ParityCode] = None):
        self.cols = cols
        self.code = code or EvenParityCode()
        self._checks: Dict[int, np.ndarray] = {}

    def record(self, row: int, bits: np.ndarray) -> None:
        self._checks[row] = self.code.encode(bits)

    def sync(self, fabric: Subarray, rows: Iterable[int]) -> None:
        for row in rows:
            self.record(row, fabric.peek_row(row))

    def parity(self, row: int, inverted: bool = False) -> np.ndarray:
        try:
            checks = self._checks[row]
        except KeyError:
            raise KeyError(f"no parity recorded for row {row}") from None
        return self.code.complement(checks, self.cols) if inverted else checks

    def expected_xor(self, *operands) -> np.ndarray:
        """Check bits of the XOR of ``(row, inverted)`` operands."""
        out = None
        for row, inverted in operands:
            p = self.parity(row, inverted)
            out = p if out is None else self.code.combine(out, p)
        return out

    def mismatches(self, bits: np.ndarray, expected: np.ndarray) -> np.ndarray:
        """Indices of segments whose check bit disagrees."""
        return np.flatnonzero(self.code.encode(bits) != expected)

    def forget(self, rows: Iterable[int]) -> None:
        for row in rows:
            self._checks.pop(row, None)
