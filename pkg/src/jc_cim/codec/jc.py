"""
Johnson-counter codewords and the integer oracle for counter operations.

An n-bit Johnson counter walks 2n states: a run of 1s enters from the LSB
and is then retired from the LSB. Bits are always ordered b1 (LSB) first,
which is also the printed order (``10000`` is 1 for n=5).
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

INVALID = -1


@dataclass(frozen=True)
class JcWord:
    """One n-bit Johnson-counter digit, bits LSB first."""

    n: int
    bits: Tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.n:
            raise CodecError(f"expected {self.n} bits, got {len(self.bits)}")

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @classmethod
    def parse(cls, text: str) -> "JcWord":
        """Build a word from its printed form, e.g. ``"00111"``."""
        if not text or any(ch not in "01" for ch in text):
            raise CodecError(f"not a bit string: {text!r}")
        return cls(len(text), tuple(int(ch) for ch in text))


def encode(v: int, n: int) -> JcWord:
    """
    Encode v in [0, 2n-1] as the v-th state of the n-bit JC cycle.

    Args:
        v: Digit value
        n: Counter width in bits

    Returns:
        The codeword for v
    """
    if n < 1:
        raise CodecError(f"counter width must be positive, got {n}")
    if not 0 <= v <= 2 * n - 1:
        raise ValueRangeError(f"value {v} outside [0, {2 * n - 1}] for n={n}")
    if v <= n:
        bits = tuple(1 if i < v else 0 for i in range(n))
    else:
        bits = tuple(1 if i >= v - n else 0 for i in range(n))
    return JcWord(n, bits)


def is_valid(word: JcWord) -> bool:
    return tuple(word.bits) in _state_index(word.n)


def decode(word: JcWord) -> int:
    """Inverse of encode; raises InvalidCodewordError on non-JC patterns."""
    try:
        return _state_index(word.n)[tuple(word.bits)]
    except KeyError:
        raise InvalidCodewordError(f"{word} is not a {word.n}-bit Johnson state") from None


@lru_cache(maxsize=None)
def _state_index(n: int) -> dict:
    return {encode(v, n).bits: v for v in range(2 * n)}


@lru_cache(maxsize=None)
def codeword_table(n: int) -> np.ndarray:
    """Lookup table from packed codeword (bit i at 2**i) to value, INVALID elsewhere."""
    if n > 20:
        raise CodecError(f"lookup table for n={n} would be too large")
    table = np.full(1 << n, INVALID, dtype=np.int64)
    for bits, v in _state_index(n).items():
        table[sum(b << i for i, b in enumerate(bits))] = v
    return table


def decode_columns(bits: np.ndarray) -> np.ndarray:
    """
    Decode every column of an (n, cols) bit slab at once.

    Columns that are not valid codewords decode to INVALID.
    """
    bits = np.asarray(bits, dtype=bool)
    n = bits.shape[0]
    weights = (np.int64(1) << np.arange(n, dtype=np.int64))[:, None]
    packed = (bits.astype(np.int64) * weights).sum(axis=0)
    return codeword_table(n)[packed]


@dataclass
class OracleCounter:
    """
    Integer ground truth for a multi-digit JC counter.

    ``digits`` holds the physical digit values and ``pending_overflow`` the
    O_next flags, so the represented total is sum((d + 2n*f) * (2n)**i).
    """

    n: int
    D: int
    digits: List[int] = field(default_factory=list)
    pending_overflow: List[bool] = field(default_factory=list)

    def __post_init__(self):
        if not self.digits:
            self.digits = [0] * self.D
        if not self.pending_overflow:
            self.pending_overflow = [False] * self.D

    @property
    def radix(self) -> int:
        return 2 * self.n

    @property
    def capacity(self) -> int:
        return self.radix**self.D

    @property
    def value(self) -> int:
        return self.total()

    def total(self) -> int:
        r = self.radix
        return sum((d + r * int(f)) * r**i for i, (d, f) in enumerate(zip(self.digits, self.pending_overflow)))

    def add_value(self, x: int) -> "OracleCounter":
        """Exact multi-digit add modulo capacity with all carries resolved."""
        total = (self.total() + x) % self.capacity
        return OracleCounter(self.n, self.D, digits_lsd_first(total, self.radix, self.D))


def digits_lsd_first(value: int, radix: int, width: int) -> List[int]:
    out = []
    for _ in range(width):
        value, d = divmod(value, radix)
        out.append(d)
    return out


def oracle_kary_add(c: OracleCounter, k: int, mask: int, digit: int = 0) -> OracleCounter:
    """
    Masked k-ary add on one digit with sticky overflow.

    Args:
        c: Counter state
        k: Step in [1, 2n-1]
        mask: 1 applies the add, 0 leaves the counter untouched
        digit: Digit receiving the add

    Returns:
        New counter state
    """
    _check_step(c.n, k)
    if not mask:
        return OracleCounter(c.n, c.D, list(c.digits), list(c.pending_overflow))
    digits, flags = list(c.digits), list(c.pending_overflow)
    s = digits[digit] + k
    digits[digit] = s % c.radix
    flags[digit] = flags[digit] or s >= c.radix
    return OracleCounter(c.n, c.D, digits, flags)


def oracle_kary_sub(c: OracleCounter, k: int, mask: int, digit: int = 0) -> OracleCounter:
    """Masked k-ary subtract; the flag marks a pending borrow."""
    _check_step(c.n, k)
    if not mask:
        return OracleCounter(c.n, c.D, list(c.digits), list(c.pending_overflow))
    digits, flags = list(c.digits), list(c.pending_overflow)
    s = digits[digit] - k
    digits[digit] = s % c.radix
    flags[digit] = flags[digit] or s < 0
    return OracleCounter(c.n, c.D, digits, flags)


def _check_step(n: int, k: int) -> None:
    if not 1 <= k <= 2 * n - 1:
        raise ValueRangeError(f"step {k} outside [1, {2 * n - 1}] for n={n}")


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x != y for x, y in zip(a, b))


class CodecError(Exception):
    """Base exception for codec errors."""

    pass


class InvalidCodewordError(CodecError):
    """Raised when a bit pattern is not a Johnson-counter state."""

    pass


class ValueRangeError(CodecError):
    """Raised when a value or step falls outside the digit range."""

    pass
