"""
Input-aware rippling minimization (IARM).

The host keeps a virtual counter whose digits may exceed the physical range
2n-1: a digit holding v >= 2n is a physical digit v - 2n plus a pending
O_next flag. A digit can absorb input until it would pass 4n-1, the largest
value one flag can carry. Ripples are issued only right before an add that
would cross that limit.

With ``strict=True`` decisions use per-digit upper bounds: after a ripple a
digit is only known to be below 2n, since masked-out columns kept their
value. Counter banks always plan this way. The default exact mode tracks
one value per digit and is only valid for a single unmasked stream, as in
traces and single-counter cost estimates.
"""

import copy
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from .layout import CapacityError

logger = logging.getLogger(__name__)

ADD = "add"
RIPPLE = "ripple"


@dataclass(frozen=True)
class PlanStep:
    kind: str
    digit: int
    amount: int = 0

    def __str__(self) -> str:
        if self.kind == RIPPLE:
            return f"ripple d{self.digit}"
        return f"add {self.amount} -> d{self.digit}"


RipplePlan = List[PlanStep]


@dataclass
class VirtualCounter:
    """
    Host-side shadow of a counter bank.

    Attributes:
        n: Bits per digit
        D: Digit count
        signed: MSD ripples fold into O_sign instead of failing
        strict: Decide on per-digit upper bounds (mask-safe)
        digits: Virtual digit values, LSD first
        bounds: Upper bounds used in strict mode
    """

    n: int
    D: int
    signed: bool = False
    strict: bool = False
    digits: List[int] = field(default_factory=list)
    bounds: List[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.digits:
            self.digits = [0] * self.D
        if not self.bounds:
            self.bounds = list(self.digits)

    @property
    def radix(self) -> int:
        return 2 * self.n

    @property
    def limit(self) -> int:
        return 4 * self.n - 1

    def total(self) -> int:
        return sum(v * self.radix**i for i, v in enumerate(self.digits))

    def level(self, i: int) -> int:
        return self.bounds[i] if self.strict else self.digits[i]

    def reset(self, level: int = 0) -> None:
        """Forget history; ``level`` is assumed for every digit."""
        self.digits = [level] * self.D
        self.bounds = [level] * self.D

    def reset_unknown(self) -> None:
        """Assume every digit may sit at the top of its physical range."""
        self.reset(self.radix - 1)

    # ------------------------------------------------------------------

    def _ripple(self, i: int, steps: RipplePlan) -> None:
        r = self.radix
        if i == self.D - 1:
            if not self.signed and not self.strict:
                raise CapacityError(f"carry out of the most significant digit (D={self.D})")
            # signed: fold into O_sign; unsigned: drop the carry, flag saturation
            self.digits[i] -= r
            self.bounds[i] = max(self.bounds[i] - r, r - 1) if self.strict else self.digits[i]
        else:
            if self.level(i + 1) + 1 > self.limit:
                self._ripple(i + 1, steps)
            self.digits[i] -= r
            self.digits[i + 1] += 1
            self.bounds[i] = max(self.bounds[i] - r, r - 1) if self.strict else self.digits[i]
            self.bounds[i + 1] += 1
        steps.append(PlanStep(RIPPLE, i))

    def plan_into(self, x_digits: Sequence[int], steps: RipplePlan) -> None:
        for i, amount in enumerate(x_digits):
            if amount == 0:
                continue
            if i >= self.D:
                raise CapacityError(f"input has digit {i} but the bank has only {self.D}")
            if self.level(i) + amount > self.limit:
                self._ripple(i, steps)
            self.digits[i] += amount
            self.bounds[i] += amount
            steps.append(PlanStep(ADD, i, amount))

    def flush_into(self, steps: RipplePlan) -> None:
        r = self.radix
        for i in range(self.D):
            while self.level(i) >= r:
                if i == self.D - 1 and not self.signed and not self.strict:
                    raise CapacityError("pending carry out of the most significant digit")
                self._ripple(i, steps)
        if self.strict:
            self.bounds = [min(b, r - 1) for b in self.bounds]


def plan(vc: VirtualCounter, x_digits: Sequence[int]) -> Tuple[RipplePlan, VirtualCounter]:
    """
    Schedule one input.

    Args:
        vc: Current virtual counter (left untouched)
        x_digits: Input digits, LSD first

    Returns:
        The ordered steps (ripples before the add they make room for) and
        the updated virtual counter
    """
    nxt = copy.deepcopy(vc)
    steps: RipplePlan = []
    nxt.plan_into(x_digits, steps)
    if any(s.kind == RIPPLE for s in steps):
        logger.debug("plan %s: %s", list(x_digits), ", ".join(map(str, steps)))
    return steps, nxt


def flush(vc: VirtualCounter) -> Tuple[RipplePlan, VirtualCounter]:
    """Ripple every digit holding a pending flag, LSD first."""
    nxt = copy.deepcopy(vc)
    steps: RipplePlan = []
    nxt.flush_into(steps)
    return steps, nxt


def format_state(vc: VirtualCounter) -> str:
    """
    Render digits MSD first; a digit v >= 2n prints as a superscript-one
    prefix (the pending flag) followed by v - 2n.
    """
    digits = list(vc.digits)
    while len(digits) > 1 and digits[-1] == 0:
        digits.pop()
    sep = "" if vc.radix <= 10 else " "
    parts = []
    for v in reversed(digits):
        parts.append(f"¹{v - vc.radix}" if v >= vc.radix else str(v))
    return sep.join(parts)


def trace(vc: VirtualCounter, inputs: Sequence[Sequence[int]]) -> List[str]:
    """
    Step-by-step plan listing: one line per input with its ripples and the
    resulting virtual state.
    """
    lines = [f"start: {format_state(vc)}"]
    for step, x in enumerate(inputs, start=1):
        steps, vc = plan(vc, x)
        ripples = [s for s in steps if s.kind == RIPPLE]
        rtext = ", ".join(str(s) for s in ripples) if ripples else "no ripple"
        lines.append(f"step {step}: {rtext}; {format_state(vc)}")
    return lines
