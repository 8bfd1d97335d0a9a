"""Dry-run command counts for input streams, without touching a fabric."""

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from ..codec import digits_lsd_first
from ..fabric import OpTally
from .bank import Policy
from .iarm import ADD, RIPPLE, VirtualCounter, flush, plan
from .layout import CapacityError


def kary_program_tally(n: int) -> OpTally:
    """One masked k-ary program: n masked steps plus the flag update."""
    return OpTally(aap=5 * n + 5, ap=2 * n + 2)


def ripple_tally(n: int, msd: bool, signed: bool) -> OpTally:
    clear = OpTally(aap=1)
    if not msd:
        return kary_program_tally(n) + clear
    if signed:
        return OpTally(aap=3, ap=1) + clear
    return clear


@dataclass
class StreamCost:
    """Accumulated cost of a stream."""

    tally: OpTally = field(default_factory=OpTally)
    digit_increments: int = 0
    ripples: int = 0

    @property
    def invocations(self) -> int:
        return self.digit_increments + self.ripples


def estimate_stream_ops(
    inputs: Iterable[int],
    n: int,
    D: int,
    policy: Policy = Policy.FULL_RIPPLE,
    unit: bool = False,
    signed: bool = False,
    strict: bool = True,
    resolve: bool = False,
    cost: Optional[StreamCost] = None,
    program_cost: Optional[Callable[[int], OpTally]] = None,
) -> StreamCost:
    """
    Count the commands a CounterBank would issue for a stream of inputs.

    Mirrors ``CounterBank.accumulate_value`` step for step, including the
    resolve on a signed direction switch, but skips the bit-level work.

    Args:
        inputs: Signed input values
        n: Bits per digit
        D: Digit count
        policy: FULL_RIPPLE or IARM
        unit: Unit increments instead of k-ary steps
        signed: Bank has an O_sign row
        strict: Plan IARM on mask-safe bounds as banks do; False plans on
            exact digit values, valid for one unmasked counter
        resolve: Flush pending flags after the last input
        program_cost: Commands of one k-ary digit program, for non-Ambit
            backends; ripple programs use k=1
    """
    cost = cost or StreamCost()
    radix = 2 * n
    program_cost = program_cost or (lambda k: kary_program_tally(n))
    vc = VirtualCounter(n, D, signed=signed, strict=strict)
    up = True
    pending = False

    def add(amount: int) -> None:
        times = amount if unit else 1
        one = program_cost(1 if unit else amount)
        cost.tally = cost.tally + OpTally(one.aap * times, one.ap * times)
        cost.digit_increments += times

    def ripple(digit: int) -> None:
        msd = digit == D - 1
        if msd:
            cost.tally = cost.tally + ripple_tally(n, True, signed)
        else:
            cost.tally = cost.tally + program_cost(1) + OpTally(aap=1)
        cost.ripples += 1
        if digit < D - 1:
            cost.digit_increments += 1

    for x in inputs:
        if x == 0:
            continue
        if x < 0 and not signed:
            raise CapacityError("negative input on an unsigned bank")
        digits = digits_lsd_first(abs(x), radix, D)
        if (x > 0) != up:
            if pending and policy is Policy.IARM:
                steps, vc = flush(vc)
                for step in steps:
                    ripple(step.digit)
            up = x > 0
            vc.reset_unknown()
        if policy is Policy.IARM:
            steps, vc = plan(vc, digits)
            for step in steps:
                if step.kind == RIPPLE:
                    ripple(step.digit)
                elif step.kind == ADD:
                    add(step.amount)
            pending = True
        else:
            for i, amount in enumerate(digits):
                if amount:
                    add(amount)
                ripple(i)
    if resolve and pending and policy is Policy.IARM:
        steps, vc = flush(vc)
        for step in steps:
            ripple(step.digit)
    return cost
