"""
Multi-digit Johnson-counter banks.

Main Classes:
    CounterBank: One counter per column, updated by μPrograms
    CounterLayout: Row map of a bank (digits, flags, shadow rows)
    VirtualCounter: Host-side shadow used to schedule ripples
    Policy: FULL_RIPPLE or IARM accumulation

Exceptions:
    CounterError: Base exception for counter errors
    LayoutError: Bad layout or digit index
    CapacityError: Input does not fit the bank
    DirectionError: Direction switch with unresolved flags
"""

from .bank import CounterBank, Policy
from .cost import StreamCost, estimate_stream_ops, kary_program_tally, ripple_tally
from .iarm import ADD, RIPPLE, PlanStep, RipplePlan, VirtualCounter, flush, format_state, plan, trace
from .layout import CapacityError, CounterError, CounterLayout, DirectionError, LayoutError

__all__ = [
    # Primary classes
    "CounterBank",
    "CounterLayout",
    "VirtualCounter",
    "Policy",
    "PlanStep",
    "RipplePlan",
    "StreamCost",
    # Exceptions
    "CounterError",
    "LayoutError",
    "CapacityError",
    "DirectionError",
    # Scheduling
    "plan",
    "flush",
    "trace",
    "format_state",
    "ADD",
    "RIPPLE",
    # Cost model
    "estimate_stream_ops",
    "kary_program_tally",
    "ripple_tally",
]
