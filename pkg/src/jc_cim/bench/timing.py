"""Bank-parallel latency estimate for a command stream."""

from typing import Optional, Tuple, Union

from ..fabric import OpTally
from .config import TimingModel

OpsLike = Union[int, float, OpTally, Tuple[int, int]]


def _total(ops: OpsLike) -> float:
    if isinstance(ops, OpTally):
        return ops.total
    if isinstance(ops, tuple):
        return sum(ops)
    return float(ops)


def command_interval(tm: TimingModel, banks: Optional[int] = None) -> float:
    """
    Issue interval per command with ``banks`` banks in flight.

    One bank issues every t_AAP + t_RRD; more banks divide that, but never
    beyond one activation per t_RRD or four per t_FAW window.
    """
    banks = tm.banks if banks is None else banks
    return max((tm.t_aap + tm.t_rrd) / banks, tm.t_faw / 4, tm.t_rrd)


def estimate_latency(tm: TimingModel, ops: OpsLike, banks: Optional[int] = None) -> float:
    """Nanoseconds to issue ``ops`` commands."""
    return _total(ops) * command_interval(tm, banks)


def bank_speedup(tm: TimingModel, banks: int) -> float:
    return command_interval(tm, 1) / command_interval(tm, banks)
