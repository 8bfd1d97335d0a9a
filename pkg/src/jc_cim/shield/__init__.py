"""
Parity-based fault detection for counter μPrograms.

Main Classes:
    ProtectionConfig: FR repetitions, retry budget, De Morgan pairing
    ProtectedProgram: Blocks with parity checks and restart points
    ParityState: Check bits kept beside protected rows
    EvenParityCode: One parity bit per 8-bit segment
    XorTriple: IR1/IR2/FR row triple of a protected gate
    TmrRows: Replica rows of the triple-modular-redundancy baseline

Exceptions:
    ShieldError: Base exception for fault protection
    UnrecoverableFaultError: A block exhausted its retries
"""

from .parity import EvenParityCode, ParityCode, ParityState
from .protect import (
    ParityCheck,
    ProtectedBlock,
    ProtectedProgram,
    ProtectionConfig,
    ProtectionReport,
    ShieldError,
    ShieldRows,
    UnrecoverableFaultError,
    XorTriple,
    execute_protected,
    gen_protected_program,
    gen_protected_step,
    masked_or_is_xor_check,
    protected_increment,
    protected_program_ops,
    protected_schedule_ops,
    protected_step_ops,
)
from .rates import (
    RATE_FIELDS,
    UNLIKELY_FLOOR,
    RateRow,
    rates_analytic,
    rates_montecarlo,
    rates_montecarlo_program,
    wilson_interval,
    write_rate_csv,
)
from .tmr import TmrRows, gen_tmr_program, rates_tmr_analytic, rates_tmr_montecarlo, tmr_increment, tmr_program_ops

__all__ = [
    # Primary classes
    "ProtectionConfig",
    "ProtectedProgram",
    "ProtectedBlock",
    "ProtectionReport",
    "ParityCheck",
    "ParityState",
    "ParityCode",
    "EvenParityCode",
    "XorTriple",
    "ShieldRows",
    "RateRow",
    # Exceptions
    "ShieldError",
    "UnrecoverableFaultError",
    # Protected execution
    "gen_protected_step",
    "gen_protected_program",
    "execute_protected",
    "protected_increment",
    "masked_or_is_xor_check",
    "protected_step_ops",
    "protected_program_ops",
    "protected_schedule_ops",
    # Rates
    "rates_analytic",
    "rates_montecarlo",
    "rates_montecarlo_program",
    "wilson_interval",
    "write_rate_csv",
    "UNLIKELY_FLOOR",
    "RATE_FIELDS",
    # TMR baseline
    "TmrRows",
    "gen_tmr_program",
    "tmr_increment",
    "tmr_program_ops",
    "rates_tmr_analytic",
    "rates_tmr_montecarlo",
]
