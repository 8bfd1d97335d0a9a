"""
μProgram generation, listing and execution.

Main Classes:
    MicroOp / MicroProgram: Immutable command sequences
    TransitionPattern: Per-bit sources of a k-ary JC transition
    ProgramExecutor: Parses listings and runs programs on a Subarray
    UProgTransformer: Parse tree to MicroOp conversion

Exceptions:
    ExecutorError: Base exception for program errors
    GrammarError: Grammar file problems
    ProgramError: Malformed ops, listings or failed runs
"""

from .executor import GrammarError, ProgramExecutor
from .program import (
    AMBIT_KINDS,
    MAGIC_KINDS,
    PINATUBO_KINDS,
    ExecutorError,
    MicroOp,
    MicroProgram,
    OpKind,
    ProgramError,
    ProgramMeta,
    count_ops,
    format_listing,
)
from .templates import (
    MAJ_OPS,
    MASKED_STEP_OPS,
    OVERFLOW_CHECK_OPS,
    PROGRAM_REGISTRY,
    Direction,
    TransitionPattern,
    add_step,
    gen_clear,
    gen_copy,
    gen_kary_program,
    gen_maj,
    gen_masked_step,
    gen_overflow_check,
    gen_sign_fold,
    gen_underflow_check,
    gen_unit_rowclone,
    get_generator,
    list_available_programs,
    maj_ops,
    masked_step_ops,
)
from .transformer import UProgTransformer

__all__ = [
    # Primary classes
    "MicroOp",
    "MicroProgram",
    "ProgramMeta",
    "OpKind",
    "TransitionPattern",
    "Direction",
    "ProgramExecutor",
    "UProgTransformer",
    # Exceptions
    "ExecutorError",
    "GrammarError",
    "ProgramError",
    # Generators
    "gen_masked_step",
    "gen_kary_program",
    "gen_overflow_check",
    "gen_underflow_check",
    "gen_unit_rowclone",
    "gen_sign_fold",
    "gen_maj",
    "gen_clear",
    "gen_copy",
    "maj_ops",
    "masked_step_ops",
    "add_step",
    # Accounting and listing
    "count_ops",
    "format_listing",
    "MASKED_STEP_OPS",
    "OVERFLOW_CHECK_OPS",
    "MAJ_OPS",
    "AMBIT_KINDS",
    "PINATUBO_KINDS",
    "MAGIC_KINDS",
    # Utilities
    "get_generator",
    "list_available_programs",
    "PROGRAM_REGISTRY",
]
