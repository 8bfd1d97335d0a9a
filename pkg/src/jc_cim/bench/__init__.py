"""
Experiments: configuration, runners, latency model and result files.

Main Classes:
    ExperimentConfig: JSON-loadable experiment settings
    TimingModel: DRAM command timing parameters
    ResultWriter: Timestamped result directories
    KernelReport: One kernel run checked against numpy

Exceptions:
    BenchError: Base exception for experiment errors
    ConfigError: Malformed configuration
    OracleMismatchError: Kernel result differs from the host result
"""

from .config import (
    BACKENDS,
    EXPERIMENTS,
    KERNELS,
    BenchError,
    ConfigError,
    ExperimentConfig,
    FaultConfig,
    InputSpec,
    TimingModel,
    TraceSpec,
    capacity_digits,
)
from .results import ResultWriter
from .sweeps import (
    KERNEL_FIELDS,
    OPCOUNT_FIELDS,
    KernelReport,
    OpcountRow,
    OracleMismatchError,
    kernel_operands,
    program_cost_for,
    run_fault_sweep,
    run_iarm_trace,
    run_kernel,
    run_opcount_sweep,
    sample_inputs,
    stream_length,
)
from .timing import bank_speedup, command_interval, estimate_latency

__all__ = [
    # Primary classes
    "ExperimentConfig",
    "TimingModel",
    "FaultConfig",
    "InputSpec",
    "TraceSpec",
    "ResultWriter",
    "KernelReport",
    "OpcountRow",
    # Exceptions
    "BenchError",
    "ConfigError",
    "OracleMismatchError",
    # Runners
    "run_opcount_sweep",
    "run_fault_sweep",
    "run_kernel",
    "run_iarm_trace",
    "sample_inputs",
    "stream_length",
    "kernel_operands",
    "program_cost_for",
    "capacity_digits",
    # Latency
    "estimate_latency",
    "command_interval",
    "bank_speedup",
    # Constants
    "EXPERIMENTS",
    "KERNELS",
    "BACKENDS",
    "OPCOUNT_FIELDS",
    "KERNEL_FIELDS",
]
