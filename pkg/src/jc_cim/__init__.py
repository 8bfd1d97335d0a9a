"""
Johnson-counter arithmetic on compute-in-memory fabrics.

Subpackages:
    codec: Johnson-counter codewords and host-side oracles
    fabric: Bit-accurate Ambit subarray with fault injection
    uprog: μProgram generation, listing and execution
    counters: Counter banks, IARM scheduling and cost estimates
    tensor: GEMV/GEMM and vector kernels on counter banks
    shield: Parity-checked XOR protection and fault rates
    backends: Pinatubo and MAGIC primitive sets, ripple-carry baseline
    bench: Experiment configuration, runners and CLI
    ui: Rich display and the interactive shell prompt
"""

__version__ = "0.1.0"
