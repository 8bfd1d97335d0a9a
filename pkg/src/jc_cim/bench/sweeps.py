"""
Experiment runners behind the CLI verbs.

Each runner takes an ExperimentConfig and returns plain result rows; writing
them out is the caller's business (see ``ResultWriter``).
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..backends import BackendKind, increment_ops, rca_ecc_ops, rca_ops, rca_tmr_ops
from ..codec import digits_lsd_first
from ..counters import Policy, StreamCost, VirtualCounter, estimate_stream_ops, trace
from ..fabric import OpTally
from ..shield import (
    RateRow,
    protected_program_ops,
    rates_analytic,
    rates_montecarlo,
    rates_montecarlo_program,
    rates_tmr_analytic,
    rates_tmr_montecarlo,
    tmr_program_ops,
)
from ..tensor import TensorEngine, load_matrix_csv, random_inputs
from .config import BenchError, ConfigError, ExperimentConfig, capacity_digits
from .timing import estimate_latency

logger = logging.getLogger(__name__)

OPCOUNT_FIELDS = ["radix", "n", "capacity_bits", "D", "mode", "mean_ops", "mean_invocations", "latency_ns"]
KERNEL_FIELDS = ["index", "value", "expected"]

# mode -> (policy, unit increments)
JC_MODES = {
    "unary": (Policy.FULL_RIPPLE, True),
    "kary": (Policy.FULL_RIPPLE, False),
    "iarm": (Policy.IARM, False),
}


@dataclass
class OpcountRow:
    radix: int
    n: int
    capacity_bits: int
    D: int
    mode: str
    mean_ops: float
    mean_invocations: float
    latency_ns: float

    def as_dict(self):
        return asdict(self)


# ----------------------------------------------------------------------
# Op-count sweep
# ----------------------------------------------------------------------


def sample_inputs(cfg: ExperimentConfig) -> np.ndarray:
    """Uniform unsigned ``input_bits``-bit inputs, ``sparsity`` of them zeroed."""
    rng = np.random.default_rng(cfg.seed)
    x = rng.integers(0, 1 << cfg.input_bits, size=cfg.samples)
    x[rng.random(cfg.samples) < cfg.sparsity] = 0
    return x.astype(np.int64)


def stream_length(cfg: ExperimentConfig) -> int:
    """
    Inputs per accumulation stream. By default the largest count whose sum
    always fits the smallest capacity swept, so every capacity sees the
    same streams.
    """
    if cfg.stream_length:
        return cfg.stream_length
    top = (1 << min(cfg.capacities)) - 1
    return max(1, top // ((1 << cfg.input_bits) - 1))


def program_cost_for(backend: BackendKind, n: int) -> Optional[Callable[[int], OpTally]]:
    backend = BackendKind(backend)
    if backend is BackendKind.AMBIT:
        return None
    return lambda k: OpTally(aap=increment_ops(backend, n, k))


def _streams(inputs: np.ndarray, length: int) -> List[Sequence[int]]:
    return [inputs[i : i + length].tolist() for i in range(0, len(inputs), length)]


def run_opcount_sweep(cfg: ExperimentConfig, progress: bool = False) -> List[OpcountRow]:
    """
    Mean commands per input for unary, k-ary and IARM accumulation over
    every (radix, capacity) pair, plus the ripple-carry baseline.
    """
    inputs = sample_inputs(cfg)
    length = stream_length(cfg)
    streams = _streams(inputs, length)
    backend = BackendKind(cfg.backend)
    logger.info("opcount: %d samples in %d streams of %d, backend %s", cfg.samples, len(streams), length, backend.value)

    rows: List[OpcountRow] = []
    grid = [(radix, bits) for radix in cfg.radices for bits in cfg.capacities]
    for radix, bits in tqdm(grid, desc="opcount", disable=not progress):
        n = radix // 2
        D = capacity_digits(n, bits)
        cost_of = program_cost_for(backend, n)
        for mode, (policy, unit) in JC_MODES.items():
            total = StreamCost()
            for stream in streams:
                estimate_stream_ops(
                    stream, n, D, policy, unit, strict=not cfg.exact_plan,
                    resolve=policy is Policy.IARM, cost=total, program_cost=cost_of,
                )
            rows.append(_opcount_row(cfg, radix, n, bits, D, mode, total.tally.total, total.invocations))

    if backend is BackendKind.AMBIT:
        nonzero = int(np.count_nonzero(inputs))
        for bits in cfg.capacities:
            rows.append(_opcount_row(cfg, 2, 1, bits, bits, "rca", nonzero * rca_ops(bits), nonzero))
    else:
        logger.info("skipping the ripple-carry baseline, it is Ambit-only")
    return rows


def _opcount_row(cfg, radix, n, bits, D, mode, ops, invocations) -> OpcountRow:
    mean_ops = ops / cfg.samples
    return OpcountRow(
        radix, n, bits, D, mode, mean_ops, invocations / cfg.samples, estimate_latency(cfg.timing, mean_ops)
    )


# ----------------------------------------------------------------------
# Fault sweep
# ----------------------------------------------------------------------


def _mc_job(job: Tuple[str, float, int, int, int, int]) -> RateRow:
    kind, p, r, trials, seed, n = job
    if kind == "program":
        return rates_montecarlo_program(p, r, trials, n=n, seed=seed)
    if kind == "tmr":
        return rates_tmr_montecarlo(p, trials, seed=seed)
    return rates_montecarlo(p, r, trials, seed=seed)


def _scheme_ops(scheme: str, cfg: ExperimentConfig, r: int) -> int:
    fc = cfg.faults
    if scheme == "jc_ecc":
        return protected_program_ops(cfg.n, r)
    if scheme == "rca_ecc":
        return rca_ecc_ops(fc.rca_width, r)
    if scheme == "jc_tmr":
        return tmr_program_ops(cfg.n)
    return rca_tmr_ops(fc.rca_width)


def run_fault_sweep(cfg: ExperimentConfig) -> List[RateRow]:
    """
    Silent-error and detection rates per protected gate for each scheme in
    ``faults.schemes``, with the ops one protected update costs: a digit
    increment of width ``n`` for Johnson counters, a ``faults.rca_width``-bit
    add for ripple carry.

    ECC schemes get a row per (p, r) grid point, TMR one per p. Closed forms
    always; Monte Carlo of the isolated gate, of the gates inside generated
    programs and of the voted gate when ``faults.mc_trials`` is set.
    """
    fc = cfg.faults
    grid = [(p, r) for r in fc.fr_checks for p in fc.p_grid]
    rows: List[RateRow] = []
    for scheme in fc.schemes:
        if scheme.endswith("_ecc"):
            for p, r in grid:
                error, detect = rates_analytic(p, r, fc.floor)
                rows.append(RateRow(p, r, error, detect, scheme=scheme, ops=_scheme_ops(scheme, cfg, r)))
        else:
            for p in fc.p_grid:
                error, detect = rates_tmr_analytic(p, fc.floor)
                rows.append(RateRow(p, 0, error, detect, scheme=scheme, ops=_scheme_ops(scheme, cfg, 0)))
    if fc.mc_trials <= 0:
        return rows

    jobs = []
    if "jc_ecc" in fc.schemes:
        for kind in ("gate", "program"):
            jobs += [(kind, p, r, fc.mc_trials, cfg.seed + i, cfg.n) for i, (p, r) in enumerate(grid)]
    if "jc_tmr" in fc.schemes:
        jobs += [("tmr", p, 0, fc.mc_trials, cfg.seed + i, cfg.n) for i, p in enumerate(fc.p_grid)]
    if cfg.workers > 1:
        logger.info("monte carlo on %d workers, %d trials per point", cfg.workers, fc.mc_trials)
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            mc = list(pool.map(_mc_job, jobs))
    else:
        mc = [_mc_job(job) for job in tqdm(jobs, desc="monte carlo", leave=False)]
    for row in mc:
        row.ops = _scheme_ops(row.scheme, cfg, row.r)
    return rows + mc


# ----------------------------------------------------------------------
# Kernels
# ----------------------------------------------------------------------


@dataclass
class KernelReport:
    """Outcome of one kernel run checked against the host result."""

    kernel: str
    values: List[Optional[int]]
    expected: List[int]
    tally: OpTally
    latency_ns: float
    match: bool
    meta: dict = field(default_factory=dict)

    def rows(self):
        return [
            {"index": i, "value": "" if v is None else v, "expected": e}
            for i, (v, e) in enumerate(zip(self.values, self.expected))
        ]


def kernel_operands(cfg: ExperimentConfig) -> Tuple[np.ndarray, np.ndarray]:
    """X and Z from the configured CSV files, random where a file is absent."""
    spec = cfg.inputs
    X, Z = random_inputs(spec.random_spec())
    if spec.x_csv:
        X = load_matrix_csv(spec.x_csv)
    if spec.z_csv:
        Z = load_matrix_csv(spec.z_csv)
    elif cfg.kernel == "gemm_int":
        rng = np.random.default_rng(spec.seed + 1)
        half = 1 << (spec.z_bits - 1)
        Z = rng.integers(-half, half, size=Z.shape) if spec.signed else rng.integers(0, 1 << spec.z_bits, size=Z.shape)
    return X, Z


def _dispatch(engine: TensorEngine, cfg: ExperimentConfig, X: np.ndarray, Z: np.ndarray):
    kernel = cfg.kernel
    if kernel == "gemv":
        return engine.gemv(X[0], Z), X[0] @ Z
    if kernel == "gemm":
        return engine.gemm(X, Z), X @ Z
    if kernel == "gemm_int":
        p = max(int(np.abs(Z).max(initial=0)).bit_length(), 1)
        return engine.gemm_int(X, Z, p), X @ Z
    if kernel == "relu":
        return engine.relu(X[0]), np.maximum(X[0], 0)
    if kernel == "shift_left":
        return engine.shift_left(X[0], cfg.inputs.shift), X[0] << cfg.inputs.shift
    b = X[1] if len(X) > 1 else X[0]
    return engine.vector_add(X[0], b), X[0] + b


def run_kernel(
    cfg: ExperimentConfig,
    X: Optional[np.ndarray] = None,
    Z: Optional[np.ndarray] = None,
) -> Tuple[KernelReport, TensorEngine]:
    """
    Run ``cfg.kernel`` on a fresh fabric and compare with numpy.

    Raises:
        ConfigError: Backend other than Ambit
        OracleMismatchError: Result differs and ``cfg.oracle`` is set
    """
    if BackendKind(cfg.backend) is not BackendKind.AMBIT:
        raise ConfigError("kernels execute on Ambit; use `opcount --backend` to cost other backends")
    if X is None or Z is None:
        gen_X, gen_Z = kernel_operands(cfg)
        X = gen_X if X is None else X
        Z = gen_Z if Z is None else Z
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    Z = np.atleast_2d(np.asarray(Z, dtype=np.int64))

    engine = TensorEngine(
        n=cfg.n, D=cfg.D, policy=Policy(cfg.policy), unit=cfg.unit, cols=cfg.cols, rows=cfg.rows
    )
    result, expected = _dispatch(engine, cfg, X, Z)
    expected = [int(v) for v in np.ravel(expected)]
    values = list(result.values)
    match = values == expected
    report = KernelReport(
        cfg.kernel, values, expected, result.tally, estimate_latency(cfg.timing, result.tally), match,
        meta={"X_shape": list(X.shape), "Z_shape": list(Z.shape)},
    )
    if not match:
        bad = [i for i, (v, e) in enumerate(zip(values, expected)) if v != e]
        msg = f"{cfg.kernel}: {len(bad)} of {len(expected)} outputs differ from the host result (first at {bad[0]})"
        if cfg.oracle:
            raise OracleMismatchError(msg)
        logger.warning(msg)
    logger.info("%s: %d commands, %.1f us", cfg.kernel, result.tally.total, report.latency_ns / 1e3)
    return report, engine


# ----------------------------------------------------------------------
# IARM trace
# ----------------------------------------------------------------------


def run_iarm_trace(cfg: ExperimentConfig) -> List[str]:
    """Plan listing for adding ``trace.addend`` ``trace.steps`` times."""
    ts = cfg.trace
    if len(ts.start) > ts.D:
        raise ConfigError(f"trace start has {len(ts.start)} digits but D={ts.D}")
    digits = list(ts.start) + [0] * (ts.D - len(ts.start))
    vc = VirtualCounter(ts.n, ts.D, strict=ts.strict, digits=digits)
    addend = digits_lsd_first(ts.addend, 2 * ts.n, ts.D)
    return trace(vc, [addend] * ts.steps)


class OracleMismatchError(BenchError):
    """Raised when a kernel's fabric result differs from the host result."""

    pass
