"""
Experiment configuration: a dataclass tree loaded from JSON.

Unknown keys are rejected so typos fail loudly instead of silently
falling back to defaults.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger(__name__)

EXPERIMENTS = ("opcount", "faults", "kernel", "trace-iarm")
KERNELS = ("gemv", "gemm", "gemm_int", "relu", "shift_left", "vector_add")
BACKENDS = ("ambit", "pinatubo", "magic")
POLICIES = ("full_ripple", "iarm")
SCHEMES = ("jc_ecc", "rca_ecc", "jc_tmr", "rca_tmr")


@dataclass
class TimingModel:
    """
    DRAM command timing in nanoseconds.

    Attributes:
        t_ras: Row active time
        t_rp: Precharge time
        t_rrd: Activate-to-activate delay across banks
        t_faw: Four-activation window
        slack: Fixed AAP overhead on top of t_ras + t_rp
        banks: Banks issuing in parallel
    """

    t_ras: float = 32.0
    t_rp: float = 14.5
    t_rrd: float = 3.6
    t_faw: float = 14.5
    slack: float = 4.0
    banks: int = 1

    @property
    def t_aap(self) -> float:
        return self.t_ras + self.t_rp + self.slack


@dataclass
class FaultConfig:
    p_grid: List[float] = field(default_factory=lambda: [1e-1, 1e-2, 1e-4])
    fr_checks: List[int] = field(default_factory=lambda: [2, 4, 6])
    p_read: float = 0.0
    floor: float = 1e-20
    mc_trials: int = 0
    max_retries: int = 3
    demorgan: bool = False
    schemes: List[str] = field(default_factory=lambda: list(SCHEMES))
    rca_width: int = 32


@dataclass
class InputSpec:
    """Kernel operands: CSV files, or random generation from the dimensions."""

    M: int = 8
    K: int = 8
    N: int = 8
    bits: int = 8
    signed: bool = False
    sparsity: float = 0.0
    seed: int = 0
    x_csv: Optional[str] = None
    z_csv: Optional[str] = None
    z_bits: int = 4
    shift: int = 1

    def random_spec(self) -> Dict[str, Any]:
        return {k: getattr(self, k) for k in ("M", "K", "N", "bits", "signed", "sparsity", "seed")}


@dataclass
class TraceSpec:
    n: int = 5
    D: int = 5
    start: List[int] = field(default_factory=lambda: [9, 9, 9, 9])
    addend: int = 9
    steps: int = 13
    strict: bool = False


@dataclass
class ExperimentConfig:
    experiment: str = "opcount"
    backend: str = "ambit"
    n: int = 5
    D: Optional[int] = None
    radices: List[int] = field(default_factory=lambda: [2, 4, 6, 8, 10, 12, 16])
    capacities: List[int] = field(default_factory=lambda: [16, 32, 64])
    samples: int = 10_000
    input_bits: int = 8
    sparsity: float = 0.0
    stream_length: Optional[int] = None
    seed: int = 0
    policy: str = "full_ripple"
    unit: bool = False
    exact_plan: bool = False
    kernel: str = "gemm"
    cols: Optional[int] = None
    rows: Optional[int] = None
    workers: int = 1
    oracle: bool = True
    inputs: InputSpec = field(default_factory=InputSpec)
    faults: FaultConfig = field(default_factory=FaultConfig)
    timing: TimingModel = field(default_factory=TimingModel)
    trace: TraceSpec = field(default_factory=TraceSpec)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}, expected one of {EXPERIMENTS}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}, expected one of {BACKENDS}")
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}, expected one of {POLICIES}")
        if self.kernel not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kernel!r}, expected one of {KERNELS}")
        odd = [r for r in self.radices if r < 2 or r % 2]
        if odd:
            raise ConfigError(f"Johnson-counter radices are even and at least 2, got {odd}")
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if self.samples < 1:
            raise ConfigError(f"samples must be positive, got {self.samples}")
        if not 0.0 <= self.sparsity <= 1.0:
            raise ConfigError(f"sparsity {self.sparsity} outside [0, 1]")
        if self.timing.banks < 1:
            raise ConfigError(f"banks must be positive, got {self.timing.banks}")
        unknown = [s for s in self.faults.schemes if s not in SCHEMES]
        if unknown:
            raise ConfigError(f"unknown protection schemes {unknown}, expected some of {SCHEMES}")
        if self.faults.rca_width < 1:
            raise ConfigError(f"rca_width must be positive, got {self.faults.rca_width}")
        for name in ("cols", "rows"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name} must be positive, got {value}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        return _build(cls, data, "config")

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        logger.debug("loaded config %s", path)
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def override(self, **values) -> "ExperimentConfig":
        """Copy with top-level fields replaced; None values are ignored."""
        data = self.to_dict()
        data.update({k: v for k, v in values.items() if v is not None})
        return ExperimentConfig.from_dict(data)


def capacity_digits(n: int, bits: int) -> int:
    """Smallest D with (2n)^D >= 2^bits."""
    D = 1
    while (2 * n) ** D < 2**bits:
        D += 1
    return D


_NESTED = {
    "inputs": InputSpec,
    "faults": FaultConfig,
    "timing": TimingModel,
    "trace": TraceSpec,
}


def _build(cls, data: Dict[str, Any], where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        nested = _NESTED.get(key) if cls is ExperimentConfig else None
        kwargs[key] = _build(nested, value, f"{where}.{key}") if nested else value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(f"{where}: {e}") from e


class BenchError(Exception):
    """Base exception for experiment errors."""

    pass


class ConfigError(BenchError):
    """Raised for malformed experiment configuration."""

    pass
