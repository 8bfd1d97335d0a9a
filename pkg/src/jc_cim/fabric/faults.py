from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class FaultModel:
    """
    Per-column Bernoulli fault injection.

    Attributes:
        p_likely: Flip probability of every multi-row activation's sensed bit
        p_read: Flip probability of a plain read or clone
        seed: Seed for the private generator
        data_dependent: Treat columns whose three inputs agree as the
            unlikely mode, flipping at p_read instead of p_likely
    """

    p_likely: float = 0.0
    p_read: float = 0.0
    seed: Optional[int] = None
    data_dependent: bool = False
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("p_likely", "p_read"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        self.rng = np.random.default_rng(self.seed)

    @property
    def fault_free(self) -> bool:
        return self.p_likely == 0.0 and self.p_read == 0.0

    def flips(self, cols: int, p) -> np.ndarray:
        """
        Draw a flip mask.

        Args:
            cols: Row width
            p: Scalar probability or per-column probability array
        """
        if np.isscalar(p):
            if p == 0.0:
                return np.zeros(cols, dtype=bool)
            if p == 1.0:
                return np.ones(cols, dtype=bool)
        return self.rng.random(cols) < p

    def reseed(self, seed: Optional[int]) -> None:
        self.seed = seed
        self.rng = np.random.default_rng(seed)
