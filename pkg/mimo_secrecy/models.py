from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .errors import ConfigError, CountError, DimensionError, PartitionError
from .matrix_core import as_matrix


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PartitionSpec:
    """Sequential split of [0, k) into four non-empty contiguous blocks.

    Cut points follow the one-based convention S1=[1:k1], S2=[k1+1:k2],
    S3=[k2+1:k3], S4=[k3+1:k]; `blocks()` returns zero-based indices.
    """
    k1: int
    k2: int
    k3: int
    k: int

    def __post_init__(self) -> None:
        if not (0 < self.k1 < self.k2 < self.k3 < self.k):
            raise PartitionError(
                f"cut points must satisfy 0 < k1 < k2 < k3 < k, got {self.k1, self.k2, self.k3, self.k}"
            )

    def blocks(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.arange(0, self.k1),
            np.arange(self.k1, self.k2),
            np.arange(self.k2, self.k3),
            np.arange(self.k3, self.k),
        )

    def sizes(self) -> Tuple[int, int, int, int]:
        return tuple(len(b) for b in self.blocks())  # type: ignore[return-value]

    def swapped(self) -> "PartitionSpec":
        """Partition describing the layout after blocks 2 and 3 trade places."""
        s1, s2, s3, _ = self.sizes()
        return PartitionSpec(self.k1, s1 + s3, s1 + s3 + s2, self.k)

    @classmethod
    def random(cls, rng: np.random.Generator, k: int) -> "PartitionSpec":
        if k < 4:
            raise PartitionError(f"need at least 4 indices for a four-block partition, got {k}")
        cuts = np.sort(rng.choice(np.arange(1, k), size=3, replace=False))
        return cls(int(cuts[0]), int(cuts[1]), int(cuts[2]), k)


@dataclass(frozen=True)
class ChannelPair:
    """Legitimate (H_r) and eavesdropper (H_e) channels.

    Noise at both receivers is unit-covariance proper Gaussian.
    """
    H_r: np.ndarray
    H_e: np.ndarray

    def __post_init__(self) -> None:
        H_r = as_matrix(self.H_r, "H_r")
        H_e = as_matrix(self.H_e, "H_e")
        if H_r.shape[1] != H_e.shape[1]:
            raise DimensionError(
                f"H_r and H_e must share the transmit dimension, got {H_r.shape} and {H_e.shape}"
            )
        object.__setattr__(self, "H_r", _freeze(H_r))
        object.__setattr__(self, "H_e", _freeze(H_e))

    @property
    def n_t(self) -> int:
        return self.H_r.shape[1]

    @property
    def n_r(self) -> int:
        return self.H_r.shape[0]

    @property
    def n_e(self) -> int:
        return self.H_e.shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """H = [H_r; H_e], the joint channel seen by both receivers."""
        return np.vstack([self.H_r, self.H_e])


@dataclass(frozen=True)
class AugmentedCovariance:
    """Covariance K and pseudo-covariance K~ of a complex signal.

    Build through `augmented.validate_augmented`, which enforces feasibility.
    """
    K: np.ndarray
    K_tilde: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "K", _freeze(np.asarray(self.K, dtype=complex)))
        object.__setattr__(self, "K_tilde", _freeze(np.asarray(self.K_tilde, dtype=complex)))

    @property
    def n(self) -> int:
        return self.K.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The 2n x 2n augmented matrix [[K, K~], [K~*, K*]]."""
        return np.block([[self.K, self.K_tilde], [self.K_tilde.conj(), self.K.conj()]])

    @property
    def is_proper(self) -> bool:
        return not np.any(self.K_tilde)

    @property
    def power(self) -> float:
        return float(np.trace(self.K).real)


@dataclass(frozen=True)
class RealCompositeChannel:
    """sqrt(2)-scaled channels acting on (Re x, Im x) with unit real noise."""
    H_r: np.ndarray
    H_e: np.ndarray


@dataclass(frozen=True)
class SampleBatch:
    samples: np.ndarray  # shape (count, n)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 2:
            raise DimensionError(f"samples must be a (count, n) array, got shape {samples.shape}")
        if samples.shape[0] < 1:
            raise CountError("a sample batch needs at least one draw")
        object.__setattr__(self, "samples", _freeze(samples))

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    @property
    def count(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class RateValue:
    """A secrecy rate. Computations happen in nats; bits only at output."""
    value: float
    unit: str = "nats"

    def __post_init__(self) -> None:
        if self.unit not in config.RATE_UNITS:
            raise ConfigError(f"unknown rate unit {self.unit!r}", field="unit")
        if not math.isfinite(self.value):
            raise ValueError(f"rate must be finite, got {self.value}")

    def to(self, unit: str) -> "RateValue":
        return RateValue(convert_rate(self.value, self.unit, unit), unit)

    def __float__(self) -> float:
        return float(self.value)


def convert_rate(value: float, from_unit: str, to_unit: str) -> float:
    if from_unit == to_unit:
        return float(value)
    if (from_unit, to_unit) == ("nats", "bits"):
        return float(value) / math.log(2.0)
    if (from_unit, to_unit) == ("bits", "nats"):
        return float(value) * math.log(2.0)
    raise ConfigError(f"cannot convert {from_unit!r} to {to_unit!r}", field="unit")


@dataclass(frozen=True)
class DegradednessReport:
    delta: np.ndarray
    min_eig: float
    max_eig: float
    is_degraded: bool


@dataclass(frozen=True)
class NoiseCorrelation:
    """Cross-covariance A = E{N_r N_e^H} and pseudo cross-covariance B = E{N_r N_e^T}."""
    A: np.ndarray
    B: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        A = as_matrix(self.A, "A")
        B = np.zeros_like(A) if self.B is None else as_matrix(self.B, "B")
        if A.shape != B.shape:
            raise DimensionError(f"A and B must have the same shape, got {A.shape} and {B.shape}")
        object.__setattr__(self, "A", _freeze(A))
        object.__setattr__(self, "B", _freeze(B))

    @property
    def is_proper(self) -> bool:
        return not np.any(self.B)

    @property
    def augmented(self) -> np.ndarray:
        """A_aug = [[A, B], [B*, A*]]."""
        return np.block([[self.A, self.B], [self.B.conj(), self.A.conj()]])

    @classmethod
    def from_augmented(cls, A_aug: np.ndarray) -> "NoiseCorrelation":
        n_r, n_e = A_aug.shape[0] // 2, A_aug.shape[1] // 2
        A = (A_aug[:n_r, :n_e] + A_aug[n_r:, n_e:].conj()) / 2
        B = (A_aug[:n_r, n_e:] + A_aug[n_r:, :n_e].conj()) / 2
        return cls(A, B)


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    holds: bool
    equality_gap: float      # log(rhs) - log(lhs)
    cross_block_norm: float


@dataclass(frozen=True)
class PowerBudget:
    P: float

    def __post_init__(self) -> None:
        if not (self.P > 0 and math.isfinite(self.P)):
            raise ConfigError(f"power budget must be positive and finite, got {self.P}", field="P")

    @property
    def augmented_power(self) -> float:
        return 2.0 * self.P

    @property
    def snr_db(self) -> float:
        return power_to_snr(self.P)

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "PowerBudget":
        return cls(snr_to_power(snr_db))


def snr_to_power(snr_db: float) -> float:
    """SNR = 10 lg(P / 2) with unit noise at two receive antennas."""
    return 2.0 * 10.0 ** (float(snr_db) / 10.0)


def power_to_snr(P: float) -> float:
    return 10.0 * math.log10(P / 2.0)


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = config.MAX_ITERS
    tol_increase: float = config.TOL_INCREASE
    step_init: float = config.STEP_INIT
    method: str = "projected-gradient"
    seed: int = 0
    random_start: bool = False     # random PSD start instead of white (P/n_t) I
    improper_start: bool = False   # general mode: start from a random improper covariance
    armijo_c: float = config.ARMIJO_C
    shrink: float = config.ARMIJO_SHRINK
    max_backtracks: int = config.MAX_BACKTRACKS

    def __post_init__(self) -> None:
        if not self.tol_increase > 0:
            raise ConfigError("tol_increase must be positive", field="tol_increase")
        if self.method not in config.SOLVER_METHODS:
            raise ConfigError(f"unknown solver method {self.method!r}", field="method")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1", field="max_iters")
        if not (0 < self.shrink < 1) or self.step_init <= 0:
            raise ConfigError("step_init must be positive and shrink in (0, 1)", field="step_init")


@dataclass
class ConvergenceTrace:
    """Objective per accepted iteration (index 0 is the starting point)."""
    iterates: List[Tuple[int, float]]
    terminal_rate: RateValue
    terminal_point: Union[np.ndarray, AugmentedCovariance]
    converged: bool
    method: str = "projected-gradient"
    mode: str = "proper"

    @property
    def objective_values(self) -> np.ndarray:
        return np.array([v for _, v in self.iterates])

    @property
    def iterations(self) -> int:
        return len(self.iterates) - 1


@dataclass
class SaddleResult:
    noise: NoiseCorrelation
    covariance: Union[np.ndarray, AugmentedCovariance]
    value: RateValue
    converged: bool
    outer_values: List[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return max(len(self.outer_values) - 1, 0)


@dataclass
class ExperimentConfig:
    snr_db: Sequence[float]
    channel_path: Optional[Path] = None
    channel: Optional[ChannelPair] = None
    mode: str = "both"
    methods: Sequence[str] = ("projected-gradient",)
    seeds: Sequence[int] = (0,)
    out_dir: Path = config.OUTPUT_DIR
    unit: str = "nats"
    tol_increase: float = config.TOL_INCREASE
    max_iters: int = config.MAX_ITERS
    random_start: bool = False
    improper_start: bool = False

    def __post_init__(self) -> None:
        if not self.snr_db:
            raise ConfigError("SNR list must not be empty", field="snr_db")
        if self.mode not in ("proper", "general", "both"):
            raise ConfigError(f"unknown signaling mode {self.mode!r}", field="mode")
        for m in self.methods:
            if m not in config.SOLVER_METHODS:
                raise ConfigError(f"unknown solver method {m!r}", field="methods")
        if self.unit not in config.RATE_UNITS:
            raise ConfigError(f"unknown rate unit {self.unit!r}", field="unit")
        if not self.seeds:
            raise ConfigError("seed list must not be empty", field="seeds")
        self.out_dir = Path(self.out_dir)

    @property
    def modes(self) -> Tuple[str, ...]:
        return config.SIGNALING_MODES if self.mode == "both" else (self.mode,)

    def powers(self) -> List[float]:
        return [snr_to_power(s) for s in self.snr_db]


@dataclass
class SummaryRow:
    mode: str
    solver: str
    snr_db: float
    rate: float
    unit: str
    iterations: int
    converged: bool
    seed: int = 0


@dataclass
class ReproductionReport:
    """Outcome of the reference-rate reproduction on the built-in channel."""
    rows: List[SummaryRow]
    table: Any                  # pandas.DataFrame, one row per (mode, solver)
    unit: Optional[str]         # resolved log base, None when neither matched
    eigenvalues: Tuple[float, float]
    checks: dict                # check name -> bool
    max_agreement_gap: float

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


@dataclass
class PropertyResult:
    suite: str
    name: str
    total: int = 0
    passed: int = 0
    worst_gap: float = 0.0

    @property
    def failed(self) -> int:
        return self.total - self.passed

    def record(self, ok: bool, gap: float) -> None:
        self.total += 1
        self.passed += int(ok)
        self.worst_gap = max(self.worst_gap, float(gap))


@dataclass
class PropertyReport:
    results: List[PropertyResult] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(r.failed for r in self.results)

    @property
    def passed(self) -> bool:
        return self.violations == 0
