from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from errors import ConfigError

# Dense complex matrix, shape (rows, cols), dtype complex128
Matrix = np.ndarray

# Strictly increasing 1-based indices drawn from {1, ..., n}
KTuple = Tuple[int, ...]


# Enums for verdicts and output selection
class StabilityVerdict(Enum):
    STABLE = 'stable'
    UNSTABLE = 'unstable'
    MARGINAL = 'marginal'


class OutputFormat(Enum):
    JSON = 'json'
    CSV = 'csv'


@dataclass(frozen=True, eq=False)
class CompoundMatrix:
    base_rows: int
    base_cols: int
    order: int
    matrix: Matrix  # C(base_rows, k) x C(base_cols, k)
    row_index: 'object'  # KIndexer over Q(k, base_rows)
    col_index: 'object'  # KIndexer over Q(k, base_cols)


@dataclass(frozen=True, eq=False)
class Pencil:
    """The pencil A - lambda B."""
    a: Matrix
    b: Matrix

    @property
    def dimension(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class GenEig:
    """Generalized eigenvalue alpha / beta in homogeneous form."""
    alpha: complex
    beta: complex
    infinite: bool = False  # beta numerically zero relative to the pencil scale

    @property
    def value(self) -> Optional[complex]:
        """Finite eigenvalue, or None for the eigenvalue at infinity"""
        if self.infinite:
            return None
        return self.alpha / self.beta

    @property
    def modulus(self) -> Optional[float]:
        value = self.value
        return None if value is None else abs(value)

    def display(self, precision: int = 12) -> str:
        if self.infinite:
            return 'inf'
        from utils import chop, format_scalar
        return format_scalar(chop([self.value])[0], precision)


@dataclass(frozen=True, eq=False)
class GsdResult:
    u: Matrix
    v: Matrix
    t: Matrix
    s: Matrix
    residuals: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class RegularityReport:
    regular: bool
    witness_lambda: Optional[complex]
    det_a: complex
    det_b: complex
    common_kernel_vector: Optional[np.ndarray] = None
    order: int = 1
    shifts_tried: int = 0


@dataclass(frozen=True, eq=False)
class DrazinResult:
    index: int
    inverse: Matrix
    rank_sequence: List[int]  # ranks of A^0, ..., A^(index + 1)
    range_basis: Optional[Matrix] = None  # orthonormal basis of range(A^index)

    @property
    def core_rank(self) -> int:
        return self.rank_sequence[self.index]


@dataclass(frozen=True, eq=False)
class DaeSystem:
    """The difference-algebraic equation B x(j+1) = A x(j)."""
    a: Matrix
    b: Matrix

    @property
    def dimension(self) -> int:
        return self.a.shape[0]

    def pencil(self) -> Pencil:
        return Pencil(self.a, self.b)


@dataclass(frozen=True, eq=False)
class DaeAnalysis:
    system: DaeSystem
    tractable: bool
    shift_lambda: Optional[complex] = None
    b_hat: Optional[Matrix] = None
    a_hat: Optional[Matrix] = None
    drazin_index: Optional[int] = None
    propagator: Optional[Matrix] = None  # (B_hat)^D A_hat
    consistency_basis: Optional[Matrix] = None  # orthonormal columns
    finite_eigs: List[GenEig] = field(default_factory=list)
    infinite_count: int = 0
    stable: bool = False
    verdict: Optional[StabilityVerdict] = None
    b_hat_nilpotent: bool = False
    rank_sequence: List[int] = field(default_factory=list)

    @property
    def consistency_dim(self) -> int:
        if self.consistency_basis is None:
            return 0
        return self.consistency_basis.shape[1]


@dataclass(frozen=True)
class ConsistencyCheck:
    consistent: bool
    distance: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: List[int]
    states: List[np.ndarray]
    residuals: List[float]  # |B x(j+1) - A x(j)| for j = 0..N-1

    def as_array(self) -> np.ndarray:
        return np.array(self.states)


@dataclass(frozen=True, eq=False)
class VolumeTrace:
    k: int
    compound_states: List[np.ndarray]  # y(j) = X(j)^(k)
    volumes: List[float]
    compound_residuals: List[float] = field(default_factory=list)
    trajectories: List[Trajectory] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class StableSubspaceReport:
    compound_stable: bool
    compound_regular: bool
    guaranteed_stable_dim: Optional[int]
    stable_basis: Matrix
    largest_product: Optional[float] = None  # max |product of k finite eigenvalues|


@dataclass(frozen=True, eq=False)
class StepResult:
    x_next: np.ndarray
    residual: float
    freedom_dim: int


@dataclass
class RunConfig:
    """Tolerances and output settings of a single command run"""
    rank_tol: Optional[float] = None
    residual_tol: float = Config.RESIDUAL_TOL
    consistency_tol: float = Config.CONSISTENCY_TOL
    stability_margin: float = Config.STABILITY_MARGIN
    shifts: Optional[Sequence[complex]] = None
    precision: int = Config.PRECISION
    output_format: OutputFormat = OutputFormat.JSON

    @classmethod
    def from_config(cls, **overrides) -> 'RunConfig':
        settings = {
            'rank_tol': Config.RANK_RTOL,
            'residual_tol': Config.RESIDUAL_TOL,
            'consistency_tol': Config.CONSISTENCY_TOL,
            'stability_margin': Config.STABILITY_MARGIN,
            'precision': Config.PRECISION,
            'output_format': OutputFormat(Config.OUTPUT_FORMAT),
        }
        settings.update({key: value for key, value in overrides.items() if value is not None})
        run_config = cls(**settings)
        run_config.validate()
        return run_config

    def validate(self):
        """Reject non-positive tolerances and out-of-range precision"""
        for name in ('rank_tol', 'residual_tol', 'consistency_tol', 'stability_margin'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError(f'{name} must be positive, got {value}')
        if not 1 <= self.precision <= 17:
            raise ConfigError(f'precision must be in 1..17, got {self.precision}')
        if not isinstance(self.output_format, OutputFormat):
            try:
                self.output_format = OutputFormat(self.output_format)
            except ValueError:
                raise ConfigError(f'unknown output format {self.output_format!r}') from None
