"""
Core data models for the truncated-exponential extrema toolkit.

This module contains the dataclasses, enums and exceptions shared by the
evaluation, solver, series and command-line layers.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union
import math


# Largest truncation order covered by the double-precision oracle suite
SUPPORTED_MAX_N = 30

# Bürmann-Lagrange order cap
MAX_SERIES_ORDER = 12

# Largest grid accepted by the table command
MAX_GRID_POINTS = 100000


class DomainError(ValueError):
    """Raised when a parameter or argument lies outside its valid domain."""


class SeriesOrderError(DomainError):
    """Raised when a series order lies outside 1..MAX_SERIES_ORDER."""


class SolverError(RuntimeError):
    """Raised when a root solve fails to converge or leaves its bracket."""

    def __init__(self, message: str, last_bracket: Tuple[float, float] = None,
                 iterands: Sequence[float] = ()):
        super().__init__(message)
        self.last_bracket = last_bracket
        self.iterands = list(iterands)


class Family(str, Enum):
    """The two objective families."""
    E = "E"
    U = "U"


class SolveMethod(str, Enum):
    """How a RootReport was produced."""
    NEWTON = "newton"
    BISECTION_FALLBACK = "bisection_fallback"
    SERIES = "series"


class SLowerFormula(str, Enum):
    PROP6_LOG = "prop6_log"
    LEMMA1_SQRT = "lemma1_sqrt"
    LINEAR_FLOOR = "linear_floor"


class SUpperFormula(str, Enum):
    PROP6_LINEAR = "prop6_linear"
    LEMMA2_A = "lemma2_A"
    PROP8_PHI = "prop8_phi"


class ULowerFormula(str, Enum):
    PROP17_SUM = "prop17_sum"


class UUpperFormula(str, Enum):
    PROP17_RATIO = "prop17_ratio"
    PROP18_MIN = "prop18_min"
    PROP19_CUBIC = "prop19_cubic"
    LEMMA7_LOG = "lemma7_log"


def _check_order(n) -> None:
    if isinstance(n, bool) or not isinstance(n, int):
        raise DomainError(f"n must be an integer, got {n!r}")


@dataclass(frozen=True)
class ECaseParams:
    """A member E_{n,delta} of the truncated-exponential family."""
    n: int
    delta: float

    def __post_init__(self):
        """Validate the (n, delta) pair."""
        _check_order(self.n)
        if self.n < 0:
            raise DomainError(f"n must be nonnegative for the E family, got {self.n}")
        if not math.isfinite(self.delta) or not 0.0 < self.delta < self.n + 1:
            raise DomainError(
                f"delta must lie in (0, {self.n + 1}) for n={self.n}, got {self.delta}"
            )

    @property
    def y(self) -> float:
        """Distance n+1-delta to the upper end of the delta interval."""
        return (self.n + 1) - self.delta

    @property
    def best_effort(self) -> bool:
        return self.n > SUPPORTED_MAX_N


@dataclass(frozen=True)
class UCaseParams:
    """A member G_{n,delta} of the alternating family."""
    n: int
    delta: float

    def __post_init__(self):
        """Validate the (n, delta) pair."""
        _check_order(self.n)
        if self.n < 1:
            raise DomainError(f"n must be at least 1 for the U family, got {self.n}")
        if not math.isfinite(self.delta) or not self.n < self.delta < self.n + 1:
            raise DomainError(
                f"delta must lie in ({self.n}, {self.n + 1}) for n={self.n}, got {self.delta}"
            )

    @property
    def y(self) -> float:
        return (self.n + 1) - self.delta

    @property
    def excess(self) -> float:
        """Distance delta-n to the lower end of the delta interval."""
        return self.delta - self.n

    @property
    def best_effort(self) -> bool:
        return self.n > SUPPORTED_MAX_N


@dataclass
class EvalOptions:
    """Numerical evaluation policy for the truncated tails."""
    tail_switch_e: float = 5.0  # tail series while s < n + tail_switch_e
    tail_switch_u: float = 1.0  # alternating series while u < n + tail_switch_u
    max_terms: int = 500
    abs_floor: float = 1e-300

    def __post_init__(self):
        """Validate evaluation options."""
        if self.tail_switch_e <= 0:
            raise ValueError("tail_switch_e must be positive")
        if self.tail_switch_u <= 0:
            raise ValueError("tail_switch_u must be positive")
        if self.max_terms < 30:
            raise ValueError("max_terms must be at least 30")
        if not 0.0 < self.abs_floor < 1e-100:
            raise ValueError("abs_floor must be a tiny positive magnitude")


@dataclass
class SolverSettings:
    """Configuration for the bracketed Newton solvers."""
    tol: float = 1e-12
    max_iter: int = 60
    xtol: float = 1e-12  # relative step size that counts as converged
    series_crossover: float = 0.05  # y below which the series initializer is used
    series_order: int = 8
    large_u_crossover: float = 1e-3  # delta-n below which the rescaled residual is used
    lemma2_a: float = 2.0

    def __post_init__(self):
        """Validate solver settings."""
        if not self.tol > 0:
            raise ValueError("Solver tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.xtol > 0:
            raise ValueError("xtol must be positive")
        if self.series_crossover < 0:
            raise ValueError("series_crossover cannot be negative")
        if not 1 <= self.series_order <= MAX_SERIES_ORDER:
            raise ValueError(f"series_order must be between 1 and {MAX_SERIES_ORDER}")
        if self.large_u_crossover < 0:
            raise ValueError("large_u_crossover cannot be negative")
        if not self.lemma2_a > 1:
            raise ValueError("lemma2_a must exceed 1")


@dataclass
class RootReport:
    """Solver output for one maximizer."""
    root: float
    iterands: List[float]
    residual: float
    bracket: Tuple[float, float]
    method: SolveMethod
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        """Check the root against its certified bracket."""
        low, high = self.bracket
        if not low < high:
            raise ValueError(f"Degenerate bracket ({low}, {high})")
        if not low <= self.root <= high:
            raise SolverError(
                f"Root {self.root!r} lies outside its certified bracket ({low!r}, {high!r})",
                last_bracket=self.bracket, iterands=self.iterands,
            )

    @property
    def iterations(self) -> int:
        return max(len(self.iterands) - 1, 0)


@dataclass
class BoundPair:
    """Certified enclosure of the E-case maximizer s_n(delta)."""
    lower: float
    upper: float
    lower_formula: SLowerFormula
    upper_formula: SUpperFormula
    candidates: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"Lower bound {self.lower} must be below upper bound {self.upper}")


@dataclass
class UBoundPair:
    """Certified enclosure of the U-case maximizer u_n(delta)."""
    lower: float
    upper: float
    lower_formula: ULowerFormula
    upper_formula: UUpperFormula
    candidates: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"Lower bound {self.lower} must be below upper bound {self.upper}")


@dataclass
class MaxValue:
    """Maximum value of a family member together with its maximizer."""
    value: float
    root: RootReport
    forms: Tuple[float, float]  # (objective at root, closed form at root)

    @property
    def relative_disagreement(self) -> float:
        a, b = self.forms
        return abs(a - b) / max(abs(a), abs(b))


class ResidualValue(NamedTuple):
    """A solver residual together with its derivative."""
    value: float
    derivative: float


class MEBounds(NamedTuple):
    lower: float
    upper_F2: float
    upper_F1: float


class MGBounds(NamedTuple):
    lower: float
    upper: float


@dataclass
class ExtremumSummary:
    """Closed-form minimum over delta of a max-value curve."""
    n: int
    family: Family
    delta_star: float
    value_star: float
    delta_bounds: Tuple[float, float]
    value_bounds: Tuple[float, float]

    def __post_init__(self):
        """Validate the enclosures."""
        low, high = self.delta_bounds
        if not low < self.delta_star < high:
            raise ValueError(f"delta_star {self.delta_star} escapes its enclosure ({low}, {high})")
        low, high = self.value_bounds
        if not low < self.value_star < high:
            raise ValueError(f"value_star {self.value_star} escapes its enclosure ({low}, {high})")


@dataclass
class PhiValue:
    """Value of Phi(z) with the evaluation regime that produced it."""
    value: float
    method: str  # "series", "exp1" or "asymptotic"
    remainder_bound: float = 0.0
    warnings: List[str] = field(default_factory=list)

    @property
    def asymptotic(self) -> bool:
        return self.method == "asymptotic"


@dataclass
class SeriesCoeffs:
    """Exact coefficients of a truncated reversion series in scale*y."""
    order: int
    coeffs: List[Fraction]
    argument_scale: Fraction

    def __post_init__(self):
        """Validate coefficient list."""
        if len(self.coeffs) != self.order:
            raise ValueError("Coefficient count must match the series order")
        if self.order >= 1 and self.coeffs[0] != 1:
            raise ValueError("Leading reversion coefficient must be exactly 1")

    def in_powers_of_y(self) -> List[Fraction]:
        """Coefficients of y^m, i.e. coeffs[m-1] * argument_scale^m."""
        return [c * self.argument_scale ** (m + 1) for m, c in enumerate(self.coeffs)]

    def evaluate(self, y: float) -> float:
        """Evaluate the partial sum at y with Horner's rule."""
        w = float(self.argument_scale) * y
        total = 0.0
        for c in reversed(self.coeffs):
            total = (total + float(c)) * w
        return total


# Columns understood by the table command
TABLE_COLUMNS = ("root", "lower", "upper", "max_value", "max_lower",
                 "max_upper", "max_upper_F2", "max_upper_F1", "derivative")
E_ONLY_COLUMNS = ("max_upper_F2", "max_upper_F1")


@dataclass
class TableRequest:
    """A grid sweep over delta for one family member order."""
    family: Family
    n: int
    delta_grid: List[float]
    columns: List[str] = field(default_factory=lambda: ["root", "lower", "upper", "max_value"])

    def __post_init__(self):
        """Validate the grid against the family interval."""
        self.family = Family(self.family)
        _check_order(self.n)
        if not self.delta_grid:
            raise DomainError("Grid must contain at least one delta value")
        if len(self.delta_grid) > MAX_GRID_POINTS:
            raise DomainError(f"Grid may hold at most {MAX_GRID_POINTS} points")
        low, high = self.interval
        for delta in self.delta_grid:
            if not low < delta < high:
                raise DomainError(
                    f"Grid point {delta} lies outside the valid interval ({low}, {high}) "
                    f"for family {self.family.value}, n={self.n}"
                )
        unknown = [c for c in self.columns if c not in TABLE_COLUMNS]
        if unknown:
            raise DomainError(f"Unknown columns: {', '.join(unknown)}")
        if self.family is Family.U:
            bad = [c for c in self.columns if c in E_ONLY_COLUMNS]
            if bad:
                raise DomainError(f"Columns {', '.join(bad)} are only defined for family E")

    @property
    def interval(self) -> Tuple[int, int]:
        if self.family is Family.E:
            if self.n < 0:
                raise DomainError(f"n must be nonnegative for the E family, got {self.n}")
            return 0, self.n + 1
        if self.n < 1:
            raise DomainError(f"n must be at least 1 for the U family, got {self.n}")
        return self.n, self.n + 1

    @classmethod
    def from_range(cls, family: Union[Family, str], n: int, start: float, stop: float,
                   count: int, spacing: str = "lin",
                   columns: Optional[List[str]] = None) -> "TableRequest":
        """
        Build a request from (start, stop, count) with linear or log spacing.

        Args:
            family: Family E or U
            n: Truncation order
            start: First delta
            stop: Last delta
            count: Number of grid points
            spacing: "lin" or "log"
            columns: Output columns (defaults to root, lower, upper, max_value)

        Returns:
            Validated TableRequest
        """
        import numpy as np

        if count < 1:
            raise DomainError("Grid count must be positive")
        if count > MAX_GRID_POINTS:
            raise DomainError(f"Grid may hold at most {MAX_GRID_POINTS} points")
        if spacing == "lin":
            grid = np.linspace(start, stop, count)
        elif spacing == "log":
            if start <= 0 or stop <= 0:
                raise DomainError("Log spacing needs positive start and stop")
            grid = np.geomspace(start, stop, count)
        else:
            raise DomainError(f"Unknown grid spacing '{spacing}' (use lin or log)")
        kwargs = {} if columns is None else {"columns": list(columns)}
        return cls(family=Family(family), n=n, delta_grid=[float(d) for d in grid], **kwargs)


@dataclass
class VerifyOutcome:
    """One reference-value check."""
    case_id: str
    expected: Union[float, Fraction]
    actual: Union[float, Fraction]
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        if isinstance(self.expected, Fraction) and isinstance(self.actual, Fraction):
            self.passed = abs(self.expected - self.actual) <= self.tolerance
        else:
            diff = abs(float(self.expected) - float(self.actual))
            self.passed = math.isfinite(diff) and diff <= self.tolerance
