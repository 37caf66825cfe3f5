"""
Bracketed Newton engine shared by the E-case and U-case maximizer solvers.

The engine follows the safe Newton-Raphson scheme: a Newton correction is
accepted only if it lands strictly inside the current bracket, otherwise the
bracket is bisected. The bracket shrinks from the sign of a side function
that is negative below the root and positive above it. Only Newton corrections
end the iteration on the step tolerance; bisection runs until the next Newton
step converges or the bracket shrinks to a few ulps.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

from .models import SolveMethod, SolverError, SolverSettings


@dataclass
class IterationResult:
    """Raw outcome of one bracketed solve."""
    root: float
    iterands: List[float]
    bracket: Tuple[float, float]
    bisected: bool = False
    notes: List[str] = field(default_factory=list)

    def method(self, preferred: SolveMethod) -> SolveMethod:
        return SolveMethod.BISECTION_FALLBACK if self.bisected else preferred


class BracketedNewtonSolver:
    """Safeguarded Newton iteration with bisection fallback."""

    def __init__(self, settings: SolverSettings = None):
        """
        Initialize the solver.

        Args:
            settings: Tolerances and iteration cap
        """
        self.settings = settings or SolverSettings()

    def solve(self, side: Callable[[float], float], step: Callable[[float], float],
              bracket: Tuple[float, float], initial: float) -> IterationResult:
        """
        Run the iteration from an initial point.

        Args:
            side: Negative below the root, positive above it
            step: Newton correction dx at x (the next iterand is x + dx)
            bracket: Enclosure (low, high) of the root
            initial: First iterand; it may lie outside the bracket

        Returns:
            IterationResult with the full iterand trace
        """
        low, high = bracket
        if not low < high:
            raise SolverError(f"Empty bracket ({low}, {high})", last_bracket=bracket)

        x = float(initial)
        iterands = [x]
        bisected = False

        for _ in range(self.settings.max_iter):
            r = side(x)
            if r == 0.0:
                return IterationResult(x, iterands, (low, high), bisected)
            if low < x < high:
                if r < 0.0:
                    low = x
                else:
                    high = x

            dx = step(x)
            candidate = x + dx
            converged = math.isfinite(candidate) and abs(dx) <= self.settings.xtol * abs(x)
            if converged and (low <= x <= high or low <= candidate <= high):
                # a converged step may round onto a bracket end; keep x then
                if low <= candidate <= high and candidate != x:
                    x = candidate
                    iterands.append(x)
                return IterationResult(x, iterands, (low, high), bisected)
            if not math.isfinite(candidate) or not low < candidate < high:
                candidate = 0.5 * (low + high)
                bisected = True

            x = candidate
            iterands.append(x)

            if high - low <= 4.0 * math.ulp(max(abs(low), abs(high))):
                return IterationResult(x, iterands, (low, high), bisected,
                                       notes=["bracket collapsed to machine precision"])

        raise SolverError(
            f"No convergence after {self.settings.max_iter} iterations; "
            f"last bracket ({low!r}, {high!r})",
            last_bracket=(low, high), iterands=iterands,
        )
