"""
Extremum of the alternating family G_{n,delta}: the maximizer u_n(delta),
its certified bounds, derivative and series expansion, the maximum value
MG_{n,delta}, the H(U) upper bound and the closed-form minimum over delta.

The maximizer is the positive zero of
K(u) = alt_tail(n-1, u) - delta u^n/(n! (u+delta)). The solver works with
K scaled by n!(u+delta)/u^n, which stays O(1) for every root size.
Close to delta = n the root grows like delta/(delta-n) and the scaled
residual is expanded in powers of 1/u with the leading cancellation
(n - delta) taken exactly.
"""

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

from .core import alt_tail_ratio, alt_tail_ratio_excess, eval_G
from .inversion import check_series_order, series_invert
from .models import (
    DomainError,
    EvalOptions,
    ExtremumSummary,
    Family,
    MaxValue,
    MGBounds,
    ResidualValue,
    RootReport,
    SeriesCoeffs,
    SolveMethod,
    SolverError,
    SolverSettings,
    SUPPORTED_MAX_N,
    UBoundPair,
    UCaseParams,
    ULowerFormula,
    UUpperFormula,
)
from .solver import BracketedNewtonSolver


# Relative agreement demanded between the two maximum-value forms
FORM_AGREEMENT = 1e-10

# Rescaled residuals this close to zero are rounding noise
SIDE_NOISE = 8.0 * math.ulp(1.0)

# The n = 1 fixed-point map is used once its contraction factor drops below this
FIXED_POINT_CONTRACTION = 1e-2

_DEFAULT_SETTINGS = SolverSettings()


def _check_positive(u: float) -> None:
    if not u > 0 or math.isinf(u):
        raise DomainError(f"u must be a positive finite number, got {u}")


def _large_root(p: UCaseParams, settings: Optional[SolverSettings]) -> bool:
    return p.excess < (settings or _DEFAULT_SETTINGS).large_u_crossover


def _scaled_gap(p: UCaseParams, u: float, options: Optional[EvalOptions]) -> float:
    """n! K(u)/u^n = g(u) - delta/(u+delta), with g(u) = n! alt_tail(n-1, u)/u^n."""
    if u < 1.0:
        # both terms are 1 + O(u); subtract the 1 exactly
        return alt_tail_ratio_excess(p.n - 1, u, options) + u / (u + p.delta)
    return alt_tail_ratio(p.n - 1, u, options) - p.delta / (u + p.delta)


def _newton_slope(p: UCaseParams, u: float, options: Optional[EvalOptions]) -> float:
    """n! K'(u)/u^n, so that the Newton correction is -gap/slope."""
    n, delta = p.n, p.delta
    head = (delta * p.y + u * (n - 2.0 * delta) - u * u) / (u + delta) ** 2
    return head - alt_tail_ratio_excess(n - 1, u, options)


def _expanded_residual(p: UCaseParams, u: float) -> ResidualValue:
    """
    Scaled residual (u+delta) n! K(u)/u^n as a polynomial in 1/u plus an
    exponentially small term.

    The constant term is n - delta and the coefficient of u^{-m} is
    (-1)^m n!/(n-m)! (n - m - delta).
    """
    n, delta = p.n, p.delta
    inv_u = 1.0 / u
    terms = [-p.excess]
    slopes = []
    falling = 1.0  # n!/(n-m)!
    power = 1.0
    for m in range(1, n + 1):
        falling *= n - m + 1
        power *= inv_u
        coeff = (-1) ** m * falling * (n - m - delta)
        terms.append(coeff * power)
        slopes.append(-m * coeff * power * inv_u)
    sign = -1.0 if n % 2 else 1.0
    tail = sign * math.exp(-u + math.lgamma(n + 1) + math.log(u + delta) - n * math.log(u))
    terms.append(tail)
    slopes.append(tail * (-1.0 + 1.0 / (u + delta) - n * inv_u))
    return ResidualValue(math.fsum(terms), math.fsum(slopes))


def rescaled_residual(p: UCaseParams, u: float, options: Optional[EvalOptions] = None,
                      settings: Optional[SolverSettings] = None) -> float:
    """
    (u+delta) n! K(u)/u^n, the residual the solver drives to zero.

    Positive below the maximizer and negative beyond it.
    """
    _check_positive(u)
    if _large_root(p, settings):
        return _expanded_residual(p, u).value
    return (u + p.delta) * _scaled_gap(p, u, options)


def K(p: UCaseParams, u: float, options: Optional[EvalOptions] = None,
      settings: Optional[SolverSettings] = None) -> float:
    """
    Evaluate K_{n,delta}(u) = alt_tail(n-1, u) - delta u^n/(n!(u+delta)).

    Near the origin K behaves like (1/delta - 1/(n+1)) u^{n+1}/n!; for large u
    its sign is that of -(delta-n).

    Args:
        p: Family member
        u: Positive argument
        options: Evaluation policy
        settings: Decides when the expanded residual is used

    Returns:
        K(u), positive below u_n(delta)
    """
    _check_positive(u)
    scale = math.exp(p.n * math.log(u) - math.lgamma(p.n + 1) - math.log(u + p.delta))
    return scale * rescaled_residual(p, u, options, settings)


def u_side(p: UCaseParams, u: float, options: Optional[EvalOptions] = None,
           settings: Optional[SolverSettings] = None) -> int:
    """
    Locate u relative to the maximizer without solving.

    A residual within a few ulps of zero is reported as the root.

    Returns:
        -1 if u < u_n(delta), 0 at the root, +1 beyond it
    """
    r = rescaled_residual(p, u, options, settings)
    if abs(r) <= SIDE_NOISE * max(1.0, p.delta):
        return 0
    return (r < 0) - (r > 0)


def u_bounds(p: UCaseParams) -> UBoundPair:
    """
    Certified enclosure of u_n(delta).

    The upper candidate with min{1, y + y^2/2} is proven only for n >= 2 and
    the cubic one only for n = 1; each enters the enclosure only on its range.

    Args:
        p: Family member

    Returns:
        UBoundPair with the winning upper formula recorded
    """
    n, delta = p.n, p.delta
    y, excess = p.y, p.excess
    base = y * delta / excess

    uppers = {
        UUpperFormula.PROP17_RATIO: delta / excess,
        UUpperFormula.LEMMA7_LOG: base - math.log(excess),
    }
    if n >= 2:
        uppers[UUpperFormula.PROP18_MIN] = base + min(1.0, y + 0.5 * y * y)
    else:
        uppers[UUpperFormula.PROP19_CUBIC] = base + y + 0.5 * y * y + y ** 3 / 3.0

    upper_formula = min(uppers, key=uppers.get)
    lower = base + y
    candidates = {ULowerFormula.PROP17_SUM.value: lower}
    candidates.update({k.value: v for k, v in uppers.items()})
    return UBoundPair(
        lower=lower,
        upper=uppers[upper_formula],
        lower_formula=ULowerFormula.PROP17_SUM,
        upper_formula=upper_formula,
        candidates=candidates,
    )


def certify_u_bounds(p: UCaseParams, bounds: UBoundPair,
                     options: Optional[EvalOptions] = None) -> bool:
    """
    True when the root lies in (bounds.lower, bounds.upper].

    For n = 1 close to delta = 1 the ratio bound delta/(delta-1) agrees with
    the root to double precision, so a residual at the upper end that is
    rounding noise still certifies it.
    """
    return u_side(p, bounds.lower, options) < 0 <= u_side(p, bounds.upper, options)


def u1_fixed_point(delta: float, u: float) -> float:
    """
    One application of u -> B(1 - u/(e^u - 1)) with B = delta/(delta-1).

    For n = 1 the maximizer is the fixed point of this map, and the map is
    strongly contracting once u is large.
    """
    if not 1.0 < delta < 2.0:
        raise DomainError(f"delta must lie in (1, 2) for n=1, got {delta}")
    _check_positive(u)
    B = delta / (delta - 1.0)
    return B * (1.0 - u * math.exp(-u) / -math.expm1(-u))


def solve_u(p: UCaseParams, tol: Optional[float] = None,
            settings: Optional[SolverSettings] = None,
            options: Optional[EvalOptions] = None,
            initial: Optional[float] = None) -> RootReport:
    """
    Solve for the maximizer u_n(delta) by bracketed Newton iteration.

    The iteration starts at the lower bound of u_bounds unless y is small,
    where the reversion series supplies the start. For n = 1 with a root far
    out, one step of the contracting map u1_fixed_point finishes the solve.

    Args:
        p: Family member
        tol: Bound on the rescaled residual; overrides settings.tol
        settings: Solver policy
        options: Evaluation policy
        initial: Explicit first iterand

    Returns:
        RootReport whose bracket is the certified enclosure from u_bounds

    Raises:
        SolverError: if the iteration cap is hit or the residual stays above tol
    """
    settings = settings or SolverSettings()
    tol = settings.tol if tol is None else tol
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    bounds = u_bounds(p)
    low, high = bounds.lower, bounds.upper
    method = SolveMethod.NEWTON

    if initial is not None:
        start = float(initial)
    elif p.y < settings.series_crossover:
        start = min(max(u_series(p.n, p.y, settings.series_order), low), high)
        method = SolveMethod.SERIES
    else:
        start = low

    large = _large_root(p, settings)
    if large:
        def side(u: float) -> float:
            return -_expanded_residual(p, u).value

        def step(u: float) -> float:
            value, slope = _expanded_residual(p, u)
            return -value / slope
    else:
        def side(u: float) -> float:
            return -_scaled_gap(p, u, options)

        def step(u: float) -> float:
            return -_scaled_gap(p, u, options) / _newton_slope(p, u, options)

    result = BracketedNewtonSolver(settings).solve(side, step, (low, high), start)
    root = result.root
    iterands = list(result.iterands)
    if p.n == 1 and p.delta / p.excess * root * math.exp(-root) < FIXED_POINT_CONTRACTION:
        polished = u1_fixed_point(p.delta, root)
        if low < polished <= high and polished != root:
            root = polished
            iterands.append(polished)

    residual = rescaled_residual(p, root, options, settings)
    if not abs(residual) <= tol:
        raise SolverError(
            f"Residual {residual:.3e} above tolerance {tol:.1e} for n={p.n}, delta={p.delta}",
            last_bracket=result.bracket, iterands=iterands,
        )

    warnings = list(result.notes)
    if p.best_effort:
        warnings.append(f"n={p.n} exceeds the certified range n <= {SUPPORTED_MAX_N}; "
                        f"result is best-effort")
    return RootReport(
        root=root,
        iterands=iterands,
        residual=residual,
        bracket=(low, high),
        method=result.method(method),
        warnings=warnings,
    )


def u_prime(p: UCaseParams, u_root: float) -> float:
    """
    Derivative du_n/d delta = -u/((delta-n) u - (n+1-delta) delta).

    Raises:
        SolverError: if the denominator is not positive
    """
    denominator = p.excess * u_root - p.y * p.delta
    if not denominator > 0:
        raise SolverError(
            f"u={u_root} gives a nonpositive slope denominator; the root is not converged"
        )
    return -u_root / denominator


@lru_cache(maxsize=None)
def _u_series_terms(n: int, M: int) -> Tuple[Fraction, ...]:
    d = [(-1) ** k * Fraction(math.factorial(n + 1), math.factorial(n + k + 1))
         for k in range(M + 1)]
    e = [(-1) ** k * (k + 1) * Fraction(math.factorial(n + 2), math.factorial(n + k + 2))
         for k in range(M + 1)]
    return tuple(series_invert(d, e, M, n + 2).coeffs)


def u_series_coeffs(n: int, M: int) -> SeriesCoeffs:
    """Exact reversion coefficients h_1..h_M of u_n in the argument (n+2)y."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    check_series_order(M)
    return SeriesCoeffs(order=M, coeffs=list(_u_series_terms(n, M)),
                        argument_scale=Fraction(n + 2))


def u_series(n: int, y: float, M: int = 8) -> float:
    """Truncated series for u_n at delta = n+1-y."""
    if not 0 < y < 1:
        raise DomainError(f"y must lie in (0, 1), got {y}")
    return u_series_coeffs(n, M).evaluate(y)


def eval_H(p: UCaseParams, u: float) -> float:
    """H(u) = u^{n+1-delta}/(n!(u+delta)); increasing up to y delta/(delta-n), then decreasing."""
    _check_positive(u)
    return math.exp(p.y * math.log(u) - math.lgamma(p.n + 1) - math.log(u + p.delta))


def max_G(p: UCaseParams, settings: Optional[SolverSettings] = None,
          options: Optional[EvalOptions] = None,
          report: Optional[RootReport] = None) -> MaxValue:
    """
    Maximum value MG_{n,delta}, evaluated as G and as H at the root.

    Args:
        p: Family member
        settings: Solver policy
        options: Evaluation policy
        report: Previously solved root to reuse

    Returns:
        MaxValue holding the mean of both forms
    """
    report = report or solve_u(p, settings=settings, options=options)
    u = report.root
    forms = (eval_G(p, u, options), eval_H(p, u))
    result = MaxValue(value=0.5 * (forms[0] + forms[1]), root=report, forms=forms)
    if result.relative_disagreement > FORM_AGREEMENT:
        raise SolverError(
            f"Maximum-value forms disagree by {result.relative_disagreement:.2e} "
            f"at u={u} for n={p.n}, delta={p.delta}",
            last_bracket=report.bracket, iterands=report.iterands,
        )
    return result


def bound_MG(p: UCaseParams, options: Optional[EvalOptions] = None) -> MGBounds:
    """Sandwich G(U) < MG < H(U) from the certified lower bound U."""
    U = u_bounds(p).lower
    return MGBounds(lower=eval_G(p, U, options), upper=eval_H(p, U))


def min_MG(n: int) -> ExtremumSummary:
    """
    Closed-form minimum over delta of MG_{n,delta}.

    The minimum G_hat is the alternating tail at u = 1 and the minimizer is
    1/(n! G_hat) - 1.

    Args:
        n: Truncation order (n >= 1)

    Returns:
        ExtremumSummary with its rational enclosures
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    ratio = alt_tail_ratio(n, 1.0)  # (n+1)! G_hat
    value_star = math.exp(math.log(ratio) - math.lgamma(n + 2))
    delta_star = (n + 1) / ratio - 1.0
    inv_fact = math.exp(-math.lgamma(n + 2))
    return ExtremumSummary(
        n=n,
        family=Family.U,
        delta_star=delta_star,
        value_star=value_star,
        delta_bounds=(n + 1 - 1.0 / (n + 2), float(n + 1)),
        value_bounds=((n + 1) / (n + 2) * inv_fact, (n + 2) / (n + 3) * inv_fact),
    )
