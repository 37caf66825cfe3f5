"""
Extremum of the E family: the maximizer s_n(delta), its certified bounds,
its derivative and series expansion, the maximum value ME_{n,delta}, the
F1/F2 sandwich for that maximum and its closed-form minimum over delta.

The maximizer is the positive root of e^s = P(s), where
P(s) = 1 + s + ... + s^n/n! + s^{n+1}/(delta n!). Writing
e^s - P(s) = (s^{n+1}/n!) (f(s) - 1/delta) with
f(s) = Sum_k n! s^k/(n+k+1)! takes every factorial scale out of the
Newton step.
"""

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

from .core import eval_E, exp_tail_ratio, exp_tail_ratio_excess, phi
from .inversion import check_series_order, series_invert
from .models import (
    BoundPair,
    DomainError,
    ECaseParams,
    EvalOptions,
    ExtremumSummary,
    Family,
    MaxValue,
    MEBounds,
    ResidualValue,
    RootReport,
    SeriesCoeffs,
    SLowerFormula,
    SolveMethod,
    SolverError,
    SolverSettings,
    SUpperFormula,
    SUPPORTED_MAX_N,
)
from .solver import BracketedNewtonSolver


# Relative agreement demanded between the two maximum-value forms
FORM_AGREEMENT = 1e-10


def _scaled_tail(p: ECaseParams, s: float, options: Optional[EvalOptions]) -> float:
    """f(s) = Sum_k n! s^k/(n+k+1)!, equal to 1/(n+1) at the origin."""
    return exp_tail_ratio(p.n, s, options) / (p.n + 1)


def _tail_gap(p: ECaseParams, s: float, options: Optional[EvalOptions]) -> float:
    """f(s) - 1/delta with the common leading term 1/(n+1) cancelled exactly."""
    return (exp_tail_ratio_excess(p.n, s, options) - p.y / p.delta) / (p.n + 1)


def _check_positive(s: float) -> None:
    if not s > 0 or math.isinf(s):
        raise DomainError(f"s must be a positive finite number, got {s}")


def psi(p: ECaseParams, s: float, options: Optional[EvalOptions] = None) -> ResidualValue:
    """
    Solver residual psi(s) = s - ln P(s) and its derivative.

    psi is negative below the maximizer, zero at it and positive beyond.
    Both values are computed from w = 1 - P(s) e^{-s}, which is formed in
    log space so that neither e^s nor s^{n+1} is ever materialised.

    Args:
        p: Family member
        s: Positive argument
        options: Evaluation policy

    Returns:
        ResidualValue(psi(s), psi'(s))
    """
    _check_positive(s)
    n, delta = p.n, p.delta
    log_s = math.log(s)
    log_weight = -s + n * log_s - math.lgamma(n + 1)  # ln(s^n e^{-s}/n!)
    gap = _tail_gap(p, s, options)
    w = math.exp(log_weight + log_s) * gap
    value = -math.log1p(-w)
    derivative = (s - p.y) / delta * math.exp(log_weight) / (1.0 - w)
    return ResidualValue(value, derivative)


def s_side(p: ECaseParams, s: float, options: Optional[EvalOptions] = None) -> int:
    """
    Locate s relative to the maximizer without solving.

    Returns:
        -1 if s < s_n(delta), 0 at the root, +1 beyond it
    """
    _check_positive(s)
    gap = _tail_gap(p, s, options)
    return (gap > 0) - (gap < 0)


def s_bounds(p: ECaseParams, lemma2_a: float = 2.0) -> BoundPair:
    """
    Certified enclosure of s_n(delta).

    The lower bound is the largest of three closed forms and the upper bound
    the smallest of three. The upper candidate built on Phi needs
    z = ln((n+1)/delta) to be numerically positive.

    Args:
        p: Family member
        lemma2_a: Free constant A > 1 of the logarithmic upper bound

    Returns:
        BoundPair with the winning formula recorded on each side
    """
    if not lemma2_a > 1:
        raise DomainError(f"lemma2_a must exceed 1, got {lemma2_a}")
    n, delta = p.n, p.delta
    y = p.y
    z = math.log1p(y / delta)

    lowers = {
        SLowerFormula.PROP6_LOG: z + y,
        SLowerFormula.LEMMA1_SQRT: y + y / (math.sqrt(y + 0.25 * delta * delta) + 0.5 * delta),
        SLowerFormula.LINEAR_FLOOR: y,
    }
    uppers = {
        SUpperFormula.PROP6_LINEAR: y + y / delta,
        SUpperFormula.LEMMA2_A: lemma2_a * z + lemma2_a / (lemma2_a - 1.0) * y,
    }
    if z > 0:
        uppers[SUpperFormula.PROP8_PHI] = z + y * math.log(z) - (n + 1) * phi(z)

    lower_formula = max(lowers, key=lowers.get)
    upper_formula = min(uppers, key=uppers.get)
    candidates = {k.value: v for k, v in lowers.items()}
    candidates.update({k.value: v for k, v in uppers.items()})
    return BoundPair(
        lower=lowers[lower_formula],
        upper=uppers[upper_formula],
        lower_formula=lower_formula,
        upper_formula=upper_formula,
        candidates=candidates,
    )


def certify_s_bounds(p: ECaseParams, bounds: BoundPair,
                     options: Optional[EvalOptions] = None) -> bool:
    """True when the root is strictly between bounds.lower and bounds.upper."""
    return s_side(p, bounds.lower, options) < 0 < s_side(p, bounds.upper, options)


def _newton_initial(p: ECaseParams, bounds: BoundPair) -> float:
    """
    Start from z + y ln z + 0.8(n+1) when it is real and inside the bracket,
    otherwise from the upper bound.
    """
    z = math.log1p(p.y / p.delta)
    if z > 0:
        start = z + p.y * math.log(z) + 0.8 * (p.n + 1)
        if bounds.lower < start < bounds.upper:
            return start
    return bounds.upper


def solve_s(p: ECaseParams, tol: Optional[float] = None,
            settings: Optional[SolverSettings] = None,
            options: Optional[EvalOptions] = None,
            initial: Optional[float] = None) -> RootReport:
    """
    Solve for the maximizer s_n(delta) by bracketed Newton iteration.

    Args:
        p: Family member
        tol: Bound on |psi(root)|; overrides settings.tol
        settings: Solver policy
        options: Evaluation policy
        initial: Explicit first iterand (used as given, not clamped)

    Returns:
        RootReport whose bracket is the certified enclosure from s_bounds

    Raises:
        SolverError: if the iteration cap is hit or the residual stays above tol
    """
    settings = settings or SolverSettings()
    tol = settings.tol if tol is None else tol
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    bounds = s_bounds(p, settings.lemma2_a)
    low, high = bounds.lower, bounds.upper
    method = SolveMethod.NEWTON

    if initial is not None:
        start = float(initial)
    elif p.y < settings.series_crossover:
        start = min(max(s_series(p.n, p.y, settings.series_order), low), high)
        method = SolveMethod.SERIES
    else:
        start = _newton_initial(p, bounds)

    def side(s: float) -> float:
        return _tail_gap(p, s, options)

    def step(s: float) -> float:
        # 1 + s f - (n+1)/delta written without the cancelling constant
        slope = s * _scaled_tail(p, s, options) - p.y / p.delta
        return -s * _tail_gap(p, s, options) / slope

    result = BracketedNewtonSolver(settings).solve(side, step, (low, high), start)
    residual = psi(p, result.root, options).value
    if not abs(residual) <= tol:
        raise SolverError(
            f"Residual {residual:.3e} above tolerance {tol:.1e} for n={p.n}, delta={p.delta}",
            last_bracket=result.bracket, iterands=result.iterands,
        )

    warnings = list(result.notes)
    if p.best_effort:
        warnings.append(f"n={p.n} exceeds the certified range n <= {SUPPORTED_MAX_N}; "
                        f"result is best-effort")
    return RootReport(
        root=result.root,
        iterands=result.iterands,
        residual=residual,
        bracket=(low, high),
        method=result.method(method),
        warnings=warnings,
    )


def s_prime(p: ECaseParams, s_root: float) -> float:
    """
    Derivative ds_n/d delta = -(1/delta) s/(s - (n+1-delta)) at the solved root.

    Raises:
        SolverError: if s_root does not exceed n+1-delta
    """
    gap = s_root - p.y
    if not gap > 0:
        raise SolverError(
            f"s={s_root} does not exceed n+1-delta={p.y}; the root is not converged"
        )
    return -s_root / (p.delta * gap)


@lru_cache(maxsize=None)
def _s_series_terms(n: int, M: int) -> Tuple[Fraction, ...]:
    a = [Fraction(math.factorial(n + 1), math.factorial(n + k + 1)) for k in range(M + 1)]
    b = [Fraction(math.factorial(n + 2), math.factorial(n + k + 2)) for k in range(M + 1)]
    return tuple(series_invert(a, b, M, Fraction(n + 2, n + 1)).coeffs)


def s_series_coeffs(n: int, M: int) -> SeriesCoeffs:
    """
    Exact reversion coefficients g_1..g_M of s_n in the argument (n+2)y/(n+1).

    Args:
        n: Truncation order
        M: Series order, 1..12

    Returns:
        SeriesCoeffs with argument_scale (n+2)/(n+1)
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    check_series_order(M)
    return SeriesCoeffs(order=M, coeffs=list(_s_series_terms(n, M)),
                        argument_scale=Fraction(n + 2, n + 1))


def s_series(n: int, y: float, M: int = 8) -> float:
    """Truncated series for s_n at delta = n+1-y."""
    if not 0 < y < n + 1:
        raise DomainError(f"y must lie in (0, {n + 1}), got {y}")
    return s_series_coeffs(n, M).evaluate(y)


def eval_F1(p: ECaseParams, s: float) -> float:
    """F1(s) = s^{n+1-delta}/(delta n! e^s), the closed form of ME at the root."""
    _check_positive(s)
    return math.exp(p.y * math.log(s) - math.lgamma(p.n + 1) - math.log(p.delta) - s)


def eval_F2(p: ECaseParams, s: float, options: Optional[EvalOptions] = None) -> float:
    """F2(s) = s^{n+1-delta}/(delta n! P(s)); P(s) = e^{s - psi(s)}."""
    _check_positive(s)
    log_p = s - psi(p, s, options).value
    return math.exp(p.y * math.log(s) - math.lgamma(p.n + 1) - math.log(p.delta) - log_p)


def max_E(p: ECaseParams, settings: Optional[SolverSettings] = None,
          options: Optional[EvalOptions] = None,
          report: Optional[RootReport] = None) -> MaxValue:
    """
    Maximum value ME_{n,delta} of E_{n,delta} over s > 0.

    Evaluated as E at the root and as F1 at the root; the two must agree.

    Args:
        p: Family member
        settings: Solver policy
        options: Evaluation policy
        report: Previously solved root to reuse

    Returns:
        MaxValue holding the mean of both forms
    """
    report = report or solve_s(p, settings=settings, options=options)
    s = report.root
    forms = (eval_E(p, s, options), eval_F1(p, s))
    result = MaxValue(value=0.5 * (forms[0] + forms[1]), root=report, forms=forms)
    if result.relative_disagreement > FORM_AGREEMENT:
        raise SolverError(
            f"Maximum-value forms disagree by {result.relative_disagreement:.2e} "
            f"at s={s} for n={p.n}, delta={p.delta}",
            last_bracket=report.bracket, iterands=report.iterands,
        )
    return result


def bound_ME(p: ECaseParams, options: Optional[EvalOptions] = None,
             S: Optional[float] = None) -> MEBounds:
    """
    Sandwich E(S) < ME < F2(S) < F1(S) from a lower bound S of the maximizer.

    Any S in [n+1-delta, s_n(delta)] works since F1 and F2 decrease. The
    default is the logarithmic bound ln((n+1)/delta) + n+1-delta.

    Args:
        p: Family member
        options: Evaluation policy
        S: Lower bound to evaluate at (must not exceed the root)

    Returns:
        MEBounds(lower, upper_F2, upper_F1)
    """
    if S is None:
        S = s_bounds(p).candidates[SLowerFormula.PROP6_LOG.value]
    elif not p.y <= S:
        raise DomainError(f"S={S} lies below n+1-delta={p.y}")
    return MEBounds(lower=eval_E(p, S, options),
                    upper_F2=eval_F2(p, S, options),
                    upper_F1=eval_F1(p, S))


def min_ME(n: int) -> ExtremumSummary:
    """
    Closed-form minimum over delta of ME_{n,delta}.

    With t = Sum_{k>=n+1} n!/k! the minimizer is delta = 1/t and the minimum
    is t/(n! e). The tail t is summed directly so large n keeps full precision.

    Args:
        n: Truncation order (n >= 0)

    Returns:
        ExtremumSummary with its rational enclosures
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    t = exp_tail_ratio(n, 1.0) / (n + 1)
    delta_star = 1.0 / t
    value_star = math.exp(math.log(t) - math.lgamma(n + 1) - 1.0)
    scale = math.exp(-math.lgamma(n + 2) - 1.0)  # 1/((n+1)! e)
    return ExtremumSummary(
        n=n,
        family=Family.E,
        delta_star=delta_star,
        value_star=value_star,
        delta_bounds=((n + 1) ** 2 / (n + 2), (n + 2) * (n + 1) / (n + 3)),
        value_bounds=((n + 3) / (n + 2) * scale, (n + 2) / (n + 1) * scale),
    )
