"""
Stable evaluation of the truncated-exponential families.

This module evaluates the tail 1 - e^{-s} P_n(s) of the exponential series,
its alternating counterpart, the two ratio families E_{n,delta}(s) and
G_{n,delta}(u), and the special function Phi(z) = int_0^z e^{-t} ln t dt.

Every tail has two branches. Close to the origin a term-recursive tail
series is summed with math.fsum; far from it the polynomial head is summed
with the exponential factor folded into each term. Powers s^delta are taken
as exp(delta * ln s).
"""

import math
from typing import Optional

from scipy.special import exp1

from .models import DomainError, ECaseParams, EvalOptions, PhiValue, UCaseParams


EULER_GAMMA = 0.5772156649015329

# Phi regimes: power series up to here, exponential-integral identity beyond
PHI_SERIES_MAX = 2.0
PHI_ASYMPTOTIC_MIN = 40.0
PHI_MAX_TERMS = 200

_DEFAULT_OPTIONS = EvalOptions()


def _options(options: Optional[EvalOptions]) -> EvalOptions:
    return options or _DEFAULT_OPTIONS


def _check_order(n: int, minimum: int = 0) -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n < minimum:
        raise DomainError(f"n must be an integer >= {minimum}, got {n!r}")


def _check_argument(x: float, name: str) -> None:
    if math.isnan(x) or x < 0:
        raise DomainError(f"{name} must be nonnegative, got {x}")


# ---------------------------------------------------------------------------
# exponential tail
# ---------------------------------------------------------------------------

def _exp_tail_ratio_series(n: int, s: float, max_terms: int, first: int = 0,
                           abs_floor: float = 0.0) -> float:
    """Sum_{k>=first} (n+1)! s^k / (n+1+k)!, all terms positive."""
    term = 1.0
    terms = [term]
    partial = term if first == 0 else 0.0
    for k in range(1, max_terms):
        term *= s / (n + 1 + k)
        terms.append(term)
        partial += term
        # terms grow while n+1+k < s
        if n + 1 + k > s and (term < 1e-17 * partial or term < abs_floor):
            break
    return math.fsum(terms[first:])


def _exp_head(n: int, s: float) -> float:
    """e^{-s} * Sum_{k<=n} s^k/k! with the exponential inside every term."""
    log_s = math.log(s)
    return math.fsum(math.exp(k * log_s - s - math.lgamma(k + 1)) for k in range(n + 1))


def _use_exp_series(n: int, s: float, options: EvalOptions) -> bool:
    return s < n + options.tail_switch_e


def log_exp_tail(n: int, s: float, options: Optional[EvalOptions] = None) -> float:
    """
    Natural logarithm of exp_tail(n, s); -inf at s = 0.

    Args:
        n: Truncation order (n >= 0)
        s: Argument (s >= 0)
        options: Evaluation policy

    Returns:
        ln(1 - e^{-s} Sum_{k<=n} s^k/k!)
    """
    _check_order(n)
    _check_argument(s, "s")
    if s == 0:
        return -math.inf
    opts = _options(options)
    if _use_exp_series(n, s, opts):
        ratio = _exp_tail_ratio_series(n, s, opts.max_terms, abs_floor=opts.abs_floor)
        return (n + 1) * math.log(s) - s - math.lgamma(n + 2) + math.log(ratio)
    return math.log1p(-_exp_head(n, s))


def exp_tail(n: int, s: float, options: Optional[EvalOptions] = None) -> float:
    """
    Compute 1 - e^{-s} Sum_{k=0..n} s^k/k! = e^{-s} Sum_{k>=n+1} s^k/k!.

    Args:
        n: Truncation order (n >= 0)
        s: Argument (s >= 0)
        options: Evaluation policy

    Returns:
        Tail value in [0, 1)
    """
    _check_order(n)
    _check_argument(s, "s")
    if s == 0:
        return 0.0
    opts = _options(options)
    if _use_exp_series(n, s, opts):
        return math.exp(log_exp_tail(n, s, opts))
    return 1.0 - _exp_head(n, s)


def exp_tail_ratio(n: int, s: float, options: Optional[EvalOptions] = None) -> float:
    """
    Scaled tail (n+1)! e^s exp_tail(n, s) / s^{n+1} = Sum_k (n+1)! s^k/(n+1+k)!.

    Equals 1 at s = 0 and increases with s.
    """
    _check_order(n)
    _check_argument(s, "s")
    if s == 0:
        return 1.0
    opts = _options(options)
    if _use_exp_series(n, s, opts):
        return _exp_tail_ratio_series(n, s, opts.max_terms, abs_floor=opts.abs_floor)
    return math.exp(math.lgamma(n + 2) + s - (n + 1) * math.log(s)
                    + math.log1p(-_exp_head(n, s)))


def exp_tail_ratio_excess(n: int, s: float, options: Optional[EvalOptions] = None) -> float:
    """exp_tail_ratio(n, s) - 1, summed without the leading term near the origin."""
    _check_order(n)
    _check_argument(s, "s")
    opts = _options(options)
    if _use_exp_series(n, s, opts):
        return _exp_tail_ratio_series(n, s, opts.max_terms, first=1, abs_floor=opts.abs_floor)
    return exp_tail_ratio(n, s, opts) - 1.0


# ---------------------------------------------------------------------------
# alternating tail
# ---------------------------------------------------------------------------

def _alt_tail_ratio_series(n: int, u: float, max_terms: int, first: int = 0,
                           abs_floor: float = 0.0) -> float:
    """Sum_{j>=first} (-u)^j (n+1)!/(n+1+j)!, terms decreasing in magnitude for u < n+2."""
    term = 1.0
    terms = [term]
    partial = term if first == 0 else 0.0
    for j in range(1, max_terms):
        term *= -u / (n + 1 + j)
        terms.append(term)
        partial += term
        if n + 1 + j > u and (abs(term) < 1e-17 * abs(partial) or abs(term) < abs_floor):
            break
    return math.fsum(terms[first:])


def _alt_tail_scaled_direct(n: int, u: float) -> float:
    """n! alt_tail(n, u) / u^n from the polynomial side, for u beyond the switch."""
    term = 1.0
    terms = [term]
    for j in range(1, n + 1):
        term *= -(n - j + 1) / u
        terms.append(term)
    sign = -1.0 if n % 2 == 0 else 1.0
    terms.append(sign * math.exp(-u + math.lgamma(n + 1) - n * math.log(u)))
    return math.fsum(terms)


def _use_alt_series(n: int, u: float, options: EvalOptions) -> bool:
    return u < n + options.tail_switch_u


def log_alt_tail(n: int, u: float, options: Optional[EvalOptions] = None) -> float:
    """Natural logarithm of alt_tail(n, u); -inf at u = 0."""
    _check_order(n)
    _check_argument(u, "u")
    if u == 0:
        return -math.inf
    opts = _options(options)
    if _use_alt_series(n, u, opts):
        ratio = _alt_tail_ratio_series(n, u, opts.max_terms, abs_floor=opts.abs_floor)
        return (n + 1) * math.log(u) - math.lgamma(n + 2) + math.log(ratio)
    return n * math.log(u) - math.lgamma(n + 1) + math.log(_alt_tail_scaled_direct(n, u))


def alt_tail(n: int, u: float, options: Optional[EvalOptions] = None) -> float:
    """
    Compute (-1)^{n+1} (e^{-u} - Sum_{k=0..n} (-u)^k/k!), the numerator of G_{n,delta}.

    Below the switch the alternating tail Sum_j (-1)^j u^{n+1+j}/(n+1+j)! is
    used; above it the polynomial side, normalised by its leading term.

    Args:
        n: Truncation order (n >= 0; n = 0 gives 1 - e^{-u})
        u: Argument (u >= 0)
        options: Evaluation policy

    Returns:
        Nonnegative tail value, zero only at u = 0
    """
    _check_order(n)
    _check_argument(u, "u")
    if u == 0:
        return 0.0
    return math.exp(log_alt_tail(n, u, options))


def alt_tail_ratio(n: int, u: float, options: Optional[EvalOptions] = None) -> float:
    """
    Scaled alternating tail (n+1)! alt_tail(n, u) / u^{n+1}.

    Equals 1 at u = 0 and lies in (0, 1] for u >= 0.
    """
    _check_order(n)
    _check_argument(u, "u")
    if u == 0:
        return 1.0
    opts = _options(options)
    if _use_alt_series(n, u, opts):
        return _alt_tail_ratio_series(n, u, opts.max_terms, abs_floor=opts.abs_floor)
    return (n + 1) / u * _alt_tail_scaled_direct(n, u)


def alt_tail_ratio_excess(n: int, u: float, options: Optional[EvalOptions] = None) -> float:
    """alt_tail_ratio(n, u) - 1, summed without the leading term near the origin."""
    _check_order(n)
    _check_argument(u, "u")
    opts = _options(options)
    if _use_alt_series(n, u, opts):
        return _alt_tail_ratio_series(n, u, opts.max_terms, first=1, abs_floor=opts.abs_floor)
    return alt_tail_ratio(n, u, opts) - 1.0


# ---------------------------------------------------------------------------
# the two families
# ---------------------------------------------------------------------------

def eval_E_closed(n: int, delta: float, s: float,
                  options: Optional[EvalOptions] = None) -> float:
    """
    E_{n,delta}(s) for delta in the closed interval [0, n+1] and s > 0.

    The endpoints delta = 0 and delta = n+1 have suprema 1 and 1/(n+1)!.
    """
    _check_order(n)
    if not 0.0 <= delta <= n + 1:
        raise DomainError(f"delta must lie in [0, {n + 1}] for n={n}, got {delta}")
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    return math.exp(log_exp_tail(n, s, options) - delta * math.log(s))


def eval_G_closed(n: int, delta: float, u: float,
                  options: Optional[EvalOptions] = None) -> float:
    """G_{n,delta}(u) for delta in the closed interval [n, n+1] and u > 0."""
    _check_order(n)
    if not n <= delta <= n + 1:
        raise DomainError(f"delta must lie in [{n}, {n + 1}] for n={n}, got {delta}")
    if not u > 0:
        raise DomainError(f"u must be positive, got {u}")
    return math.exp(log_alt_tail(n, u, options) - delta * math.log(u))


def eval_E(p: ECaseParams, s: float, options: Optional[EvalOptions] = None,
           allow_origin: bool = False) -> float:
    """
    Evaluate E_{n,delta}(s) = exp_tail(n, s) / s^delta.

    Args:
        p: Family member
        s: Argument, s > 0
        options: Evaluation policy
        allow_origin: Return the continuous extension 0 at s = 0

    Returns:
        Positive objective value
    """
    if s < 0 or math.isnan(s):
        raise DomainError(f"s must be nonnegative, got {s}")
    if s == 0:
        if allow_origin:
            return 0.0
        raise DomainError("s must be positive (use allow_origin=True for the limit at 0)")
    return eval_E_closed(p.n, p.delta, s, options)


def eval_G(p: UCaseParams, u: float, options: Optional[EvalOptions] = None,
           allow_origin: bool = False) -> float:
    """Evaluate G_{n,delta}(u) = alt_tail(n, u) / u^delta."""
    if u < 0 or math.isnan(u):
        raise DomainError(f"u must be nonnegative, got {u}")
    if u == 0:
        if allow_origin:
            return 0.0
        raise DomainError("u must be positive (use allow_origin=True for the limit at 0)")
    return eval_G_closed(p.n, p.delta, u, options)


def boundary_max_E(n: int, endpoint: str) -> float:
    """
    Supremum of E_{n,delta} over s > 0 at a closed endpoint of the delta range.

    Args:
        n: Truncation order
        endpoint: "lower" (delta = 0) or "upper" (delta = n+1)
    """
    _check_order(n)
    if endpoint == "lower":
        return 1.0
    if endpoint == "upper":
        return 1.0 / math.factorial(n + 1)
    raise DomainError(f"endpoint must be 'lower' or 'upper', got {endpoint!r}")


def boundary_max_G(n: int, endpoint: str) -> float:
    """Supremum of G_{n,delta}: 1/n! at delta = n, 1/(n+1)! at delta = n+1."""
    _check_order(n)
    if endpoint == "lower":
        return 1.0 / math.factorial(n)
    if endpoint == "upper":
        return 1.0 / math.factorial(n + 1)
    raise DomainError(f"endpoint must be 'lower' or 'upper', got {endpoint!r}")


# ---------------------------------------------------------------------------
# Phi
# ---------------------------------------------------------------------------

def _phi_series(z: float) -> float:
    power = 1.0
    terms = []
    partial = 0.0
    for k in range(1, PHI_MAX_TERMS + 1):
        power *= -z / k
        term = power / k
        terms.append(term)
        partial += term
        if abs(term) < 1e-17 * abs(partial):
            break
    return -math.expm1(-z) * math.log(z) + math.fsum(terms)


def evaluate_phi(z: float) -> PhiValue:
    """
    Evaluate Phi(z) = int_0^z e^{-t} ln t dt and report the regime used.

    Small z uses (1 - e^{-z}) ln z + Sum_k (-z)^k/(k k!). Moderate z uses
    Phi(z) = -gamma - E1(z) - e^{-z} ln z, since the power series cancels
    badly there. Beyond PHI_ASYMPTOTIC_MIN the limit -gamma is returned with
    the bound e^{-z}(ln z + 1/z) on the neglected remainder.

    Args:
        z: Nonnegative argument

    Returns:
        PhiValue with value, method, remainder bound and, in the asymptotic
        regime, a warning that the limit was returned
    """
    _check_argument(z, "z")
    if z == 0:
        return PhiValue(value=0.0, method="series")
    if z <= PHI_SERIES_MAX:
        return PhiValue(value=_phi_series(z), method="series")
    if z <= PHI_ASYMPTOTIC_MIN:
        value = -EULER_GAMMA - float(exp1(z)) - math.exp(-z) * math.log(z)
        return PhiValue(value=value, method="exp1")
    remainder = math.exp(-z) * (math.log(z) + 1.0 / z)
    warning = (f"Phi({z:g}) returned as its limit -gamma; neglected remainder "
               f"is at most {remainder:.3e}")
    return PhiValue(value=-EULER_GAMMA, method="asymptotic", remainder_bound=remainder,
                    warnings=[warning])


def phi(z: float) -> float:
    """Phi(z) = d gamma(a, z)/da at a = 1; Phi(0) = 0 and Phi(z) -> -gamma."""
    return evaluate_phi(z).value
