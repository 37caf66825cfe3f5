"""
Exact Bürmann-Lagrange series reversion.

Given power series A(x) and B(x) with A(0) = B(0) = 1, the equation
x * B(x) / A(x) = w has the solution x = Sum_m g_m w^m with
g_m = (1/m) [x^{m-1}] (A(x)/B(x))^m. All arithmetic is done with
fractions.Fraction so the coefficients come out exact and in lowest terms.
"""

from fractions import Fraction
from typing import List, Sequence, Union

from .models import MAX_SERIES_ORDER, SeriesCoeffs, SeriesOrderError

Number = Union[int, Fraction]


def check_series_order(M: int) -> None:
    if isinstance(M, bool) or not isinstance(M, int) or not 1 <= M <= MAX_SERIES_ORDER:
        raise SeriesOrderError(f"Series order M must be between 1 and {MAX_SERIES_ORDER}, got {M!r}")


def poly_mul_trunc(p: Sequence[Number], q: Sequence[Number], degree: int) -> List[Fraction]:
    """Product of two coefficient lists, truncated after x^degree."""
    out = [Fraction(0)] * (degree + 1)
    for i, pi in enumerate(p[:degree + 1]):
        if pi == 0:
            continue
        for j, qj in enumerate(q[:degree + 1 - i]):
            out[i + j] += pi * qj
    return out


def quotient_coeffs(a: Sequence[Number], b: Sequence[Number], M: int) -> List[Fraction]:
    """
    Coefficients c_0..c_M of (Sum a_k x^k) / (Sum b_k x^k).

    Uses c_0 = 1 and c_k = a_k - Sum_{l<k} b_{k-l} c_l, which needs a_0 = b_0 = 1.

    Args:
        a: Numerator coefficients, length >= M+1
        b: Denominator coefficients, length >= M+1
        M: Highest power kept

    Returns:
        Exact rationals c_0..c_M
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    if len(a) < M + 1 or len(b) < M + 1:
        raise ValueError(f"Need at least {M + 1} coefficients in both series")
    if Fraction(a[0]) != 1 or Fraction(b[0]) != 1:
        raise ValueError("Both series must start with coefficient 1")
    c = [Fraction(1)]
    for k in range(1, M + 1):
        c.append(Fraction(a[k]) - sum(Fraction(b[k - l]) * c[l] for l in range(k)))
    return c


def lagrange_coeffs(c: Sequence[Number], M: int,
                    argument_scale: Number = 1) -> SeriesCoeffs:
    """
    Reversion coefficients g_m = (1/m) [x^{m-1}] (Sum c_k x^k)^m for m = 1..M.

    Args:
        c: Coefficients of A/B with c_0 = 1, length >= M
        M: Number of coefficients to produce
        argument_scale: Factor multiplying y in the reversion argument

    Returns:
        SeriesCoeffs holding g_1..g_M
    """
    check_series_order(M)
    if Fraction(c[0]) != 1:
        raise ValueError("Reversion needs c_0 = 1")
    if len(c) < M:
        raise ValueError(f"Need at least {M} quotient coefficients")
    base = [Fraction(x) for x in c[:M]]
    degree = M - 1
    power = [Fraction(1)] + [Fraction(0)] * degree
    coeffs = []
    for m in range(1, M + 1):
        power = poly_mul_trunc(power, base, degree)
        coeffs.append(power[m - 1] / m)
    return SeriesCoeffs(order=M, coeffs=coeffs, argument_scale=Fraction(argument_scale))


def series_invert(a: Sequence[Number], b: Sequence[Number], M: int,
                  argument_scale: Number = 1) -> SeriesCoeffs:
    """Solve x * B(x)/A(x) = w for x as a power series in w, to order M."""
    check_series_order(M)
    c = quotient_coeffs(a, b, M)
    return lagrange_coeffs(c, M, argument_scale)
