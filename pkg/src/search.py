"""
Golden section search for derivative-free 1D maximization.

Used to cross-check the Newton maximizers against a brute-force argmax over
the certified bracket.
"""

import math
from typing import Callable, Tuple


INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def golden_section_maximize(f: Callable[[float], float], a: float, b: float,
                            tol: float = 1e-8) -> Tuple[float, float]:
    """
    Maximize a unimodal function on [a, b].

    Args:
        f: Objective to maximize
        a: Lower end of the search interval
        b: Upper end of the search interval
        tol: Final interval width

    Returns:
        Tuple of (x at the maximum, f(x))
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)

    # Required steps to reach tolerance
    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    fc = f(c)
    fd = f(d)

    for _ in range(steps):
        h *= INV_PHI
        if fc > fd:
            b = d
            d, fd = c, fc
            c = a + INV_PHI_SQUARE * h
            fc = f(c)
        else:
            a = c
            c, fc = d, fd
            d = a + INV_PHI * h
            fd = f(d)

    x = 0.5 * (a + b)
    return x, f(x)
