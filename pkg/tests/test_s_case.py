#!/usr/bin/env python3
"""
Unit tests for the E-family maximizer, its bounds and extremal values.
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import math
import unittest
from fractions import Fraction

import mpmath
import numpy as np

from src.core import eval_E
from src.models import (
    DomainError,
    ECaseParams,
    SLowerFormula,
    SolveMethod,
    SolverError,
    SolverSettings,
    SUpperFormula,
)
from src.s_case import (
    bound_ME,
    certify_s_bounds,
    eval_F1,
    eval_F2,
    max_E,
    min_ME,
    psi,
    s_bounds,
    s_prime,
    s_series,
    s_series_coeffs,
    s_side,
    solve_s,
)
from src.search import golden_section_maximize


DELTA_1E = 1.392211191
DELTA_3E = 3.229025365
REFERENCE_TOL = 5e-9


def enclosure_grid(n, count=40):
    return [float(d) for d in np.geomspace(1e-3 * (n + 1), (n + 1) * (1 - 1e-3), count)]


class TestPsi(unittest.TestCase):
    """Test cases for the solver residual."""

    def test_zero_at_minimizing_delta(self):
        self.assertLess(abs(psi(ECaseParams(1, DELTA_1E), 1.0).value), 1e-9)

    def test_signs(self):
        self.assertLess(psi(ECaseParams(0, 0.5), 1e-6).value, 0.0)
        self.assertGreater(psi(ECaseParams(2, 1.7), 20.0).value, 0.0)
        self.assertEqual(s_side(ECaseParams(0, 0.5), 1e-6), -1)
        self.assertEqual(s_side(ECaseParams(2, 1.7), 20.0), 1)

    def test_derivative_matches_finite_difference(self):
        h = 1e-6
        for n, delta, s in ((0, 0.5, 1.7), (1, DELTA_1E, 0.8), (3, 2.0, 4.5), (5, 0.3, 12.0)):
            with self.subTest(n=n, delta=delta, s=s):
                p = ECaseParams(n, delta)
                numeric = (psi(p, s + h).value - psi(p, s - h).value) / (2 * h)
                self.assertLess(abs(psi(p, s).derivative - numeric), 1e-6 * max(1.0, abs(numeric)))

    def test_convex_beyond_kink(self):
        for n, delta in ((0, 0.5), (1, 1.2), (3, 2.5)):
            p = ECaseParams(n, delta)
            s = np.linspace(p.y + 0.05, p.y + 12, 60)
            values = np.array([psi(p, float(x)).value for x in s])
            self.assertTrue(np.all(np.diff(values, 2) > 0), f"n={n}, delta={delta}")

    def test_rejects_nonpositive_argument(self):
        with self.assertRaises(DomainError):
            psi(ECaseParams(1, 1.0), 0.0)


class TestSBounds(unittest.TestCase):
    """Test cases for the certified enclosure of s_n(delta)."""

    def test_reference_candidates(self):
        for n, delta, S, T in ((1, DELTA_1E, 0.970042721, 1.026090795),
                               (3, DELTA_3E, 0.985088648, 1.026821936)):
            with self.subTest(n=n):
                bounds = s_bounds(ECaseParams(n, delta))
                self.assertAlmostEqual(bounds.candidates["prop6_log"], S, delta=REFERENCE_TOL)
                self.assertAlmostEqual(bounds.candidates["prop8_phi"], T, delta=REFERENCE_TOL)
                self.assertGreaterEqual(bounds.lower, bounds.candidates["prop6_log"])
                self.assertLessEqual(bounds.upper, bounds.candidates["prop8_phi"])

    def test_winning_formulas(self):
        self.assertIs(s_bounds(ECaseParams(1, DELTA_1E)).lower_formula, SLowerFormula.PROP6_LOG)
        self.assertIs(s_bounds(ECaseParams(3, DELTA_3E)).lower_formula, SLowerFormula.LEMMA1_SQRT)
        self.assertIs(s_bounds(ECaseParams(1, DELTA_1E)).upper_formula, SUpperFormula.PROP8_PHI)

    def test_lower_exceeds_linear_floor(self):
        for n in (0, 1, 3, 10):
            for delta in enclosure_grid(n, 10):
                bounds = s_bounds(ECaseParams(n, delta))
                self.assertGreater(bounds.lower, ECaseParams(n, delta).y)
                self.assertLess(bounds.lower, bounds.upper)

    def test_larger_constant_still_certified(self):
        p = ECaseParams(2, 1.5)
        self.assertTrue(certify_s_bounds(p, s_bounds(p, lemma2_a=4.0)))
        with self.assertRaises(DomainError):
            s_bounds(p, lemma2_a=1.0)


class TestSolveS(unittest.TestCase):
    """Test cases for the safeguarded Newton solve of s_n(delta)."""

    def test_reference_traces(self):
        for n, delta, trace in (
            (1, DELTA_1E, (0.970042721, 1.002253487, 1.000011471, 1.000000000)),
            (3, DELTA_3E, (0.985088648, 1.001007241, 1.000004222, 1.000000000)),
        ):
            with self.subTest(n=n):
                report = solve_s(ECaseParams(n, delta), initial=trace[0])
                self.assertGreaterEqual(len(report.iterands), 4)
                for expected, actual in zip(trace, report.iterands):
                    self.assertAlmostEqual(actual, expected, delta=REFERENCE_TOL)
                self.assertIs(report.method, SolveMethod.NEWTON)

    def test_n0_against_extended_precision(self):
        """e^s = 1 + 2s at delta = 0.5."""
        expected = float(mpmath.findroot(lambda s: mpmath.exp(s) - 1 - 2 * s, 1.25))
        report = solve_s(ECaseParams(0, 0.5))
        self.assertLess(abs(report.root - expected), 1e-12)
        self.assertLessEqual(abs(report.residual), 1e-12)

    def test_newton_from_above_converges(self):
        """Iterands approaching the root from above end without bisection."""
        for delta in (0.16999890823668862, 0.15188055422754548):
            with self.subTest(delta=delta):
                report = solve_s(ECaseParams(0, delta))
                self.assertIsNot(report.method, SolveMethod.BISECTION_FALLBACK)
                self.assertLessEqual(abs(report.residual), 1e-12)

    def test_dense_grid_solves(self):
        for n in (0, 1, 4):
            for delta in np.linspace(0.01, n + 0.99, 400):
                with self.subTest(n=n, delta=float(delta)):
                    report = solve_s(ECaseParams(n, float(delta)))
                    self.assertLessEqual(abs(report.residual), 1e-12)

    def test_enclosure_and_optimality(self):
        for n in (0, 1, 2, 3, 5, 10):
            for delta in enclosure_grid(n):
                with self.subTest(n=n, delta=delta):
                    p = ECaseParams(n, delta)
                    bounds = s_bounds(p)
                    root = solve_s(p).root
                    self.assertTrue(bounds.lower < root < bounds.upper)
                    peak = eval_E(p, root)
                    self.assertLess(eval_E(p, root * (1 - 1e-3)), peak)
                    self.assertLess(eval_E(p, root * (1 + 1e-3)), peak)

    def test_brute_force_argmax(self):
        for n in (0, 1, 3, 5):
            for delta in enclosure_grid(n, 8):
                with self.subTest(n=n, delta=delta):
                    p = ECaseParams(n, delta)
                    bounds = s_bounds(p)
                    argmax, _ = golden_section_maximize(lambda s: eval_E(p, s),
                                                        bounds.lower, bounds.upper, tol=1e-10)
                    root = solve_s(p).root
                    self.assertLess(abs(argmax - root), 1e-5 * max(1.0, root))

    def test_series_initializer_near_upper_end(self):
        report = solve_s(ECaseParams(1, 1.99))
        self.assertIs(report.method, SolveMethod.SERIES)
        self.assertLessEqual(abs(report.residual), 1e-12)

    def test_best_effort_warning(self):
        report = solve_s(ECaseParams(35, 18.0))
        self.assertTrue(any("best-effort" in w for w in report.warnings))

    def test_iteration_cap_reports_bracket(self):
        with self.assertRaises(SolverError) as ctx:
            solve_s(ECaseParams(2, 1.0), settings=SolverSettings(max_iter=1))
        self.assertIsNotNone(ctx.exception.last_bracket)

    def test_rejects_bad_tolerance(self):
        with self.assertRaises(DomainError):
            solve_s(ECaseParams(2, 1.0), tol=0.0)

    def test_rejects_invalid_params(self):
        with self.assertRaises(DomainError):
            ECaseParams(1, 2.5)
        with self.assertRaises(DomainError):
            ECaseParams(-1, 0.5)
        with self.assertRaises(DomainError):
            ECaseParams(1, math.nan)


class TestSPrime(unittest.TestCase):
    """Test cases for ds_n/d delta."""

    def test_closed_form_at_unit_root(self):
        e = math.e
        expected = -(e - 2) ** 2 / (3 - e)
        self.assertAlmostEqual(s_prime(ECaseParams(1, 1 / (e - 2)), 1.0), expected, places=12)

    def test_matches_finite_difference(self):
        h = 1e-5
        for n, delta in ((0, 0.5), (1, DELTA_1E), (3, 1.0), (5, 4.5)):
            with self.subTest(n=n, delta=delta):
                p = ECaseParams(n, delta)
                numeric = (solve_s(ECaseParams(n, delta + h)).root
                           - solve_s(ECaseParams(n, delta - h)).root) / (2 * h)
                analytic = s_prime(p, solve_s(p).root)
                self.assertLess(analytic, 0.0)
                self.assertLess(abs(analytic / numeric - 1), 1e-6)

    def test_pole_at_linear_floor(self):
        p = ECaseParams(1, 1.5)
        self.assertLess(s_prime(p, p.y + 1e-8), -1e6)
        with self.assertRaises(SolverError):
            s_prime(p, p.y)


class TestSSeries(unittest.TestCase):
    """Test cases for the reversion series of s_n."""

    def test_reference_coefficients(self):
        self.assertEqual(s_series_coeffs(1, 5).coeffs,
                         [1, Fraction(1, 12), Fraction(7, 360), Fraction(41, 8640),
                          Fraction(2243, 1814400)])
        coeffs = s_series_coeffs(3, 5)
        self.assertEqual(coeffs.coeffs,
                         [1, Fraction(1, 30), Fraction(8, 1575), Fraction(289, 378000),
                          Fraction(1181, 9922500)])
        self.assertEqual(coeffs.argument_scale, Fraction(5, 4))

    def test_powers_of_y(self):
        coeffs = s_series_coeffs(1, 2)
        self.assertEqual(coeffs.in_powers_of_y(), [Fraction(3, 2), Fraction(1, 12) * Fraction(9, 4)])

    def test_agrees_with_solver(self):
        self.assertLess(abs(s_series(1, 0.01, 5) - solve_s(ECaseParams(1, 1.99)).root), 1e-10)
        for n in (0, 1, 3, 5):
            for y in (0.001, 0.01, 0.05):
                with self.subTest(n=n, y=y):
                    root = solve_s(ECaseParams(n, n + 1 - y)).root
                    # below ~1e-13 the comparison is limited by double rounding
                    self.assertLessEqual(abs(s_series(n, y, 8) - root), max(10 * y ** 9, 1e-13))

    def test_rejects_bad_arguments(self):
        with self.assertRaises(DomainError):
            s_series(1, 2.5)
        with self.assertRaises(DomainError):
            s_series_coeffs(1, 13)
        with self.assertRaises(DomainError):
            s_series_coeffs(-1, 3)


class TestMaxValue(unittest.TestCase):
    """Test cases for ME_{n,delta}, its sandwich and its minimum over delta."""

    def test_reference_values(self):
        self.assertAlmostEqual(max_E(ECaseParams(1, DELTA_1E)).value, 0.264241117, delta=REFERENCE_TOL)
        self.assertAlmostEqual(max_E(ECaseParams(3, DELTA_3E)).value, 0.018988156, delta=REFERENCE_TOL)

    def test_forms_agree(self):
        for n in (0, 1, 2, 3, 5, 10):
            for delta in enclosure_grid(n, 12):
                with self.subTest(n=n, delta=delta):
                    result = max_E(ECaseParams(n, delta))
                    self.assertLessEqual(result.relative_disagreement, 1e-10)
                    self.assertGreater(result.value, min_ME(n).value_star * (1 - 1e-12))
                    self.assertLess(result.value, 1.0)

    def test_sandwich_references(self):
        for n, delta, F1, F2, tol in ((1, DELTA_1E, 0.267289754, 0.26649408, 5e-8),
                                      (3, DELTA_3E, 0.019051464, 0.019050286, 5e-9)):
            with self.subTest(n=n):
                sandwich = bound_ME(ECaseParams(n, delta))
                self.assertAlmostEqual(sandwich.upper_F1, F1, delta=REFERENCE_TOL)
                self.assertAlmostEqual(sandwich.upper_F2, F2, delta=tol)

    def test_sandwich_ordering(self):
        for n in (0, 1, 3, 5):
            for delta in enclosure_grid(n, 12):
                with self.subTest(n=n, delta=delta):
                    p = ECaseParams(n, delta)
                    sandwich = bound_ME(p)
                    value = max_E(p).value
                    self.assertLessEqual(sandwich.lower, value)
                    self.assertLessEqual(value, sandwich.upper_F2)
                    self.assertLessEqual(sandwich.upper_F2, sandwich.upper_F1)

    def test_sandwich_rejects_low_point(self):
        p = ECaseParams(1, 1.5)
        with self.assertRaises(DomainError):
            bound_ME(p, S=p.y / 2)

    def test_F_forms_decrease_below_root(self):
        for n, delta in ((0, 0.4), (1, DELTA_1E), (3, 2.0)):
            p = ECaseParams(n, delta)
            root = solve_s(p).root
            s = np.linspace(p.y + 1e-3 * (root - p.y), root * (1 - 1e-6), 50)
            F1 = [eval_F1(p, float(x)) for x in s]
            F2 = [eval_F2(p, float(x)) for x in s]
            self.assertTrue(all(b < a for a, b in zip(F1, F1[1:])))
            self.assertTrue(all(b < a for a, b in zip(F2, F2[1:])))
            self.assertTrue(all(f2 < f1 for f1, f2 in zip(F1, F2)))

    def test_endpoint_limits(self):
        for n in (1, 2, 3):
            with self.subTest(n=n):
                self.assertLess(abs(max_E(ECaseParams(n, 1e-8)).value - 1.0), 2e-2)
                upper = max_E(ECaseParams(n, n + 1 - 1e-8)).value
                self.assertLess(abs(upper - 1 / math.factorial(n + 1)), 2e-2)

    def test_small_delta_asymptotics(self):
        """s_0(delta) approaches z + ln z with z = ln(1/delta)."""
        errors = []
        for delta in (1e-4, 1e-6):
            z = math.log(1 / delta)
            root = solve_s(ECaseParams(0, delta)).root
            errors.append(abs(root / (z + math.log(z)) - 1))
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[1], 0.03)


class TestMinME(unittest.TestCase):
    """Test cases for the closed-form minimum over delta."""

    def test_reference_values(self):
        summary = min_ME(1)
        self.assertAlmostEqual(summary.delta_star, DELTA_1E, delta=REFERENCE_TOL)
        self.assertAlmostEqual(summary.value_star, 0.264241117, delta=REFERENCE_TOL)
        self.assertAlmostEqual(summary.delta_bounds[0], 4 / 3, places=14)
        self.assertAlmostEqual(summary.delta_bounds[1], 3 / 2, places=14)
        self.assertAlmostEqual(summary.value_bounds[0], 2 / (3 * math.e), places=14)
        self.assertAlmostEqual(summary.value_bounds[0], 0.245252961, delta=REFERENCE_TOL)
        self.assertAlmostEqual(summary.value_bounds[1], 0.275909580, delta=REFERENCE_TOL)

        summary = min_ME(3)
        self.assertAlmostEqual(summary.delta_star, DELTA_3E, delta=REFERENCE_TOL)
        self.assertAlmostEqual(summary.value_star, 0.018988156, delta=REFERENCE_TOL)
        self.assertAlmostEqual(summary.delta_bounds[0], 16 / 5, places=14)
        self.assertAlmostEqual(summary.delta_bounds[1], 10 / 3, places=14)

    def test_n0(self):
        summary = min_ME(0)
        self.assertAlmostEqual(summary.delta_star, 1 / (math.e - 1), places=14)
        self.assertAlmostEqual(summary.value_star, (math.e - 1) / math.e, places=14)

    def test_root_is_one_at_minimizer(self):
        for n in (0, 1, 2, 3, 5, 10):
            with self.subTest(n=n):
                summary = min_ME(n)
                self.assertLess(abs(solve_s(ECaseParams(n, summary.delta_star)).root - 1.0), 1e-9)
                self.assertAlmostEqual(max_E(ECaseParams(n, summary.delta_star)).value,
                                       summary.value_star, delta=1e-12)

    def test_rejects_negative_order(self):
        with self.assertRaises(DomainError):
            min_ME(-1)


class TestShape(unittest.TestCase):
    """Monotonicity, convexity and log-convexity along delta."""

    def test_root_decreasing_and_convex(self):
        for n in (1, 3):
            deltas = np.linspace(0.05, n + 1 - 0.05, 100)
            roots = np.array([solve_s(ECaseParams(n, float(d))).root for d in deltas])
            self.assertTrue(np.all(np.diff(roots) < 0), f"n={n}")
            self.assertTrue(np.all(np.diff(roots, 2) > 0), f"n={n}")

    def test_max_value_log_convex(self):
        for n in (1, 3):
            deltas = np.linspace(0.05, n + 1 - 0.05, 100)
            logs = np.array([math.log(max_E(ECaseParams(n, float(d))).value) for d in deltas])
            self.assertTrue(np.all(np.diff(logs, 2) >= -1e-9), f"n={n}")

    def test_log_derivative_identity(self):
        """d ln ME / d delta = -ln s_n(delta)."""
        h = 1e-4
        for n in (1, 3):
            for delta in np.linspace(0.2, n + 1 - 0.2, 20):
                with self.subTest(n=n, delta=delta):
                    delta = float(delta)
                    numeric = (math.log(max_E(ECaseParams(n, delta + h)).value)
                               - math.log(max_E(ECaseParams(n, delta - h)).value)) / (2 * h)
                    expected = -math.log(solve_s(ECaseParams(n, delta)).root)
                    self.assertLess(abs(numeric - expected), 5e-7)


if __name__ == '__main__':
    unittest.main()
