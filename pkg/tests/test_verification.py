#!/usr/bin/env python3
"""
Tests for the built-in reference suite.
"""

import math
from fractions import Fraction

import pytest

from src.models import SolverSettings, VerifyOutcome
from src.verification import SERIES_REFERENCE, VerificationSuite


@pytest.fixture(scope="module")
def report():
    return VerificationSuite().run()


class TestVerificationSuite:
    """Test suite for VerificationSuite."""

    def test_all_cases_pass(self, report):
        assert report.all_passed, [o.case_id for o in report.failed]

    def test_case_count(self, report):
        assert len(report.outcomes) == 87
        series = [o for o in report.outcomes if ".c" in o.case_id]
        assert len(series) == 4 * len(SERIES_REFERENCE) == 16

    def test_case_ids_are_unique(self, report):
        ids = [o.case_id for o in report.outcomes]
        assert len(ids) == len(set(ids))

    def test_known_ids(self, report):
        by_id = {o.case_id: o for o in report.outcomes}

        assert "e190.delta" in by_id
        assert "e352.V" in by_id
        assert "e204.E_T_decimal_restored" in by_id
        assert "e156.phi1" in by_id
        assert by_id["e109.c4"].expected == Fraction(41, 8640)
        assert by_id["e109.c4"].actual == Fraction(41, 8640)
        assert by_id["e194.trace3"].tolerance == 5e-9
        assert by_id["e197.F2"].tolerance == 5e-8

    def test_restored_digits(self, report):
        by_id = {o.case_id: o for o in report.outcomes}

        low = by_id["e191.E_hat_low_digit_restored"]
        assert abs(low.expected - 2 / (3 * math.e)) < 5e-10
        assert low.passed
        assert by_id["e350.trace2_digit_restored"].passed
        assert abs(by_id["e350.trace2_digit_restored"].expected - 1.000007846) < 1e-12
        assert "e199.E_hat_low" in by_id
        assert "e360.trace2" in by_id

    def test_order_is_stable(self, report):
        again = VerificationSuite(SolverSettings()).run()

        assert [o.case_id for o in again.outcomes] == [o.case_id for o in report.outcomes]


class TestVerifyOutcome:
    """Test suite for single outcomes."""

    def test_float_comparison(self):
        assert VerifyOutcome("x", 1.0, 1.0 + 1e-9, 5e-9).passed
        assert not VerifyOutcome("x", 1.0, 1.0 + 1e-8, 5e-9).passed

    def test_nan_fails(self):
        assert not VerifyOutcome("x", 1.0, float("nan"), 5e-9).passed

    def test_exact_fraction(self):
        assert VerifyOutcome("x", Fraction(1, 3), Fraction(1, 3), 0.0).passed
        assert not VerifyOutcome("x", Fraction(1, 3), Fraction(1, 4), 0.0).passed
