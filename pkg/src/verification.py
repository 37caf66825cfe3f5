"""
Built-in reference suite for the two worked illustrations (n = 1 and n = 3
for each family), the exact reversion coefficients and Phi(1).

Reference decimals carry 9 decimals, so they are checked
with an absolute tolerance of 5e-9. The one value printed with 8 decimals
is checked at 5e-8. Rational enclosures and series coefficients are exact.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

from .core import eval_E, eval_G, phi
from .models import ECaseParams, SolverSettings, UCaseParams, VerifyOutcome
from .s_case import bound_ME, min_ME, s_bounds, s_series_coeffs, solve_s
from .search import golden_section_maximize
from .u_case import bound_MG, min_MG, solve_u, u_bounds, u_series_coeffs


DEFAULT_TOLERANCE = 5e-9
EIGHT_DIGIT_TOLERANCE = 5e-8
ENCLOSURE_TOLERANCE = 1e-12
ARGMAX_TOLERANCE = 1e-6

# Reference values per (family, n). Where the published digits disagree with
# the closed form, the restored value is checked and the printed one is kept
# under an "_as_printed" key; the case id then ends in "_digit_restored".
E_REFERENCE: Dict[int, Dict[str, float]] = {
    1: {
        "delta": 1.392211191, "E_hat": 0.264241117,
        "E_hat_low": 0.245252961, "E_hat_high": 0.275909580,
        "E_hat_low_as_printed": 0.245252296,
        "z": 0.362253912, "S": 0.970042721, "E_S": 0.264174903,
        "trace": (0.970042721, 1.002253487, 1.000011471, 1.000000000),
        "T": 1.026090795, "E_T": 0.264192948,
        "F1": 0.267289754, "F2": 0.26649408,
    },
    3: {
        "delta": 3.229025365, "E_hat": 0.018988156,
        "E_hat_low": 0.018393972, "E_hat_high": 0.019160387,
        "z": 0.214114013, "S": 0.985088648, "E_S": 0.018986579,
        "trace": (0.985088648, 1.001007241, 1.000004222, 1.000000000),
        "T": 1.026821936, "E_T": 0.018983199,
        "F1": 0.019051464, "F2": 0.019050286,
    },
}

U_REFERENCE: Dict[int, Dict[str, float]] = {
    1: {
        "delta": 1.718281828, "G_hat": 0.367879441,
        "U": 0.955647534, "G_U": 0.367791633,
        "trace": (0.955647534, 1.002603361, 1.000007846, 1.000000000),
        "trace_as_printed": (0.955647534, 1.002603361, 1.000078440, 1.000000000),
        "ratio": 2.392211191, "V": 1.002782965, "G_V": 0.367879108,
        "H": 0.369232215,
    },
    3: {
        "delta": 3.824470167, "G_hat": 0.034546107,
        "U": 0.989760152, "G_U": 0.034545828,
        "trace": (0.989760152, 1.000383438, 1.000000511, 1.000000000),
        "ratio": 4.638700487, "V": 1.005165513, "G_V": 0.034546037,
        "H": 0.034557097,
    },
}

# Case-id prefixes, in the order the quantities appear
E_LABELS = {
    1: {"min": "e190", "enclosure": "e191", "S": "e192", "trace": "e194",
        "T": "e195", "E_T": "e196", "F": "e197"},
    3: {"min": "e198", "enclosure": "e199", "S": "e200", "trace": "e202",
        "T": "e203", "E_T": "e204", "F": "e205"},
}
U_LABELS = {
    1: {"delta": "e345", "G_hat": "e346", "enclosure": "e347", "U": "e348",
        "trace": "e350", "ratio": "e351", "V": "e352", "G_V": "e353", "H": "e354"},
    3: {"delta": "e355", "G_hat": "e356", "enclosure": "e357", "U": "e358",
        "trace": "e360", "ratio": "e361", "V": "e362", "G_V": "e363", "H": "e364"},
}

# Reversion coefficients g_2..g_5 / h_2..h_5 (g_1 = h_1 = 1)
SERIES_REFERENCE = {
    ("e109", "E", 1): (Fraction(1, 12), Fraction(7, 360), Fraction(41, 8640),
                       Fraction(2243, 1814400)),
    ("e110", "E", 3): (Fraction(1, 30), Fraction(8, 1575), Fraction(289, 378000),
                       Fraction(1181, 9922500)),
    ("e246", "U", 1): (Fraction(1, 6), Fraction(2, 45), Fraction(7, 540),
                       Fraction(113, 28350)),
    ("e247", "U", 3): (Fraction(2, 15), Fraction(38, 1575), Fraction(439, 94500),
                       Fraction(9131, 9922500)),
}

PHI_ONE = -0.796599599


@dataclass
class VerificationReport:
    """Outcome of a full verification run."""
    outcomes: List[VerifyOutcome] = field(default_factory=list)

    @property
    def failed(self) -> List[VerifyOutcome]:
        return [o for o in self.outcomes if not o.passed]

    @property
    def all_passed(self) -> bool:
        return not self.failed


class VerificationSuite:
    """Recomputes every reference value and compares it with its reference."""

    def __init__(self, settings: SolverSettings = None):
        """
        Initialize the suite.

        Args:
            settings: Solver policy used for every solve
        """
        self.settings = settings or SolverSettings()

    def run(self) -> VerificationReport:
        """
        Run all cases.

        Returns:
            VerificationReport listing every case in a fixed order
        """
        report = VerificationReport()
        for n in sorted(E_REFERENCE):
            report.outcomes.extend(self._e_cases(n))
        for n in sorted(U_REFERENCE):
            report.outcomes.extend(self._u_cases(n))
        report.outcomes.extend(self._series_cases())
        report.outcomes.append(VerifyOutcome("e156.phi1", PHI_ONE, phi(1.0), DEFAULT_TOLERANCE))
        report.outcomes.extend(self._argmax_cases())
        return report

    @staticmethod
    def _restored(ref: Dict, key: str) -> Sequence[bool]:
        """Per-entry flags marking which reference digits differ from the printed ones."""
        value, printed = ref[key], ref.get(f"{key}_as_printed", ref[key])
        if isinstance(value, tuple):
            return [a != b for a, b in zip(value, printed)]
        return [value != printed]

    @staticmethod
    def _trace_cases(label: str, expected: Sequence[float], actual: Sequence[float],
                     restored: Sequence[bool] = ()) -> List[VerifyOutcome]:
        outcomes = []
        for i, value in enumerate(expected):
            got = actual[i] if i < len(actual) else math.nan
            suffix = "_digit_restored" if i < len(restored) and restored[i] else ""
            outcomes.append(VerifyOutcome(f"{label}.trace{i}{suffix}", value, got, DEFAULT_TOLERANCE))
        return outcomes

    def _e_cases(self, n: int) -> List[VerifyOutcome]:
        ref, label = E_REFERENCE[n], E_LABELS[n]
        summary = min_ME(n)
        p = ECaseParams(n, ref["delta"])
        bounds = s_bounds(p, self.settings.lemma2_a)
        S = bounds.candidates["prop6_log"]
        T = bounds.candidates["prop8_phi"]
        sandwich = bound_ME(p)
        trace = solve_s(p, settings=self.settings, initial=ref["S"]).iterands
        e_t_id = f"{label['E_T']}.E_T" if n == 1 else f"{label['E_T']}.E_T_decimal_restored"
        low_id = f"{label['enclosure']}.E_hat_low"
        if self._restored(ref, "E_hat_low")[0]:
            low_id += "_digit_restored"

        outcomes = [
            VerifyOutcome(f"{label['min']}.delta", ref["delta"], summary.delta_star, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['min']}.E_hat", ref["E_hat"], summary.value_star, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['enclosure']}.delta_low", Fraction((n + 1) ** 2, n + 2),
                          summary.delta_bounds[0], ENCLOSURE_TOLERANCE),
            VerifyOutcome(f"{label['enclosure']}.delta_high", Fraction((n + 2) * (n + 1), n + 3),
                          summary.delta_bounds[1], ENCLOSURE_TOLERANCE),
            VerifyOutcome(low_id, ref["E_hat_low"],
                          summary.value_bounds[0], DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['enclosure']}.E_hat_high", ref["E_hat_high"],
                          summary.value_bounds[1], DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['S']}.z", ref["z"], math.log1p(p.y / p.delta), DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['S']}.S", ref["S"], S, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['S']}.E_S", ref["E_S"], eval_E(p, S), DEFAULT_TOLERANCE),
        ]
        outcomes.extend(self._trace_cases(label["trace"], ref["trace"], trace))
        outcomes.extend([
            VerifyOutcome(f"{label['T']}.T", ref["T"], T, DEFAULT_TOLERANCE),
            VerifyOutcome(e_t_id, ref["E_T"], eval_E(p, T), DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['F']}.F1", ref["F1"], sandwich.upper_F1, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['F']}.F2", ref["F2"], sandwich.upper_F2,
                          EIGHT_DIGIT_TOLERANCE if n == 1 else DEFAULT_TOLERANCE),
        ])
        return outcomes

    def _u_cases(self, n: int) -> List[VerifyOutcome]:
        ref, label = U_REFERENCE[n], U_LABELS[n]
        summary = min_MG(n)
        p = UCaseParams(n, ref["delta"])
        bounds = u_bounds(p)
        U = bounds.lower
        V = bounds.candidates["prop19_cubic" if n == 1 else "prop18_min"]
        trace = solve_u(p, settings=self.settings, initial=ref["U"]).iterands
        enclosure = label["enclosure"]

        outcomes = [
            VerifyOutcome(f"{label['delta']}.delta", ref["delta"], summary.delta_star, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['G_hat']}.G_hat", ref["G_hat"], summary.value_star, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{enclosure}.delta_low", Fraction(n + 1) - Fraction(1, n + 2),
                          summary.delta_bounds[0], ENCLOSURE_TOLERANCE),
            VerifyOutcome(f"{enclosure}.delta_high", Fraction(n + 1),
                          summary.delta_bounds[1], ENCLOSURE_TOLERANCE),
            VerifyOutcome(f"{enclosure}.G_hat_low",
                          Fraction(n + 1, n + 2) / math.factorial(n + 1),
                          summary.value_bounds[0], ENCLOSURE_TOLERANCE),
            VerifyOutcome(f"{enclosure}.G_hat_high",
                          Fraction(n + 2, n + 3) / math.factorial(n + 1),
                          summary.value_bounds[1], ENCLOSURE_TOLERANCE),
            VerifyOutcome(f"{label['U']}.U", ref["U"], U, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['U']}.G_U", ref["G_U"], eval_G(p, U), DEFAULT_TOLERANCE),
        ]
        outcomes.extend(self._trace_cases(label["trace"], ref["trace"], trace,
                                          self._restored(ref, "trace")))
        outcomes.extend([
            VerifyOutcome(f"{label['ratio']}.ratio", ref["ratio"],
                          bounds.candidates["prop17_ratio"], DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['V']}.V", ref["V"], V, DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['G_V']}.G_V", ref["G_V"], eval_G(p, V), DEFAULT_TOLERANCE),
            VerifyOutcome(f"{label['H']}.H", ref["H"], bound_MG(p).upper, DEFAULT_TOLERANCE),
        ])
        return outcomes

    @staticmethod
    def _series_cases() -> List[VerifyOutcome]:
        outcomes = []
        for (label, family, n), expected in SERIES_REFERENCE.items():
            coeffs_of = s_series_coeffs if family == "E" else u_series_coeffs
            coeffs = coeffs_of(n, len(expected) + 1).coeffs
            for i, value in enumerate(expected, start=2):
                outcomes.append(VerifyOutcome(f"{label}.c{i}", value, coeffs[i - 1], 0.0))
        return outcomes

    def _argmax_cases(self) -> List[VerifyOutcome]:
        """Golden-section argmax over the certified bracket against the Newton root."""
        outcomes = []
        cases: List[Tuple[str, Callable[[float], float], float, float, float]] = []
        for n, ref in E_REFERENCE.items():
            p = ECaseParams(n, ref["delta"])
            b = s_bounds(p, self.settings.lemma2_a)
            cases.append((f"argmax.E{n}", lambda s, p=p: eval_E(p, s), b.lower, b.upper,
                          solve_s(p, settings=self.settings).root))
        for n, ref in U_REFERENCE.items():
            p = UCaseParams(n, ref["delta"])
            b = u_bounds(p)
            cases.append((f"argmax.U{n}", lambda u, p=p: eval_G(p, u), b.lower, b.upper,
                          solve_u(p, settings=self.settings).root))
        for case_id, objective, low, high, root in cases:
            argmax, _ = golden_section_maximize(objective, low, high, tol=1e-9)
            outcomes.append(VerifyOutcome(case_id, root, argmax, ARGMAX_TOLERANCE))
        return outcomes
