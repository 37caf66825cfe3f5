"""
Grid sweeps over delta for one family member order.

Every grid point is solved independently, so the sweep fans out over a
process pool when more than one job is requested. Rows are reassembled in
grid order, which makes parallel and serial output identical.
"""

import json
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from .models import (
    ECaseParams,
    EvalOptions,
    Family,
    SolverSettings,
    TableRequest,
    UCaseParams,
)
from .s_case import bound_ME, max_E, s_bounds, s_prime, solve_s
from .u_case import bound_MG, max_G, solve_u, u_bounds, u_prime


# Columns that need the maximizer itself
_ROOT_COLUMNS = {"root", "max_value", "derivative"}

OUTPUT_FORMATS = ("table", "json", "csv")


def format_number(value: float) -> str:
    """Decimal rendering with 12 significant digits."""
    return f"{value:.12g}"


@dataclass
class TableResult:
    """Evaluated grid with any post-pass warnings."""
    frame: pd.DataFrame
    warnings: List[str] = field(default_factory=list)


def evaluate_row(family: Family, n: int, delta: float, columns: List[str],
                 settings: Optional[SolverSettings] = None,
                 options: Optional[EvalOptions] = None) -> Dict[str, float]:
    """
    Evaluate the requested columns at one grid point.

    Args:
        family: Family E or U
        n: Truncation order
        delta: Grid point
        columns: Requested column names
        settings: Solver policy
        options: Evaluation policy

    Returns:
        Mapping with "delta" first, then the columns in requested order
    """
    wanted = set(columns)
    values: Dict[str, float] = {}

    if family is Family.E:
        p = ECaseParams(n, delta)
        report = solve_s(p, settings=settings, options=options) if wanted & _ROOT_COLUMNS else None
        if wanted & {"lower", "upper"}:
            bounds = s_bounds(p, (settings or SolverSettings()).lemma2_a)
            values["lower"], values["upper"] = bounds.lower, bounds.upper
        if "max_value" in wanted:
            values["max_value"] = max_E(p, options=options, report=report).value
        if wanted & {"max_lower", "max_upper", "max_upper_F2", "max_upper_F1"}:
            sandwich = bound_ME(p, options)
            values["max_lower"] = sandwich.lower
            values["max_upper"] = values["max_upper_F2"] = sandwich.upper_F2
            values["max_upper_F1"] = sandwich.upper_F1
        if "derivative" in wanted:
            values["derivative"] = s_prime(p, report.root)
    else:
        p = UCaseParams(n, delta)
        report = solve_u(p, settings=settings, options=options) if wanted & _ROOT_COLUMNS else None
        if wanted & {"lower", "upper"}:
            bounds = u_bounds(p)
            values["lower"], values["upper"] = bounds.lower, bounds.upper
        if "max_value" in wanted:
            values["max_value"] = max_G(p, options=options, report=report).value
        if wanted & {"max_lower", "max_upper"}:
            sandwich = bound_MG(p, options)
            values["max_lower"], values["max_upper"] = sandwich.lower, sandwich.upper
        if "derivative" in wanted:
            values["derivative"] = u_prime(p, report.root)

    if report is not None:
        values["root"] = report.root
    row = {"delta": float(delta)}
    row.update((c, values[c]) for c in columns)
    return row


class TableGenerator:
    """Evaluates a TableRequest serially or across worker processes."""

    def __init__(self, settings: SolverSettings = None, options: EvalOptions = None,
                 jobs: int = 1, show_progress: bool = False):
        """
        Initialize the generator.

        Args:
            settings: Solver policy shared by every row
            options: Evaluation policy shared by every row
            jobs: Number of worker processes (1 runs in-process)
            show_progress: Whether to show a progress bar on stderr
        """
        if jobs < 1:
            raise ValueError("jobs must be at least 1")
        self.settings = settings or SolverSettings()
        self.options = options or EvalOptions()
        self.jobs = jobs
        self.show_progress = show_progress

    def generate(self, request: TableRequest) -> TableResult:
        """
        Evaluate every grid point of the request.

        Args:
            request: Validated grid request

        Returns:
            TableResult with one row per grid point, in grid order
        """
        grid = request.delta_grid
        rows: List[Optional[Dict[str, float]]] = [None] * len(grid)

        progress_bar = tqdm(
            total=len(grid),
            desc=f"{request.family.value}-family n={request.n}",
            unit="point",
            disable=not self.show_progress,
            leave=False,
        )

        if self.jobs == 1 or len(grid) == 1:
            for index, delta in enumerate(grid):
                rows[index] = evaluate_row(request.family, request.n, delta,
                                           request.columns, self.settings, self.options)
                progress_bar.update(1)
        else:
            with ProcessPoolExecutor(max_workers=self.jobs) as executor:
                future_to_index = {
                    executor.submit(evaluate_row, request.family, request.n, delta,
                                    request.columns, self.settings, self.options): index
                    for index, delta in enumerate(grid)
                }
                for future in as_completed(future_to_index):
                    rows[future_to_index[future]] = future.result()
                    progress_bar.update(1)
        progress_bar.close()

        frame = pd.DataFrame(rows, columns=["delta"] + list(request.columns))
        return TableResult(frame=frame, warnings=self._check_monotone(frame))

    @staticmethod
    def _check_monotone(frame: pd.DataFrame) -> List[str]:
        """The maximizer decreases strictly in delta; report any violation."""
        if "root" not in frame.columns or len(frame) < 2:
            return []
        ordered = frame.sort_values("delta", kind="mergesort")
        deltas = ordered["delta"].to_numpy()
        roots = ordered["root"].to_numpy()
        distinct = np.diff(deltas) > 0
        bad = np.nonzero(distinct & (np.diff(roots) >= 0))[0]
        return [
            f"root column not strictly decreasing between delta={format_number(deltas[i])} "
            f"and delta={format_number(deltas[i + 1])}"
            for i in bad
        ]


def render_table(frame: pd.DataFrame, fmt: str = "table") -> str:
    """
    Render an evaluated grid.

    Args:
        frame: Rows from TableGenerator.generate
        fmt: "table", "json" (one object per line) or "csv"

    Returns:
        Rendered text ending in a newline
    """
    if fmt == "table":
        return frame.to_string(index=False, float_format=format_number) + "\n"
    if fmt == "csv":
        return frame.to_csv(index=False, float_format="%.12g")
    if fmt == "json":
        lines = []
        for record in frame.to_dict(orient="records"):
            lines.append(json.dumps({k: float(format_number(v)) for k, v in record.items()}))
        return "\n".join(lines) + "\n"
    raise ValueError(f"Unknown output format '{fmt}' (use one of {', '.join(OUTPUT_FORMATS)})")
