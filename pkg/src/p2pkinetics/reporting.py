"""Result emission: trajectory/ensemble CSV and stability report text.

All formats start with a version comment line.  Floats are rendered with 17
significant digits so re-parsing reproduces the exact values, and writing is
fully deterministic (no timestamps), so identical inputs give byte-identical
files.

The stability report is line-oriented ``key = <json value>`` blocks, one
block per fixed point, separated by blank lines.  Keys: ``fixed_point``
(list), ``residual_norm``, ``converged``, ``jacobian`` (nested list),
``eigenvalues`` (list of [re, im] pairs) and ``classification``.  Tests and
downstream tools should parse values, not layout.
"""

from __future__ import annotations

import io
import json

import numpy as np

from .analysis import StabilityReport
from .simulate import EnsembleStats, Trajectory

TRAJECTORY_HEADER = "# p2pkinetics trajectory-csv v1"
ENSEMBLE_HEADER = "# p2pkinetics ensemble-csv v1"
REPORT_HEADER = "# p2pkinetics analysis-report v1"


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def render_trajectory_csv(trajectory: Trajectory, species_names) -> str:
    lines = [TRAJECTORY_HEADER, "t," + ",".join(species_names)]
    for t, row in zip(trajectory.times, trajectory.states):
        lines.append(_fmt(t) + "," + ",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_trajectory_csv(path, trajectory: Trajectory, species_names) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_trajectory_csv(trajectory, species_names))


def read_trajectory_csv(path_or_text) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Parse a trajectory CSV back into (times, states, species names)."""
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        fh = io.StringIO(path_or_text)
    else:
        fh = open(path_or_text, "r", encoding="utf-8")
    with fh:
        header = fh.readline().rstrip("\n")
        if header != TRAJECTORY_HEADER:
            raise ValueError(f"not a trajectory CSV (header {header!r})")
        columns = fh.readline().rstrip("\n").split(",")
        if not columns or columns[0] != "t":
            raise ValueError("trajectory CSV must start with a 't' column")
        times = []
        states = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            times.append(float(cells[0]))
            states.append([float(c) for c in cells[1:]])
    return np.asarray(times), np.asarray(states), columns[1:]


def render_ensemble_csv(stats: EnsembleStats, species_names) -> str:
    header = (
        "t,"
        + ",".join(f"mean_{n}" for n in species_names)
        + ","
        + ",".join(f"var_{n}" for n in species_names)
    )
    lines = [ENSEMBLE_HEADER, header]
    for t, mean_row, var_row in zip(stats.times, stats.mean, stats.variance):
        cells = [_fmt(t)]
        cells += [_fmt(v) for v in mean_row]
        cells += [_fmt(v) for v in var_row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_ensemble_csv(path, stats: EnsembleStats, species_names) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_ensemble_csv(stats, species_names))


def render_stability_reports(reports: list[StabilityReport]) -> str:
    """One key = json block per report, blank-line separated."""
    blocks = [REPORT_HEADER]
    for rep in reports:
        fp = rep.fixed_point
        lines = [
            f"fixed_point = {json.dumps(list(map(float, fp.state)))}",
            f"residual_norm = {json.dumps(float(fp.residual_norm))}",
            f"converged = {json.dumps(bool(fp.converged))}",
            f"jacobian = {json.dumps([[float(v) for v in row] for row in rep.jacobian])}",
            "eigenvalues = "
            + json.dumps([[float(z.real), float(z.imag)] for z in rep.eigenvalues]),
            f"classification = {json.dumps(rep.classification)}",
        ]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def parse_stability_reports(text: str) -> list[dict]:
    """Inverse of ``render_stability_reports``: list of key -> value dicts."""
    lines = text.splitlines()
    if not lines or lines[0] != REPORT_HEADER:
        raise ValueError("not a stability report (missing header)")
    blocks: list[dict] = []
    current: dict = {}
    for line in lines[1:]:
        if not line.strip():
            if current:
                blocks.append(current)
                current = {}
            continue
        key, eq, value = line.partition(" = ")
        if not eq:
            raise ValueError(f"malformed report line {line!r}")
        current[key] = json.loads(value)
    if current:
        blocks.append(current)
    return blocks
