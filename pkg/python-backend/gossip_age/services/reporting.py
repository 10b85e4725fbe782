"""
Rendering of run results as text tables, JSON envelopes and CSV plot data.

CSV files start with `#` provenance lines (tool version and the run spec as
compact JSON), followed by a mandatory header row; read them with
`pandas.read_csv(path, comment="#")` or any RFC-4180 reader that skips
comment lines.
"""
import csv
import io
import json
import math
import pathlib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from gossip_age import __version__
from gossip_age.core.logging import logger
from gossip_age.schemas.run_spec import RunOutput, RunSpec


@dataclass
class Report:
    """What a command hands back for rendering."""

    title: str
    columns: Sequence[str]
    rows: List[Sequence[Any]]
    result: Dict[str, Any]
    notes: List[str] = field(default_factory=list)


def finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or math.isinf(value) or math.isnan(value):
        return None
    return float(value)


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table_cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6f}"
    return str(value)


def run_spec_json(spec: RunSpec) -> str:
    return json.dumps(spec.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def render_json(spec: RunSpec, report: Report) -> str:
    envelope = RunOutput(run_spec=spec, result=report.result)
    return json.dumps(envelope.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def render_csv(spec: RunSpec, report: Report) -> str:
    buffer = io.StringIO()
    buffer.write(f"# gossip-age {__version__}\n")
    buffer.write(f"# run_spec: {run_spec_json(spec)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_csv_cell(value) for value in row])
    return buffer.getvalue()


def render_table(spec: RunSpec, report: Report) -> str:
    cells = [[str(c) for c in report.columns]]
    cells.extend([_table_cell(value) for value in row] for row in report.rows)
    widths = [max(len(row[i]) for row in cells) for i in range(len(report.columns))]
    lines = [
        f"# gossip-age {__version__}",
        f"# run_spec: {run_spec_json(spec)}",
        report.title,
        "",
    ]
    for index, row in enumerate(cells):
        lines.append("  ".join(value.rjust(width) for value, width in zip(row, widths)))
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    if report.notes:
        lines.append("")
        lines.extend(report.notes)
    return "\n".join(lines) + "\n"


def emit(spec: RunSpec, report: Report, out) -> None:
    if spec.output == "json":
        out.write(render_json(spec, report))
    elif spec.output == "csv":
        target = pathlib.Path(spec.csv_path)
        target.write_text(render_csv(spec, report), encoding="utf-8")
        logger.info(f"wrote {len(report.rows)} rows to {target}")
        # the verdict lines still reach the terminal
        for note in report.notes:
            out.write(note + "\n")
    else:
        out.write(render_table(spec, report))
