"""Report models and their JSON, CSV and PDF renderings."""

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal, Optional

from fpdf import FPDF
from fpdf.enums import XPos, YPos
from pydantic import BaseModel, field_validator

from hyperbench import __version__

SCHEMA_VERSION = 1
CSV_COLUMNS = ["name", "bound", "bracket_lo", "bracket_hi", "status", "formula"]
# Fixed so that identical runs render identical PDF bytes
PDF_CREATION_DATE = datetime(2020, 1, 1, tzinfo=timezone.utc)

Status = Literal["pass", "fail", "inconclusive"]


def finite_or_none(value):
    """JSON has no infinity: non-finite numbers become null."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def sanitize(data: Any) -> Any:
    """Recursively replace non-finite floats and numpy scalars with JSON-safe values."""
    if isinstance(data, dict):
        return {str(k): sanitize(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [sanitize(v) for v in data]
    if isinstance(data, bool) or data is None or isinstance(data, str):
        return data
    if hasattr(data, "item"):
        data = data.item()
    if isinstance(data, int):
        return data
    if isinstance(data, float):
        return finite_or_none(data)
    return str(data)


# Output Models
class ReportEntry(BaseModel):
    name: str
    bound: Optional[float] = None
    bracket_lo: Optional[float] = None
    bracket_hi: Optional[float] = None
    status: Status
    formula: str
    required_truncation: Optional[int] = None
    note: Optional[str] = None

    @field_validator("bound", "bracket_lo", "bracket_hi", mode="before")
    @classmethod
    def drop_infinities(cls, v):
        return finite_or_none(v)


class Report(BaseModel):
    schema_version: int = SCHEMA_VERSION
    tool: str = "hyperbench"
    version: str = __version__
    command: str
    seed: Optional[int] = None
    config: dict[str, Any] = {}
    definitions: dict[str, str] = {}
    entries: list[ReportEntry] = []
    details: dict[str, Any] = {}

    @field_validator("config", "details", mode="before")
    @classmethod
    def json_safe(cls, v):
        return sanitize(v)

    @property
    def status(self) -> Status:
        statuses = {e.status for e in self.entries}
        if "fail" in statuses:
            return "fail"
        if "inconclusive" in statuses:
            return "inconclusive"
        return "pass"

    def count(self, status: Status) -> int:
        return sum(1 for e in self.entries if e.status == status)

    def to_json(self) -> str:
        data = self.model_dump(mode="json")
        data = {"schema": data.pop("schema_version"), **data}
        return json.dumps(data, indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_json(report: Report, path: Path) -> Path:
    path.write_text(report.to_json(), encoding="utf-8")
    return path


def write_csv(report: Report, path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for entry in report.entries:
            row = entry.model_dump(include=set(CSV_COLUMNS))
            writer.writerow({k: "" if row[k] is None else row[k] for k in CSV_COLUMNS})
    return path


def _latin1(text: str) -> str:
    # core PDF fonts only cover latin-1
    return text.encode("latin-1", "replace").decode("latin-1")


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.6g}"


def write_pdf(report: Report, path: Path) -> Path:
    """Render the entry table of a report to PDF."""
    pdf = FPDF()
    pdf.set_creation_date(PDF_CREATION_DATE)
    pdf.add_page()
    pdf.set_auto_page_break(auto=True, margin=15)

    pdf.set_font("Helvetica", "B", 16)
    pdf.cell(0, 10, _latin1(f"hyperbench {report.command} report"), new_x=XPos.LMARGIN, new_y=YPos.NEXT, align="C")
    pdf.set_font("Helvetica", "", 10)
    pdf.cell(
        0, 8, _latin1(f"version {report.version}, seed {report.seed}, status {report.status}"),
        new_x=XPos.LMARGIN, new_y=YPos.NEXT, align="C",
    )

    pdf.ln(5)
    pdf.set_draw_color(200, 200, 200)
    pdf.line(10, pdf.get_y(), 200, pdf.get_y())
    pdf.ln(5)

    for key, text in report.definitions.items():
        pdf.set_font("Helvetica", "", 9)
        pdf.multi_cell(0, 5, _latin1(f"{key}: {text}"), new_x=XPos.LMARGIN, new_y=YPos.NEXT)
    pdf.ln(3)

    rows = [["name", "bound", "lower", "upper", "status"]]
    rows += [[e.name, _fmt(e.bound), _fmt(e.bracket_lo), _fmt(e.bracket_hi), e.status] for e in report.entries]
    _render_table(pdf, rows)

    pdf.set_font("Helvetica", "", 8)
    for entry in report.entries:
        pdf.multi_cell(0, 4, _latin1(f"{entry.name}: {entry.formula}"), new_x=XPos.LMARGIN, new_y=YPos.NEXT)

    pdf.output(str(path))
    return path


def _render_table(pdf: FPDF, rows: list[list[str]]) -> None:
    """Render rows as a bordered table; the first row is the header."""
    widths = [70, 30, 30, 30, 30]
    row_height = 7
    for i, row in enumerate(rows):
        header = i == 0
        pdf.set_font("Helvetica", "B" if header else "", 9)
        pdf.set_fill_color(240, 240, 240)
        for cell, width in zip(row, widths):
            pdf.cell(width, row_height, _latin1(cell[:40]), border=1, fill=header, align="L")
        pdf.ln(row_height)
    pdf.ln(5)


WRITERS = {"json": write_json, "csv": write_csv, "pdf": write_pdf}


def write_report(report: Report, path: Path, fmt: str = "json") -> Path:
    if fmt not in WRITERS:
        raise ValueError(f"unknown report format: {fmt}")
    path.parent.mkdir(parents=True, exist_ok=True)
    return WRITERS[fmt](report, path)
