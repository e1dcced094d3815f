from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter

from ..constants import TRACE_HEADER

DEFAULT_RUN_COLUMNS = [
    "id",
    "created_at",
    "command",
    "family",
    "n",
    "arity",
    "max_order",
    "m",
    "t",
    "gate_set",
    "mode",
    "replicas",
    "seed",
    "best_cost",
    "found_value",
    "reference",
    "approx_ratio",
    "wall_time_s",
]

COLUMN_HEADERS = {
    "id": "ID",
    "created_at": "Created",
    "arity": "N",
    "max_order": "k",
    "gate_set": "Gate Set",
    "approx_ratio": "Approx. Ratio",
    "wall_time_s": "Wall Time (s)",
}

SUMMARY_FIELDS = [
    "best_cost",
    "found_value",
    "reference",
    "reference_source",
    "approx_ratio",
    "gap",
    "wall_time_s",
]


def _style_header(ws, headers):
    header_font = Font(bold=True, color="FFFFFF")
    header_fill = PatternFill(
        start_color="366092", end_color="366092", fill_type="solid"
    )
    header_alignment = Alignment(horizontal="center", vertical="center")
    for col_idx, title in enumerate(headers, 1):
        cell = ws.cell(row=1, column=col_idx)
        cell.value = title
        cell.font = header_font
        cell.fill = header_fill
        cell.alignment = header_alignment


def _autosize(ws):
    for column in ws.columns:
        max_length = 0
        column_letter = get_column_letter(column[0].column)
        for cell in column:
            if cell.value is not None:
                max_length = max(max_length, len(str(cell.value)))
        ws.column_dimensions[column_letter].width = min(max_length + 2, 50)


def _cell_value(value):
    if hasattr(value, "tzinfo") and value.tzinfo is not None:
        return value.replace(tzinfo=None)
    if isinstance(value, (list, tuple, dict)):
        return str(value)
    return value


def render_runs_workbook(queryset, columns=None):
    """One row per stored run."""
    columns = columns or DEFAULT_RUN_COLUMNS

    wb = Workbook()
    ws = wb.active
    ws.title = "Runs"
    _style_header(
        ws,
        [COLUMN_HEADERS.get(c, c.replace("_", " ").title()) for c in columns],
    )
    for row_idx, record in enumerate(queryset, 2):
        for col_idx, name in enumerate(columns, 1):
            ws.cell(row=row_idx, column=col_idx).value = _cell_value(
                getattr(record, name, "")
            )
    _autosize(ws)
    return wb


def render_result_workbook(result, traces):
    """
    Summary sheet for a result JSON plus one sheet per replica trace.

    ``traces`` maps a sheet title to a :class:`variational.optimizer.Trace`.
    """
    wb = Workbook()
    ws = wb.active
    ws.title = "Summary"
    _style_header(ws, ["Field", "Value"])
    rows = [(name, result.get(name)) for name in SUMMARY_FIELDS]
    rows += [(f"config.{k}", v) for k, v in result.get("config", {}).items()]
    rows += [(f"details.{k}", v) for k, v in result.get("details", {}).items()]
    rows.append(("best_assignment", result.get("best_assignment")))
    for reason, count in result.get("stop_reasons", {}).items():
        rows.append((f"stop_reasons.{reason}", count))
    for row_idx, (name, value) in enumerate(rows, 2):
        ws.cell(row=row_idx, column=1).value = name
        ws.cell(row=row_idx, column=2).value = _cell_value(value)
    _autosize(ws)

    for title, trace in traces.items():
        sheet = wb.create_sheet(title[:31])
        _style_header(sheet, TRACE_HEADER)
        for row_idx, record in enumerate(trace.records, 2):
            sheet.cell(row=row_idx, column=1).value = record.iteration
            sheet.cell(row=row_idx, column=2).value = record.cost
            sheet.cell(row=row_idx, column=3).value = record.best_cost
            sheet.cell(row=row_idx, column=4).value = record.decoded_cost
        _autosize(sheet)
    return wb
