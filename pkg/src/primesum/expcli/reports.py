"""Serialization of pipeline reports to JSON or sectioned CSV.

Both writers are deterministic: JSON keys are sorted and CSV uses a fixed
"\\n" terminator with floats at 12 significant digits, so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json

from ..errors import ConfigurationError

__all__ = ["emit_report", "render_csv", "render_json"]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def render_json(report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def render_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    first = True
    for name, header, rows in report.to_tables():
        if not first:
            writer.writerow([])
        first = False
        writer.writerow(["section", name])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def emit_report(report, output_format: str, path: str | None = None) -> str:
    """Render ``report`` and optionally write it to ``path``.

    The report object only needs ``to_dict`` (JSON) and ``to_tables`` (CSV).
    """
    if output_format == "json":
        text = render_json(report)
    elif output_format == "csv":
        text = render_csv(report)
    else:
        raise ConfigurationError(f"unknown output format {output_format!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as exc:
            raise ConfigurationError(f"cannot write report to {path}: {exc}") from exc
    return text
