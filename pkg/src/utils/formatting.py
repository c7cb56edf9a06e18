"""Output rendering for CLI payloads."""

import csv
import io
import json
from typing import Any, Dict, List

from src.utils.errors import ConfigError

FORMATS = ("json", "csv", "text")


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)


def _csv_rows(payload: Dict[str, Any]) -> List[List[str]]:
    rows = []
    k_q = payload.get("K_q")
    if k_q:
        rows.extend(["K_q", str(n), value] for n, value in enumerate(k_q))
    instantons = payload.get("instantons")
    if instantons:
        rows.append(["n", "0", instantons["n0"]])
        rows.extend(["n", str(d), value] for d, value in enumerate(instantons["n"], start=1))
    return rows


def render_csv(payload: Dict[str, Any]) -> str:
    """K_q coefficients and instanton numbers as flat rows."""
    rows = _csv_rows(payload)
    if not rows:
        raise ConfigError("csv output needs a command producing K_q or instanton numbers")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["series", "index", "value"])
    writer.writerows(rows)
    return buffer.getvalue()


def _text_lines(payload: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    for key, value in payload.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_text_lines(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.extend(_text_lines(item, indent + 1))
                lines.append("")
        elif isinstance(value, list):
            lines.append(f"{pad}{key}: " + ", ".join(str(v) for v in value))
        else:
            lines.append(f"{pad}{key}: {value}")
    return lines


def render_text(payload: Dict[str, Any]) -> str:
    return "\n".join(_text_lines(payload)).rstrip() + "\n"


def render(payload: Dict[str, Any], output_format: str) -> str:
    if output_format == "json":
        return render_json(payload) + "\n"
    if output_format == "csv":
        return render_csv(payload)
    if output_format == "text":
        return render_text(payload)
    raise ConfigError(f"unknown output format: {output_format}", allowed=",".join(FORMATS))
