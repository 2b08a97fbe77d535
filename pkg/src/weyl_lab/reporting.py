"""Deterministic report serialization.

JSON output uses sorted keys and fixed 17-significant-digit float
formatting so that a report's bytes are a pure function of its values;
CSV is a flat row form for external plotting.
"""

from __future__ import annotations

import json
from pathlib import Path


def format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("non-finite float in report")
    return format(float(x), ".17g")


def _render(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            _render(str(key), out)
            out.append(":")
            _render(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _render(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def render_json(obj) -> str:
    """Canonical JSON text for a report object or plain dict."""
    out: list[str] = []
    _render(obj.as_dict() if hasattr(obj, "as_dict") else obj, out)
    return "".join(out) + "\n"


def render_csv(report) -> str:
    """Flat CSV for reports exposing csv_rows(); trajectories get the
    fixed 'n,re,im' header."""
    from .weylsum import Trajectory

    if isinstance(report, Trajectory):
        lines = ["n,re,im"]
        for n, re, im in report.csv_rows():
            lines.append(f"{n},{format_float(re)},{format_float(im)}")
        return "\n".join(lines) + "\n"
    if hasattr(report, "csv_rows"):
        lines = []
        for row in report.csv_rows():
            lines.append(
                ",".join(
                    format_float(v) if isinstance(v, float) else str(v) for v in row
                )
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"report {type(report).__name__} has no CSV form")


def emit_report(report, path: str | None, fmt: str = "json") -> bytes:
    """Serialize a report deterministically; write to path when given."""
    if fmt == "json":
        payload = render_json(report).encode()
    elif fmt == "csv":
        payload = render_csv(report).encode()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path:
        Path(path).write_bytes(payload)
    return payload
