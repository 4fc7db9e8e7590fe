"""Newline-delimited JSON diagnostics."""

from __future__ import annotations

import json
from typing import Any, Iterable

from ..diagnostics import Diagnostic, Location, sort_diagnostics


def _location(loc: Location) -> dict[str, Any]:
    span = loc.span
    return {
        "id": loc.id,
        "path": loc.path,
        "file": loc.file_name,
        "startLine": span.start_line if span else None,
        "startCol": span.start_col if span else None,
        "endLine": span.end_line if span else None,
        "endCol": span.end_col if span else None,
    }


def diagnostic_record(diag: Diagnostic) -> dict[str, Any]:
    return {
        "code": diag.code,
        "title": diag.title,
        "severity": diag.severity.value,
        "message": diag.message,
        **_location(diag.primary),
        "related": [_location(r) for r in diag.related],
    }


def diagnostics_to_machine(diags: Iterable[Diagnostic]) -> str:
    """One JSON object per line, sorted by code then primary id."""
    return "".join(
        json.dumps(diagnostic_record(d), sort_keys=True, ensure_ascii=False) + "\n" for d in sort_diagnostics(diags)
    )
