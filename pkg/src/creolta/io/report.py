"""Versioned JSON analysis reports."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

SCHEMA = "creolta-report"
VERSION = 1

# fields every supported version carries; newer tools read older reports
_REQUIRED = {1: ("schema", "version", "tool", "config", "schedulability", "queries")}


class ReportError(ValueError):
    pass


def make_report(tool_version: str, config: dict, schedulability: dict, queries: list[dict],
                sweep: list[dict] = (), stats: dict = None) -> dict:
    return {
        "schema": SCHEMA,
        "version": VERSION,
        "tool": {"name": "creolta", "version": tool_version},
        "config": config,
        "schedulability": schedulability,
        "queries": list(queries),
        "sweep": list(sweep),
        "stats": dict(stats or {}),
    }


def validate_report(data: dict) -> dict:
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise ReportError("not an analysis report")
    version = data.get("version")
    if not isinstance(version, int) or version < 1:
        raise ReportError(f"bad report version {version!r}")
    if version > VERSION:
        raise ReportError(f"report version {version} is newer than this tool ({VERSION})")
    missing = [k for k in _REQUIRED[version] if k not in data]
    if missing:
        raise ReportError(f"report lacks {', '.join(missing)}")
    for q in data["queries"]:
        if "text" not in q or "verdict" not in q:
            raise ReportError("query entry without text or verdict")
    out = dict(data)
    out.setdefault("sweep", [])
    out.setdefault("stats", {})
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_report(report: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(validate_report(report)))


def read_report(path: Union[str, Path]) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ReportError(f"{path}: {exc}") from None
    return validate_report(data)
