from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # 'error' | 'warning'
    message: str
    where: str = ""
    line: Optional[int] = None
    col: Optional[int] = None

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        loc = self.where
        if self.line is not None:
            loc = f"{loc}:{self.line}:{self.col or 0}" if loc else f"{self.line}:{self.col or 0}"
        prefix = f"{loc}: " if loc else ""
        return f"{prefix}{self.severity}: {self.message}"

    def as_dict(self) -> dict:
        return {
            "severity": self.severity,
            "message": self.message,
            "where": self.where,
            "line": self.line,
            "col": self.col,
        }


def errors(diags) -> list[Diagnostic]:
    return [d for d in diags if d.is_error]
