"""Task tables, helper sets and the naming scheme for generated identifiers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..creol import ast as A
from ..ta import expr as E

# names the generated declarations use; source names that collide get a prefix
GENERATED = frozenset({
    "c", "deadline", "labels", "complete", "MSG", "nObj", "LBL", "isEnabled", "self",
    "delegate", "invoke", "start", "finish", "wait", "resume", "reply", "msg",
})
# reserved words of the external tool's language
TOOL_WORDS = frozenset(E.KEYWORDS | {
    "chan", "clock", "bool", "int", "commit", "const", "urgent", "broadcast", "init",
    "process", "state", "guard", "sync", "assign", "system", "trans", "deadline", "and",
    "or", "not", "imply", "true", "false", "for", "forall", "exists", "while", "do", "if",
    "else", "return", "typedef", "struct", "rate", "before_update", "after_update", "meta",
    "priority", "progress", "scalar", "select", "void", "default", "switch", "case",
    "continue", "break",
})


@dataclass(frozen=True)
class Naming:
    """Maps source names to identifiers in the generated model."""

    params: frozenset = frozenset()

    def _taken(self, name: str) -> bool:
        return name in GENERATED or name in TOOL_WORDS or name in self.params

    def template(self, method: str) -> str:
        return f"C_{method}"

    def task(self, name: str) -> str:
        return f"op_{name}"

    def var(self, name: str) -> str:
        return f"var_{name}" if self._taken(name) or name.startswith(("op_", "C_")) else name

    def label(self, name: str) -> str:
        return f"lbl_{name}" if self._taken(name) or name.startswith(("op_", "C_")) else name


def labels_of(body) -> list[str]:
    """Labels declared by calls in ``body``, in source order."""
    out: list[str] = []
    for s in A.walk_stmts(body):
        if isinstance(s, A.Call) and s.label is not None and s.label not in out:
            out.append(s.label)
    return out


def mthds_of(body) -> list[str]:
    """Methods called in ``body``, labelled or not, in source order."""
    out: list[str] = []
    for s in A.walk_stmts(body):
        if isinstance(s, A.Call) and s.method not in out:
            out.append(s.method)
    return out


@dataclass
class TaskTable:
    """Tasks with their enabling conditions and the integer ids of all names.

    ``enablers`` holds the abstracted guard of every subtask; methods are
    always enabled and carry ``true``. ``source_enablers`` keeps the Creol
    guard for reporting.
    """

    tasks: list[str] = field(default_factory=list)
    enablers: dict[str, E.Expr] = field(default_factory=dict)
    source_enablers: dict[str, Optional[A.Expr]] = field(default_factory=dict)
    parents: dict[str, str] = field(default_factory=dict)
    task_ids: dict[str, int] = field(default_factory=dict)
    label_ids: dict[str, int] = field(default_factory=dict)
    remote_method_ids: dict[str, int] = field(default_factory=dict)
    methods: list[str] = field(default_factory=list)

    @property
    def starts(self) -> list[tuple[str, E.Expr]]:
        return [(n, self.enablers[n]) for n in self.tasks if n not in self.methods]

    @property
    def msg(self) -> int:
        return max(len(self.remote_method_ids), len(self.tasks))

    def subtasks(self, method: str) -> list[str]:
        return [t for t, p in self.parents.items() if p == method]

    def as_dict(self) -> dict:
        return {
            "tasks": [
                {
                    "name": t,
                    "id": self.task_ids[t],
                    "method": self.parents.get(t, t),
                    "enabler": E.show(self.enablers[t]),
                }
                for t in self.tasks
            ],
            "labels": dict(self.label_ids),
            "remote_methods": dict(self.remote_method_ids),
        }
