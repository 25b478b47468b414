"""Global declarations shared by the method automata and the scheduler."""
from __future__ import annotations

from dataclasses import dataclass

from ..creol import ast as A
from ..ta import expr as E
from ..ta.model import Declarations
from .abstraction import AbstractionPolicy
from .tasks import Naming, TaskTable


@dataclass(frozen=True)
class DeadlineRange:
    lo: int = 0
    hi: int = 100
    init: int = 0

    def __post_init__(self):
        if not self.lo <= self.init <= self.hi:
            raise ValueError(f"deadline range [{self.lo}, {self.hi}] does not contain {self.init}")


def declaration_text(cls: A.ClassDecl, table: TaskTable, naming: Naming,
                     policy: AbstractionPolicy, drange: DeadlineRange) -> str:
    n_obj = len(cls.params) + 1
    lines = [
        f"const int MSG = {table.msg};",
        f"const int nObj = {n_obj};",
        f"const int LBL = {len(table.label_ids)};",
        "clock c;",
        f"meta int[{drange.lo},{drange.hi}] deadline = {drange.init};",
    ]
    lines += [f"const int {naming.task(t)} = {i};" for t, i in table.task_ids.items()]
    lines += [f"const int {naming.label(l)} = {i};" for l, i in table.label_ids.items()]
    lines.append("bool labels[LBL+1][nObj];")
    for v in cls.vars:
        if v.name not in policy.keep:
            continue
        if v.type == "bool":
            lines.append(f"bool {naming.var(v.name)}[nObj];")
        else:
            lo, hi = policy.ranges[v.name]
            lines.append(f"int[{lo},{hi}] {naming.var(v.name)}[nObj];")
    lines.append("bool complete[nObj] = {" + ", ".join(["true"] * n_obj) + "};")
    lines += [f"const int {naming.task(m)} = {i};" for m, i in table.remote_method_ids.items()]
    lines += [
        "chan delegate[MSG+1][nObj];",
        "chan invoke[LBL+1][MSG+1][nObj][nObj];",
        "urgent chan start[MSG+1][nObj];",
        "chan finish[nObj];",
        "chan wait[LBL+1][nObj];",
        "urgent chan resume[LBL+1][nObj];",
        "chan reply[LBL+1][nObj];",
    ]
    body = [f"  if (msg == {naming.task(n)}) return {E.show(en)};" for n, en in table.starts]
    lines += ["bool isEnabled(int msg, int self) {", *body, "  return true;", "}"]
    return "\n".join(lines) + "\n"


def gen_declarations(cls: A.ClassDecl, table: TaskTable, naming: Naming,
                     policy: AbstractionPolicy, drange: DeadlineRange) -> Declarations:
    return Declarations.parse(declaration_text(cls, table, naming, policy, drange))
