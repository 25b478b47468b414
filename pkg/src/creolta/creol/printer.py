"""Pretty printer producing parseable Creol text."""
from __future__ import annotations

from . import ast as A

_PREC = {"or": 1, "and": 2, "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6}
_SYM = {"and": "/\\", "or": "\\/"}


def _prec(e) -> int:
    if isinstance(e, A.BinOp):
        return _PREC[e.op]
    if isinstance(e, A.Not):
        return 3
    if isinstance(e, A.Neg):
        return 7
    return 8


def _wrap(e, need: int) -> str:
    s = show_expr(e)
    return f"({s})" if _prec(e) < need else s


def show_expr(e) -> str:
    if isinstance(e, A.Lit):
        if isinstance(e.value, bool):
            return "true" if e.value else "false"
        return str(e.value) if e.value >= 0 else f"({e.value})"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Reply):
        return f"{e.label}?"
    if isinstance(e, A.Not):
        return "~" + _wrap(e.operand, 3)
    if isinstance(e, A.Neg):
        return "-" + _wrap(e.operand, 7)
    p = _PREC[e.op]
    if p == 4:
        left, right = _wrap(e.left, 5), _wrap(e.right, 5)
    else:
        left, right = _wrap(e.left, p), _wrap(e.right, p + 1)
    return f"{left} {_SYM.get(e.op, e.op)} {right}"


def show_timing(t: A.Timing) -> str:
    parts = []
    if t.best:
        parts.append(f"@b{t.best}")
    if t.worst:
        parts.append(f"@w{t.worst}")
    if t.deadline is not None:
        parts.append(f"@d{t.deadline}")
    return f" /*{' '.join(parts)}*/" if parts else ""


def _stmt_lines(s, ind: str) -> list[str]:
    ann = show_timing(s.ann)
    if isinstance(s, A.Skip):
        return [f"{ind}skip{ann}"]
    if isinstance(s, A.Release):
        return [f"{ind}release{ann}"]
    if isinstance(s, A.Assign):
        return [f"{ind}{s.var} := {show_expr(s.value)}{ann}"]
    if isinstance(s, A.Get):
        return [f"{ind}{s.label}?{ann}"]
    if isinstance(s, A.Await):
        return [f"{ind}await {show_expr(s.guard)}{ann}"]
    if isinstance(s, A.Call):
        target = f"{s.target}." if s.target is not None else ""
        return [f"{ind}{s.label or ''}!{target}{s.method}(){ann}"]
    if isinstance(s, A.While):
        return ([f"{ind}while {show_expr(s.cond)} do"] + _body_lines(s.body, ind + "  ")
                + [f"{ind}od{ann}"])
    if isinstance(s, A.If):
        out = [f"{ind}if {show_expr(s.cond)} then"] + _body_lines(s.then, ind + "  ")
        if s.orelse:
            out += [f"{ind}else"] + _body_lines(s.orelse, ind + "  ")
        return out + [f"{ind}fi{ann}"]
    raise TypeError(f"not a statement: {s!r}")


def _body_lines(body, ind: str) -> list[str]:
    out: list[str] = []
    for k, s in enumerate(body):
        lines = _stmt_lines(s, ind)
        if k < len(body) - 1:
            lines[-1] += ";"
        out.extend(lines)
    return out


def show_stmts(body, ind: str = "") -> str:
    return "\n".join(_body_lines(body, ind))


def _params(ps) -> str:
    return "(" + ", ".join(f"{p.name}: {p.type}" for p in ps) + ")" if ps else ""


def _refs(refs) -> str:
    return ", ".join(r.name + (f"({', '.join(show_expr(a) for a in r.args)})" if r.args else "")
                     for r in refs)


def show_model(m: A.SourceModel) -> str:
    out: list[str] = []
    for i in m.interfaces:
        head = f"interface {i.name}{_params(i.params)}"
        if i.inherits:
            head += f" inherits {_refs(i.inherits)}"
        ops = " ".join((f"with {o.cointerface} " if o.cointerface else "") + f"op {o.name}" for o in i.ops)
        out.append(f"{head} begin {ops} end")
    for c in m.classes:
        out.append(f"class {c.name}{_params(c.params)} implements {_refs(c.implements)} begin")
        for v in c.vars:
            out.append(f"  var {v.name} : {v.type}")
        for meth in c.methods:
            if meth.cointerface:
                out.append(f"  with {meth.cointerface}")
            out.append(f"  op {meth.name} ==")
            out.extend(_body_lines(meth.body, "    "))
        out.append("end")
    return "\n".join(out) + "\n"
