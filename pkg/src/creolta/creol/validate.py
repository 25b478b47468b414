"""Static checks on parsed Creol models."""
from __future__ import annotations

from typing import Optional

from ..diagnostics import Diagnostic
from . import ast as A


def _diag(sev: str, msg: str, pos: A.Pos, file: str) -> Diagnostic:
    return Diagnostic(sev, msg, file, pos.line or None, pos.col or None)


def validate(model: A.SourceModel, strict_await: bool = False) -> list[Diagnostic]:
    """All diagnostics for ``model``; never stops at the first error.

    With ``strict_await`` a conditional release point that can be reached
    without elapsed time is an error instead of a warning.
    """
    out: list[Diagnostic] = []
    f = model.file
    ifaces = {}
    for i in model.interfaces:
        if i.name in ifaces:
            out.append(_diag("error", f"interface {i.name} declared twice", i.pos, f))
        ifaces[i.name] = i
        names = [o.name for o in i.ops]
        for dup in sorted({n for n in names if names.count(n) > 1}):
            out.append(_diag("error", f"interface {i.name}: operation {dup} declared twice", i.pos, f))
    for i in model.interfaces:
        for ref in i.inherits:
            if ref.name not in ifaces:
                out.append(_diag("error", f"interface {i.name} inherits undeclared {ref.name}", i.pos, f))
    seen_classes: set[str] = set()
    for c in model.classes:
        if c.name in seen_classes:
            out.append(_diag("error", f"class {c.name} declared twice", c.pos, f))
        seen_classes.add(c.name)
        out.extend(validate_class(c, ifaces, f, strict_await))
    return out


def _all_ops(name: str, ifaces: dict, seen: Optional[set] = None) -> list[str]:
    seen = seen or set()
    if name in seen or name not in ifaces:
        return []
    seen.add(name)
    i = ifaces[name]
    ops = [o.name for o in i.ops]
    for ref in i.inherits:
        ops += _all_ops(ref.name, ifaces, seen)
    return ops


def validate_class(c: A.ClassDecl, ifaces: dict, f: str = "",
                   strict_await: bool = False) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    params = [p.name for p in c.params]
    vars_ = [v.name for v in c.vars]
    for dup in sorted({n for n in params + vars_ if (params + vars_).count(n) > 1}):
        out.append(_diag("error", f"name {dup} declared more than once", c.pos, f))
    methods = [m.name for m in c.methods]
    for dup in sorted({n for n in methods if methods.count(n) > 1}):
        out.append(_diag("error", f"method {dup} defined more than once", c.pos, f))
    for ref in c.implements:
        if ref.name not in ifaces:
            out.append(_diag("error", f"implemented interface {ref.name} is not declared", c.pos, f))
            continue
        for op in _all_ops(ref.name, ifaces):
            if op not in methods:
                out.append(_diag("error", f"method {op} of interface {ref.name} is not defined", c.pos, f))

    # labels: one declaring call per label
    declared: dict[str, A.Call] = {}
    for m in c.methods:
        for s in A.walk_stmts(m.body):
            if isinstance(s, A.Call) and s.label is not None:
                if s.label in declared:
                    out.append(_diag("error", f"label {s.label} is used by more than one call", s.pos, f))
                else:
                    declared[s.label] = s
    clash = set(declared) & (set(vars_) | set(params) | set(methods))
    for name in sorted(clash):
        out.append(_diag("error", f"label {name} clashes with another name", declared[name].pos, f))

    types = {v.name: v.type for v in c.vars}
    for m in c.methods:
        if not m.body:
            out.append(_diag("error", f"method {m.name} has an empty body", m.pos, f))
        for s in A.walk_stmts(m.body):
            out.extend(_check_stmt(s, c, types, set(params), set(declared), set(methods), f))
        out.extend(release_timing(m, f, strict_await))
    return out


def _type_of(e, types: dict, params: set, labels: set, pos: A.Pos, f: str,
             out: list, allow_reply: bool) -> Optional[str]:
    if isinstance(e, A.Lit):
        return "bool" if isinstance(e.value, bool) else "int"
    if isinstance(e, A.Var):
        if e.name in types:
            return types[e.name]
        if e.name in params:
            return "int"
        out.append(_diag("error", f"undeclared identifier {e.name}", pos, f))
        return None
    if isinstance(e, A.Reply):
        if not allow_reply:
            out.append(_diag("error", f"reply test {e.label}? is only allowed in await guards", pos, f))
        elif e.label not in labels:
            out.append(_diag("error", f"reply test on undeclared label {e.label}", pos, f))
        return "bool"
    if isinstance(e, A.Not):
        t = _type_of(e.operand, types, params, labels, pos, f, out, allow_reply)
        if t not in (None, "bool"):
            out.append(_diag("error", "negation of a non-boolean expression", pos, f))
        return "bool"
    if isinstance(e, A.Neg):
        t = _type_of(e.operand, types, params, labels, pos, f, out, allow_reply)
        if t not in (None, "int"):
            out.append(_diag("error", "arithmetic on a boolean expression", pos, f))
        return "int"
    lt = _type_of(e.left, types, params, labels, pos, f, out, allow_reply)
    rt = _type_of(e.right, types, params, labels, pos, f, out, allow_reply)
    if e.op in A.BOOL_OPS:
        if "int" in (lt, rt):
            out.append(_diag("error", f"operands of {e.op} must be boolean", pos, f))
        return "bool"
    if e.op in ("==", "!="):
        if lt and rt and lt != rt:
            out.append(_diag("error", f"comparison of {lt} with {rt}", pos, f))
        return "bool"
    if "bool" in (lt, rt):
        out.append(_diag("error", f"operator {e.op} needs integer operands", pos, f))
    return "bool" if e.op in A.CMP_OPS else "int"


def _check_stmt(s, c: A.ClassDecl, types: dict, params: set, labels: set, methods: set,
                f: str) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    t = s.ann
    if isinstance(s, A.Call):
        if t.deadline is None:
            out.append(_diag("error", f"call missing deadline (@d) for {s.method}", s.pos, f))
        if s.is_self and s.method not in methods:
            out.append(_diag("error", f"self call to undefined method {s.method}", s.pos, f))
        if not s.is_self and s.target not in params:
            out.append(_diag("error", f"call target {s.target} is not a known object", s.pos, f))
    elif t.deadline is not None:
        out.append(_diag("error", "deadline (@d) is only allowed on calls", s.pos, f))
    if isinstance(s, A.Get):
        if s.label not in labels:
            out.append(_diag("error", f"blocking reply on undeclared label {s.label}", s.pos, f))
        if t.worst:
            out.append(_diag("warning", f"worst-case time on {s.label}? is ignored", s.pos, f))
    elif t.best > t.worst:
        out.append(_diag("error", f"best-case time {t.best} exceeds worst-case time {t.worst}", s.pos, f))
    if isinstance(s, A.Assign):
        if s.var not in types:
            out.append(_diag("error", f"assignment to undeclared variable {s.var}", s.pos, f))
        vt = _type_of(s.value, types, params, labels, s.pos, f, out, False)
        if s.var in types and vt and vt != types[s.var]:
            out.append(_diag("error", f"assigning {vt} to {types[s.var]} variable {s.var}", s.pos, f))
    elif isinstance(s, A.Await):
        if _type_of(s.guard, types, params, labels, s.pos, f, out, True) == "int":
            out.append(_diag("error", "await guard is not boolean", s.pos, f))
    elif isinstance(s, (A.While, A.If)):
        if _type_of(s.cond, types, params, labels, s.pos, f, out, False) == "int":
            out.append(_diag("error", "condition is not boolean", s.pos, f))
    return out


# --------------------------------------------------------------------------
# time before release points

def release_timing(m: A.MethodDecl, f: str = "", strict_await: bool = False) -> list[Diagnostic]:
    """Check that time passes before every release point.

    For each release point the least best-case time accumulated since the
    start of the process (method start or resumption after an earlier release
    point) is computed over all paths. A zero minimum before an unconditional
    ``release`` is an error; before a conditional ``await`` it is a warning,
    since the process only releases when the guard is false. A loop whose body
    can run in zero time is reported as a warning as well.
    """
    out: list[Diagnostic] = []
    _flow(m.body, 0, out, f, "error" if strict_await else "warning")
    return out


def _flow(body, acc: int, out: list, f: str, await_sev: str = "warning") -> int:
    """Propagate the minimal accumulated best-case time through ``body``."""
    for s in body:
        acc = _flow_stmt(s, acc, out, f, await_sev)
    return acc


def _flow_stmt(s, acc: int, out: list, f: str, await_sev: str) -> int:
    b = s.ann.best
    if isinstance(s, A.Release):
        if acc + b == 0:
            out.append(_diag("error", "no execution time before release point", s.pos, f))
        return 0
    if isinstance(s, A.Await):
        if acc + b == 0:
            out.append(_diag(await_sev, "no execution time before conditional release point",
                             s.pos, f))
        return 0
    if isinstance(s, A.If):
        a = acc + b
        t = _flow(s.then, a, out, f, await_sev)
        e = _flow(s.orelse, a, out, f, await_sev) if s.orelse else a
        return min(t, e)
    if isinstance(s, A.While):
        head = acc
        # loop head: minimum over entering and every back edge; two passes reach the fixpoint
        for _ in range(2):
            scratch: list = []
            after = _flow(s.body, head + b, scratch, f, await_sev)
            head = min(head, after)
        _flow(s.body, head + b, out, f, await_sev)
        if _min_body(s.body) == 0 and b == 0:
            out.append(_diag("warning", "loop body may execute in zero time", s.pos, f))
        return head + b
    return acc + b


def _min_body(body) -> int:
    """Least best-case time of one pass through ``body`` (release points count as-is)."""
    total = 0
    for s in body:
        b = s.ann.best
        if isinstance(s, A.If):
            b += min(_min_body(s.then), _min_body(s.orelse))
        total += b
    return total


def zero_time_release_points(m: A.MethodDecl) -> list[A.Pos]:
    """Positions of release points reachable without elapsed best-case time."""
    out: list[Diagnostic] = []
    _flow(m.body, 0, out, "", "error")
    at = {(s.pos.line, s.pos.col): s.pos for s in A.walk_stmts(m.body)}
    return [at[d.line, d.col] for d in out if "release point" in d.message]
