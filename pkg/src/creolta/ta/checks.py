"""Structural checks on templates and systems, and the determinism test."""
from __future__ import annotations

import itertools
from typing import Iterable, Optional

from ..diagnostics import Diagnostic
from . import expr as E
from .expr import FuncDecl, VarDecl
from .model import Declarations, Edge, SystemModel, Template

BUILTIN_FUNCS: set[str] = set()


def _scope(decls: Iterable, params=()) -> dict[str, object]:
    out: dict[str, object] = {}
    for d in decls:
        out[d.name] = d
    for p in params:
        out[p.name] = p
    return out


def _const_env(*scopes: Declarations) -> dict[str, int]:
    env: dict[str, int] = {}
    for decls in scopes:
        for d in decls.constants():
            if not d.dims and d.init is not None and not isinstance(d.init, tuple):
                try:
                    env[d.name] = E.const_eval(d.init, env)
                except (KeyError, ZeroDivisionError):
                    pass
    return env


def _undeclared(e: E.Expr, scope: dict) -> list[str]:
    return sorted(n for n in E.names(e) if n not in scope)


def _func_names(fn: FuncDecl, scope: dict) -> list[str]:
    local = dict(scope)
    for p in fn.params:
        local[p.name] = p
    missing: set[str] = set()
    _stmt_names(fn.body, local, missing)
    return sorted(missing)


def _stmt_names(s, scope: dict, missing: set) -> None:
    if isinstance(s, E.Block):
        scope = dict(scope)
        for d in s.decls:
            if d.init is not None and not isinstance(d.init, tuple):
                missing.update(n for n in E.names(d.init) if n not in scope)
            scope[d.name] = d
        for x in s.stmts:
            _stmt_names(x, scope, missing)
    elif isinstance(s, E.ExprStmt):
        missing.update(n for n in E.names(s.expr) if n not in scope)
    elif isinstance(s, E.Return):
        if s.value is not None:
            missing.update(n for n in E.names(s.value) if n not in scope)
    elif isinstance(s, E.If):
        missing.update(n for n in E.names(s.cond) if n not in scope)
        _stmt_names(s.then, scope, missing)
        if s.other is not None:
            _stmt_names(s.other, scope, missing)
    elif isinstance(s, E.While):
        missing.update(n for n in E.names(s.cond) if n not in scope)
        _stmt_names(s.body, scope, missing)
    elif isinstance(s, E.For):
        for part in (s.init, s.cond, s.step):
            if part is not None:
                missing.update(n for n in E.names(part) if n not in scope)
        _stmt_names(s.body, scope, missing)
    elif isinstance(s, E.ForRange):
        inner = dict(scope)
        inner[s.var] = s
        missing.update(n for n in E.names(s.lo) | E.names(s.hi) if n not in scope)
        _stmt_names(s.body, inner, missing)


def _is_clock(e: E.Expr, scope: dict) -> bool:
    name = E.root_name(e)
    d = scope.get(name) if name else None
    return isinstance(d, VarDecl) and d.type.base == "clock"


def _mentions_clock(e: E.Expr, scope: dict) -> bool:
    return any(
        isinstance(x, (E.Name, E.Index)) and _is_clock(x, scope) for x in E.walk(e)
    )


def _invariant_diagnostics(t: Template, scope: dict) -> list[Diagnostic]:
    out = []
    for loc in t.locations:
        for atom in E.conjuncts(loc.invariant):
            if not _mentions_clock(atom, scope):
                continue
            ok = isinstance(atom, E.Binary) and (
                (atom.op in ("<", "<=") and _is_clock(atom.left, scope)
                 and not _mentions_clock(atom.right, scope))
                or (atom.op in (">", ">=") and _is_clock(atom.right, scope)
                    and not _mentions_clock(atom.left, scope))
            )
            if not ok:
                out.append(Diagnostic(
                    "error",
                    f"invariant {E.show(atom)!r} at {loc.id} is not an upper bound on a clock",
                    t.name,
                ))
    return out


def template_diagnostics(t: Template, globals: Optional[Declarations] = None) -> list[Diagnostic]:
    """Diagnostics for a single template against optional global declarations."""
    out: list[Diagnostic] = []
    globals = globals or Declarations()
    ids = [loc.id for loc in t.locations]
    for dup in sorted({i for i in ids if ids.count(i) > 1}):
        out.append(Diagnostic("error", f"duplicate location {dup!r}", t.name))
    if t.initial is None:
        out.append(Diagnostic("error", "no initial location", t.name))
    elif t.initial not in ids:
        out.append(Diagnostic("error", f"initial location {t.initial!r} does not exist", t.name))

    scope = _scope(globals)
    scope.update(_scope(t.declarations, t.params))
    for fn in t.declarations.functions():
        for n in _func_names(fn, scope):
            out.append(Diagnostic("error", f"function {fn.name}: undeclared identifier {n!r}", t.name))

    for loc in t.locations:
        for n in _undeclared(loc.invariant, scope):
            out.append(Diagnostic("error", f"invariant of {loc.id}: undeclared identifier {n!r}", t.name))
    out.extend(_invariant_diagnostics(t, scope))

    for k, e in enumerate(t.edges):
        where = f"edge {k} ({e.src} -> {e.dst})"
        for loc in (e.src, e.dst):
            if loc not in ids:
                out.append(Diagnostic("error", f"{where}: unknown location {loc!r}", t.name))
        for n in _undeclared(e.guard, scope):
            out.append(Diagnostic("error", f"{where}: guard uses undeclared identifier {n!r}", t.name))
        for u in e.updates:
            for n in _undeclared(u, scope):
                out.append(Diagnostic("error", f"{where}: update uses undeclared identifier {n!r}", t.name))
        if e.sync is not None:
            out.extend(_sync_diagnostics(e, where, scope, t.name))
    return out


def _sync_diagnostics(e: Edge, where: str, scope: dict, tname: str) -> list[Diagnostic]:
    out = []
    d = scope.get(e.sync.channel)
    if not (isinstance(d, VarDecl) and d.type.base == "chan"):
        return [Diagnostic("error", f"{where}: undeclared channel {e.sync.channel!r}", tname)]
    if len(d.dims) != len(e.sync.indices):
        out.append(Diagnostic(
            "error",
            f"{where}: channel {e.sync.channel} has {len(d.dims)} dimension(s), "
            f"synchronisation uses {len(e.sync.indices)}",
            tname,
        ))
    for idx in e.sync.indices:
        for n in _undeclared(idx, scope):
            out.append(Diagnostic("error", f"{where}: channel index uses undeclared identifier {n!r}", tname))
    return out


def _duplicate_names(decls: Declarations, where: str) -> list[Diagnostic]:
    names = decls.names()
    return [
        Diagnostic("error", f"duplicate declaration of {n!r}", where)
        for n in sorted({n for n in names if names.count(n) > 1})
    ]


def _index_diagnostics(t: Template, inst, scope: dict, env: dict[str, int]) -> list[Diagnostic]:
    """Constant array indices must lie within the declared dimensions."""
    out = []
    exprs: list[E.Expr] = [loc.invariant for loc in t.locations]
    for e in t.edges:
        exprs.append(e.guard)
        exprs.extend(e.updates)
        if e.sync is not None:
            ch = E.Name(e.sync.channel)
            for i in e.sync.indices:
                ch = E.Index(ch, i)
            exprs.append(ch)
    for ex in exprs:
        for node in _index_chains(ex):
            name, idx = node
            d = scope.get(name)
            if not isinstance(d, VarDecl):
                continue
            for k, ix in enumerate(idx):
                if k >= len(d.dims):
                    out.append(Diagnostic("error", f"too many indices for {name}", f"{inst.name}"))
                    break
                try:
                    val = E.const_eval(ix, env)
                    size = E.const_eval(d.dims[k], env)
                except (KeyError, ZeroDivisionError):
                    continue
                if not 0 <= val < size:
                    out.append(Diagnostic(
                        "error", f"index {val} out of range for {name} (dimension {size})", inst.name))
    return out


def _index_chains(ex: E.Expr):
    """Yield (array name, [index exprs]) for every maximal index chain."""
    seen_inner = set()
    for node in E.walk(ex):
        if isinstance(node, E.Index) and id(node) not in seen_inner:
            idx = []
            cur = node
            while isinstance(cur, E.Index):
                idx.append(cur.index)
                cur = cur.base
                seen_inner.add(id(cur))
            if isinstance(cur, E.Name):
                yield cur.id, list(reversed(idx))


def well_formed(system: SystemModel) -> list[Diagnostic]:
    """All structural diagnostics of a system; empty means well formed."""
    out: list[Diagnostic] = []
    out.extend(_duplicate_names(system.globals, "global declarations"))
    names = [t.name for t in system.templates]
    for dup in sorted({n for n in names if names.count(n) > 1}):
        out.append(Diagnostic("error", f"duplicate template {dup!r}", "system"))
    for t in system.templates:
        out.extend(template_diagnostics(t, system.globals))
        out.extend(_duplicate_names(t.declarations, t.name))

    inames = [i.name for i in system.instances]
    for dup in sorted({n for n in inames if inames.count(n) > 1}):
        out.append(Diagnostic("error", f"duplicate instance {dup!r}", "system"))
    if not system.instances:
        out.append(Diagnostic("error", "system has no instances", "system"))
    genv = _const_env(system.globals)
    for inst in system.instances:
        try:
            t = system.template(inst.template)
        except KeyError:
            out.append(Diagnostic("error", f"instance {inst.name}: unknown template {inst.template!r}", "system"))
            continue
        if len(inst.args) != len(t.params):
            out.append(Diagnostic(
                "error",
                f"instance {inst.name}: template {t.name} expects {len(t.params)} argument(s), "
                f"got {len(inst.args)}",
                "system",
            ))
            continue
        env = dict(genv)
        env.update({p.name: a for p, a in zip(t.params, inst.args)})
        env.update(_const_env(t.declarations))
        scope = _scope(system.globals)
        scope.update(_scope(t.declarations, t.params))
        out.extend(_index_diagnostics(t, inst, scope, env))
    return out


# --------------------------------------------------------------------------
# determinism

def check_deterministic(t: Template, globals: Optional[Declarations] = None,
                        args: Optional[dict[str, int]] = None,
                        max_valuations: int = 4096):
    """Decide whether no location has two same-action edges with overlapping guards.

    Returns ``(True, None)`` or ``(False, (edge1, edge2))``. Discrete variables
    referenced by the two guards are enumerated over their bounded domains;
    the clock part of the conjunction is tested for emptiness with a DBM.
    """
    from ..analysis.compiler import GuardProbe

    probe = GuardProbe(t, globals or Declarations(), args or {})
    for loc in t.locations:
        edges = t.outgoing(loc.id)
        for e1, e2 in itertools.combinations(edges, 2):
            if probe.action(e1) != probe.action(e2):
                continue
            if probe.overlap(e1, e2, max_valuations):
                return False, (e1, e2)
    return True, None
