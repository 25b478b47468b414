"""Statement and method translation into timed-automaton fragments."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..creol import ast as A
from ..creol.printer import show_stmts
from ..ta import expr as E
from ..ta.model import Edge, Location, Sync, Template, Urgency
from .abstraction import SELF, Abstraction, label_reset
from .tasks import Naming

L0 = "l0"
U = "u"
CLOCK = E.Name("c")
RESET_C = E.Assign(CLOCK, "=", E.Int(0))


class TranslationError(ValueError):
    pass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    method: str
    line: int
    end_line: int
    text: str

    def __str__(self) -> str:
        return f"{self.method}:{self.line}"


class LocMap(dict):
    """``(template, location) -> SourceSpan``; undefined for ``l0`` and ``u``."""

    def line(self, template: str, loc: str) -> Optional[int]:
        span = self.get((template, loc))
        return span.line if span else None

    def locations_at(self, line: int, method: Optional[str] = None) -> list[tuple[str, str]]:
        return sorted(k for k, s in self.items()
                      if s.line == line and (method is None or s.method == method))

    def as_dict(self) -> dict:
        return {f"{t}.{loc}": {"method": s.method, "line": s.line, "end_line": s.end_line,
                               "text": s.text}
                for (t, loc), s in sorted(self.items())}


@dataclass
class Fragment:
    """Transitions, new locations, invariants ``(loc, bound)`` and subtask enablers."""

    transitions: list[Edge] = field(default_factory=list)
    locations: list[str] = field(default_factory=list)
    invariants: list[tuple[str, int]] = field(default_factory=list)
    enablers: list[tuple[str, E.Expr, A.Expr]] = field(default_factory=list)

    def __iadd__(self, other: "Fragment") -> "Fragment":
        self.transitions += other.transitions
        self.locations += [x for x in other.locations if x not in self.locations]
        self.invariants += [x for x in other.invariants if x not in self.invariants]
        self.enablers += other.enablers
        return self


def _ge_c(b: int) -> E.Expr:
    return E.Binary(">=", CLOCK, E.Int(b))


def _le_c(w: int) -> E.Expr:
    return E.Binary("<=", CLOCK, E.Int(w))


def _sync(chan: str, direction: str, *idx) -> Sync:
    return Sync(chan, tuple(E.Name(i) if isinstance(i, str) else i for i in idx), direction)


class MethodContext:
    """Per-method state: fresh locations, fresh subtask names and the Loc map."""

    def __init__(self, method: A.MethodDecl, naming: Naming, absn: Abstraction,
                 label_ids: dict[str, int], file: str = "", taken: frozenset = frozenset()):
        self.method = method
        self.naming = naming
        self.absn = absn
        self.label_ids = label_ids
        self.file = file
        self.taken = taken
        self.loc: dict[str, SourceSpan] = {}
        self._ids: set[str] = {L0, U}
        self._ordinal = 0

    def new_location(self, stmts) -> str:
        first = stmts[0]
        line = first.pos.line
        base = f"L{line}" if line else "L"
        loc_id, k = base, 0
        while loc_id in self._ids:
            k += 1
            loc_id = f"{base}_{k}"
        self._ids.add(loc_id)
        end = max((s.pos.end_line or s.pos.line) for s in stmts)
        text = show_stmts((first,)).splitlines()[0].strip()
        self.loc[loc_id] = SourceSpan(self.file, self.method.name, line, end, text)
        return loc_id

    def new_subtask(self) -> str:
        self._ordinal += 1
        name = f"{self.method.name}{self._ordinal}"
        if name in self.taken:
            raise TranslationError(
                f"subtask name {name} of method {self.method.name} collides with a method"
            )
        return name


def translate_stmts(body, a: str, e: str, ctx: MethodContext) -> Fragment:
    """Sequential composition: a fresh location for the rest after each statement."""
    if not body:
        raise TranslationError("empty statement list")
    if len(body) == 1:
        return translate_stmt(body[0], a, e, ctx)
    rest = tuple(body[1:])
    l = ctx.new_location(rest)
    frag = Fragment(locations=[l])
    frag += translate_stmt(body[0], a, l, ctx)
    frag += translate_stmts(rest, l, e, ctx)
    return frag


def translate_stmt(s, a: str, e: str, ctx: MethodContext) -> Fragment:
    if a == e:
        raise TranslationError("statement must start and end at different locations")
    b, w = s.ann.best, s.ann.worst
    nm = ctx.naming
    frag = Fragment(locations=[a, e])

    def edge(src, dst, guard, sync=None, updates=(), tag=""):
        frag.transitions.append(Edge(src, dst, guard, sync, tuple(updates), tag))

    if isinstance(s, A.Skip):
        edge(a, e, _ge_c(b), updates=[RESET_C], tag="skip")
        frag.invariants.append((a, w))
    elif isinstance(s, A.Assign):
        edge(a, e, _ge_c(b), updates=[RESET_C, *ctx.absn.assign(s)], tag="assign")
        frag.invariants.append((a, w))
    elif isinstance(s, A.Call):
        label = nm.label(s.label) if s.label is not None else E.Int(0)
        rec = "self" if s.is_self else s.target
        sync = _sync("invoke", "send", label, nm.task(s.method), rec, "self")
        upd = [RESET_C, E.Assign(E.Name("deadline"), "=", E.Int(s.ann.deadline or 0))]
        edge(a, e, _ge_c(b), sync, upd, tag="call")
        frag.invariants.append((a, w))
    elif isinstance(s, A.Get):
        if s.label not in ctx.label_ids:
            raise TranslationError(f"blocking reply on undeclared label {s.label}")
        t = nm.label(s.label)
        edge(a, L0, _ge_c(b), _sync("wait", "send", t, "self"), tag="ret-wait")
        edge(L0, e, E.TRUE, _sync("resume", "recv", t, "self"),
             [*label_reset(A.Reply(s.label), nm.label), RESET_C], tag="ret-resume")
        frag.locations.append(L0)
        frag.invariants.append((a, b))
    elif isinstance(s, A.Release):
        x1 = ctx.new_subtask()
        set_incomplete = E.Assign(E.Index(E.Name("complete"), SELF), "=", E.FALSE)
        edge(a, U, _ge_c(b), _sync("delegate", "send", nm.task(x1), "self"), [set_incomplete],
             tag="rel-delegate")
        edge(L0, e, E.TRUE, _sync("start", "recv", nm.task(x1), "self"), [RESET_C], tag="rel-start")
        frag.locations += [L0, U]
        frag.invariants.append((a, w))
        frag.enablers.append((x1, E.TRUE, A.Lit(True)))
    elif isinstance(s, A.Await):
        x1 = ctx.new_subtask()
        g_pos = ctx.absn.guard(s.guard)
        g_neg = ctx.absn.guard(s.guard, negate=True)
        set_incomplete = E.Assign(E.Index(E.Name("complete"), SELF), "=", E.FALSE)
        edge(a, U, E.conj([_ge_c(b), g_neg]), _sync("delegate", "send", nm.task(x1), "self"),
             [set_incomplete], tag="crel-delegate")
        edge(L0, e, E.TRUE, _sync("start", "recv", nm.task(x1), "self"), [RESET_C], tag="crel-start")
        edge(a, e, E.conj([_ge_c(b), g_pos]), None,
             [RESET_C, *label_reset(s.guard, nm.label)], tag="crel-pass")
        frag.locations += [L0, U]
        frag.invariants.append((a, w))
        frag.enablers.append((x1, g_pos, s.guard))
    elif isinstance(s, A.If):
        g_pos = ctx.absn.guard(s.cond)
        g_neg = ctx.absn.guard(s.cond, negate=True)
        l1 = ctx.new_location(s.then)
        frag.locations.append(l1)
        edge(a, l1, E.conj([_ge_c(b), g_pos]), updates=[RESET_C], tag="if-then")
        frag += translate_stmts(s.then, l1, e, ctx)
        if s.orelse:
            l2 = ctx.new_location(s.orelse)
            frag.locations.append(l2)
            edge(a, l2, E.conj([_ge_c(b), g_neg]), updates=[RESET_C], tag="if-else")
            frag += translate_stmts(s.orelse, l2, e, ctx)
        else:
            edge(a, e, E.conj([_ge_c(b), g_neg]), updates=[RESET_C], tag="if-else")
        frag.invariants.append((a, w))
    elif isinstance(s, A.While):
        g_pos = ctx.absn.guard(s.cond)
        g_neg = ctx.absn.guard(s.cond, negate=True)
        l = ctx.new_location(s.body)
        frag.locations.append(l)
        edge(a, l, E.conj([_ge_c(b), g_pos]), updates=[RESET_C], tag="while-loop")
        edge(a, e, E.conj([_ge_c(b), g_neg]), updates=[RESET_C], tag="while-exit")
        frag += translate_stmts(s.body, l, a, ctx)
        frag.invariants.append((a, w))
    else:
        raise TranslationError(f"cannot translate {s!r}")
    return frag


def translate_method(m: A.MethodDecl, ctx: MethodContext, params=()) -> tuple[Template, Fragment]:
    """Template ``C_<m>`` for one method plus the fragment it was built from."""
    nm = ctx.naming
    a = ctx.new_location(m.body)
    frag = translate_stmts(m.body, a, U, ctx)
    start = Edge(L0, a, E.TRUE, _sync("start", "recv", nm.task(m.name), "self"), (RESET_C,), "start")
    finish = Edge(U, L0, E.TRUE, _sync("finish", "send", "self"), (), "finish")
    inv = {}
    for loc, bound in frag.invariants:
        if loc in inv and inv[loc] != bound:
            raise TranslationError(f"conflicting invariants at {loc}")
        inv[loc] = bound
    locs = [Location(L0, L0)]
    ordered = sorted(set(frag.locations) - {L0, U} | {a}, key=lambda x: (ctx.loc[x].line, x))
    for loc in ordered:
        locs.append(Location(loc, loc, Urgency.NORMAL, _le_c(inv[loc]) if loc in inv else E.TRUE))
    locs.append(Location(U, U, Urgency.URGENT))
    t = Template(nm.template(m.name), tuple(params), locations=locs, initial=L0,
                 edges=[start, *frag.transitions, finish])
    return t, frag
