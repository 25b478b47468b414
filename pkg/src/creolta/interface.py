"""Behavioral interfaces: environment automata that close one object."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagnostics import Diagnostic
from .ta import expr as E
from .ta.checks import check_deterministic, template_diagnostics
from .ta.model import Declarations, Edge, Instance, Template, TemplateBuilder
from .translate import Translation


class InterfaceError(ValueError):
    def __init__(self, message: str, edge: Optional[Edge] = None):
        super().__init__(message if edge is None else f"{message}: {edge.describe()}")
        self.edge = edge


@dataclass
class BehavioralInterface:
    template: Template
    provides: frozenset
    known: frozenset = frozenset({0})
    globals: Declarations = field(default_factory=Declarations)

    @property
    def name(self) -> str:
        return self.template.name


def _idx_value(e: E.Expr, env: dict) -> Optional[int]:
    try:
        return E.const_eval(e, env)
    except Exception:
        return None


def classify(edge: Edge, tr: Translation, env: dict) -> Optional[str]:
    """``"input"``, ``"output"``, ``"reply"`` or ``None`` for internal edges.

    Raises :class:`InterfaceError` for synchronisations outside the
    interface alphabet.
    """
    if edge.sync is None:
        return None
    s = edge.sync
    if s.channel == "invoke" and s.direction == "send":
        return "input"
    if s.channel == "invoke" and s.direction == "recv":
        return "output"
    if s.channel == "reply" and s.direction == "send":
        return "reply"
    raise InterfaceError(f"action {s.show()} is not in the interface alphabet", edge)


def _task_names(tr: Translation) -> dict[int, str]:
    out = {i: m for m, i in tr.table.task_ids.items() if m in tr.table.methods}
    return out


def load_interface(template: Template, provides: Iterable[str], tr: Translation,
                   known: Iterable[int] = (0,), globals: Optional[Declarations] = None,
                   self_id: int = 0) -> BehavioralInterface:
    """Check ``template`` against the interface conditions and wrap it.

    ``tr`` supplies the constants (task ids, labels) of the analysed class.
    Violations raise :class:`InterfaceError` naming the offending edge.
    """
    provides = frozenset(provides)
    known = frozenset(known)
    glob = Declarations(list(tr.declarations) + list(globals or ()))
    unknown = provides - set(tr.table.methods)
    if unknown:
        raise InterfaceError(f"{template.name} provides unknown method(s) {sorted(unknown)}")
    diags = [d for d in template_diagnostics(template, glob) if d.is_error]
    if diags:
        raise InterfaceError(f"{template.name}: " + "; ".join(d.message for d in diags))
    env = constants_of(glob)
    args = {p.name: self_id for p in template.params if p.name == "self"}
    env.update(args)
    env.update(constants_of(template.declarations))
    remote = {i: m for m, i in tr.table.remote_method_ids.items()}
    methods = _task_names(tr)
    n_lbl = len(tr.table.label_ids)
    for e in template.edges:
        kind = classify(e, tr, env)
        if kind is None:
            continue
        idx = [_idx_value(i, env) for i in e.sync.indices]
        if kind == "input":
            lbl, m, rcv, snd = idx
            if lbl != 0:
                raise InterfaceError("inputs to the object must be unlabelled", e)
            if m not in methods or methods[m] not in provides:
                raise InterfaceError("input invokes a method outside the provided set", e)
            if rcv != self_id or snd not in known:
                raise InterfaceError("input must go to self from a known object", e)
            if not any(isinstance(u, E.Assign) and u.target == E.Name("deadline")
                       for u in e.updates):
                raise InterfaceError("input without deadline", e)
        elif kind == "output":
            lbl, m, rcv, snd = idx
            if m in methods and methods[m] in provides and m not in remote:
                raise InterfaceError("interface receives a call to a method it provides", e)
            if snd != self_id or rcv not in known:
                raise InterfaceError("output must come from self to a known object", e)
            if lbl is None or not 0 <= lbl <= n_lbl:
                raise InterfaceError("output label is not a label of the class", e)
        else:
            lbl, obj = idx
            if obj != self_id:
                raise InterfaceError("reply must be addressed to self", e)
            if lbl is None or not 1 <= lbl <= n_lbl:
                raise InterfaceError("reply label is not a label of the class", e)
    ok, witness = check_deterministic(template, glob, args)
    if not ok:
        a, b = witness
        raise InterfaceError(f"{template.name} is not deterministic: {a.describe()} and {b.describe()}")
    return BehavioralInterface(template, provides, known, Declarations(list(globals or ())))


def constants_of(decls: Iterable) -> dict[str, int]:
    env: dict[str, int] = {}
    for d in decls:
        if isinstance(d, E.VarDecl) and d.type.const and not d.dims and d.init is not None:
            try:
                env[d.name] = E.const_eval(d.init, env)
            except Exception:
                pass
    return env


def compose_environment(interfaces: Iterable[BehavioralInterface], self_id: int = 0) -> list[Instance]:
    """One instance per interface; interfaces interleave and never talk to each other."""
    out = []
    for b in interfaces:
        args = tuple(self_id for _ in b.template.params)
        out.append(Instance(f"Env_{b.name}", b.name, args))
    return out


# --------------------------------------------------------------------------
# ready-made interfaces

def periodic(name: str, method: str, tr: Translation, period: str | int, deadline: str | int,
             jitter: str | int = 0, burst: int = 0, offset: Optional[str | int] = None,
             sender: int = 0) -> Template:
    """Interface sending ``method`` every ``period`` time units with a relative deadline.

    With ``jitter`` J each inter-arrival time lies in ``[period-J, period+J]``.
    ``burst`` extra calls are sent at time zero before the periodic phase, and
    the first periodic call comes after ``offset`` (default: one period).
    """
    task = tr.naming.task(method)
    p, j = str(period), str(jitter)
    first = p if offset is None else str(offset)
    b = TemplateBuilder(name, "const int self")
    b.declare("clock x;")
    sync = f"invoke[0][{task}][self][{sender}]!"
    upd = f"deadline = {deadline}, x = 0"
    for k in range(burst):
        b.add_location(f"b{k}", urgency="committed", initial=k == 0)
    hi = f"{p} + {j}" if j != "0" else p
    lo = f"{p} - {j}" if j != "0" else p
    if first != p:
        b.add_location("wait", invariant=f"x <= {first}", initial=burst == 0)
    b.add_location("run", invariant=f"x <= {hi}", initial=burst == 0 and first == p)
    start = "wait" if first != p else "run"
    for k in range(burst):
        nxt = f"b{k + 1}" if k + 1 < burst else start
        b.add_edge(f"b{k}", nxt, sync=sync, updates=upd)
    if first != p:
        b.add_edge("wait", "run", guard=f"x >= {first}", sync=sync, updates=upd)
    b.add_edge("run", "run", guard=f"x >= {lo}", sync=sync, updates=upd)
    return b.template
