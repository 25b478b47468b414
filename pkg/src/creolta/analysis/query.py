"""Queries, schedulability checks and source-level trace annotation."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..interface import constants_of
from ..scheduler import SchedulerError, extract_timing_bounds, queue_bound, \
    queue_invariant_violations
from ..ta import expr as E
from .compiler import Network
from .engine import DEFAULT_BUDGET, Explorer, Goal, Verdict
from .trace import ConcreteTrace, TraceError, concretise, replay


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class Query:
    """``kind`` is ``"reach"`` or ``"invariant"``; an invariant holds iff its goal is unreachable."""

    kind: str
    text: str
    goal: Goal

    def holds(self, verdict: Verdict) -> Optional[bool]:
        if verdict.kind not in ("reachable", "unreachable"):
            return None
        return verdict.reachable if self.kind == "reach" else not verdict.reachable


_LINE = re.compile(r"^line\s+(\S+):(\d+)$")
_LOC = re.compile(r"^([A-Za-z_]\w*)\.([A-Za-z_]\w*)$")


def _location_goal(net: Network, pairs: list[tuple[str, str]], text: str) -> Goal:
    targets: list[tuple[int, int]] = []
    for inst, loc in pairs:
        try:
            k = net.instance_index(inst)
        except KeyError:
            raise QueryError(f"{text}: no instance {inst!r}") from None
        ids = net.instances[k].loc_ids
        if loc not in ids:
            raise QueryError(f"{text}: instance {inst} has no location {loc!r}")
        targets.append((k, ids.index(loc)))
    return Goal(lambda locs, v: any(locs[k] == j for k, j in targets), text=text)


def parse_query(text: str, osys, net: Network) -> Query:
    """``reach <name>``, ``reach line <file:line>``, ``invariant not <name>``.

    ``<name>`` is ``Error`` or ``instance.location``; ``reach`` also accepts a
    boolean expression over global variables, e.g. ``reach r1[0] == 3``.
    """
    t = " ".join(text.split())
    if t.startswith("invariant not "):
        kind, body = "invariant", t[len("invariant not "):]
    elif t.startswith("reach "):
        kind, body = "reach", t[len("reach "):]
    else:
        raise QueryError(f"cannot parse query {text!r}")
    m = _LINE.match(body)
    if m:
        where, line = m.group(1), int(m.group(2))
        pairs = _line_locations(osys, where, line)
        if not pairs:
            raise QueryError(f"{text}: no location for line {line} in {where}")
        return Query(kind, t, _location_goal(net, pairs, t))
    if body == "Error":
        return Query(kind, t, _location_goal(net, [(osys.scheduler, "Error")], t))
    m = _LOC.match(body)
    if m and m.group(1) in {i.name for i in net.instances}:
        return Query(kind, t, _location_goal(net, [(m.group(1), m.group(2))], t))
    try:
        pred = net.compile_predicate(E.parse_expr(body))
    except Exception as exc:
        raise QueryError(f"{text}: {exc}") from None
    return Query(kind, t, Goal(lambda locs, v: bool(pred(v)), text=t))


def _line_locations(osys, where: str, line: int) -> list[tuple[str, str]]:
    tr = osys.translation
    out = []
    for (tname, loc), span in sorted(tr.locmap.items()):
        if span.line != line:
            continue
        if where not in (span.method, span.file) and not span.file.endswith("/" + where):
            continue
        out.append((osys.instance_of_method(span.method), loc))
    return out


# --------------------------------------------------------------------------
# exploration with a concrete, replayed witness

@dataclass
class QueryResult:
    query: Query
    verdict: Verdict
    trace: Optional[ConcreteTrace] = None
    replayed: Optional[bool] = None
    message: str = ""

    @property
    def holds(self) -> Optional[bool]:
        return self.query.holds(self.verdict)


def witness(net: Network, verdict: Verdict, goal: Optional[Goal]) -> tuple[Optional[ConcreteTrace], Optional[bool], str]:
    """Concretise and replay the symbolic trace of a reachable verdict."""
    if not verdict.reachable or not verdict.trace:
        return None, None, ""
    try:
        ct = concretise(net, verdict.trace, goal)
    except TraceError as exc:
        return None, False, f"trace could not be concretised: {exc}"
    ok, why = replay(net, ct, goal)
    return ct, ok, "" if ok else f"replay failed: {why}"


def run_query(net: Network, q: Query, budget: int = DEFAULT_BUDGET) -> QueryResult:
    v = Explorer(net, budget).explore(q.goal)
    ct, ok, msg = witness(net, v, q.goal)
    return QueryResult(q, v, ct, ok, msg or v.message)


# --------------------------------------------------------------------------
# schedulability

SCHEDULABLE, NONSCHEDULABLE, BUDGET, INCONCLUSIVE, MODELING = (
    "schedulable", "nonschedulable", "budget-exhausted", "inconclusive", "modeling-error")


@dataclass
class SchedulabilityResult:
    verdict: str
    max_queue: int
    queue_bound: Optional[int]
    occupancy: int
    states: int
    seconds: float
    cause: Optional[str] = None
    missed: Optional[str] = None
    trace: Optional[ConcreteTrace] = None
    replayed: Optional[bool] = None
    message: str = ""
    invariant_violations: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_queue": self.max_queue,
            "queue_bound": self.queue_bound,
            "occupancy": self.occupancy,
            "states": self.states,
            "seconds": round(self.seconds, 3),
            "cause": self.cause,
            "missed": self.missed,
            "replayed": self.replayed,
            "message": self.message,
            "invariant_violations": self.invariant_violations[:20],
        }


def _error_goal(net: Network, sched: str) -> Goal:
    k = net.instance_index(sched)
    j = net.instances[k].loc_ids.index("Error")
    return Goal(lambda locs, v: locs[k] == j, text="reach Error")


def bound_for(osys) -> Optional[int]:
    try:
        d_max, b_min = extract_timing_bounds(osys.translation.templates,
                                             [b.template for b in osys.interfaces],
                                             constants_of(osys.model.globals))
        return queue_bound(max(d_max, osys.translation.deadline_range.init), b_min)
    except SchedulerError:
        return None


def check_schedulability(osys, budget: int = DEFAULT_BUDGET, net: Optional[Network] = None,
                         check_invariants: bool = False) -> SchedulabilityResult:
    """Error reachability of the scheduler plus the largest queue occupancy seen.

    When the configured capacity is below the bound ``ceil(d_max/b_min)`` an
    unreachable Error still proves schedulability (no reachable state needs
    more room), while an overflow only shows that the capacity was too small
    and yields ``inconclusive``.
    """
    net = net or Network(osys.model)
    sched = osys.scheduler
    tail = net.var(f"{sched}.tail").offset
    occ = [0]
    bad: list[str] = []

    def observe(s):
        if s.v[tail] > occ[0]:
            occ[0] = s.v[tail]
        if check_invariants and len(bad) < 20:
            bad.extend(queue_invariant_violations(net, s.v, sched))

    goal = _error_goal(net, sched)
    v = Explorer(net, budget, observe=observe).explore(goal)
    bound = bound_for(osys)
    res = SchedulabilityResult("", osys.config.max_queue, bound, occ[0], v.states, v.seconds,
                               message=v.message, invariant_violations=bad)
    if v.kind == "unreachable":
        res.verdict = SCHEDULABLE
    elif v.kind == "budget":
        res.verdict = BUDGET
    elif v.kind == "modeling-error":
        res.verdict = MODELING
    else:
        ct, ok, msg = witness(net, v, goal)
        res.trace, res.replayed = ct, ok
        if msg:
            res.message = msg
        last = v.trace[-1].via
        tag = next((e.edge.tag for e in last.edges if e.edge.tag), "")
        res.cause = "overflow" if tag == "t10" else "deadline-miss"
        if res.cause == "deadline-miss" and ct is not None:
            res.missed = missed_task(net, osys, ct)
        capped = bound is None or osys.config.max_queue < bound
        res.verdict = INCONCLUSIVE if res.cause == "overflow" and capped else NONSCHEDULABLE
    return res


# --------------------------------------------------------------------------
# source annotation

def queue_snapshot(net: Network, osys, v, clocks=None) -> list[dict]:
    sched = osys.scheduler
    vals = net.describe_vars(v)
    q = vals[f"{sched}.q"]
    ca = vals[f"{sched}.ca"]
    d = vals[f"{sched}.d"]
    tail = vals[f"{sched}.tail"]
    names = {i: t for t, i in osys.translation.table.task_ids.items()}
    out = []
    base = _clock_base(net, f"{sched}.x")
    for i in range(tail):
        entry = {"slot": i, "task": names.get(q[i], str(q[i])), "deadline": d[ca[i]],
                 "clock": ca[i]}
        if clocks is not None and base is not None:
            entry["remaining"] = str(Fraction(d[ca[i]]) - clocks[base + ca[i]])
        out.append(entry)
    return out


def _clock_base(net: Network, name: str) -> Optional[int]:
    for c in net.clocks:
        if c.name == name:
            return c.base
    return None


def missed_task(net: Network, osys, ct: ConcreteTrace) -> Optional[str]:
    locs, v, clocks = ct.states[-2] if len(ct.states) > 1 else ct.states[-1]
    for entry in queue_snapshot(net, osys, v, clocks):
        if Fraction(entry["remaining"]) < 0:
            return f"{entry['task']} (deadline {entry['deadline']}, overdue by {-Fraction(entry['remaining'])})"
    return None


def trace_to_source(net: Network, osys, ct: ConcreteTrace) -> list[dict]:
    """Per step: delay, transition text, source lines of method instances, queue contents."""
    tr = osys.translation
    steps = []
    now = Fraction(0)
    for i, (locs, v, clocks) in enumerate(ct.states):
        now += ct.delays[i]
        src = {}
        for k, inst in enumerate(net.instances):
            m = osys.method_of_instance(inst.name)
            if m is None:
                continue
            span = tr.locmap.get((inst.template.name, inst.loc_ids[locs[k]]))
            if span is not None:
                src[m] = {"line": span.line, "text": span.text}
        k = net.instance_index(osys.scheduler)
        step = {
            "time": str(now),
            "delay": str(ct.delays[i]),
            "scheduler": net.instances[k].loc_ids[locs[k]],
            "source": src,
            "queue": queue_snapshot(net, osys, v, clocks),
        }
        if i < len(ct.transitions):
            step["transition"] = ct.transitions[i].describe(net)
        steps.append(step)
    return steps


def render_trace(steps: list[dict]) -> str:
    lines = []
    for s in steps:
        where = ", ".join(f"{m}:{x['line']}" for m, x in sorted(s["source"].items()))
        queue = " ".join(f"{e['task']}({e.get('remaining', e['deadline'])})" for e in s["queue"])
        lines.append(f"t={s['time']:>6} +{s['delay']:<5} {s['scheduler']:<9} [{queue}]"
                     + (f" at {where}" if where else ""))
        if "transition" in s:
            lines.append(f"        {s['transition']}")
    return "\n".join(lines)
