"""Parametric scheduler automaton for one object.

Transition numbering follows the usual presentation of this scheduler
(``t1`` to ``t13``); every generated edge carries its number in ``Edge.tag``.

=====  =====================================================================
t1     ``Resuming -> Busy``: ``resume[wl][self]!`` wakes a blocked caller
t2     ``Busy -> WaitSel``: ``wait[l][self]?`` records the awaited label, then
       ``WaitSel`` resumes at once (reply present), starts a pending local
       callee (synchronous call) or blocks the object
t3     ``Ready -> Busy``: ``start[q[run]][self]!``
t4     ``delegate[n][self]?``: subtask inherits the parent's clock and entry data
t5     ``invoke[l][m][self][k]?``: new task with the deadline carried by the
       sender, fresh clock
t6     ``reply[l][self]?``: sets ``labels[l][self]``
t7     ``Init -> Boot``: enqueue ``init`` and ``run``
t8     ``Boot -> Busy``: start the first boot task
t9     deadline miss: ``x[ca[i]] > d[ca[i]]`` for a queued task, to ``Error``
t10    overflow: insertion with ``tail == MAX``, to ``Error``
t11    ``Select -> Stuck``: queue non-empty but nothing enabled, ``run = MAX``
t12    ``Select -> Ready``: strategy picks task ``i``
t13    ``Select -> Idle``: queue empty
=====  =====================================================================

Every ``finish[self]?`` enters ``Select`` through ``shift()``, which removes
the finished entry. ``Select`` first resumes a caller whose synchronous callee
has just completed, and otherwise applies t11, t12 or t13.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .ta import expr as E
from .ta.model import Declarations, Edge, Location, Sync, Template, Urgency
from .translate import Translation

EDF, FPS, FCFS = "edf", "fps", "fcfs"
STRATEGIES = (EDF, FPS, FCFS)

LOCATIONS = ["Init", "Boot", "Busy", "WaitSel", "Select", "Ready", "Resuming",
             "Blocked", "Stuck", "Idle", "Error"]
COMMITTED = {"Init", "Boot", "WaitSel", "Select", "Ready", "Resuming"}


class SchedulerError(ValueError):
    pass


@dataclass(frozen=True)
class SchedulerConfig:
    """Strategy, queue capacity and (for FPS) static priorities.

    Priorities map task names to positive integers; a smaller number means
    more urgent. ``tie`` decides equal remaining deadlines (or priorities):
    ``"last"`` prefers the later queue entry, ``"first"`` the earlier one.
    """

    strategy: str = EDF
    max_queue: int = 8
    priorities: dict = field(default_factory=dict, hash=False)
    tie: str = "last"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise SchedulerError(f"unknown strategy {self.strategy!r}")
        if self.max_queue < 1:
            raise SchedulerError("queue capacity must be at least 1")
        if self.tie not in ("last", "first"):
            raise SchedulerError(f"unknown tie rule {self.tie!r}")


def queue_bound(d_max: int, b_min: int) -> int:
    """``ceil(d_max / b_min)``."""
    if b_min <= 0:
        raise SchedulerError("shortest termination time is zero; the queue is unbounded")
    return max(1, math.ceil(d_max / b_min))


# --------------------------------------------------------------------------
# timing bounds

def _guard_best(e: E.Expr) -> int:
    for a in E.conjuncts(e):
        if (isinstance(a, E.Binary) and a.op == ">=" and a.left == E.Name("c")
                and isinstance(a.right, E.Int)):
            return a.right.value
    return 0


def _deadline_of(edge: Edge, env: dict) -> Optional[int]:
    for u in edge.updates:
        if isinstance(u, E.Assign) and u.target == E.Name("deadline"):
            try:
                return E.const_eval(u.value, env)
            except KeyError:
                return None
    return None


def _shortest_completion(t: Template) -> dict[str, Optional[int]]:
    """Least best-case time from every start edge to ``finish`` without releasing."""
    resume_targets: dict[str, list[str]] = {}
    for e in t.edges:
        if e.sync is not None and e.sync.channel == "resume":
            resume_targets.setdefault(E.show(e.sync.indices[0]), []).append(e.dst)
    # dist[loc] = least time from loc to a completing finish
    INF = math.inf
    dist = {loc.id: INF for loc in t.locations}
    finishes = {e.src for e in t.edges if e.sync is not None and e.sync.channel == "finish"}
    for u in finishes:
        dist[u] = 0
    succ: list[tuple[str, str, int]] = []
    for e in t.edges:
        ch = e.sync.channel if e.sync is not None else None
        if ch in ("start", "resume", "finish", "delegate"):
            continue
        if ch == "wait":
            for dst in resume_targets.get(E.show(e.sync.indices[0]), []):
                succ.append((e.src, dst, _guard_best(e.guard)))
            continue
        succ.append((e.src, e.dst, _guard_best(e.guard)))
    for _ in range(len(dist)):
        changed = False
        for src, dst, w in succ:
            if dist[dst] + w < dist[src]:
                dist[src] = dist[dst] + w
                changed = True
        if not changed:
            break
    out = {}
    for e in t.edges:
        if e.sync is not None and e.sync.channel == "start":
            d = dist[e.dst]
            out[E.show(e.sync.indices[0])] = None if d == INF else int(d)
    return out


def extract_timing_bounds(templates, interfaces=(), consts: Optional[dict] = None) -> tuple[int, int]:
    """``(d_max, b_min)`` over method templates (and interface templates for ``d_max``).

    ``consts`` resolves named deadline values such as ``deadline = MD``.

    ``b_min`` is the shortest best-case time of any completing run from a
    start edge (method or subtask) to ``finish``; a start edge that can never
    complete is an error.
    """
    d_max = 0
    b_min = math.inf
    for t in list(templates) + list(interfaces):
        for e in t.edges:
            d = _deadline_of(e, consts or {})
            if d is not None:
                d_max = max(d_max, d)
    for t in templates:
        for task, b in _shortest_completion(t).items():
            if b is None:
                continue
            b_min = min(b_min, b)
    if b_min == math.inf:
        raise SchedulerError("no method can terminate")
    return d_max, int(b_min)


def nonterminating_starts(t: Template) -> list[str]:
    return [k for k, v in _shortest_completion(t).items() if v is None]


# --------------------------------------------------------------------------
# automaton

_FUNCTIONS = """
int freeClock() {
  for (j : int[0,MAX-1]) if (counter[j] == 0) return j;
  return 0;
}
void insert(int m, int snd, int l, int cl) {
  q[tail] = m; s[tail] = snd; lbl[tail] = l; caller[tail] = NONE; ca[tail] = cl;
  counter[cl]++;
  tail++;
}
void insertInvoke(int l, int m, int snd) {
  int cl = freeClock();
  x[cl] = 0;
  d[cl] = deadline;
  insert(m, snd, l, cl);
}
void insertDelegate(int m) {
  insert(m, s[run], lbl[run], ca[run]);
  caller[tail - 1] = caller[run];
}
bool blocked(int j) {
  return exists (i : int[0,MAX-1]) i < tail && caller[i] == j;
}
bool eligible(int i) {
  return i < tail && isEnabled(q[i], self) && !blocked(i);
}
bool anyEligible() {
  return exists (i : int[0,MAX-1]) eligible(i);
}
int callee() {
  for (i : int[0,MAX-1])
    if (i < tail && i != run && s[i] == self && lbl[i] == wl && caller[i] == NONE
        && isEnabled(q[i], self) && !blocked(i))
      return i;
  return NONE;
}
void startCallee() {
  int i = callee();
  caller[i] = run;
  run = i;
}
void invokeReply(int l) {
  labels[l][self] = true;
}
void shift() {
  int k = run;
  int cl = ca[k];
  rsm = NONE;
  if (complete[self]) {
    if (lbl[k] > 0 && s[k] == self) labels[lbl[k]][self] = true;
    if (caller[k] != NONE) { rsm = caller[k]; wl = lbl[k]; }
  }
  complete[self] = true;
  counter[cl]--;
  if (counter[cl] == 0) d[cl] = 0;
  for (i : int[0,MAX-2])
    if (i >= k) {
      q[i] = q[i+1]; s[i] = s[i+1]; lbl[i] = lbl[i+1]; caller[i] = caller[i+1]; ca[i] = ca[i+1];
    }
  q[MAX-1] = EMPTY; s[MAX-1] = 0; lbl[MAX-1] = 0; caller[MAX-1] = NONE; ca[MAX-1] = 0;
  tail--;
  for (i : int[0,MAX-1]) if (caller[i] > k) caller[i]--;
  if (rsm > k) rsm--;
  run = 0;
}
"""


def _locals(tr: Translation, cfg: SchedulerConfig, d_hi: int) -> Declarations:
    n = cfg.max_queue
    table = tr.table
    lines = [
        f"const int MAX = {n};",
        "const int EMPTY = -1;",
        "const int NONE = -1;",
        "int[-1,MSG] q[MAX] = {" + ", ".join(["EMPTY"] * n) + "};",
        "int[0,nObj-1] s[MAX];",
        "int[0,LBL] lbl[MAX];",
        "int[-1,MAX-1] caller[MAX] = {" + ", ".join(["NONE"] * n) + "};",
        "int[0,MAX-1] ca[MAX];",
        f"int[0,{d_hi}] d[MAX];",
        "int[0,MAX] counter[MAX];",
        "clock x[MAX];",
        "int[0,MAX] run;",
        "int[0,MAX] tail;",
        "int[0,LBL] wl;",
        "int[-1,MAX-1] rsm = NONE;",
    ]
    if cfg.strategy == FPS:
        missing = [t for t in table.tasks if t not in cfg.priorities]
        if missing:
            raise SchedulerError(f"no priority for task(s) {', '.join(missing)}")
        prio = [0] * (table.msg + 1)
        for t, i in table.task_ids.items():
            p = int(cfg.priorities[t])
            if p < 1:
                raise SchedulerError(f"priority of {t} must be positive")
            prio[i] = p
        lines.append("const int prio[MSG+1] = {" + ", ".join(map(str, prio)) + "};")
    decls = Declarations.parse("\n".join(lines) + _FUNCTIONS)
    decls.inactive["x"] = E.parse_expr("counter[i] == 0")
    return decls


def _pick_guard(cfg: SchedulerConfig, i: int) -> str:
    """Guard of t12 selecting queue entry ``i``."""
    if cfg.strategy == FCFS:
        return " && ".join([f"eligible({i})"] + [f"!eligible({m})" for m in range(i)])
    # remaining deadline (or priority) of i against every other eligible entry m
    later, earlier = ("<", "<=") if cfg.tie == "last" else ("<=", "<")
    parts = [f"eligible({i})"]
    for m in range(cfg.max_queue):
        if m == i:
            continue
        op = later if m > i else earlier
        if cfg.strategy == EDF:
            cmp = f"x[ca[{m}]] - x[ca[{i}]] {op} d[ca[{m}]] - d[ca[{i}]]"
        else:
            cmp = f"prio[q[{i}]] {op} prio[q[{m}]]"
        parts.append(f"(eligible({m}) imply {cmp})")
    return " && ".join(parts)


def build_scheduler(tr: Translation, cfg: SchedulerConfig, name: str = "Scheduler") -> Template:
    """The scheduler template for the translated class ``tr``."""
    table, nm = tr.table, tr.naming
    n_obj = len(tr.cls.params) + 1
    n_lbl = len(table.label_ids)
    boot = [m for m in ("init", "run") if m in table.methods]
    if len(boot) > cfg.max_queue:
        raise SchedulerError(f"queue capacity {cfg.max_queue} cannot hold the start-up tasks")
    d_hi = tr.deadline_range.hi
    decls = _locals(tr, cfg, d_hi)
    params = (E.Param(E.TypeSpec("int", const=True), "self"),)
    locs = [Location(x, x, Urgency.COMMITTED if x in COMMITTED else Urgency.NORMAL)
            for x in LOCATIONS]
    edges: list[Edge] = []

    def edge(src, dst, guard="", sync=None, updates="", tag=""):
        g = E.parse_expr(guard) if guard else E.TRUE
        s = Sync.parse(sync) if sync else None
        u = E.parse_expr_list(updates) if updates else ()
        edges.append(Edge(src, dst, g, s, u, tag))

    # start-up
    if boot:
        upd = []
        for k, m in enumerate(boot):
            upd += [f"q[{k}] = {nm.task(m)}", f"ca[{k}] = {k}", f"counter[{k}] = 1",
                    f"x[{k}] = 0", f"d[{k}] = deadline"]
        upd += [f"tail = {len(boot)}", "run = 0"]
        edge("Init", "Boot", updates=", ".join(upd), tag="t7")
        edge("Boot", "Busy", sync="start[q[0]][self]!", tag="t8")
    else:
        edge("Init", "Idle", tag="t7")

    stable = {"Busy": "Busy", "Blocked": "Blocked", "Stuck": "Select", "Idle": "Ready"}
    for src, dst in stable.items():
        for l in range(n_lbl + 1):
            for m in table.methods:
                for k in range(n_obj):
                    sync = f"invoke[{l}][{nm.task(m)}][self][{k}]?"
                    upd = f"insertInvoke({l}, {nm.task(m)}, {k})"
                    if src == "Idle":
                        upd += ", run = 0"
                    edge(src, dst, "tail < MAX", sync, upd, "t5")
                    edge(src, "Error", "tail == MAX", sync, "", "t10")
        for l in range(1, n_lbl + 1):
            sync = f"reply[{l}][self]?"
            if src == "Blocked":
                edge(src, "Resuming", f"wl == {l}", sync, f"invokeReply({l})", "t6")
                edge(src, "Blocked", f"wl != {l}", sync, f"invokeReply({l})", "t6")
            else:
                edge(src, "Select" if src == "Stuck" else src, "", sync, f"invokeReply({l})", "t6")
        if src != "Idle":
            for i in range(cfg.max_queue):
                edge(src, "Error", f"{i} < tail && x[ca[{i}]] > d[ca[{i}]]", tag="t9")

    for sub, _ in table.starts:
        sync = f"delegate[{nm.task(sub)}][self]?"
        edge("Busy", "Busy", "tail < MAX", sync, f"insertDelegate({nm.task(sub)})", "t4")
        edge("Busy", "Error", "tail == MAX", sync, "", "t10")
    for l in range(1, n_lbl + 1):
        edge("Busy", "WaitSel", "", f"wait[{l}][self]?", f"wl = {l}", "t2")
    edge("WaitSel", "Resuming", "labels[wl][self]", tag="t2")
    edge("WaitSel", "Ready", "!labels[wl][self] && callee() != NONE", updates="startCallee()",
         tag="t2")
    edge("WaitSel", "Blocked", "!labels[wl][self] && callee() == NONE", tag="t2")
    edge("Resuming", "Busy", sync="resume[wl][self]!", updates="wl = 0", tag="t1")
    edge("Ready", "Busy", sync="start[q[run]][self]!", tag="t3")

    edge("Busy", "Select", "", "finish[self]?", "shift()", "t11-13")
    edge("Select", "Resuming", "rsm != NONE", updates="run = rsm, rsm = NONE", tag="t1")
    edge("Select", "Idle", "rsm == NONE && tail == 0", updates="run = 0", tag="t13")
    edge("Select", "Stuck", "rsm == NONE && tail > 0 && !anyEligible()", updates="run = MAX",
         tag="t11")
    for i in range(cfg.max_queue):
        edge("Select", "Ready", f"rsm == NONE && {_pick_guard(cfg, i)}", updates=f"run = {i}",
             tag="t12")
    return Template(name, params, decls, locs, "Init", edges)


def queue_invariant_violations(net, v, inst: str = "sched") -> list[str]:
    """Queue-model invariants checked on a concrete discrete valuation."""
    def arr(name):
        info = net.var(f"{inst}.{name}")
        return v[info.offset: info.offset + info.size]

    q, ca, counter = arr("q"), arr("ca"), arr("counter")
    tail = arr("tail")[0]
    n = len(q)
    out = []
    if not 0 <= tail <= n:
        out.append(f"tail {tail} out of [0, {n}]")
    for i in range(n):
        if (q[i] != -1) != (i < tail):
            out.append(f"q[{i}] = {q[i]} with tail {tail}")
        if i < tail and counter[ca[i]] < 1:
            out.append(f"counter[ca[{i}]] = {counter[ca[i]]} for a live entry")
    if sum(counter) != tail:
        out.append(f"sum of counters {sum(counter)} differs from tail {tail}")
    return out
