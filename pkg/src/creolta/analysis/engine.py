"""Symbolic reachability over a compiled :class:`~creolta.analysis.compiler.Network`.

States are delay-closed: a stored zone already contains every valuation
reachable by letting time pass in its location vector. Exploration is
breadth-first over a stable transition order, so the first trace found to a
goal is shortest in the number of discrete steps.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dbm
from .compiler import EdgeRT, ModelRuntimeError, Network

DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class Transition:
    edges: tuple[EdgeRT, ...]  # one internal edge, or (sender, receiver)

    def describe(self, net: Network) -> str:
        parts = []
        for e in self.edges:
            inst = net.instances[e.inst]
            parts.append(f"{inst.name}: {inst.loc_ids[e.src]} -> {inst.loc_ids[e.dst]}"
                         + (f" [{_edge_label(e)}]" if _edge_label(e) else ""))
        return " || ".join(parts)


def _edge_label(e: EdgeRT) -> str:
    ed = e.edge
    bits = []
    if ed.sync is not None:
        bits.append(ed.sync.show())
    if ed.tag:
        bits.append(ed.tag)
    return ", ".join(bits)


class State:
    __slots__ = ("locs", "v", "zone", "parent", "via", "depth")

    def __init__(self, locs, v, zone, parent=None, via=None, depth=0):
        self.locs = locs
        self.v = v
        self.zone = zone
        self.parent = parent
        self.via = via
        self.depth = depth

    def path(self) -> list["State"]:
        out = []
        s = self
        while s is not None:
            out.append(s)
            s = s.parent
        return out[::-1]


@dataclass
class Goal:
    """Predicate on the discrete part, optionally refined by clock atoms."""

    test: Callable[[tuple, tuple], bool]
    atoms: Optional[Callable[[tuple], Optional[list]]] = None
    text: str = ""


@dataclass
class Verdict:
    kind: str  # 'reachable' | 'unreachable' | 'budget' | 'modeling-error'
    states: int
    seconds: float
    trace: Optional[list[State]] = None
    message: str = ""
    failed: Optional[Transition] = None
    stats: dict = field(default_factory=dict)

    @property
    def reachable(self) -> bool:
        return self.kind == "reachable"


class Explorer:
    def __init__(self, net: Network, budget: int = DEFAULT_BUDGET,
                 observe: Optional[Callable[[State], None]] = None, exact: bool = False):
        self.net = net
        self.exact = exact
        self.budget = budget
        self.observe = observe
        self.n = net.nclocks
        self.max_const = list(net.max_const)
        self._meta = list(net.meta)
        self._scalar = sorted(net._scalar_clocks)
        self._urgent_edges = [
            [[e for e in lst if e.urgent] for lst in inst.edges] for inst in net.instances
        ]

    # ------------------------------------------------------------------ helpers
    def invariants(self, locs, v, z):
        for k, inst in enumerate(self.net.instances):
            f = inst.invariants[locs[k]]
            if f is None:
                continue
            atoms = f(v)
            if atoms is None:
                return None
            if atoms:
                z = dbm.constrain_all(z, atoms)
                if z[0, 0] < 1:
                    return None
        return z

    def may_delay(self, locs, v) -> bool:
        insts = self.net.instances
        for k, inst in enumerate(insts):
            if inst.urgency[locs[k]]:
                return False
        sends: dict = {}
        recvs: dict = {}
        for k in range(len(insts)):
            for e in self._urgent_edges[k][locs[k]]:
                if e.guard is not None and e.guard(v) is None:
                    continue
                key = e.key if e.key is not None else e.key_fn(v)
                (sends if e.direction == 1 else recvs).setdefault(key, set()).add(k)
        for key, ks in sends.items():
            ls = recvs.get(key)
            if ls and (len(ks | ls) > 1):
                return False
        return True

    def _normalise(self, locs, v, z):
        """Free dead clocks and extrapolate."""
        if self.exact:
            return z
        net = self.net
        dead = []
        if self._scalar:
            live = set()
            for k, inst in enumerate(net.instances):
                live |= inst.live[locs[k]]
            dead = [c for c in self._scalar if c not in live]
        for f in net.inactive_fns:
            dead.extend(f(v))
        if dead:
            z = dbm.free_many(z, dead)
        return dbm.extrapolate(z, self.max_const)

    def _close_delay(self, locs, v, z):
        if self.may_delay(locs, v):
            z = dbm.up(z)
            z = self.invariants(locs, v, z)
            if z is None:
                return None
        return self._normalise(locs, v, z)

    def initial(self) -> State:
        net = self.net
        locs = tuple(0 for _ in net.instances)
        v = tuple(net.init_vars)
        z = self.invariants(locs, v, dbm.zero(self.n))
        if z is None:
            raise ModelRuntimeError("initial state violates an invariant")
        z = self._close_delay(locs, v, z)
        return State(locs, v, z)

    # ------------------------------------------------------------------ successors
    def transitions(self, s: State) -> list[tuple[Transition, list]]:
        """Enabled transitions (discrete part) with their clock guard atoms."""
        net = self.net
        v = s.v
        committed = [inst.urgency[s.locs[k]] == 2 for k, inst in enumerate(net.instances)]
        any_committed = any(committed)
        internal = []
        sends: dict = {}
        recvs: dict = {}
        for k, inst in enumerate(net.instances):
            for e in inst.edges[s.locs[k]]:
                atoms = e.guard(v) if e.guard is not None else []
                if atoms is None:
                    continue
                if e.direction == 0:
                    if not any_committed or committed[k]:
                        internal.append((Transition((e,)), atoms))
                    continue
                key = e.key if e.key is not None else e.key_fn(v)
                (sends if e.direction == 1 else recvs).setdefault(key, []).append((e, atoms))
        out = internal
        for key in sorted(sends):
            rs = recvs.get(key)
            if not rs:
                continue
            for se, sa in sends[key]:
                for re, ra in rs:
                    if se.inst == re.inst:
                        continue
                    if any_committed and not (committed[se.inst] or committed[re.inst]):
                        continue
                    out.append((Transition((se, re)), sa + ra))
        return out

    def fire(self, s: State, tr: Transition, atoms: list) -> Optional[State]:
        z = dbm.constrain_all(s.zone, atoms) if atoms else s.zone
        if z[0, 0] < 1:
            return None
        v = list(s.v)
        resets: list = []
        for e in tr.edges:
            if e.update is not None:
                e.update(v, resets)
        for slot, init in self._meta:
            v[slot] = init
        v = tuple(v)
        locs = list(s.locs)
        for e in tr.edges:
            locs[e.inst] = e.dst
        locs = tuple(locs)
        if resets:
            z = z.copy()
            for x, val in resets:
                if val < 0:
                    raise ModelRuntimeError(f"negative clock reset value {val}")
                z = dbm.reset(z, x, val)
        z = self.invariants(locs, v, z)
        if z is None:
            return None
        z = self._close_delay(locs, v, z)
        if z is None:
            return None
        return State(locs, v, z, s, tr, s.depth + 1)

    def successors(self, s: State) -> list[tuple[Transition, State]]:
        out = []
        for tr, atoms in self.transitions(s):
            t = self.fire(s, tr, atoms)
            if t is not None:
                out.append((tr, t))
        return out

    # ------------------------------------------------------------------ search
    def _hit(self, goal: Goal, s: State) -> bool:
        if not goal.test(s.locs, s.v):
            return False
        if goal.atoms is None:
            return True
        atoms = goal.atoms(s.v)
        if atoms is None:
            return False
        return not dbm.is_empty(dbm.constrain_all(s.zone, atoms))

    def explore(self, goal: Optional[Goal] = None) -> Verdict:
        """Breadth-first search; with ``goal=None`` the whole graph is built."""
        t0 = time.perf_counter()
        passed: dict = {}
        count = 0
        try:
            init = self.initial()
        except ModelRuntimeError as exc:
            return Verdict("modeling-error", 0, time.perf_counter() - t0, [], str(exc))
        waiting = deque([init])
        passed[(init.locs, init.v)] = [init.zone]
        count = 1
        if self.observe:
            self.observe(init)
        if goal is not None and self._hit(goal, init):
            return Verdict("reachable", count, time.perf_counter() - t0, init.path())
        while waiting:
            s = waiting.popleft()
            try:
                trs = self.transitions(s)
            except ModelRuntimeError as exc:
                return Verdict("modeling-error", count, time.perf_counter() - t0, s.path(), str(exc))
            for tr, atoms in trs:
                try:
                    t = self.fire(s, tr, atoms)
                except ModelRuntimeError as exc:
                    return Verdict("modeling-error", count, time.perf_counter() - t0, s.path(),
                                   str(exc), failed=tr)
                if t is None:
                    continue
                key = (t.locs, t.v)
                zones = passed.get(key)
                if zones is None:
                    passed[key] = [t.zone]
                else:
                    tz = t.zone
                    if any((tz <= z).all() for z in zones):
                        continue
                    zones[:] = [z for z in zones if not (z <= tz).all()]
                    zones.append(tz)
                count += 1
                if self.observe:
                    self.observe(t)
                if goal is not None and self._hit(goal, t):
                    return Verdict("reachable", count, time.perf_counter() - t0, t.path())
                if count >= self.budget:
                    return Verdict("budget", count, time.perf_counter() - t0,
                                   message=f"state budget of {self.budget} exhausted")
                waiting.append(t)
        return Verdict("unreachable", count, time.perf_counter() - t0,
                       stats={"keys": len(passed)})


def explore(net: Network, goal: Optional[Goal] = None, budget: int = DEFAULT_BUDGET,
            observe=None) -> Verdict:
    return Explorer(net, budget, observe).explore(goal)


def zone_of(state: State) -> np.ndarray:
    return state.zone
