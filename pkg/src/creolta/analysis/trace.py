"""Concrete traces: extraction from a symbolic path and independent replay."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import dbm
from .compiler import ModelRuntimeError, Network
from .engine import Explorer, Goal, State, Transition


class TraceError(RuntimeError):
    pass


@dataclass
class ConcreteTrace:
    """``delays[i]`` elapses before ``transitions[i]``; ``delays[-1]`` ends at the goal."""

    delays: list[Fraction]
    transitions: list[Transition]
    states: list[tuple] = field(default_factory=list)  # (locs, v, clocks) after each delay

    def total_time(self) -> Fraction:
        return sum(self.delays, Fraction(0))


def _guard_atoms(tr: Transition, v) -> list:
    atoms = []
    for e in tr.edges:
        if e.guard is not None:
            a = e.guard(v)
            if a is None:
                raise TraceError("guard does not hold along the symbolic path")
            atoms.extend(a)
    return atoms


def _resets(tr: Transition, v, meta) -> tuple[tuple, list]:
    w = list(v)
    resets: list = []
    for e in tr.edges:
        if e.update is not None:
            e.update(w, resets)
    for slot, init in meta:
        w[slot] = init
    return tuple(w), resets


def concretise(net: Network, path: list[State], goal: Optional[Goal] = None) -> ConcreteTrace:
    """Turn a symbolic path into timed steps using exact (unabstracted) zones."""
    ex = Explorer(net, exact=True)
    cur = ex.initial()
    exact = [cur]
    trs = [s.via for s in path[1:]]
    for tr in trs:
        nxt = ex.fire(cur, tr, _guard_atoms(tr, cur.v))
        if nxt is None:
            raise TraceError("symbolic path is not realisable without abstraction")
        exact.append(nxt)
        cur = nxt
    last = exact[-1].zone
    if goal is not None and goal.atoms is not None:
        atoms = goal.atoms(exact[-1].v)
        last = dbm.constrain_all(last, atoms or [])
        if dbm.is_empty(last):
            raise TraceError("goal clock constraint not realisable on the exact path")

    # backward: B[i] are the points of exact[i] (after delay) that lead to the goal
    back = [None] * len(exact)
    back[-1] = last
    for i in range(len(exact) - 2, -1, -1):
        s, t, tr = exact[i], exact[i + 1], trs[i]
        target = back[i + 1]
        if ex.may_delay(t.locs, t.v):
            target = dbm.down(target)
            target = ex.invariants(t.locs, t.v, target)
            if target is None:
                raise TraceError("invariant violated in backward step")
        _, resets = _resets(tr, s.v, net.meta)
        final: dict[int, int] = {}
        for x, val in resets:
            final[x] = val
        for x, val in final.items():
            target = dbm.constrain(target, x, 0, dbm.le(val))
            target = dbm.constrain(target, 0, x, dbm.le(-val))
        if dbm.is_empty(target):
            raise TraceError("reset values outside backward set")
        if final:
            target = dbm.free_many(target, list(final))
        z = dbm.constrain_all(s.zone, _guard_atoms(tr, s.v))
        z = dbm.close(np.minimum(z, target))
        if dbm.is_empty(z):
            raise TraceError("empty backward set")
        back[i] = z

    # forward: pick concrete delays
    n = net.nclocks
    point = [Fraction(0)] * n
    delays: list[Fraction] = []
    states = []
    for i, s in enumerate(exact):
        iv = dbm.delay_interval(back[i], point)
        if iv is None:
            raise TraceError(f"no admissible delay at step {i}")
        d = dbm.pick_delay(iv)
        if d and not ex.may_delay(s.locs, s.v):
            raise TraceError(f"time must not pass at step {i}")
        delays.append(d)
        point = [Fraction(0)] + [x + d for x in point[1:]]
        states.append((s.locs, s.v, tuple(point)))
        if i < len(trs):
            _, resets = _resets(trs[i], s.v, net.meta)
            for x, val in resets:
                point[x] = Fraction(val)
    return ConcreteTrace(delays, trs, states)


# --------------------------------------------------------------------------
# replay

def _holds(atoms, point) -> bool:
    for i, j, raw in atoms:
        c, strict = dbm.bound_of(raw)
        diff = point[i] - point[j]
        if diff > c or (strict and diff == c):
            return False
    return True


def _inv_ok(net: Network, locs, v, point) -> bool:
    for k, inst in enumerate(net.instances):
        f = inst.invariants[locs[k]]
        if f is None:
            continue
        atoms = f(v)
        if atoms is None or not _holds(atoms, point):
            return False
    return True


def _time_may_pass(net: Network, locs, v) -> bool:
    for k, inst in enumerate(net.instances):
        if inst.urgency[locs[k]]:
            return False
    offers = {}
    for k, inst in enumerate(net.instances):
        for e in inst.edges[locs[k]]:
            if not e.urgent:
                continue
            if e.guard is not None and e.guard(v) is None:
                continue
            key = e.key if e.key is not None else e.key_fn(v)
            offers.setdefault((key, e.direction), set()).add(k)
    for (key, d), ks in offers.items():
        if d == 1:
            other = offers.get((key, 2), set())
            if other and len(ks | other) > 1:
                return False
    return True


def replay(net: Network, trace: ConcreteTrace, goal: Optional[Goal] = None) -> tuple[bool, str]:
    """Re-execute ``trace`` on concrete valuations; returns (ok, reason)."""
    if len(trace.delays) != len(trace.transitions) + 1:
        return False, "malformed trace"
    locs = [0] * len(net.instances)
    v = list(net.init_vars)
    point = [Fraction(0)] * net.nclocks
    if not _inv_ok(net, locs, v, point):
        return False, "initial state violates an invariant"
    for i, d in enumerate(trace.delays):
        if d < 0:
            return False, f"negative delay at step {i}"
        if d > 0:
            if not _time_may_pass(net, locs, v):
                return False, f"delay not allowed at step {i}"
            point = [Fraction(0)] + [x + d for x in point[1:]]
            if not _inv_ok(net, locs, v, point):
                return False, f"invariant violated after delay at step {i}"
        if i == len(trace.transitions):
            break
        tr = trace.transitions[i]
        committed = [inst.urgency[locs[k]] == 2 for k, inst in enumerate(net.instances)]
        if any(committed) and not any(committed[e.inst] for e in tr.edges):
            return False, f"step {i} ignores a committed location"
        for e in tr.edges:
            if locs[e.inst] != e.src:
                return False, f"step {i}: edge does not start at the current location"
            if e.guard is not None:
                atoms = e.guard(tuple(v))
                if atoms is None or not _holds(atoms, point):
                    return False, f"step {i}: guard does not hold"
        if len(tr.edges) == 2:
            s, r = tr.edges
            ks = s.key if s.key is not None else s.key_fn(tuple(v))
            kr = r.key if r.key is not None else r.key_fn(tuple(v))
            if s.direction != 1 or r.direction != 2 or ks != kr or s.inst == r.inst:
                return False, f"step {i}: channels do not match"
        elif tr.edges[0].direction != 0:
            return False, f"step {i}: synchronising edge fired alone"
        resets: list = []
        try:
            for e in tr.edges:
                if e.update is not None:
                    e.update(v, resets)
        except ModelRuntimeError as exc:
            return False, f"step {i}: {exc}"
        for slot, init in net.meta:
            v[slot] = init
        for x, val in resets:
            point[x] = Fraction(val)
        for e in tr.edges:
            locs[e.inst] = e.dst
        if not _inv_ok(net, locs, v, point):
            return False, f"step {i}: target invariant violated"
    if goal is not None:
        if not goal.test(tuple(locs), tuple(v)):
            return False, "final state does not satisfy the goal"
        if goal.atoms is not None:
            atoms = goal.atoms(tuple(v))
            if atoms is None or not _holds(atoms, point):
                return False, "final clock valuation does not satisfy the goal"
    return True, "ok"
