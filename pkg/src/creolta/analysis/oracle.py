"""Explicit-state reachability with integer time steps.

Used only to cross-check :mod:`creolta.analysis.engine`. Clock values are
capped at ``horizon``; for networks whose constraints are closed and whose
constants are below the horizon, unit-step semantics decides the same
reachability questions as the dense zone graph.
"""
from __future__ import annotations

from collections import deque
from typing import Optional

from .compiler import Network
from .engine import Goal


class OracleRefused(ValueError):
    pass


def _holds(atoms, clocks, allow_strict: bool) -> bool:
    for i, j, raw in atoms:
        c = raw >> 1
        strict = not (raw & 1)
        if strict and not allow_strict:
            raise OracleRefused("strict clock constraint outside the oracle's fragment")
        diff = clocks[i] - clocks[j]
        if diff > c or (strict and diff == c):
            return False
    return True


class DiscreteOracle:
    def __init__(self, net: Network, horizon: int, allow_strict: bool = False,
                 budget: int = 2_000_000):
        need = max(net.max_const) + 1 if net.max_const else 1
        if horizon < need:
            raise OracleRefused(f"horizon {horizon} below max constant + 1 = {need}")
        self.net = net
        self.h = horizon
        self.allow_strict = allow_strict
        self.budget = budget

    def _inv(self, locs, v, clocks) -> bool:
        for k, inst in enumerate(self.net.instances):
            f = inst.invariants[locs[k]]
            if f is None:
                continue
            atoms = f(v)
            if atoms is None or not _holds(atoms, clocks, self.allow_strict):
                return False
        return True

    def _can_wait(self, locs, v) -> bool:
        insts = self.net.instances
        if any(inst.urgency[locs[k]] for k, inst in enumerate(insts)):
            return False
        snd, rcv = {}, {}
        for k, inst in enumerate(insts):
            for e in inst.edges[locs[k]]:
                if not e.urgent:
                    continue
                if e.guard is not None and e.guard(v) is None:
                    continue
                key = e.key if e.key is not None else e.key_fn(v)
                (snd if e.direction == 1 else rcv).setdefault(key, set()).add(k)
        return not any(k in rcv and len(ks | rcv[k]) > 1 for k, ks in snd.items())

    def _moves(self, locs, v, clocks):
        insts = self.net.instances
        committed = [inst.urgency[locs[k]] == 2 for k, inst in enumerate(insts)]
        anyc = any(committed)
        enabled = []
        for k, inst in enumerate(insts):
            for e in inst.edges[locs[k]]:
                if e.guard is not None:
                    atoms = e.guard(v)
                    if atoms is None or not _holds(atoms, clocks, self.allow_strict):
                        continue
                enabled.append(e)
        moves = [(e,) for e in enabled if e.direction == 0 and (not anyc or committed[e.inst])]
        for s in enabled:
            if s.direction != 1:
                continue
            ks = s.key if s.key is not None else s.key_fn(v)
            for r in enabled:
                if r.direction != 2 or r.inst == s.inst:
                    continue
                kr = r.key if r.key is not None else r.key_fn(v)
                if ks == kr and (not anyc or committed[s.inst] or committed[r.inst]):
                    moves.append((s, r))
        return moves

    def _apply(self, locs, v, clocks, move):
        w = list(v)
        resets: list = []
        for e in move:
            if e.update is not None:
                e.update(w, resets)
        for slot, init in self.net.meta:
            w[slot] = init
        c = list(clocks)
        for x, val in resets:
            c[x] = min(val, self.h)
        l2 = list(locs)
        for e in move:
            l2[e.inst] = e.dst
        return tuple(l2), tuple(w), tuple(c)

    def reachable(self, goal: Goal) -> bool:
        n = self.net.nclocks
        start = (tuple(0 for _ in self.net.instances), tuple(self.net.init_vars), (0,) * n)
        if not self._inv(*start):
            return False
        seen = {start}
        todo = deque([start])
        while todo:
            locs, v, clocks = todo.popleft()
            if goal.test(locs, v):
                atoms = goal.atoms(v) if goal.atoms else []
                if atoms is not None and _holds(atoms, clocks, self.allow_strict):
                    return True
            succ = []
            for move in self._moves(locs, v, clocks):
                nxt = self._apply(locs, v, clocks, move)
                if self._inv(*nxt):
                    succ.append(nxt)
            if self._can_wait(locs, v):
                c = (0,) + tuple(min(x + 1, self.h) for x in clocks[1:])
                if self._inv(locs, v, c):
                    succ.append((locs, v, c))
            for s in succ:
                if s not in seen:
                    seen.add(s)
                    if len(seen) > self.budget:
                        raise OracleRefused("oracle state budget exhausted")
                    todo.append(s)
        return False


def discrete_oracle(net: Network, goal: Goal, horizon: Optional[int] = None,
                    allow_strict: bool = False) -> bool:
    if horizon is None:
        horizon = max(net.max_const) + 1 if net.max_const else 1
    return DiscreteOracle(net, horizon, allow_strict).reachable(goal)
