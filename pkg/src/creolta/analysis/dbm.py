"""Difference-bound matrices.

A zone over clocks ``x1..xn`` is an ``(n+1) x (n+1)`` int64 matrix ``D`` where
``D[i, j]`` bounds ``x_i - x_j`` and index 0 is the constant-zero reference
clock. Bounds use the usual raw encoding ``(c << 1) | nonstrict``, so
``raw(c, '<=') = 2c + 1`` and ``raw(c, '<') = 2c``; ordering raw values orders
the bounds. ``INF`` means unbounded.

All functions returning a zone return a canonical (shortest-path closed) copy
unless noted; an empty zone has a negative diagonal entry.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

INF = 1 << 40
LE_ZERO = 1
LT_ZERO = 0


def le(c: int) -> int:
    return (c << 1) | 1


def lt(c: int) -> int:
    return c << 1


def bound_of(raw: int) -> tuple[int, bool]:
    """(constant, strict) of a finite raw bound."""
    return raw >> 1, not (raw & 1)


def add_raw(a: int, b: int) -> int:
    if a >= INF or b >= INF:
        return INF
    return a + b - ((a | b) & 1)


def _add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = a + b - ((a | b) & 1)
    return np.where((a >= INF) | (b >= INF), INF, s)


def zero(n: int) -> np.ndarray:
    """All clocks equal to zero; ``n`` counts the reference clock."""
    return np.full((n, n), LE_ZERO, dtype=np.int64)


def universe(n: int) -> np.ndarray:
    """All non-negative valuations."""
    d = np.full((n, n), INF, dtype=np.int64)
    d[0, :] = LE_ZERO
    np.fill_diagonal(d, LE_ZERO)
    return d


def close(d: np.ndarray) -> np.ndarray:
    """Floyd-Warshall closure (returns a new matrix)."""
    d = d.copy()
    n = d.shape[0]
    for k in range(n):
        d = np.minimum(d, _add(d[:, k:k + 1], d[k:k + 1, :]))
    if (np.diagonal(d) < LE_ZERO).any():
        d[0, 0] = -1
    return d


def is_empty(d: np.ndarray) -> bool:
    return bool(d[0, 0] < LE_ZERO)


def is_canonical(d: np.ndarray) -> bool:
    if is_empty(d):
        return True
    return bool(np.array_equal(close(d), d))


def up(d: np.ndarray) -> np.ndarray:
    """Delay successors: drop upper bounds on every clock."""
    d = d.copy()
    d[1:, 0] = INF
    return d


def down(d: np.ndarray) -> np.ndarray:
    """Delay predecessors: relax lower bounds to zero (keeping differences)."""
    d = d.copy()
    n = d.shape[0]
    for j in range(1, n):
        m = LE_ZERO
        for i in range(1, n):
            if d[i, j] < m:
                m = int(d[i, j])
        d[0, j] = m
    return d


def constrain(d: np.ndarray, i: int, j: int, raw: int) -> np.ndarray:
    """Intersect with ``x_i - x_j <raw>``; O(n^2) incremental closure."""
    if raw >= d[i, j]:
        return d
    if add_raw(int(d[j, i]), raw) < LE_ZERO:
        e = d.copy()
        e[0, 0] = -1
        return e
    col = _add(d[:, i:i + 1], np.int64(raw))
    return np.minimum(d, _add(col, d[j:j + 1, :]))


def constrain_all(d: np.ndarray, atoms: Iterable[tuple[int, int, int]]) -> np.ndarray:
    for i, j, raw in atoms:
        d = constrain(d, i, j, raw)
        if d[0, 0] < LE_ZERO:
            return d
    return d


def satisfies(d: np.ndarray, i: int, j: int, raw: int) -> bool:
    """True when some valuation in ``d`` satisfies the atom."""
    return add_raw(int(d[j, i]), raw) >= LE_ZERO


def reset(d: np.ndarray, x: int, value: int = 0) -> np.ndarray:
    d = d.copy()
    pos, neg = le(value), le(-value)
    d[x, :] = _add(np.int64(pos), d[0, :])
    d[:, x] = _add(d[:, 0], np.int64(neg))
    d[x, x] = LE_ZERO
    return d


def free(d: np.ndarray, x: int) -> np.ndarray:
    """Remove every constraint on clock ``x`` (except ``x >= 0``)."""
    d = d.copy()
    d[x, :] = INF
    d[:, x] = d[:, 0]
    d[x, x] = LE_ZERO
    return d


def extrapolate(d: np.ndarray, m: Sequence[int]) -> np.ndarray:
    """Classic max-constant extrapolation (Extra_M); ``m[0]`` is ignored."""
    mv = np.asarray(m, dtype=np.int64)
    upper = ((mv << 1) | 1)[:, None]  # (m_i, <=)
    lower = ((-mv) << 1)[None, :]  # (-m_j, <)
    over = (d > upper) & (d < INF)
    over[0, :] = False
    under = d < lower
    under[:, 0] = False
    np.fill_diagonal(over, False)
    np.fill_diagonal(under, False)
    if not (over.any() or under.any()):
        return d
    d = d.copy()
    d[over] = INF
    d[under] = np.broadcast_to(lower, d.shape)[under]
    return close(d)


def free_many(d: np.ndarray, xs: Sequence[int]) -> np.ndarray:
    """:func:`free` for several clocks at once."""
    d = d.copy()
    xs = list(xs)
    d[xs, :] = INF
    d[:, xs] = d[:, 0:1]
    d[xs, xs] = LE_ZERO
    return d


def includes(big: np.ndarray, small: np.ndarray) -> bool:
    """``small`` is a subset of ``big``."""
    if small[0, 0] < LE_ZERO:
        return True
    return bool((small <= big).all())


def intersects(a: np.ndarray, b: np.ndarray) -> bool:
    return not is_empty(close(np.minimum(a, b)))


def from_constraints(n: int, atoms: Iterable[tuple[int, int, int]]) -> np.ndarray:
    return constrain_all(universe(n), atoms)


def contains_point(d: np.ndarray, point: Sequence) -> bool:
    """Membership of a concrete valuation ``point`` (``point[0]`` must be 0)."""
    if is_empty(d):
        return False
    n = d.shape[0]
    for i in range(n):
        for j in range(n):
            raw = int(d[i, j])
            if raw >= INF or i == j:
                continue
            c, strict = bound_of(raw)
            diff = point[i] - point[j]
            if diff > c or (strict and diff == c):
                return False
    return True


def delay_interval(d: np.ndarray, point: Sequence) -> Optional[tuple]:
    """Delays ``t >= 0`` such that ``point + t`` lies in ``d``.

    Returns ``(lo, lo_strict, hi, hi_strict)`` with ``hi`` possibly ``None``
    (unbounded), or ``None`` when no such delay exists. Only the bounds
    against the reference clock depend on ``t``; differences are checked once.
    """
    n = d.shape[0]
    for i in range(1, n):
        for j in range(1, n):
            if i == j:
                continue
            raw = int(d[i, j])
            if raw >= INF:
                continue
            c, strict = bound_of(raw)
            diff = point[i] - point[j]
            if diff > c or (strict and diff == c):
                return None
    lo, lo_strict = Fraction(0), False
    hi, hi_strict = None, False
    for i in range(1, n):
        raw = int(d[i, 0])  # x_i + t <= c
        if raw < INF:
            c, strict = bound_of(raw)
            cand = Fraction(c) - point[i]
            if hi is None or cand < hi or (cand == hi and strict):
                hi, hi_strict = cand, strict
        raw = int(d[0, i])  # -(x_i + t) <= c
        if raw < INF:
            c, strict = bound_of(raw)
            cand = -Fraction(c) - point[i]
            if cand > lo or (cand == lo and strict):
                lo, lo_strict = cand, strict
    if hi is not None and (hi < lo or (hi == lo and (hi_strict or lo_strict))):
        return None
    return lo, lo_strict, hi, hi_strict


def pick_delay(interval: tuple) -> Fraction:
    """A representative delay from :func:`delay_interval`, preferring small values."""
    lo, lo_strict, hi, hi_strict = interval
    if not lo_strict:
        return lo
    if hi is None:
        return lo + Fraction(1, 2)
    return (lo + hi) / 2


def to_constraints(d: np.ndarray, clock_names: Sequence[str]) -> list[str]:
    """Human readable constraints of a canonical zone."""
    out = []
    n = d.shape[0]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            raw = int(d[i, j])
            if raw >= INF:
                continue
            c, strict = bound_of(raw)
            op = "<" if strict else "<="
            if j == 0:
                out.append(f"{clock_names[i]} {op} {c}")
            elif i == 0:
                if c == 0 and not strict:
                    continue
                out.append(f"{clock_names[j]} {'>' if strict else '>='} {-c}")
            else:
                out.append(f"{clock_names[i]} - {clock_names[j]} {op} {c}")
    return out
