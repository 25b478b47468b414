import itertools
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from creolta.analysis import dbm as D


def make(n, atoms):
    d = D.universe(n + 1)
    for i, j, c, strict in atoms:
        d = D.constrain(d, i, j, D.lt(c) if strict else D.le(c))
    return d


def satisfies(atoms, p):
    for i, j, c, strict in atoms:
        diff = p[i] - p[j]
        if diff > c or (strict and diff == c):
            return False
    return True


@st.composite
def zones(draw, max_clocks=3):
    n = draw(st.integers(1, max_clocks))
    idx = st.integers(0, n)
    atom = st.tuples(idx, idx, st.integers(-4, 4), st.booleans()).filter(lambda a: a[0] != a[1])
    return n, draw(st.lists(atom, max_size=5))


quarter = st.integers(0, 40).map(lambda k: Fraction(k, 4))


@settings(max_examples=1000, deadline=None)
@given(zones(), st.lists(quarter, min_size=3, max_size=3), st.sampled_from([0, Fraction(1, 2), 3]))
def test_zone_algebra(z, coords, t):
    n, atoms = z
    p = [Fraction(0)] + coords[:n]
    d = make(n, atoms)
    if D.is_empty(d):
        assert D.is_empty(D.close(d))
    else:
        assert np.array_equal(D.close(d), d)
        assert np.array_equal(D.close(D.close(d)), D.close(d))
    inside = satisfies(atoms, p)
    assert D.contains_point(d, p) == inside
    if inside:
        assert not D.is_empty(d)
    if D.is_empty(d):
        return
    u = D.up(d)
    assert D.is_canonical(u) and D.includes(u, d)
    for x in range(1, n + 1):
        r = D.reset(d, x)
        assert D.is_canonical(r)
        if inside:
            q = list(p)
            q[x] = Fraction(0)
            assert D.contains_point(r, q)
    if inside:
        assert D.contains_point(u, [Fraction(0)] + [v + t for v in p[1:]])
    extra = (1, 0, 2, False)
    c = D.constrain(d, 1, 0, D.le(2))
    assert D.is_empty(c) or D.is_canonical(c)
    assert D.contains_point(c, p) == (inside and satisfies([extra], p))
    m = [0] + [4] * n
    assert D.includes(D.extrapolate(d, m), d)


@settings(max_examples=300, deadline=None)
@given(zones(max_clocks=2))
def test_emptiness_matches_grid(z):
    n, atoms = z
    grid = [Fraction(k, 4) for k in range(0, 49)]
    witness = any(satisfies(atoms, (0,) + pt) for pt in itertools.product(grid, repeat=n))
    assert D.is_empty(make(n, atoms)) == (not witness)


def test_up_of_origin():
    u = D.up(D.zero(3))
    assert D.contains_point(u, [0, 2, 2]) and not D.contains_point(u, [0, 2, 3])
    assert u[1, 2] == D.le(0) and u[2, 1] == D.le(0) and u[1, 0] == D.INF


def test_reset_one_clock():
    d = D.from_constraints(3, [(1, 0, D.le(5)), (0, 1, D.le(-5)), (2, 0, D.le(5)), (0, 2, D.le(-5))])
    r = D.reset(d, 1)
    assert D.contains_point(r, [0, 0, 5])
    assert not D.contains_point(r, [0, 0, 4]) and not D.contains_point(r, [0, 1, 5])


def test_includes():
    small = D.from_constraints(2, [(1, 0, D.le(3))])
    big = D.from_constraints(2, [(1, 0, D.le(5))])
    assert D.includes(big, small) and not D.includes(small, big)
    for k in range(0, 25):
        x = Fraction(k, 4)
        assert D.contains_point(small, [0, x]) <= D.contains_point(big, [0, x])


def test_delay_interval():
    d = D.from_constraints(2, [(1, 0, D.le(5)), (0, 1, D.lt(-2))])
    lo, lo_strict, hi, hi_strict = D.delay_interval(d, [0, Fraction(1)])
    assert (lo, lo_strict, hi, hi_strict) == (1, True, 4, False)
    assert D.pick_delay((lo, lo_strict, hi, hi_strict)) == Fraction(5, 2)
