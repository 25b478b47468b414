from fractions import Fraction

import pytest

from creolta.analysis.compiler import Network
from creolta.analysis.query import NONSCHEDULABLE, SCHEDULABLE, QueryError, check_schedulability, \
    parse_query, render_trace, run_query, trace_to_source
from creolta.io.config import load_config
from creolta.project import build_project

from conftest import MODELS, STRATEGY


@pytest.fixture(scope="module")
def coord(coordinator_cfg):
    osys = build_project(coordinator_cfg).system
    return osys, Network(osys.model)


def test_query_forms(coord):
    osys, net = coord
    assert parse_query("reach line m1:26", osys, net).kind == "reach"
    assert parse_query("reach line coordinator.creol:26", osys, net).kind == "reach"
    assert parse_query("invariant not Error", osys, net).kind == "invariant"
    assert parse_query("reach  Sched.Idle", osys, net).text == "reach Sched.Idle"
    assert parse_query("reach s1[0] && s2[0]", osys, net).kind == "reach"


@pytest.mark.parametrize("text", ["reach line m1:99", "reach Sched.Nowhere", "find Error",
                                  "reach Nobody.l0 +"])
def test_bad_queries(coord, text):
    osys, net = coord
    with pytest.raises(QueryError):
        parse_query(text, osys, net)


def test_line_26_trace(coord):
    osys, net = coord
    r = run_query(net, parse_query("reach line m1:26", osys, net))
    assert r.holds and r.replayed
    steps = trace_to_source(net, osys, r.trace)
    assert steps[0]["source"] == {}
    assert steps[-1]["source"]["m1"]["line"] == 26
    assert steps[-1]["source"]["m1"]["text"].startswith("s1 := false")
    times = [Fraction(s["time"]) for s in steps]
    assert times == sorted(times)


def test_invariant_query_on_coordinator(coord):
    osys, net = coord
    r = run_query(net, parse_query("invariant not Error", osys, net))
    assert r.verdict.kind == "unreachable" and r.holds


def test_single_task_feasible():
    cfg = load_config(MODELS / "single" / "single.toml")
    res = check_schedulability(build_project(cfg).system)
    assert res.verdict == SCHEDULABLE and res.occupancy == 1
    tight = check_schedulability(build_project(cfg.with_constant("DL", 2)).system)
    assert tight.verdict == NONSCHEDULABLE


def test_error_trace_names_missed_task():
    osys = build_project(load_config(STRATEGY / "fcfs.toml")).system
    net = Network(osys.model)
    res = check_schedulability(osys, net=net)
    assert res.verdict == NONSCHEDULABLE and res.cause == "deadline-miss"
    assert res.missed.startswith("quick (deadline 5")
    steps = trace_to_source(net, osys, res.trace)
    assert steps[-1]["scheduler"] == "Error"
    last_queue = steps[-2]["queue"]
    assert any(e["task"] == "quick" and Fraction(e["remaining"]) < 0 for e in last_queue)
    assert "quick" in render_trace(steps)


def test_overflow_is_inconclusive_below_bound(coordinator_cfg):
    osys = build_project(coordinator_cfg.replace(max_queue=2)).system
    res = check_schedulability(osys)
    assert res.verdict == "inconclusive" and res.cause == "overflow"
    assert res.queue_bound == 50


def test_budget_verdict(coordinator_cfg):
    res = check_schedulability(build_project(coordinator_cfg).system, budget=50)
    assert res.verdict == "budget-exhausted"
