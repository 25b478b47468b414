import pytest

from creolta.analysis import dbm as D
from creolta.analysis.compiler import Network
from creolta.analysis.engine import Explorer, Goal, explore, zone_of
from creolta.analysis.oracle import OracleRefused, discrete_oracle
from creolta.analysis.query import _error_goal, check_schedulability, witness
from creolta.io.config import load_config
from creolta.io.tatext import parse_system
from creolta.project import build_project

from conftest import COORD, STRATEGY
from netgen import location_goals, random_network


def at(net, inst, loc):
    k = net.instance_index(inst)
    j = net.instances[k].loc_ids.index(loc)
    return Goal(lambda locs, v: locs[k] == j, text=f"{inst}.{loc}")


def net_of(text):
    return Network(parse_system(text))


def test_invariant_blocks_guard():
    net = net_of("template T() {\n  clock x;\n  location a init invariant x <= 4;\n  location b;\n"
                 "  edge a -> b guard x >= 5;\n}\nsystem P = T();\n")
    goal = at(net, "P", "b")
    assert explore(net, goal).kind == "unreachable"
    assert discrete_oracle(net, goal) is False


def test_two_senders_no_receiver():
    net = net_of("chan a;\ntemplate S() {\n  location l0 init;\n  location l1;\n"
                 "  edge l0 -> l1 sync a!;\n}\nsystem P = S();\nsystem Q = S();\n")
    s0 = Explorer(net).initial()
    assert Explorer(net).successors(s0) == []
    assert not explore(net, at(net, "P", "l1")).reachable


def test_urgent_sync_forbids_delay():
    net = net_of("urgent chan u;\n"
                 "template S() {\n  clock x;\n  location l0 init;\n  location l1;\n  location late;\n"
                 "  edge l0 -> l1 sync u!;\n  edge l0 -> late guard x >= 1;\n}\n"
                 "template R() {\n  location l0 init;\n  location l1;\n  edge l0 -> l1 sync u?;\n}\n"
                 "system P = S();\nsystem Q = R();\n")
    ex = Explorer(net)
    z = zone_of(ex.initial())
    assert D.contains_point(z, [0, 0]) and not D.contains_point(z, [0, 1])
    assert not explore(net, at(net, "P", "late")).reachable
    assert discrete_oracle(net, at(net, "P", "late")) is False


def test_committed_location_goes_first():
    net = net_of("int[0,2] n = 0;\n"
                 "template A() {\n  location c0 init committed;\n  location c1;\n"
                 "  edge c0 -> c1 assign n = 1;\n}\n"
                 "template B() {\n  location l0 init;\n  location bad;\n  edge l0 -> bad guard n == 0;\n}\n"
                 "system P = A();\nsystem Q = B();\n")
    assert not explore(net, at(net, "Q", "bad")).reachable


def test_modeling_error_on_range():
    net = net_of("int[0,2] n = 0;\ntemplate T() {\n  location l init;\n  edge l -> l assign n = n + 1;\n}\n"
                 "system P = T();\n")
    v = explore(net)
    assert v.kind == "modeling-error" and v.trace


def test_budget():
    net = net_of("int[0,50] n = 0;\ntemplate T() {\n  location l init;\n"
                 "  edge l -> l guard n < 50 assign n = n + 1;\n}\nsystem P = T();\n")
    assert explore(net, budget=10).kind == "budget"
    assert explore(net).kind == "unreachable"


def test_oracle_refuses_strict_by_default():
    net = net_of("template T() {\n  clock x;\n  location a init;\n  location b;\n"
                 "  edge a -> b guard x > 2;\n}\nsystem P = T();\n")
    with pytest.raises(OracleRefused):
        discrete_oracle(net, at(net, "P", "b"))
    assert discrete_oracle(net, at(net, "P", "b"), allow_strict=True)


@pytest.mark.parametrize("seed", range(40))
def test_engine_agrees_with_oracle(seed):
    net = Network(random_network(seed))
    for k, j in location_goals(net):
        goal = Goal(lambda locs, v, k=k, j=j: locs[k] == j)
        verdict = Explorer(net).explore(goal)
        assert verdict.reachable == discrete_oracle(net, goal), (seed, k, j)
        if verdict.reachable:
            _, ok, msg = witness(net, verdict, goal)
            assert ok, msg


def test_scheduler_accepts_invoke_when_idle():
    osys = build_project(load_config(STRATEGY / "edf.toml")).system
    net = Network(osys.model)
    ex = Explorer(net)
    sched = net.instance_index(osys.scheduler)
    todo = [ex.initial()]
    for _ in range(50):
        s = todo.pop(0)
        for tr, t in ex.successors(s):
            tags = {e.edge.tag for e in tr.edges}
            if "t5" in tags and net.instances[sched].loc_ids[s.locs[sched]] == "Idle":
                vals = net.describe_vars(t.v)
                q, ca, d = vals["Sched.q"], vals["Sched.ca"], vals["Sched.d"]
                assert vals["Sched.tail"] == 1
                assert q[0] == osys.translation.table.task_ids["busy"] and d[ca[0]] == 20
                return
            todo.append(t)
    pytest.fail("no invoke accepted from Idle")


def test_scaled_coordinator_agrees_with_oracle():
    cfg = load_config(COORD / "coordinator.toml").with_constant("SPEED", 5).with_constant("MD", 5)
    osys = build_project(cfg).system
    net = Network(osys.model)
    res = check_schedulability(osys, 500_000, net)
    oracle = discrete_oracle(net, _error_goal(net, osys.scheduler), allow_strict=True)
    assert res.verdict == "nonschedulable" and oracle is True
    assert res.replayed
