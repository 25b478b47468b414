import pytest

from creolta.analysis.compiler import Network
from creolta.analysis.engine import Explorer
from creolta.creol.parser import parse_model
from creolta.io.config import InterfaceSpec, load_config
from creolta.project import build_project
from creolta.scheduler import SchedulerConfig, SchedulerError, build_scheduler, \
    extract_timing_bounds, queue_bound, queue_invariant_violations
from creolta.translate import translate_model

from conftest import STRATEGY


@pytest.mark.parametrize("d_max, b_min, expected", [(50, 2, 25), (10, 10, 1), (50, 1, 50), (7, 2, 4)])
def test_queue_bound(d_max, b_min, expected):
    assert queue_bound(d_max, b_min) == expected


def test_queue_bound_needs_progress():
    with pytest.raises(SchedulerError):
        queue_bound(10, 0)


def test_coordinator_bounds(coordinator_tr):
    d_max, b_min = extract_timing_bounds(coordinator_tr.templates)
    assert d_max == 50 and b_min == 1
    assert queue_bound(d_max, b_min) >= 7


def test_single_method_b_min():
    tr = translate_model(parse_model("interface I begin op m end\n"
                                     "class C implements I begin op m == skip /*@b3 @w5*/ end"))
    assert extract_timing_bounds(tr.templates) == (0, 3)


def test_m1_b_min(coordinator_tr):
    assert extract_timing_bounds([coordinator_tr.template_for("m1")]) == (0, 1)


def test_fps_needs_priorities(coordinator_tr):
    with pytest.raises(SchedulerError, match="priority"):
        build_scheduler(coordinator_tr, SchedulerConfig("fps", 4))


def test_error_only_via_t9_t10(coordinator_tr):
    for strategy in ("edf", "fcfs"):
        t = build_scheduler(coordinator_tr, SchedulerConfig(strategy, 4))
        assert {e.tag for e in t.edges if e.dst == "Error"} == {"t9", "t10"}
        assert all(e.src != "Error" for e in t.edges)


def test_start_and_resume_urgent(coordinator_tr):
    text = coordinator_tr.declarations.text()
    assert "urgent chan start[" in text and "urgent chan resume[" in text


def test_edf_guard_shape(coordinator_tr):
    t = build_scheduler(coordinator_tr, SchedulerConfig("edf", 3))
    picks = {e.guard for e in t.edges if e.tag == "t12"}
    text = " ".join(sorted(map(str, picks)))
    assert len(picks) == 3
    first = build_scheduler(coordinator_tr, SchedulerConfig("edf", 3, tie="first"))
    assert {e.guard for e in first.edges if e.tag == "t12"} != picks


# start order on the two-task worker -------------------------------------------

def start_order(cfg):
    osys = build_project(cfg).system
    net = Network(osys.model)
    ex = Explorer(net)
    orders = set()
    stack = [(ex.initial(), ())]
    while stack:
        s, seq = stack.pop()
        succ = ex.successors(s)
        if not succ or len(seq) > 10:
            orders.add(seq)
            continue
        for tr, t in succ:
            started = seq
            if any(e.edge.tag in ("t3", "t8") for e in tr.edges):
                callee = next(e for e in tr.edges if e.edge.tag not in ("t3", "t8"))
                started = seq + (osys.method_of_instance(net.instances[callee.inst].name),)
            stack.append((t, started))
    return orders


def worker(strategy, **kw):
    return load_config(STRATEGY / "edf.toml").replace(strategy=strategy, **kw)


def test_fcfs_starts_in_arrival_order():
    assert start_order(worker("fcfs")) <= {("busy", "slow", "quick"), ("busy", "slow")}


def test_edf_starts_earliest_deadline():
    assert start_order(worker("edf")) == {("busy", "quick", "slow")}


def test_fps_follows_priorities():
    assert start_order(worker("fps", priorities={"busy": 3, "slow": 2, "quick": 1})) == \
        {("busy", "quick", "slow")}
    assert ("busy", "slow", "quick") in start_order(
        worker("fps", priorities={"busy": 3, "slow": 1, "quick": 2}))


TIE = """template Arrivals(const int self) {
  clock x;
  location a0 init committed;
  location a1 invariant x <= 1;
  location a2 committed;
  location done;
  edge a0 -> a1 sync invoke[0][op_busy][self][0]! assign deadline = 20, x = 0;
  edge a1 -> a2 guard x >= 1 sync invoke[0][op_slow][self][0]! assign deadline = 10;
  edge a2 -> done sync invoke[0][op_quick][self][0]! assign deadline = 10;
}
"""


@pytest.mark.parametrize("tie, first", [("last", "quick"), ("first", "slow")])
def test_edf_tie_break(tmp_path, tie, first):
    f = tmp_path / "tie.ta"
    f.write_text(TIE)
    cfg = worker("edf", tie=tie,
                 interfaces=(InterfaceSpec(("busy", "slow", "quick"), f, "Arrivals"),))
    [order] = start_order(cfg)
    assert order[:2] == ("busy", first)


# state invariants over reachable states -----------------------------------------

def test_queue_invariants_and_clock_sharing(coordinator_cfg):
    osys = build_project(coordinator_cfg.replace(max_queue=7)).system
    net = Network(osys.model)
    sched = osys.scheduler
    bad = []
    delegations = [0]

    def observe(s):
        bad.extend(queue_invariant_violations(net, s.v, sched))
        if s.via is not None and any(e.edge.tag == "t4" for e in s.via.edges):
            before = net.describe_vars(s.parent.v)
            after = net.describe_vars(s.v)
            k = before[f"{sched}.tail"]
            assert after[f"{sched}.ca"][k] == before[f"{sched}.ca"][before[f"{sched}.run"]]
            delegations[0] += 1

    v = Explorer(net, observe=observe).explore()
    assert v.kind == "unreachable"
    assert bad == []
    assert delegations[0] > 0
