import pytest

from creolta.analysis.compiler import Network
from creolta.analysis.engine import Explorer
from creolta.interface import InterfaceError, compose_environment, constants_of, load_interface, \
    periodic
from creolta.io.tatext import parse_system
from creolta.project import build_project, constant_decls
from creolta.scheduler import SchedulerConfig
from creolta.system import build_system
from creolta.ta import expr as E
from creolta.ta.model import Declarations

CONSTS = "const int SPEED = 25;\nconst int MD = 21;\n"


def iface(body, provides=("m1",), tr=None, name="C1"):
    s = parse_system(CONSTS + f"template {name}(const int self) {{\n  clock x;\n{body}}}\n")
    return load_interface(s.template(name), provides, tr, (0,), s.globals)


C1 = ("  location run init invariant x <= SPEED;\n"
      "  edge run -> run guard x >= SPEED sync invoke[0][op_m1][self][0]! assign deadline = MD, x = 0;\n")


def test_c1_valid(coordinator_tr):
    b = iface(C1, tr=coordinator_tr)
    assert b.name == "C1" and b.provides == frozenset({"m1"})


def test_missing_deadline(coordinator_tr):
    body = C1.replace("deadline = MD, ", "")
    with pytest.raises(InterfaceError, match="input without deadline"):
        iface(body, tr=coordinator_tr)


def test_receiving_provided_method(coordinator_tr):
    body = C1 + "  edge run -> run sync invoke[0][op_m1][0][self]?;\n"
    with pytest.raises(InterfaceError, match="provides"):
        iface(body, tr=coordinator_tr)


def test_input_outside_provided_set(coordinator_tr):
    with pytest.raises(InterfaceError, match="outside the provided set"):
        iface(C1, provides=("m2",), tr=coordinator_tr)


def test_unknown_reply_label(coordinator_tr):
    body = C1 + "  edge run -> run sync reply[2][self]!;\n"
    with pytest.raises(InterfaceError):
        iface(body, tr=coordinator_tr)


def test_nondeterministic_interface(coordinator_tr):
    body = C1 + ("  location other;\n"
                 "  edge run -> other guard x >= SPEED sync invoke[0][op_m1][self][0]! assign deadline = MD;\n")
    with pytest.raises(InterfaceError, match="not deterministic"):
        iface(body, tr=coordinator_tr)


def test_periodic_matches_hand_written(coordinator_tr):
    t = periodic("C1", "m1", coordinator_tr, "SPEED", "MD")
    b = load_interface(t, ("m1",), coordinator_tr, (0,), constant_decls({"SPEED": 25, "MD": 21}))
    [e] = b.template.edges
    assert E.show(e.guard) == "x >= SPEED" and e.sync.show() == "invoke[0][op_m1][self][0]!"
    j = periodic("C1", "m1", coordinator_tr, 25, 21, jitter=2, burst=3)
    assert [l.id for l in j.locations] == ["b0", "b1", "b2", "run"]
    assert E.show(j.location("run").invariant) == "x <= 25 + 2"


def test_composition_counts(coordinator_cfg):
    osys = build_project(coordinator_cfg).system
    names = [i.name for i in osys.model.instances]
    assert len(names) == 10
    assert sum(n.startswith("Env_") for n in names) == 3
    assert sum(n.startswith("M_") for n in names) == 6
    assert compose_environment(osys.interfaces[:1]) == [osys.model.instance("Env_C1")]
    assert compose_environment([]) == []


def test_environments_only_talk_to_the_object(coordinator_cfg):
    osys = build_project(coordinator_cfg).system
    for b in osys.interfaces:
        for e in b.template.edges:
            assert e.sync is None or e.sync.channel in ("invoke", "reply")


def test_closed_object_runs_only_boot_tasks(coordinator_tr):
    osys = build_system(coordinator_tr, SchedulerConfig("edf", 4), [])
    net = Network(osys.model)
    started = set()

    def observe(s):
        if s.via is not None:
            for e in s.via.edges:
                m = osys.method_of_instance(net.instances[e.inst].name)
                if m is not None and e.edge.tag in ("start", "crel-start"):
                    started.add(m)

    Explorer(net, observe=observe).explore()
    assert started == {"init", "run"}


def test_injected_deadlines_in_range(coordinator_cfg):
    proj = build_project(coordinator_cfg)
    lo, hi = proj.translation.deadline_range.lo, proj.translation.deadline_range.hi
    env = constants_of(list(proj.system.model.globals))
    for b in proj.system.interfaces:
        for e in b.template.edges:
            for u in e.updates:
                if E.show(u.target) == "deadline":
                    assert lo <= E.const_eval(u.value, env) <= hi
