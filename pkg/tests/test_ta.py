import itertools

import pytest
from hypothesis import given, settings, strategies as st

from creolta.io.tatext import parse_system, show_system
from creolta.io.uppaal import from_xml, to_xml
from creolta.ta import expr as E
from creolta.ta.checks import check_deterministic, well_formed
from creolta.ta.model import Declarations, Instance, ModelError, SystemModel, TemplateBuilder, \
    ge, le

from netgen import random_network

TWO_EDGES = """chan a;
template T() {{
  clock x;
  location l0 init;
  location l1;
  location l2;
  edge l0 -> l1 guard {g1} sync a!;
  edge l0 -> l2 guard {g2} sync a!;
}}
system P = T();
"""


def test_disjoint_guards_deterministic():
    s = parse_system(TWO_EDGES.format(g1="x < 5", g2="x >= 5"))
    assert check_deterministic(s.template("T"), s.globals) == (True, None)


def test_overlapping_guards_witness():
    s = parse_system(TWO_EDGES.format(g1="x < 5", g2="x < 7"))
    ok, witness = check_deterministic(s.template("T"), s.globals)
    assert not ok
    assert {e.dst for e in witness} == {"l1", "l2"}


def test_interface_c1_deterministic(coordinator_cfg):
    from creolta.project import build_project
    osys = build_project(coordinator_cfg).system
    for b in osys.interfaces:
        assert check_deterministic(b.template, osys.model.globals, {"self": 0})[0], b.name


# brute-force determinism on integer points ------------------------------------

CLOCKS = ("x", "y")
OPS = {"<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b, "==": lambda a, b: a == b}

atom = st.tuples(st.sampled_from(CLOCKS + ("n",)), st.sampled_from(sorted(OPS)), st.integers(0, 4))
guard = st.lists(atom, max_size=3)


def _text(g):
    return " && ".join(f"{v} {op} {c}" for v, op, c in g) or "true"


def _holds(g, point):
    return all(OPS[op](point[v], c) for v, op, c in g)


@settings(max_examples=300, deadline=None)
@given(guard, guard, st.booleans())
def test_determinism_matches_brute_force(g1, g2, same_action):
    text = ("int[0,2] n = 0;\nchan a;\nchan b;\n"
            "template T() {\n  clock x, y;\n  location l0 init;\n  location l1;\n"
            f"  edge l0 -> l1 guard {_text(g1)} sync a!;\n"
            f"  edge l0 -> l1 guard {_text(g2)} sync {'a' if same_action else 'b'}!;\n"
            "}\nsystem P = T();\n")
    s = parse_system(text)
    got, _ = check_deterministic(s.template("T"), s.globals)
    overlap = any(
        _holds(g1, p) and _holds(g2, p)
        for x, y, n in itertools.product(range(6), range(6), range(3))
        for p in [{"x": x, "y": y, "n": n}]
    )
    assert got == (not (same_action and overlap))


# well-formedness -------------------------------------------------------------

def test_undeclared_clock_named():
    s = parse_system("template U() {\n  location l0 init;\n  edge l0 -> l0 guard y >= 2;\n}\n"
                     "system Q = U();\n")
    diags = well_formed(s)
    assert diags and "'y'" in diags[0].message


def test_wrong_arity():
    s = parse_system("template U() {\n  location l0 init;\n}\nsystem Q = U(3);\n")
    assert any("argument" in d.message for d in well_formed(s))


def test_well_formed_idempotent(coordinator_cfg):
    from creolta.project import build_project
    model = build_project(coordinator_cfg).system.model
    before = show_system(model)
    assert well_formed(model) == [] == well_formed(model)
    assert show_system(model) == before


# builder ----------------------------------------------------------------------

def test_duplicate_location():
    b = TemplateBuilder("T")
    b.add_location("a", initial=True)
    with pytest.raises(ModelError, match="duplicate"):
        b.add_location("a")


def test_no_initial_location():
    with pytest.raises(ModelError, match="no initial location"):
        TemplateBuilder("T").finalize()


def test_edge_to_unknown_location():
    b = TemplateBuilder("T")
    b.add_location("a", initial=True)
    with pytest.raises(ModelError):
        b.add_edge("a", "b")


def test_skip_method_automaton():
    glob = Declarations.parse("const int MSG = 1;\nconst int nObj = 1;\nconst int op_m = 0;\n"
                              "urgent chan start[MSG + 1][nObj];\nchan finish[nObj];\n"
                              "chan go[nObj];\n")
    b = TemplateBuilder("C_m", "const int self")
    b.declare("clock c;")
    b.add_location("l0", initial=True)
    b.add_location("a", invariant=le("c", 2))
    b.add_location("u", urgency="urgent")
    b.add_edge("l0", "a", sync="start[op_m][self]?", updates="c = 0")
    b.add_edge("a", "u", guard=ge("c", 1), updates="c = 0")
    b.add_edge("u", "l0", sync="finish[self]!")
    t = b.finalize(glob)
    drv = TemplateBuilder("Drv")
    drv.add_location("s", initial=True)
    drv.add_edge("s", "s", sync="start[op_m][0]!")
    drv.add_edge("s", "s", sync="finish[0]?")
    sysm = SystemModel([t, drv.finalize(glob)], glob, [Instance("M", "C_m", (0,)), Instance("D", "Drv")])
    assert well_formed(sysm) == []


# textual and XML forms ----------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_text_and_xml_round_trip(seed):
    s = random_network(seed)
    text = show_system(s)
    assert show_system(parse_system(text)) == text
    assert show_system(from_xml(to_xml(s))) == text


@pytest.mark.parametrize("src", [
    "a && (b || !c)",
    "x[i + 1][j] <= 3 - y",
    "f(1, 2) ? a : b",
    "forall (i : int[0,3]) q[i] == 0",
    "-(a - b) % 4",
])
def test_expression_round_trip(src):
    e = E.parse_expr(src)
    assert E.parse_expr(E.show(e)) == e
