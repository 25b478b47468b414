import pytest
from hypothesis import given, settings, strategies as st

from creolta.creol import ast as A
from creolta.creol.parser import parse_expr, parse_model
from creolta.io.tatext import show_translation
from creolta.ta import expr as E
from creolta.translate import AbstractionPolicy, TranslationError, collect_helpers, \
    label_reset, translate_class, translate_model
from creolta.translate.abstraction import Abstraction, eval_guard
from creolta.translate.tasks import labels_of, mthds_of

from conftest import COORD
from creolgen import IFACE, program, stmts

TASKS = ["init", "body", "run", "run1", "run2", "m1", "m11", "m12",
         "m2", "m21", "m22", "m3", "m31", "m32"]


def edges(t, tag=None):
    return [e for e in t.edges if tag is None or e.tag == tag]


def show_edge(e):
    return (e.src, e.dst, E.show(e.guard), e.sync.show() if e.sync else "",
            ", ".join(E.show(u) for u in e.updates))


def test_coordinator_tasks(coordinator_tr):
    assert len(coordinator_tr.templates) == 6
    assert coordinator_tr.table.tasks == TASKS
    assert coordinator_tr.table.task_ids == {t: i for i, t in enumerate(TASKS)}


@pytest.mark.parametrize("task, enabler", [
    ("run1", "s1[self] && s2[self] && s3[self]"),
    ("run2", "!s1[self] && !s2[self] && !s3[self]"),
    ("m11", "var_sync[self] && !s1[self]"),
    ("m12", "!var_sync[self]"),
])
def test_enablers(coordinator_tr, task, enabler):
    assert E.show(coordinator_tr.table.enablers[task]) == enabler


def test_golden(coordinator_tr):
    assert show_translation(coordinator_tr) == (COORD / "coordinator.golden").read_text()


def test_translation_is_deterministic(coordinator_model):
    a = show_translation(translate_model(coordinator_model))
    b = show_translation(translate_model(coordinator_model))
    assert a == b


def test_declarations(coordinator_tr):
    text = coordinator_tr.declarations.text()
    for line in ("const int MSG = 14;", "const int nObj = 1;", "const int LBL = 1;",
                 "const int b = 1;"):
        assert line in text
    assert "if (msg == op_run1)\n        return s1[self] && s2[self] && s3[self];" in text


def test_remote_method_numbering():
    src = ("interface I begin op m end\ninterface J begin op p end\n"
           "class C(x : J) implements I begin op m == t!x.p() /*@d5*/ end")
    tr = translate_model(parse_model(src))
    assert tr.table.remote_method_ids == {"p": 0}
    assert tr.table.tasks == ["m"]


def test_single_skip_method():
    tr = translate_model(parse_model(IFACE + "class C implements I begin\n op m == skip /*@b1 @w2*/ end"))
    [t] = tr.templates
    assert t.location_ids() == ["l0", "L3", "u"]
    assert t.location("L3").invariant == E.parse_expr("c <= 2")
    assert [show_edge(e) for e in t.edges] == [
        ("l0", "L3", "true", "start[op_m][self]?", "c = 0"),
        ("L3", "u", "c >= 1", "", "c = 0"),
        ("u", "l0", "true", "finish[self]!", ""),
    ]


def test_zero_time_method():
    tr = translate_model(parse_model(IFACE + "class C implements I begin\n op m == skip end"))
    t = tr.templates[0]
    assert t.location("L3").invariant == E.parse_expr("c <= 0")
    assert E.show(t.edges[1].guard) == "c >= 0"


def test_run_automaton(coordinator_tr):
    t = coordinator_tr.template_for("run")
    got = {show_edge(e) for e in t.edges}
    assert ("L14", "L15", "c >= 1 && (s1[self] && s2[self] && s3[self])", "", "c = 0") in got
    assert ("L14", "u", "c >= 1 && (!s1[self] || !s2[self] || !s3[self])",
            "delegate[op_run1][self]!", "complete[self] = false") in got
    assert ("l0", "L15", "true", "start[op_run1][self]?", "c = 0") in got
    assert ("L15", "L16", "c >= 1", "invoke[b][op_body][self][self]!", "c = 0, deadline = 10") in got
    assert ("L16", "l0", "c >= 0", "wait[b][self]!", "") in got
    assert ("l0", "L17", "true", "resume[b][self]?", "labels[b][self] = false, c = 0") in got
    assert ("L20", "u", "c >= 0", "invoke[0][op_run][self][self]!", "c = 0, deadline = 50") in got


def test_sync_assignment_line_17(coordinator_tr):
    t = coordinator_tr.template_for("run")
    [e] = [e for e in t.edges if e.src == "L17"]
    assert show_edge(e) == ("L17", "L18", "c >= 0", "", "c = 0, var_sync[self] = false")
    assert t.location("L17").invariant == E.parse_expr("c <= 0")


def test_m1_has_two_release_points(coordinator_tr):
    t = coordinator_tr.template_for("m1")
    assert len(edges(t, "crel-delegate")) == 2
    assert coordinator_tr.table.subtasks("m1") == ["m11", "m12"]


def test_while_loop():
    src = IFACE + "class C implements I begin var p : bool\n op m == while p do p := false od /*@b0 @w0*/ end"
    t = translate_model(parse_model(src)).templates[0]
    guards = sorted(E.show(e.guard) for e in t.edges if "p[self]" in E.show(e.guard))
    assert guards == ["c >= 0 && !p[self]", "c >= 0 && p[self]"]


# helpers -------------------------------------------------------------------------

def test_helpers(coordinator_model):
    cls = coordinator_model.classes[0]
    run = cls.method("run")
    assert labels_of(run.body) == ["b"]
    assert set(mthds_of(run.body)) == {"body", "run"}
    labels, methods, tasks, starts = collect_helpers(cls)
    assert labels == ["b"] and tasks == TASKS
    assert [n for n, _ in starts] == [t for t in TASKS if t[-1].isdigit() and t not in ("m1", "m2", "m3")]


@pytest.mark.parametrize("guard, expected", [
    ("t?", ["labels[t][self] = false"]),
    ("b", []),
    ("~(t? /\\ u?)", ["labels[t][self] = false", "labels[u][self] = false"]),
])
def test_label_reset(guard, expected):
    assert [E.show(u) for u in label_reset(parse_expr(guard))] == expected


def _absn(keep_n: bool):
    cls = parse_model(IFACE + "class C implements I begin var sync, s1, p, q : bool\n var n : int\n"
                      " op m == skip end").classes[0]
    policy = AbstractionPolicy.default(cls, ranges={"n": (0, 12)} if keep_n else None)
    return Abstraction(policy, (), lambda v: "var_sync" if v == "sync" else v)


def test_abstract_kept_guard():
    assert E.show(_absn(False).guard(parse_expr("sync /\\ ~s1"))) == "var_sync[self] && !s1[self]"
    assert E.show(_absn(False).guard(parse_expr("t?"))) == "labels[t][self]"


def test_dropped_comparison_is_true_both_ways():
    a = _absn(False)
    assert a.guard(parse_expr("n < 10")) == E.TRUE
    assert a.guard(parse_expr("n < 10"), negate=True) == E.TRUE
    assert a.guard(parse_expr("~(n < 10)")) == E.TRUE


# Abs over-approximates ----------------------------------------------------------

guard_text = st.recursive(
    st.sampled_from(["p", "q", "s1", "sync", "t?", "n < 3", "n == 2", "n >= 1", "true", "false"]),
    lambda sub: st.one_of(
        st.builds(lambda a: f"~{a}", sub),
        st.builds(lambda a, b: f"({a} /\\ {b})", sub, sub),
        st.builds(lambda a, b: f"({a} \\/ {b})", sub, sub),
    ),
    max_leaves=6,
)


def evaluate(e, env):
    """Reference evaluator for abstracted guards (``x[self]`` reads ``env[x]``)."""
    if isinstance(e, E.Bool):
        return e.value
    if isinstance(e, E.Int):
        return e.value
    if isinstance(e, E.Index):
        if isinstance(e.base, E.Index):  # labels[t][self]
            return env["?" + e.base.index.id]
        return env[e.base.id]
    if isinstance(e, E.Unary):
        return not evaluate(e.operand, env)
    a, b = evaluate(e.left, env), evaluate(e.right, env)
    return {"&&": lambda: a and b, "||": lambda: a or b, "<": lambda: a < b,
            "<=": lambda: a <= b, ">": lambda: a > b, ">=": lambda: a >= b,
            "==": lambda: a == b, "!=": lambda: a != b}[e.op]()


valuation = st.fixed_dictionaries({
    "p": st.booleans(), "q": st.booleans(), "s1": st.booleans(), "sync": st.booleans(),
    "?t": st.booleans(), "n": st.integers(-5, 20),
})


@settings(max_examples=400, deadline=None)
@given(guard_text, valuation, st.booleans())
def test_abs_over_approximates(text, env, keep_n):
    g = parse_expr(text)
    a = _absn(keep_n)
    abstract_env = dict(env, var_sync=env["sync"])
    if eval_guard(g, env):
        assert evaluate(a.guard(g), abstract_env)
    else:
        assert evaluate(a.guard(g, negate=True), abstract_env)


# structural invariants on random classes ----------------------------------------

def _clock_atoms(e):
    return [c for c in E.conjuncts(e) if "c" in E.names(c)]


def check_structure(tr):
    cls = tr.cls
    assert len(tr.templates) == len(cls.methods)
    for m, t in zip(cls.methods, tr.templates):
        lines = {s.pos.line for s in A.walk_stmts(m.body)}
        for loc in t.locations:
            if loc.id in ("l0", "u"):
                assert (t.name, loc.id) not in tr.locmap
                continue
            span = tr.locmap[(t.name, loc.id)]
            assert span.method == m.name and span.line in lines
            bound = loc.invariant
            assert isinstance(bound, E.Binary) and bound.op == "<=" and E.show(bound.left) == "c"
        for e in t.edges:
            for atom in _clock_atoms(e.guard):
                assert atom.op == ">=" and E.show(atom.left) == "c" and isinstance(atom.right, E.Int)
            resets = any(E.show(u) == "c = 0" for u in e.updates)
            handoff = e.sync is not None and e.sync.channel in ("delegate", "wait", "finish")
            assert resets or handoff, e.describe()
        for sub in tr.table.subtasks(m.name):
            entry = [e for e in t.edges if e.src == "l0" and e.sync is not None
                     and e.sync.show() == f"start[op_{sub}][self]?"]
            assert len(entry) == 1


def test_coordinator_structure(coordinator_tr):
    check_structure(coordinator_tr)


@settings(max_examples=120, deadline=None)
@given(stmts(2))
def test_random_class_structure(body):
    model = parse_model(program(body))
    cls = model.classes[0]
    policy = AbstractionPolicy.default(cls, ranges={"n": (0, 3)})
    check_structure(translate_class(cls, policy))


def test_subtask_name_collision():
    src = ("interface I begin op m op m1 end\nclass C implements I begin var p : bool\n"
           " op m == await p /*@b1*/ op m1 == skip end")
    with pytest.raises(TranslationError, match="collides"):
        translate_model(parse_model(src))
