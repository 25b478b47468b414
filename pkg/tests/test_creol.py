import itertools

import pytest
from hypothesis import given, settings, strategies as st

from creolta.creol import ast as A
from creolta.creol.lexer import CreolSyntaxError
from creolta.creol.parser import AnnotationError, extract_annotation, parse_model
from creolta.creol.printer import show_model
from creolta.creol.validate import validate, zero_time_release_points

from creolgen import IFACE, program, stmts

def test_coordinator_shape(coordinator_model):
    [cls] = coordinator_model.classes
    assert [m.name for m in cls.methods] == ["init", "body", "run", "m1", "m2", "m3"]
    assert [v.name for v in cls.vars] == ["s1", "s2", "s3", "sync"]
    assert all(v.type == "bool" for v in cls.vars)
    assert len(coordinator_model.interfaces) == 3


def test_minimal_class():
    m = parse_model("interface I begin op init end\nclass C implements I begin op init == skip end")
    [cls] = m.classes
    assert len(cls.methods) == 1 and cls.vars == ()


def test_await_without_guard():
    with pytest.raises(CreolSyntaxError) as exc:
        parse_model(IFACE + "class C implements I begin op m == await end")
    assert "await" in str(exc.value) and str(exc.value).startswith("2:")


@pytest.mark.parametrize("text, expected", [
    ("/*@b2 @w4*/", A.Timing(2, 4, None)),
    ("/*@b1 @w1 @d10*/", A.Timing(1, 1, 10)),
    ("", A.Timing(0, 0, None)),
    ("/*  @w3   @b1 */", A.Timing(1, 3, None)),
    ("/*@b1*/", A.Timing(1, 1, None)),
    ("// no directives here", A.Timing(0, 0, None)),
])
def test_annotations(text, expected):
    assert extract_annotation(text) == expected


def test_annotation_best_above_worst():
    with pytest.raises(AnnotationError):
        extract_annotation("/*@b5 @w2*/")


def test_coordinator_annotations(coordinator_model):
    run = coordinator_model.classes[0].method("run")
    call = run.body[1]
    assert isinstance(call, A.Call) and call.ann == A.Timing(1, 1, 10)
    init = coordinator_model.classes[0].method("init")
    assert [s.ann for s in init.body][:3] == [A.Timing()] * 3
    assert init.body[3].ann == A.Timing(2, 4, None)


def test_coordinator_has_no_errors(coordinator_model):
    diags = validate(coordinator_model)
    assert not [d for d in diags if d.severity == "error"]


def test_call_missing_deadline():
    diags = validate(parse_model(IFACE + "class C implements I begin op m == !self.m() end"))
    assert any(d.severity == "error" and "call missing deadline" in d.message for d in diags)


def test_zero_time_before_await():
    src = IFACE + "class C implements I begin var b : bool op m == await b; skip /*@b1 @w1*/ end"
    model = parse_model(src)
    assert [d.severity for d in validate(model)] == ["warning"]
    strict = validate(model, strict_await=True)
    assert [(d.severity, d.line, d.col) for d in strict] == [("error", 2, 49)]


def test_zero_time_before_release_is_error():
    model = parse_model(IFACE + "class C implements I begin op m == release end")
    assert any(d.severity == "error" for d in validate(model))


def test_undeclared_interface():
    diags = validate(parse_model("class C implements Nope begin op m == skip end"))
    assert any(d.severity == "error" and "Nope" in d.message for d in diags)


def test_duplicate_method():
    diags = validate(parse_model(IFACE + "class C implements I begin op m == skip op m == skip end"))
    assert any(d.severity == "error" for d in diags)


def test_duplicate_label():
    src = IFACE + ("class C implements I begin op m == t!m() /*@d3*/; t?; skip /*@b1*/ "
                   "op n == t!m() /*@d3*/ end")
    assert any(d.severity == "error" and "label" in d.message for d in validate(parse_model(src)))


def test_print_round_trip(coordinator_model):
    again = parse_model(show_model(coordinator_model))
    assert again.classes == coordinator_model.classes
    assert show_model(again) == show_model(coordinator_model)


@settings(max_examples=150, deadline=None)
@given(stmts(2))
def test_grammar_sentences_parse(body):
    model = parse_model(program(body))
    again = parse_model(show_model(model))
    assert again.classes == model.classes
    for s in A.walk_stmts(model.classes[0].method("m").body):
        assert isinstance(s.ann, A.Timing) and s.ann.best <= s.ann.worst


# zero-time release points against explicit path enumeration

def _paths(body, unroll=2):
    """Every statement sequence through ``body`` with loops unrolled up to ``unroll`` times."""
    if not body:
        yield ()
        return
    head, rest = body[0], body[1:]
    for p in _stmt_paths(head, unroll):
        for q in _paths(rest, unroll):
            yield p + q


def _stmt_paths(s, unroll):
    cond = (("cond", s.ann.best, None),)
    if isinstance(s, A.If):
        for branch in (s.then, s.orelse):
            for p in _paths(branch, unroll):
                yield cond + p
    elif isinstance(s, A.While):
        for k in range(unroll + 1):
            for parts in itertools.product(list(_paths(s.body, unroll)), repeat=k):
                seq = ()
                for p in parts:
                    seq += cond + p
                yield seq + cond
    elif isinstance(s, (A.Await, A.Release)):
        yield (("release", s.ann.best, s.pos),)
    else:
        yield (("time", s.ann.best, None),)


def zero_time_by_enumeration(body) -> set:
    hits = set()
    for path in _paths(body):
        acc = 0
        for kind, b, pos in path:
            if kind == "release":
                if acc + b == 0:
                    hits.add(pos)
                acc = 0
            else:
                acc += b
    return hits


@settings(max_examples=200, deadline=None)
@given(stmts(1))
def test_zero_time_release_points_match_enumeration(body):
    m = parse_model(program(body)).classes[0].method("m")
    assert set(zero_time_release_points(m)) == zero_time_by_enumeration(m.body)
