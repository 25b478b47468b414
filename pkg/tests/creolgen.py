"""Random statement sequences over a small Creol class."""
from hypothesis import strategies as st

IFACE = "interface I begin op m end\n"

VARS = ("p", "q")
INTS = ("n",)

bool_expr = st.recursive(
    st.sampled_from(["p", "q", "true", "false", "n < 3", "n == 2"]),
    lambda sub: st.one_of(
        st.builds(lambda a: f"~{a}", sub),
        st.builds(lambda a, b: f"({a} /\\ {b})", sub, sub),
        st.builds(lambda a, b: f"({a} \\/ {b})", sub, sub),
    ),
    max_leaves=4,
)


@st.composite
def annotation(draw):
    if not draw(st.booleans()):
        return ""
    b = draw(st.integers(0, 3))
    w = b + draw(st.integers(0, 3))
    return f" /*@b{b} @w{w}*/"


def simple_stmt():
    return st.one_of(
        st.builds(lambda a: "skip" + a, annotation()),
        st.builds(lambda v, e, a: f"{v} := {e}{a}", st.sampled_from(VARS), bool_expr, annotation()),
        st.builds(lambda a: f"n := n + 1{a}", annotation()),
        st.builds(lambda g, a: f"await {g}{a}", bool_expr, annotation()),
        st.builds(lambda a: "release" + a, annotation()),
        st.builds(lambda d: f"!m() /*@d{d}*/", st.integers(1, 9)),
    )


def stmts(depth):
    if depth == 0:
        return st.lists(simple_stmt(), min_size=1, max_size=3).map("; ".join)
    inner = stmts(depth - 1)
    compound = st.one_of(
        st.builds(lambda g, s: f"if {g} then {s} fi", bool_expr, inner),
        st.builds(lambda g, s, t: f"if {g} then {s} else {t} fi", bool_expr, inner, inner),
        st.builds(lambda g, s: f"while {g} do {s} od", bool_expr, inner),
    )
    return st.lists(st.one_of(simple_stmt(), compound), min_size=1, max_size=3).map("; ".join)


def program(body: str) -> str:
    return (IFACE + "class C implements I begin\n  var p, q : bool\n  var n : int\n"
            f"  op m == {body}\nend\n")


