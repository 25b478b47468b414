"""Expression, statement and declaration language of the timed-automata backend.

This is the subset of the UPPAAL 4.x modelling language that the translator,
the scheduler builder and the behavioural-interface loader emit: bounded
integers, booleans, clocks, (urgent) channels, multi-dimensional arrays,
C-like functions, ``forall``/``exists`` quantifiers and ``imply``.

The module provides the AST, a recursive-descent parser and a printer that
renders the AST back to UPPAAL concrete syntax.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = -1):
        if pos >= 0:
            message = f"{message} at offset {pos} in {text!r}"
        super().__init__(message)
        self.pos = pos


# --------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Index:
    base: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...] = ()


@dataclass(frozen=True)
class Unary:
    op: str  # '!', '-'
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Cond:
    test: "Expr"
    then: "Expr"
    other: "Expr"


@dataclass(frozen=True)
class Quant:
    kind: str  # 'forall' | 'exists'
    var: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"


@dataclass(frozen=True)
class Assign:
    target: "Expr"
    op: str  # '=', '+=', '-=', '*='
    value: "Expr"


@dataclass(frozen=True)
class IncDec:
    target: "Expr"
    op: str  # '++', '--'


Expr = Union[Int, Bool, Name, Index, Call, Unary, Binary, Cond, Quant, Assign, IncDec]

TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class TypeSpec:
    base: str  # 'int' | 'bool' | 'clock' | 'chan' | 'void'
    lo: Optional[Expr] = None
    hi: Optional[Expr] = None
    const: bool = False
    meta: bool = False
    urgent: bool = False


@dataclass(frozen=True)
class VarDecl:
    type: TypeSpec
    name: str
    dims: tuple[Expr, ...] = ()
    init: Optional[object] = None  # Expr or nested tuple of Expr


# statements (function bodies)

@dataclass(frozen=True)
class Block:
    decls: tuple[VarDecl, ...]
    stmts: tuple["Stmt", ...]


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    other: Optional["Stmt"] = None


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"


@dataclass(frozen=True)
class For:
    init: Optional[Expr]
    cond: Optional[Expr]
    step: Optional[Expr]
    body: "Stmt"


@dataclass(frozen=True)
class ForRange:
    var: str
    lo: Expr
    hi: Expr
    body: "Stmt"


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None


@dataclass(frozen=True)
class Empty:
    pass


Stmt = Union[Block, ExprStmt, If, While, For, ForRange, Return, Empty]


@dataclass(frozen=True)
class Param:
    type: TypeSpec
    name: str
    ref: bool = False


@dataclass(frozen=True)
class FuncDecl:
    ret: TypeSpec
    name: str
    params: tuple[Param, ...]
    body: Block


Decl = Union[VarDecl, FuncDecl]


# --------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*|/\*.*?\*/)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\+\+|--|\+=|-=|\*=|:=|==|!=|<=|>=|&&|\|\||->|[-+*/%<>=!?:;,.()\[\]{}&|])
    """,
    re.VERBOSE | re.DOTALL,
)

KEYWORDS = {
    "int", "bool", "clock", "chan", "void", "const", "meta", "urgent",
    "broadcast", "true", "false", "if", "else", "while", "for", "return",
    "forall", "exists", "imply", "and", "or", "not", "system", "typedef",
}


@dataclass
class Tok:
    kind: str  # 'num', 'id', 'kw', 'op', 'eof'
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group(kind)
            if kind == "id" and val in KEYWORDS:
                kind = "kw"
            toks.append(Tok(kind, val, pos))
        pos = m.end()
    toks.append(Tok("eof", "", len(text)))
    return toks


# --------------------------------------------------------------------------
# parser

_BINARY_LEVELS = [
    ("||", "or"),
    ("&&", "and"),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]
_NORMALISE = {"and": "&&", "or": "||"}


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text in texts

    def accept(self, *texts: str) -> Optional[str]:
        if self.at(*texts):
            t = self.tok.text
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")

    def ident(self) -> str:
        if self.tok.kind != "id":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        t = self.tok.text
        self.i += 1
        return t

    def error(self, msg: str):
        raise ExprSyntaxError(msg, self.text, self.tok.pos)

    def done(self) -> None:
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    # expressions
    def expr(self) -> Expr:
        return self.assignment()

    def assignment(self) -> Expr:
        left = self.conditional()
        op = self.accept("=", ":=", "+=", "-=", "*=")
        if op:
            value = self.assignment()
            return Assign(left, "=" if op == ":=" else op, value)
        return left

    def conditional(self) -> Expr:
        test = self.implication()
        if self.accept("?"):
            then = self.assignment()
            self.expect(":")
            other = self.conditional()
            return Cond(test, then, other)
        return test

    def implication(self) -> Expr:
        left = self.binary(0)
        while self.accept("imply"):
            right = self.binary(0)
            left = Binary("imply", left, right)
        return left

    def binary(self, level: int) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while True:
            op = self.accept(*_BINARY_LEVELS[level])
            if not op:
                return left
            right = self.binary(level + 1)
            left = Binary(_NORMALISE.get(op, op), left, right)

    def unary(self) -> Expr:
        if self.accept("!", "not"):
            return Unary("!", self.unary())
        if self.accept("-"):
            operand = self.unary()
            if isinstance(operand, Int):
                return Int(-operand.value)
            return Unary("-", operand)
        if self.accept("+"):
            return self.unary()
        if self.at("++", "--"):
            op = self.accept("++", "--")
            return IncDec(self.unary(), op)
        if self.at("forall", "exists"):
            kind = self.accept("forall", "exists")
            self.expect("(")
            var = self.ident()
            self.expect(":")
            self.expect("int")
            self.expect("[")
            lo = self.expr()
            self.expect(",")
            hi = self.expr()
            self.expect("]")
            self.expect(")")
            body = self.unary_or_paren_body()
            return Quant(kind, var, lo, hi, body)
        return self.postfix()

    def unary_or_paren_body(self) -> Expr:
        # quantifier bodies extend as far as possible, like UPPAAL
        return self.implication()

    def postfix(self) -> Expr:
        e = self.primary()
        while True:
            if self.accept("["):
                idx = self.expr()
                self.expect("]")
                e = Index(e, idx)
            elif self.at("++", "--") and not self.peek().kind in ("num", "id"):
                e = IncDec(e, self.accept("++", "--"))
            else:
                return e

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Int(int(t.text))
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "id":
            self.i += 1
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                return Call(t.text, tuple(args))
            return Name(t.text)
        self.error(f"unexpected {t.text or 'end of input'!r}")

    # types and declarations
    def at_type(self) -> bool:
        return self.at("int", "bool", "clock", "chan", "void", "const", "meta", "urgent", "broadcast")

    def type_spec(self) -> TypeSpec:
        const = meta = urgent = False
        while True:
            if self.accept("const"):
                const = True
            elif self.accept("meta"):
                meta = True
            elif self.accept("urgent"):
                urgent = True
            elif self.accept("broadcast"):
                self.error("broadcast channels are not supported")
            else:
                break
        base = self.accept("int", "bool", "clock", "chan", "void")
        if not base:
            self.error("expected a type")
        lo = hi = None
        if base == "int" and self.at("["):
            self.expect("[")
            lo = self.expr()
            self.expect(",")
            hi = self.expr()
            self.expect("]")
        return TypeSpec(base, lo, hi, const, meta, urgent)

    def initialiser(self):
        if self.accept("{"):
            items = [self.initialiser()]
            while self.accept(","):
                items.append(self.initialiser())
            self.expect("}")
            return tuple(items)
        return self.conditional()

    def var_decls(self, ts: TypeSpec) -> list[VarDecl]:
        out = []
        while True:
            name = self.ident()
            dims = []
            while self.accept("["):
                dims.append(self.expr())
                self.expect("]")
            init = None
            if self.accept("="):
                init = self.initialiser()
            out.append(VarDecl(ts, name, tuple(dims), init))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def declarations(self) -> list[Decl]:
        out: list[Decl] = []
        while self.tok.kind != "eof" and not self.at("system"):
            ts = self.type_spec()
            if self.tok.kind == "id" and self.peek().text == "(" and self.peek().kind == "op":
                out.append(self.function(ts))
            else:
                out.extend(self.var_decls(ts))
        return out

    def function(self, ret: TypeSpec) -> FuncDecl:
        name = self.ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ts = self.type_spec()
                ref = bool(self.accept("&"))
                params.append(Param(ts, self.ident(), ref))
                if not self.accept(","):
                    break
        self.expect(")")
        return FuncDecl(ret, name, tuple(params), self.block())

    def block(self) -> Block:
        self.expect("{")
        decls: list[VarDecl] = []
        while self.at_type():
            decls.extend(self.var_decls(self.type_spec()))
        stmts = []
        while not self.accept("}"):
            stmts.append(self.statement())
        return Block(tuple(decls), tuple(stmts))

    def statement(self) -> Stmt:
        if self.at("{"):
            return self.block()
        if self.accept(";"):
            return Empty()
        if self.accept("if"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.statement()
            other = self.statement() if self.accept("else") else None
            return If(cond, then, other)
        if self.accept("while"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return While(cond, self.statement())
        if self.accept("for"):
            self.expect("(")
            if self.tok.kind == "id" and self.peek().text == ":":
                var = self.ident()
                self.expect(":")
                self.expect("int")
                self.expect("[")
                lo = self.expr()
                self.expect(",")
                hi = self.expr()
                self.expect("]")
                self.expect(")")
                return ForRange(var, lo, hi, self.statement())
            init = None if self.at(";") else self.expr()
            self.expect(";")
            cond = None if self.at(";") else self.expr()
            self.expect(";")
            step = None if self.at(")") else self.expr()
            self.expect(")")
            return For(init, cond, step, self.statement())
        if self.accept("return"):
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return Return(value)
        e = self.expr()
        self.expect(";")
        return ExprStmt(e)


def parse_expr(text: str) -> Expr:
    p = Parser(text)
    e = p.expr()
    p.done()
    return e


def parse_expr_list(text: str) -> tuple[Expr, ...]:
    """Comma-separated expressions, as used for edge updates."""
    p = Parser(text)
    out = []
    if p.tok.kind != "eof":
        out.append(p.expr())
        while p.accept(","):
            out.append(p.expr())
    p.done()
    return tuple(out)


def parse_declarations(text: str) -> list[Decl]:
    p = Parser(text)
    decls = p.declarations()
    p.done()
    return decls


def parse_params(text: str) -> tuple[Param, ...]:
    """Template parameter list such as ``const int self, const int SPEED``."""
    p = Parser(text)
    out = []
    if p.tok.kind != "eof":
        while True:
            ts = p.type_spec()
            ref = bool(p.accept("&"))
            out.append(Param(ts, p.ident(), ref))
            if not p.accept(","):
                break
    p.done()
    return tuple(out)


def parse_sync(text: str) -> tuple[str, tuple[Expr, ...], str]:
    """``chan[i][j]!`` -> (channel, indices, 'send'|'recv')."""
    text = text.strip()
    if not text or text[-1] not in "!?":
        raise ExprSyntaxError(f"synchronisation must end with ! or ?: {text!r}")
    direction = "send" if text[-1] == "!" else "recv"
    e = parse_expr(text[:-1])
    idx = []
    while isinstance(e, Index):
        idx.append(e.index)
        e = e.base
    if not isinstance(e, Name):
        raise ExprSyntaxError(f"bad channel expression {text!r}")
    return e.id, tuple(reversed(idx)), direction


# --------------------------------------------------------------------------
# printer

_PREC = {
    "imply": 3, "||": 4, "&&": 5, "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7, "+": 8, "-": 8, "*": 9, "/": 9, "%": 9,
}


def _prec(e: Expr) -> int:
    if isinstance(e, (Assign,)):
        return 1
    if isinstance(e, Cond):
        return 2
    if isinstance(e, Quant):
        return 2
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary):
        return 10
    if isinstance(e, Int) and e.value < 0:
        return 10
    return 11


def show(e: Expr) -> str:
    """Render an expression in UPPAAL concrete syntax."""
    if isinstance(e, Int):
        return str(e.value)
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Index):
        return f"{_wrap(e.base, 11)}[{show(e.index)}]"
    if isinstance(e, Call):
        return f"{e.func}({', '.join(show(a) for a in e.args)})"
    if isinstance(e, Unary):
        return f"{e.op}{_wrap(e.operand, 10)}"
    if isinstance(e, Binary):
        p = _PREC[e.op]
        op = " imply " if e.op == "imply" else f" {e.op} "
        # left-associative: right operand needs parens at equal precedence
        return f"{_wrap(e.left, p)}{op}{_wrap(e.right, p + 1)}"
    if isinstance(e, Cond):
        return f"{_wrap(e.test, 3)} ? {show(e.then)} : {_wrap(e.other, 2)}"
    if isinstance(e, Quant):
        return f"{e.kind} ({e.var} : int[{show(e.lo)},{show(e.hi)}]) ({show(e.body)})"
    if isinstance(e, Assign):
        return f"{show(e.target)} {e.op} {show(e.value)}"
    if isinstance(e, IncDec):
        return f"{show(e.target)}{e.op}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: Expr, prec: int) -> str:
    s = show(e)
    return f"({s})" if _prec(e) < prec else s


def show_type(t: TypeSpec) -> str:
    parts = []
    if t.const:
        parts.append("const")
    if t.meta:
        parts.append("meta")
    if t.urgent:
        parts.append("urgent")
    base = t.base
    if t.lo is not None:
        base = f"int[{show(t.lo)},{show(t.hi)}]"
    parts.append(base)
    return " ".join(parts)


def _show_init(init) -> str:
    if isinstance(init, tuple):
        return "{" + ", ".join(_show_init(i) for i in init) + "}"
    return show(init)


def show_decl(d: Decl, indent: str = "") -> str:
    if isinstance(d, VarDecl):
        dims = "".join(f"[{show(x)}]" for x in d.dims)
        init = f" = {_show_init(d.init)}" if d.init is not None else ""
        return f"{indent}{show_type(d.type)} {d.name}{dims}{init};"
    params = ", ".join(
        f"{show_type(p.type)} {'&' if p.ref else ''}{p.name}" for p in d.params
    )
    head = f"{indent}{show_type(d.ret)} {d.name}({params})"
    return head + "\n" + _show_stmt(d.body, indent)


def _show_stmt(s: Stmt, indent: str) -> str:
    inner = indent + "    "
    if isinstance(s, Block):
        lines = [indent + "{"]
        lines += [show_decl(d, inner) for d in s.decls]
        lines += [_show_stmt(x, inner) for x in s.stmts]
        lines.append(indent + "}")
        return "\n".join(lines)
    if isinstance(s, ExprStmt):
        return f"{indent}{show(s.expr)};"
    if isinstance(s, Return):
        return f"{indent}return{' ' + show(s.value) if s.value is not None else ''};"
    if isinstance(s, Empty):
        return f"{indent};"
    if isinstance(s, If):
        out = f"{indent}if ({show(s.cond)})\n{_show_stmt(s.then, inner)}"
        if s.other is not None:
            out += f"\n{indent}else\n{_show_stmt(s.other, inner)}"
        return out
    if isinstance(s, While):
        return f"{indent}while ({show(s.cond)})\n{_show_stmt(s.body, inner)}"
    if isinstance(s, For):
        parts = [show(x) if x is not None else "" for x in (s.init, s.cond, s.step)]
        return f"{indent}for ({parts[0]}; {parts[1]}; {parts[2]})\n{_show_stmt(s.body, inner)}"
    if isinstance(s, ForRange):
        return (f"{indent}for ({s.var} : int[{show(s.lo)},{show(s.hi)}])\n"
                f"{_show_stmt(s.body, inner)}")
    raise TypeError(f"not a statement: {s!r}")


# --------------------------------------------------------------------------
# small utilities

def conj(parts: Sequence[Expr]) -> Expr:
    """Conjunction without trivial ``true`` operands."""
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    if any(p == FALSE for p in parts):
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("&&", out, p)
    return out


def disj(parts: Sequence[Expr]) -> Expr:
    parts = [p for p in parts if p != FALSE]
    if not parts:
        return FALSE
    if any(p == TRUE for p in parts):
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("||", out, p)
    return out


def conjuncts(e: Expr) -> Iterator[Expr]:
    if isinstance(e, Binary) and e.op == "&&":
        yield from conjuncts(e.left)
        yield from conjuncts(e.right)
    elif e != TRUE:
        yield e


def walk(e) -> Iterator[Expr]:
    """Pre-order traversal over an expression tree."""
    yield e
    if isinstance(e, Index):
        yield from walk(e.base)
        yield from walk(e.index)
    elif isinstance(e, Call):
        for a in e.args:
            yield from walk(a)
    elif isinstance(e, Unary):
        yield from walk(e.operand)
    elif isinstance(e, Binary):
        yield from walk(e.left)
        yield from walk(e.right)
    elif isinstance(e, Cond):
        yield from walk(e.test)
        yield from walk(e.then)
        yield from walk(e.other)
    elif isinstance(e, Quant):
        yield from walk(e.lo)
        yield from walk(e.hi)
        yield from walk(e.body)
    elif isinstance(e, Assign):
        yield from walk(e.target)
        yield from walk(e.value)
    elif isinstance(e, IncDec):
        yield from walk(e.target)


def names(e: Expr) -> set[str]:
    """Free identifiers of an expression (quantified variables excluded)."""
    out: set[str] = set()
    _names(e, out, frozenset())
    return out


def _names(e, out: set, bound: frozenset) -> None:
    if isinstance(e, Name):
        if e.id not in bound:
            out.add(e.id)
    elif isinstance(e, Quant):
        _names(e.lo, out, bound)
        _names(e.hi, out, bound)
        _names(e.body, out, bound | {e.var})
    elif isinstance(e, Call):
        out.add(e.func)
        for a in e.args:
            _names(a, out, bound)
    else:
        for child in _children(e):
            _names(child, out, bound)


def _children(e) -> tuple:
    if isinstance(e, Index):
        return (e.base, e.index)
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Cond):
        return (e.test, e.then, e.other)
    if isinstance(e, Assign):
        return (e.target, e.value)
    if isinstance(e, IncDec):
        return (e.target,)
    return ()


def root_name(e: Expr) -> Optional[str]:
    """Variable at the root of an l-value (``a[i][j]`` -> ``a``)."""
    while isinstance(e, Index):
        e = e.base
    return e.id if isinstance(e, Name) else None


def substitute(e: Expr, env: dict[str, Expr]) -> Expr:
    """Replace free names by expressions."""
    if isinstance(e, Name):
        return env.get(e.id, e)
    if isinstance(e, Quant):
        inner = {k: v for k, v in env.items() if k != e.var}
        return Quant(e.kind, e.var, substitute(e.lo, env), substitute(e.hi, env),
                     substitute(e.body, inner))
    if isinstance(e, Index):
        return Index(substitute(e.base, env), substitute(e.index, env))
    if isinstance(e, Call):
        return Call(e.func, tuple(substitute(a, env) for a in e.args))
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.operand, env))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, env), substitute(e.right, env))
    if isinstance(e, Cond):
        return Cond(substitute(e.test, env), substitute(e.then, env), substitute(e.other, env))
    if isinstance(e, Assign):
        return Assign(substitute(e.target, env), e.op, substitute(e.value, env))
    if isinstance(e, IncDec):
        return IncDec(substitute(e.target, env), e.op)
    return e


def const_eval(e: Expr, env: dict[str, int]) -> int:
    """Evaluate a constant expression; raises KeyError on unknown names."""
    if isinstance(e, Int):
        return e.value
    if isinstance(e, Bool):
        return int(e.value)
    if isinstance(e, Name):
        return env[e.id]
    if isinstance(e, Unary):
        v = const_eval(e.operand, env)
        return -v if e.op == "-" else int(not v)
    if isinstance(e, Binary):
        a = const_eval(e.left, env)
        if e.op == "&&":
            return int(bool(a) and bool(const_eval(e.right, env)))
        if e.op == "||":
            return int(bool(a) or bool(const_eval(e.right, env)))
        b = const_eval(e.right, env)
        return _BINOPS[e.op](a, b)
    if isinstance(e, Cond):
        return const_eval(e.then if const_eval(e.test, env) else e.other, env)
    raise KeyError(f"not a constant expression: {show(e)}")


def _cdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


_BINOPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _cdiv,
    "%": lambda a, b: a - _cdiv(a, b) * b,
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
    "imply": lambda a, b: int((not a) or bool(b)),
}
