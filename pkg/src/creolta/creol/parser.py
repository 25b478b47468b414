"""Recursive-descent parser for the timed Creol subset.

Grammar (``[x]`` optional, ``{x}`` repetition)::

    model     := {interface | class}
    interface := 'interface' ID ['(' params ')'] ['inherits' typerefs]
                 'begin' {['with' ID] 'op' ID} 'end'
    class     := 'class' ID ['(' params ')'] 'implements' typerefs
                 'begin' {'var' ID {',' ID} ':' ('int'|'bool')} method {method} 'end'
    method    := ['with' ID] 'op' ID '==' stmts
    stmts     := stmt {';' stmt}
    stmt      := ID ':=' expr | [ID] '!' [(ID|'self') '.'] ID '(' ')' | ID '?'
               | 'release' | 'await' guard | 'skip'
               | 'while' expr 'do' stmts 'od'
               | 'if' expr 'then' stmts ['else' stmts] ('fi'|'end')

Boolean connectives may be written ``/\\`` or ``&&``, ``\\/`` or ``||``,
``~`` or ``!``. Timing directives ``@b<n> @w<n> @d<n>`` are read from the
comments that follow a statement (before or after its ``;``).
"""
from __future__ import annotations

import dataclasses
import re
from typing import Optional

from . import ast as A
from .lexer import CreolSyntaxError, Token, tokenize


class AnnotationError(CreolSyntaxError):
    pass


_DIRECTIVE = re.compile(r"@(\w*)")
_VALID = re.compile(r"([bwd])(\d+)")


def _comment_body(text: str) -> str:
    if text.startswith("/*"):
        return text[2:-2]
    if text.startswith("//"):
        return text[2:]
    return text


def directives(comment: str) -> list[tuple[str, int]]:
    """``(name, value)`` pairs found in one comment; raises on malformed ones."""
    out = []
    for m in _DIRECTIVE.finditer(_comment_body(comment)):
        v = _VALID.fullmatch(m.group(1))
        if v is None:
            raise AnnotationError(f"malformed timing directive {m.group(0)!r}")
        out.append((v.group(1), int(v.group(2))))
    return out


def extract_annotation(comment_text: str) -> A.Timing:
    """Timing annotation from comment text.

    Absent directives default to zero time and no deadline; a lone ``@b``
    also fixes the worst case.
    """
    return _timing(directives(comment_text))


def _timing(pairs: list[tuple[str, int]]) -> A.Timing:
    seen: dict[str, int] = {}
    for name, value in pairs:
        if name in seen:
            raise AnnotationError(f"duplicate directive @{name}")
        seen[name] = value
    if "d" in seen and seen["d"] <= 0:
        raise AnnotationError("deadline must be positive")
    best = seen.get("b", 0)
    worst = seen.get("w", best)
    if best > worst:
        raise AnnotationError(f"best case @b{best} exceeds worst case @w{worst}")
    return A.Timing(best, worst, seen.get("d"))


class Parser:
    def __init__(self, text: str, file: str = ""):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0

    # ------------------------------------------------------------- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: Optional[Token] = None) -> CreolSyntaxError:
        tok = tok or self.tok
        return CreolSyntaxError(message, tok.line, tok.col, self.file)

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        if self.tok.is_(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if not self.tok.is_(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "id":
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}")
        return self.advance()

    def pos(self, t: Token, end: Optional[Token] = None) -> A.Pos:
        return A.Pos(t.line, t.col, (end or t).line)

    # ------------------------------------------------------------- top level
    def model(self) -> A.SourceModel:
        interfaces, classes = [], []
        while self.tok.kind != "eof":
            if self.tok.is_("interface"):
                interfaces.append(self.interface())
            elif self.tok.is_("class"):
                classes.append(self.klass())
            else:
                raise self.error(f"expected 'interface' or 'class', found {self.tok.text!r}")
        return A.SourceModel(tuple(interfaces), tuple(classes), self.file)

    def params(self) -> tuple[A.Param, ...]:
        out = []
        if self.accept("("):
            if not self.tok.is_(")"):
                while True:
                    name = self.ident("parameter name").text
                    self.expect(":")
                    out.append(A.Param(name, self.ident("type name").text))
                    if not self.accept(","):
                        break
            self.expect(")")
        return tuple(out)

    def typerefs(self) -> tuple[A.TypeRef, ...]:
        out = []
        while True:
            name = self.ident("interface name").text
            args = []
            if self.accept("("):
                while True:
                    args.append(self.expr())
                    if not self.accept(","):
                        break
                self.expect(")")
            out.append(A.TypeRef(name, tuple(args)))
            if not self.accept(","):
                return tuple(out)

    def interface(self) -> A.InterfaceDecl:
        start = self.expect("interface")
        name = self.ident("interface name").text
        params = self.params()
        inherits = self.typerefs() if self.accept("inherits") else ()
        self.expect("begin")
        ops = []
        while not self.tok.is_("end"):
            co = None
            if self.accept("with"):
                co = self.ident("cointerface name").text
            self.expect("op")
            ops.append(A.OpSig(self.ident("operation name").text, co))
        end = self.expect("end")
        return A.InterfaceDecl(name, params, inherits, tuple(ops), self.pos(start, end))

    def klass(self) -> A.ClassDecl:
        start = self.expect("class")
        name = self.ident("class name").text
        params = self.params()
        self.expect("implements")
        impl = self.typerefs()
        self.expect("begin")
        vars_ = []
        while self.tok.is_("var"):
            self.advance()
            group = []
            while True:
                t = self.ident("variable name")
                group.append(t)
                if not self.accept(","):
                    break
            self.expect(":")
            if not (self.tok.is_("int") or self.tok.is_("bool")):
                raise self.error("expected 'int' or 'bool'")
            ty = self.advance().text
            vars_.extend(A.VarDecl(t.text, ty, self.pos(t)) for t in group)
        methods = []
        while self.tok.is_("op") or self.tok.is_("with"):
            methods.append(self.method())
        if not methods:
            raise self.error("class needs at least one method")
        end = self.expect("end")
        return A.ClassDecl(name, params, impl, tuple(vars_), tuple(methods), self.pos(start, end))

    def method(self) -> A.MethodDecl:
        start = self.tok
        co = None
        if self.accept("with"):
            co = self.ident("cointerface name").text
        self.expect("op")
        name = self.ident("method name").text
        self.expect("==")
        body = self.stmts()
        return A.MethodDecl(name, body, co, self.pos(start, self.toks[self.i - 1]))

    # ------------------------------------------------------------- statements
    def stmts(self) -> tuple:
        out = []
        s, pairs, last = self.stmt()
        while self.tok.is_(";"):
            semi = self.advance()
            out.append(self._annotate(s, pairs + self._directives(semi), semi))
            s, pairs, last = self.stmt()
        out.append(self._annotate(s, pairs, last))
        return tuple(out)

    def _directives(self, tok: Token) -> list[tuple[str, int]]:
        pairs = []
        for text, line, col in tok.trailing:
            try:
                pairs.extend(directives(text))
            except AnnotationError as exc:
                raise AnnotationError(exc.message, line, col, self.file) from None
        return pairs

    def _annotate(self, s, pairs, tok: Token):
        try:
            ann = _timing(pairs)
        except AnnotationError as exc:
            raise AnnotationError(exc.message, tok.line, tok.col, self.file) from None
        return dataclasses.replace(s, ann=ann)

    def stmt(self):
        """A statement without its annotation, the directives after it, and its last token."""
        start = self.tok
        s = self._stmt_core()
        last = self.toks[self.i - 1]
        s = dataclasses.replace(s, pos=self.pos(start, last))
        return s, self._directives(last), last

    def _stmt_core(self):
        t = self.tok
        if t.is_("skip"):
            self.advance()
            return A.Skip()
        if t.is_("release"):
            self.advance()
            return A.Release()
        if t.is_("await"):
            self.advance()
            if self.tok.is_(";") or self.tok.kind == "eof" or self.tok.is_("end") \
                    or self.tok.is_("od") or self.tok.is_("fi") or self.tok.is_("else"):
                raise self.error("await needs a guard", t)
            return A.Await(self.expr())
        if t.is_("while"):
            self.advance()
            cond = self.expr()
            self.expect("do")
            body = self.stmts()
            self.expect("od")
            return A.While(cond, body)
        if t.is_("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.stmts()
            orelse = ()
            if self.accept("else"):
                orelse = self.stmts()
            if not (self.accept("fi") or self.accept("end")):
                raise self.error("expected 'fi' closing 'if'")
            return A.If(cond, then, orelse)
        if t.is_("!"):
            self.advance()
            return self._call(None)
        if t.kind == "id":
            nxt = self.peek()
            if nxt.is_(":="):
                self.advance()
                self.advance()
                return A.Assign(t.text, self.expr())
            if nxt.is_("?"):
                self.advance()
                self.advance()
                return A.Get(t.text)
            if nxt.is_("!"):
                self.advance()
                self.advance()
                return self._call(t.text)
            raise self.error(f"expected ':=', '!' or '?' after {t.text!r}", nxt)
        found = t.text or "end of input"
        raise self.error(f"expected a statement, found {found!r}")

    def _call(self, label: Optional[str]) -> A.Call:
        if self.tok.is_("self"):
            self.advance()
            self.expect(".")
            target = "self"
        elif self.tok.kind == "id" and self.peek().is_("."):
            target = self.advance().text
            self.advance()
        else:
            target = None
        method = self.ident("method name").text
        self.expect("(")
        self.expect(")")
        return A.Call(label, target, method)

    # ------------------------------------------------------------- expressions
    def expr(self):
        left = self.conj()
        while self.tok.is_("\\/") or self.tok.is_("||"):
            self.advance()
            left = A.BinOp("or", left, self.conj())
        return left

    def conj(self):
        left = self.neg()
        while self.tok.is_("/\\") or self.tok.is_("&&"):
            self.advance()
            left = A.BinOp("and", left, self.neg())
        return left

    def neg(self):
        if self.tok.is_("~") or self.tok.is_("!"):
            self.advance()
            return A.Not(self.neg())
        return self.cmp()

    def cmp(self):
        left = self.sum()
        if self.tok.kind == "op" and self.tok.text in A.CMP_OPS:
            op = self.advance().text
            left = A.BinOp(op, left, self.sum())
        return left

    def sum(self):
        left = self.prod()
        while self.tok.is_("+") or self.tok.is_("-"):
            op = self.advance().text
            left = A.BinOp(op, left, self.prod())
        return left

    def prod(self):
        left = self.unary()
        while self.tok.is_("*"):
            self.advance()
            left = A.BinOp("*", left, self.unary())
        return left

    def unary(self):
        if self.tok.is_("-"):
            self.advance()
            return A.Neg(self.unary())
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return A.Lit(int(t.text))
        if t.is_("true") or t.is_("false"):
            self.advance()
            return A.Lit(t.text == "true")
        if t.kind == "id":
            self.advance()
            if self.tok.is_("?"):
                self.advance()
                return A.Reply(t.text)
            return A.Var(t.text)
        if t.is_("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        found = t.text or "end of input"
        raise self.error(f"expected an expression, found {found!r}")


def parse_model(text: str, file: str = "") -> A.SourceModel:
    return Parser(text, file).model()


def parse_file(path) -> A.SourceModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), str(path))


def parse_stmts(text: str) -> tuple:
    p = Parser(text)
    out = p.stmts()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return out


def parse_expr(text: str):
    p = Parser(text)
    out = p.expr()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return out
