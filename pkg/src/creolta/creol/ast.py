"""Syntax tree of the timed Creol subset.

Source positions are carried on every node but excluded from equality, so two
trees parsed from differently formatted text compare equal when they have the
same structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Pos:
    line: int = 0
    col: int = 0
    end_line: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOPOS = Pos()


def _pos():
    return field(default=NOPOS, compare=False, repr=False)


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Lit:
    value: Union[bool, int]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Reply:
    """``t?`` used as a guard."""
    label: str


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # and or == != < <= > >= + - *
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, Var, Reply, Not, Neg, BinOp]

BOOL_OPS = ("and", "or")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*")


def expr_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, (Not, Neg)):
        return expr_vars(e.operand)
    if isinstance(e, BinOp):
        return expr_vars(e.left) | expr_vars(e.right)
    return set()


def expr_replies(e: Expr) -> list[str]:
    """Labels tested in ``e`` in left-to-right order, without duplicates."""
    out: list[str] = []

    def go(x):
        if isinstance(x, Reply):
            if x.label not in out:
                out.append(x.label)
        elif isinstance(x, (Not, Neg)):
            go(x.operand)
        elif isinstance(x, BinOp):
            go(x.left)
            go(x.right)

    go(e)
    return out


# ---------------------------------------------------------------- statements

@dataclass(frozen=True)
class Timing:
    best: int = 0
    worst: int = 0
    deadline: Optional[int] = None


@dataclass(frozen=True)
class Assign:
    var: str
    value: Expr
    ann: Timing = Timing()
    pos: Pos = _pos()


@dataclass(frozen=True)
class Call:
    label: Optional[str]
    target: Optional[str]  # None or 'self' for self calls
    method: str
    ann: Timing = Timing()
    pos: Pos = _pos()

    @property
    def is_self(self) -> bool:
        return self.target in (None, "self")


@dataclass(frozen=True)
class Get:
    """Blocking reply statement ``t?``."""
    label: str
    ann: Timing = Timing()
    pos: Pos = _pos()


@dataclass(frozen=True)
class Release:
    ann: Timing = Timing()
    pos: Pos = _pos()


@dataclass(frozen=True)
class Await:
    guard: Expr
    ann: Timing = Timing()
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple
    ann: Timing = Timing()
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()
    ann: Timing = Timing()
    pos: Pos = _pos()


@dataclass(frozen=True)
class Skip:
    ann: Timing = Timing()
    pos: Pos = _pos()


Stmt = Union[Assign, Call, Get, Release, Await, While, If, Skip]


# ---------------------------------------------------------------- declarations

@dataclass(frozen=True)
class Param:
    name: str
    type: str


@dataclass(frozen=True)
class TypeRef:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class OpSig:
    name: str
    cointerface: Optional[str] = None


@dataclass(frozen=True)
class InterfaceDecl:
    name: str
    params: tuple[Param, ...] = ()
    inherits: tuple[TypeRef, ...] = ()
    ops: tuple[OpSig, ...] = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: str  # 'int' | 'bool'
    pos: Pos = _pos()


@dataclass(frozen=True)
class MethodDecl:
    name: str
    body: tuple
    cointerface: Optional[str] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class ClassDecl:
    name: str
    params: tuple[Param, ...] = ()
    implements: tuple[TypeRef, ...] = ()
    vars: tuple[VarDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    pos: Pos = _pos()

    def method(self, name: str) -> MethodDecl:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    def var_type(self, name: str) -> Optional[str]:
        for v in self.vars:
            if v.name == name:
                return v.type
        return None


@dataclass(frozen=True)
class SourceModel:
    interfaces: tuple[InterfaceDecl, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    file: str = field(default="", compare=False)

    def cls(self, name: Optional[str] = None) -> ClassDecl:
        if name is None:
            if len(self.classes) != 1:
                raise KeyError("model has more than one class; name one")
            return self.classes[0]
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)


def walk_stmts(body):
    """Every statement of ``body``, depth-first in source order."""
    for s in body:
        yield s
        if isinstance(s, While):
            yield from walk_stmts(s.body)
        elif isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.orelse)
