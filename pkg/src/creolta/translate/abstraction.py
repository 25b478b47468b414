"""Abstraction of Creol expressions into backend expressions.

Kept variables become per-object array reads ``v[self]``, reply tests become
``labels[t][self]`` and every atomic condition over a dropped variable becomes
``true``. Negation is pushed to the atoms first, so the abstraction of a
negated guard never degenerates into ``!true``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from ..creol import ast as A
from ..ta import expr as E


class AbstractionError(ValueError):
    pass


@dataclass(frozen=True)
class AbstractionPolicy:
    """Which class variables survive translation.

    ``ranges`` gives the bounded domain of kept integer variables; kept
    booleans need none.
    """

    keep: frozenset = frozenset()
    drop: frozenset = frozenset()
    ranges: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "keep", frozenset(self.keep))
        object.__setattr__(self, "drop", frozenset(self.drop))
        both = self.keep & self.drop
        if both:
            raise AbstractionError(f"variables both kept and dropped: {', '.join(sorted(both))}")

    @classmethod
    def default(cls, cls_decl: A.ClassDecl, keep: Iterable[str] = (), drop: Iterable[str] = (),
                ranges: Optional[dict] = None) -> "AbstractionPolicy":
        """Keep booleans and listed integers, drop everything else."""
        keep, drop = set(keep), set(drop)
        ranges = dict(ranges or {})
        for v in cls_decl.vars:
            if v.name in keep or v.name in drop:
                continue
            if v.type == "bool" or v.name in ranges:
                keep.add(v.name)
            else:
                drop.add(v.name)
        return cls(frozenset(keep), frozenset(drop), ranges)

    def check(self, cls_decl: A.ClassDecl) -> None:
        names = {v.name for v in cls_decl.vars}
        missing = names - self.keep - self.drop
        if missing:
            raise AbstractionError(f"variables neither kept nor dropped: {', '.join(sorted(missing))}")
        extra = (self.keep | self.drop) - names
        if extra:
            raise AbstractionError(f"policy names unknown variables: {', '.join(sorted(extra))}")
        for v in cls_decl.vars:
            if v.name in self.keep and v.type == "int" and v.name not in self.ranges:
                raise AbstractionError(f"kept integer variable {v.name} needs a finite range")


SELF = E.Name("self")

_NEG_CMP = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


class Abstraction:
    """Renaming plus abstraction for one class.

    ``var_name`` and ``label_name`` map source names to declared global names;
    ``params`` are class parameters, which stay template arguments.
    """

    def __init__(self, policy: AbstractionPolicy, params: Iterable[str] = (),
                 var_name: Callable[[str], str] = str, label_name: Callable[[str], str] = str):
        self.policy = policy
        self.params = set(params)
        self.var_name = var_name
        self.label_name = label_name

    # -- expressions -----------------------------------------------------
    def _dropped(self, e) -> bool:
        return any(v in self.policy.drop for v in A.expr_vars(e))

    def term(self, e) -> E.Expr:
        """Arithmetic or boolean term over kept variables."""
        if isinstance(e, A.Lit):
            return E.Bool(e.value) if isinstance(e.value, bool) else E.Int(e.value)
        if isinstance(e, A.Var):
            if e.name in self.params:
                return E.Name(e.name)
            if e.name in self.policy.drop:
                raise AbstractionError(f"dropped variable {e.name} in a kept expression")
            return E.Index(E.Name(self.var_name(e.name)), SELF)
        if isinstance(e, A.Reply):
            return E.Index(E.Index(E.Name("labels"), E.Name(self.label_name(e.label))), SELF)
        if isinstance(e, A.Neg):
            return E.Unary("-", self.term(e.operand))
        if isinstance(e, A.Not):
            return E.Unary("!", self.term(e.operand))
        op = {"and": "&&", "or": "||"}.get(e.op, e.op)
        return E.Binary(op, self.term(e.left), self.term(e.right))

    def guard(self, g, negate: bool = False) -> E.Expr:
        """Abstraction of ``g`` (or of its negation), computed on negation normal form."""
        if isinstance(g, A.Not):
            return self.guard(g.operand, not negate)
        if isinstance(g, A.BinOp) and g.op in A.BOOL_OPS:
            left = self.guard(g.left, negate)
            right = self.guard(g.right, negate)
            conj = (g.op == "and") != negate
            return E.conj([left, right]) if conj else E.disj([left, right])
        if isinstance(g, A.Lit) and isinstance(g.value, bool):
            return E.Bool(g.value != negate)
        if self._dropped(g):
            return E.TRUE
        if isinstance(g, A.BinOp) and g.op in A.CMP_OPS:
            op = _NEG_CMP[g.op] if negate else g.op
            return E.Binary(op, self.term(g.left), self.term(g.right))
        t = self.term(g)
        return E.Unary("!", t) if negate else t

    def assign(self, s: A.Assign) -> tuple[E.Expr, ...]:
        """Updates for ``v := ex``; empty when ``v`` is dropped."""
        if s.var in self.policy.drop:
            return ()
        if self._dropped(s.value):
            raise AbstractionError(
                f"assignment to kept variable {s.var} reads a dropped variable"
            )
        target = E.Index(E.Name(self.var_name(s.var)), SELF)
        return (E.Assign(target, "=", self.term(s.value)),)


def label_reset(g, label_name: Callable[[str], str] = str) -> tuple[E.Expr, ...]:
    """``labels[t][self] = false`` for every reply test in ``g``, in first-occurrence order."""
    return tuple(
        E.Assign(E.Index(E.Index(E.Name("labels"), E.Name(label_name(t))), SELF), "=", E.FALSE)
        for t in A.expr_replies(g)
    )


def eval_guard(g, env: dict) -> bool:
    """Concrete value of a Creol guard; reply tests read ``env['?t']``."""
    if isinstance(g, A.Lit):
        return g.value
    if isinstance(g, A.Var):
        return env[g.name]
    if isinstance(g, A.Reply):
        return env["?" + g.label]
    if isinstance(g, A.Not):
        return not eval_guard(g.operand, env)
    if isinstance(g, A.Neg):
        return -eval_guard(g.operand, env)
    a, b = eval_guard(g.left, env), eval_guard(g.right, env)
    return {
        "and": lambda: a and b, "or": lambda: a or b,
        "==": lambda: a == b, "!=": lambda: a != b, "<": lambda: a < b, "<=": lambda: a <= b,
        ">": lambda: a > b, ">=": lambda: a >= b,
        "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
    }[g.op]()
