"""Compile a :class:`~creolta.ta.model.SystemModel` into executable form.

Every guard, invariant, update, synchronisation index and declared function is
translated into Python source once; the generated functions operate on a flat
list ``v`` holding all discrete variables of the network. Clock constraints are
returned as lists of DBM atoms ``(i, j, raw)`` meaning ``x_i - x_j <raw>``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..ta import expr as E
from ..ta.model import Declarations, Instance, SystemModel, Template, Urgency
from . import dbm

INT_MIN, INT_MAX = -32768, 32767


class CompileError(ValueError):
    pass


class ModelRuntimeError(RuntimeError):
    """Out-of-range assignment or array access during exploration."""


# --------------------------------------------------------------------------
# symbols

@dataclass
class VarInfo:
    name: str
    offset: int
    dims: tuple[int, ...]
    lo: int
    hi: int
    is_bool: bool
    meta: bool
    init: list[int]

    @property
    def size(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n


@dataclass
class ClockInfo:
    name: str
    base: int
    dims: tuple[int, ...]
    owner: Optional[int]  # instance index or None for globals

    @property
    def size(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n


@dataclass
class ChanInfo:
    name: str
    base: int
    dims: tuple[int, ...]
    urgent: bool


@dataclass
class Const:
    value: object  # int or tuple (flattened const array)
    dims: tuple[int, ...] = ()
    pyname: str = ""


@dataclass
class Var:
    info: VarInfo


@dataclass
class Clock:
    info: ClockInfo


@dataclass
class Chan:
    info: ChanInfo


@dataclass
class Func:
    pyname: str
    decl: E.FuncDecl


@dataclass
class Local:
    pyname: str
    dims: tuple[int, ...] = ()
    rng: Optional[tuple[int, int]] = None


def _strides(dims: tuple[int, ...]) -> list[int]:
    out = []
    s = 1
    for d in reversed(dims):
        out.append(s)
        s *= d
    return list(reversed(out))


# --------------------------------------------------------------------------
# runtime helpers placed in the generated namespace

def _ix(i, n, what):
    if 0 <= i < n:
        return i
    raise ModelRuntimeError(f"index {i} out of range for {what} (size {n})")


def _rng(x, lo, hi, what):
    if lo <= x <= hi:
        return x
    raise ModelRuntimeError(f"value {int(x)} out of range [{lo},{hi}] assigned to {what}")


def _div(a, b):
    if b == 0:
        raise ModelRuntimeError("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _mod(a, b):
    return a - _div(a, b) * b


# op codes: 0 '<', 1 '<=', 2 '>', 3 '>=', 4 '=='
def _atom(A, i, j, op, c):
    """Record ``x_i - x_j op c``; returns False if trivially unsatisfiable."""
    if i == j:
        return (0 < c, 0 <= c, 0 > c, 0 >= c, 0 == c)[op]
    if op == 0:
        A.append((i, j, c << 1))
    elif op == 1:
        A.append((i, j, (c << 1) | 1))
    elif op == 2:
        A.append((j, i, (-c) << 1))
    elif op == 3:
        A.append((j, i, ((-c) << 1) | 1))
    else:
        A.append((i, j, (c << 1) | 1))
        A.append((j, i, ((-c) << 1) | 1))
    return True


_OPCODE = {"<": 0, "<=": 1, ">": 2, ">=": 3, "==": 4}
_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "=="}
_NEGATE = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}


# --------------------------------------------------------------------------
# compiled network

@dataclass
class EdgeRT:
    inst: int
    index: int
    src: int
    dst: int
    guard: Optional[Callable]  # v -> list of atoms or None
    direction: int  # 0 internal, 1 send, 2 receive
    key: Optional[int]
    key_fn: Optional[Callable]
    urgent: bool
    update: Optional[Callable]  # (v, R) -> None
    resets_ref: bool
    edge: object


@dataclass
class InstanceRT:
    name: str
    template: Template
    loc_ids: list[str]
    urgency: list[int]  # 0 normal, 1 urgent, 2 committed
    invariants: list[Optional[Callable]]
    edges: list[list[EdgeRT]]
    live: list[frozenset] = field(default_factory=list)


class Network:
    """Executable form of a system.

    Attributes of interest: ``vars`` (flat variable layout), ``clock_names``
    (index 0 is the reference clock), ``max_const`` (per-clock extrapolation
    constants) and ``instances``.
    """

    def __init__(self, system: SystemModel):
        self.system = system
        self.vars: list[VarInfo] = []
        self.nvars = 0
        self.clocks: list[ClockInfo] = []
        self.clock_names: list[str] = ["0"]
        self.chans: list[ChanInfo] = []
        self.nchan = 0
        self.instances: list[InstanceRT] = []
        self.meta: list[tuple[int, int]] = []
        self._src: list[str] = []
        self._counter = itertools.count()
        self._pending: list[tuple[str, object]] = []  # (pyname, setter) bound after exec
        self._max: dict[int, int] = {}
        self._inactive_src: list[str] = []
        self._scalar_clocks: set[int] = set()
        self.ns: dict = {
            "_ix": _ix, "_rng": _rng, "_div": _div, "_mod": _mod, "_atom": _atom,
            "ModelRuntimeError": ModelRuntimeError,
        }
        self._build()

    # ---------------------------------------------------------------- layout
    @property
    def nclocks(self) -> int:
        return len(self.clock_names)

    def _fresh(self, prefix: str) -> str:
        return f"{prefix}{next(self._counter)}"

    def _declare(self, decls: Declarations, scope: dict, owner: Optional[int], prefix: str) -> None:
        for d in decls:
            if isinstance(d, E.FuncDecl):
                pyname = self._fresh(f"f_{d.name}_")
                scope[d.name] = Func(pyname, d)
                continue
            dims = tuple(self._const(x, scope, f"dimension of {d.name}") for x in d.dims)
            t = d.type
            if t.const:
                if dims:
                    flat = self._flat_init(d, dims, scope)
                    pyname = self._fresh(f"c_{d.name}_")
                    self.ns[pyname] = tuple(flat)
                    scope[d.name] = Const(tuple(flat), dims, pyname)
                else:
                    if d.init is None:
                        raise CompileError(f"constant {d.name} has no value")
                    scope[d.name] = Const(self._const(d.init, scope, d.name))
            elif t.base == "clock":
                info = ClockInfo(f"{prefix}{d.name}", len(self.clock_names), dims, owner)
                size = info.size
                if dims:
                    for k in range(size):
                        self.clock_names.append(f"{prefix}{d.name}[{k}]")
                else:
                    self.clock_names.append(f"{prefix}{d.name}")
                    self._scalar_clocks.add(info.base)
                self.clocks.append(info)
                scope[d.name] = Clock(info)
                if d.name in decls.inactive:
                    self._compile_inactive(info, decls.inactive[d.name], scope)
            elif t.base == "chan":
                info = ChanInfo(f"{prefix}{d.name}", self.nchan, dims, t.urgent)
                n = 1
                for x in dims:
                    n *= x
                self.nchan += n
                self.chans.append(info)
                scope[d.name] = Chan(info)
            else:
                if t.base == "bool":
                    lo, hi, is_bool = 0, 1, True
                else:
                    lo = self._const(t.lo, scope, d.name) if t.lo is not None else INT_MIN
                    hi = self._const(t.hi, scope, d.name) if t.hi is not None else INT_MAX
                    is_bool = False
                flat = self._flat_init(d, dims, scope)
                info = VarInfo(f"{prefix}{d.name}", self.nvars, dims, lo, hi, is_bool, t.meta, flat)
                for x in flat:
                    if not lo <= x <= hi:
                        raise CompileError(f"initial value {x} of {d.name} out of range")
                self.nvars += info.size
                self.vars.append(info)
                scope[d.name] = Var(info)
                if t.meta:
                    for k, x in enumerate(flat):
                        self.meta.append((info.offset + k, x))

    def _flat_init(self, d: E.VarDecl, dims: tuple[int, ...], scope: dict) -> list[int]:
        size = 1
        for x in dims:
            size *= x
        if d.init is None:
            return [0] * size
        if not dims:
            if isinstance(d.init, tuple):
                raise CompileError(f"scalar {d.name} with array initialiser")
            return [self._const(d.init, scope, d.name)]
        flat: list[int] = []

        def rec(item):
            if isinstance(item, tuple):
                for x in item:
                    rec(x)
            else:
                flat.append(self._const(item, scope, d.name))

        rec(d.init)
        if len(flat) != size:
            raise CompileError(f"initialiser of {d.name} has {len(flat)} values, expected {size}")
        return flat

    def _const(self, e: E.Expr, scope: dict, what: str) -> int:
        env = {}
        for n in E.names(e):
            s = scope.get(n)
            if isinstance(s, Const) and not s.dims:
                env[n] = s.value
            else:
                raise CompileError(f"{what}: {n!r} is not a constant")
        return E.const_eval(e, env)

    # ---------------------------------------------------------------- build
    def _build(self) -> None:
        sysm = self.system
        gscope: dict = {}
        self._declare(sysm.globals, gscope, None, "")
        self.gscope = gscope
        for sym in list(gscope.values()):
            if isinstance(sym, Func):
                self._compile_func(sym, gscope)
        for k, inst in enumerate(sysm.instances):
            t = sysm.template(inst.template)
            if len(inst.args) != len(t.params):
                raise CompileError(f"instance {inst.name}: wrong number of arguments")
            scope = dict(gscope)
            for p, a in zip(t.params, inst.args):
                scope[p.name] = Const(int(a))
            self._declare(t.declarations, scope, k, f"{inst.name}.")
            for sym in [s for n, s in scope.items() if isinstance(s, Func) and gscope.get(n) is not s]:
                self._compile_func(sym, scope)
            self.instances.append(self._compile_instance(k, inst, t, scope))
        self._finish()

    def _finish(self) -> None:
        src = "\n".join(self._src)
        self.source = src
        try:
            exec(compile(src, "<network>", "exec"), self.ns)
        except SyntaxError as exc:  # pragma: no cover - generator bug
            raise CompileError(f"internal code generation error: {exc}\n{src}") from exc
        for pyname, setter in self._pending:
            setter(self.ns[pyname])
        self.init_vars = []
        for info in self.vars:
            self.init_vars.extend(info.init)
        self.max_const = [0] * self.nclocks
        for c, m in self._max.items():
            self.max_const[c] = max(self.max_const[c], m)
        self.inactive_fns = [self.ns[n] for n in self._inactive_src]
        self._compute_liveness()

    # ---------------------------------------------------------------- functions
    def _compile_func(self, sym: Func, scope: dict) -> None:
        fn = sym.decl
        local = dict(scope)
        params = []
        for p in fn.params:
            pn = self._fresh(f"p_{p.name}_")
            if p.ref:
                raise CompileError(f"function {fn.name}: reference parameters are not supported")
            local[p.name] = Local(pn)
            params.append(pn)
        lines = [f"def {sym.pyname}(v, R{''.join(', ' + p for p in params)}):"]
        body = self._block(fn.body, local, "    ")
        lines.extend(body or ["    pass"])
        self._src.append("\n".join(lines))

    # ---------------------------------------------------------------- statements
    def _block(self, b: E.Block, scope: dict, ind: str) -> list[str]:
        scope = dict(scope)
        out = []
        for d in b.decls:
            dims = tuple(self._const(x, scope, d.name) for x in d.dims)
            pn = self._fresh(f"l_{d.name}_")
            rng = None
            if d.type.base == "int" and d.type.lo is not None:
                rng = (self._const(d.type.lo, scope, d.name), self._const(d.type.hi, scope, d.name))
            if dims:
                size = 1
                for x in dims:
                    size *= x
                if d.init is not None:
                    flat = self._flat_init(d, dims, scope)
                    out.append(f"{ind}{pn} = {flat!r}")
                else:
                    out.append(f"{ind}{pn} = [0] * {size}")
            else:
                init = self.ex(d.init, scope) if d.init is not None else "0"
                out.append(f"{ind}{pn} = {init}")
            scope[d.name] = Local(pn, dims, rng)
        for s in b.stmts:
            out.extend(self._stmt(s, scope, ind))
        return out

    def _stmt(self, s, scope: dict, ind: str) -> list[str]:
        if isinstance(s, E.Block):
            return self._block(s, scope, ind) or [f"{ind}pass"]
        if isinstance(s, E.Empty):
            return [f"{ind}pass"]
        if isinstance(s, E.ExprStmt):
            return self._effect(s.expr, scope, ind)
        if isinstance(s, E.Return):
            if s.value is None:
                return [f"{ind}return"]
            return [f"{ind}return {self.ex(s.value, scope)}"]
        if isinstance(s, E.If):
            out = [f"{ind}if {self.ex(s.cond, scope)}:"]
            out += self._stmt(s.then, scope, ind + "    ")
            if s.other is not None:
                out.append(f"{ind}else:")
                out += self._stmt(s.other, scope, ind + "    ")
            return out
        if isinstance(s, E.While):
            return [f"{ind}while {self.ex(s.cond, scope)}:"] + self._stmt(s.body, scope, ind + "    ")
        if isinstance(s, E.For):
            out = []
            if s.init is not None:
                out += self._effect(s.init, scope, ind)
            cond = self.ex(s.cond, scope) if s.cond is not None else "True"
            out.append(f"{ind}while {cond}:")
            out += self._stmt(s.body, scope, ind + "    ")
            if s.step is not None:
                out += self._effect(s.step, scope, ind + "    ")
            return out
        if isinstance(s, E.ForRange):
            inner = dict(scope)
            pn = self._fresh(f"q_{s.var}_")
            lo, hi = self.ex(s.lo, scope), self.ex(s.hi, scope)
            inner[s.var] = Local(pn)
            return [f"{ind}for {pn} in range({lo}, ({hi}) + 1):"] + self._stmt(s.body, inner, ind + "    ")
        raise CompileError(f"unsupported statement {s!r}")

    def _effect(self, e: E.Expr, scope: dict, ind: str) -> list[str]:
        """Code for an expression evaluated for its side effect."""
        if isinstance(e, E.IncDec):
            e = E.Assign(e.target, "+=" if e.op == "++" else "-=", E.Int(1))
        if isinstance(e, E.Assign):
            return self._assign(e, scope, ind)
        if isinstance(e, E.Call):
            return [f"{ind}{self.ex(e, scope)}"]
        if isinstance(e, E.Bool) or isinstance(e, E.Int):
            return [f"{ind}pass"]
        return [f"{ind}{self.ex(e, scope)}"]

    def _assign(self, a: E.Assign, scope: dict, ind: str) -> list[str]:
        root = E.root_name(a.target)
        sym = scope.get(root) if root else None
        if sym is None:
            raise CompileError(f"assignment to undeclared {E.show(a.target)}")
        value = self.ex(a.value, scope)
        if isinstance(sym, Clock):
            if a.op != "=":
                raise CompileError(f"clock {root} may only be reset")
            idx = self._clock_index(a.target, sym, scope)
            return [f"{ind}R.append(({idx}, {value}))"]
        if isinstance(sym, Var):
            slot = self._slot(a.target, sym.info, scope)
            if a.op != "=":
                value = f"(v[{slot}] {a.op[0]} {value})"
            info = sym.info
            if info.is_bool:
                return [f"{ind}v[{slot}] = 1 if {value} else 0"]
            return [f"{ind}v[{slot}] = _rng({value}, {info.lo}, {info.hi}, {info.name!r})"]
        if isinstance(sym, Local):
            ref = self._local_ref(a.target, sym, scope)
            if a.op != "=":
                value = f"({ref} {a.op[0]} {value})"
            return [f"{ind}{ref} = {value}"]
        raise CompileError(f"cannot assign to {E.show(a.target)}")

    # ---------------------------------------------------------------- references
    def _indices(self, e: E.Expr) -> tuple[str, list[E.Expr]]:
        idx = []
        while isinstance(e, E.Index):
            idx.append(e.index)
            e = e.base
        return e.id, list(reversed(idx))

    def _flat_index(self, idx: list[E.Expr], dims: tuple[int, ...], scope: dict, what: str):
        """Python expression (or int) for a flattened index."""
        if len(idx) != len(dims):
            raise CompileError(f"{what}: expected {len(dims)} index(es), got {len(idx)}")
        if not dims:
            return 0
        parts = []
        const_total = 0
        for k, (ix, dim, stride) in enumerate(zip(idx, dims, _strides(dims))):
            try:
                c = self._const(ix, scope, what)
            except (CompileError, KeyError):
                c = None
            if c is not None:
                if not 0 <= c < dim:
                    raise CompileError(f"index {c} out of range for {what} (size {dim})")
                const_total += c * stride
            else:
                term = f"_ix({self.ex(ix, scope)}, {dim}, {what!r})"
                parts.append(term if stride == 1 else f"{term} * {stride}")
        if not parts:
            return const_total
        if const_total:
            parts.append(str(const_total))
        return " + ".join(parts)

    def _slot(self, e: E.Expr, info: VarInfo, scope: dict):
        _, idx = self._indices(e)
        flat = self._flat_index(idx, info.dims, scope, info.name)
        if isinstance(flat, int):
            return info.offset + flat
        return f"{info.offset} + {flat}" if info.offset else flat

    def _clock_index(self, e: E.Expr, sym: Clock, scope: dict):
        _, idx = self._indices(e)
        flat = self._flat_index(idx, sym.info.dims, scope, sym.info.name)
        if isinstance(flat, int):
            return sym.info.base + flat
        return f"{sym.info.base} + {flat}"

    def _local_ref(self, e: E.Expr, sym: Local, scope: dict) -> str:
        _, idx = self._indices(e)
        if not sym.dims:
            if idx:
                raise CompileError(f"{sym.pyname} is not an array")
            return sym.pyname
        flat = self._flat_index(idx, sym.dims, scope, sym.pyname)
        return f"{sym.pyname}[{flat}]"

    # ---------------------------------------------------------------- expressions
    def ex(self, e: E.Expr, scope: dict) -> str:
        if isinstance(e, E.Int):
            return str(e.value)
        if isinstance(e, E.Bool):
            return "True" if e.value else "False"
        if isinstance(e, (E.Name, E.Index)):
            root, idx = self._indices(e)
            sym = scope.get(root)
            if sym is None:
                raise CompileError(f"undeclared identifier {root!r}")
            if isinstance(sym, Const):
                if not sym.dims:
                    if idx:
                        raise CompileError(f"{root} is not an array")
                    return str(sym.value)
                flat = self._flat_index(idx, sym.dims, scope, root)
                if isinstance(flat, int):
                    return str(sym.value[flat])
                return f"{sym.pyname}[{flat}]"
            if isinstance(sym, Var):
                return f"v[{self._slot(e, sym.info, scope)}]"
            if isinstance(sym, Local):
                return self._local_ref(e, sym, scope)
            if isinstance(sym, Clock):
                raise CompileError(f"clock {root} used in a discrete expression")
            raise CompileError(f"{root} cannot be used as a value")
        if isinstance(e, E.Call):
            sym = scope.get(e.func)
            if not isinstance(sym, Func):
                raise CompileError(f"unknown function {e.func!r}")
            if len(e.args) != len(sym.decl.params):
                raise CompileError(f"function {e.func} expects {len(sym.decl.params)} argument(s)")
            args = "".join(", " + self.ex(a, scope) for a in e.args)
            return f"{sym.pyname}(v, R{args})"
        if isinstance(e, E.Unary):
            x = self.ex(e.operand, scope)
            return f"(not {x})" if e.op == "!" else f"(-{x})"
        if isinstance(e, E.Binary):
            a, b = self.ex(e.left, scope), self.ex(e.right, scope)
            if e.op == "&&":
                return f"({a} and {b})"
            if e.op == "||":
                return f"({a} or {b})"
            if e.op == "imply":
                return f"((not {a}) or {b})"
            if e.op == "/":
                return f"_div({a}, {b})"
            if e.op == "%":
                return f"_mod({a}, {b})"
            return f"({a} {e.op} {b})"
        if isinstance(e, E.Cond):
            return f"({self.ex(e.then, scope)} if {self.ex(e.test, scope)} else {self.ex(e.other, scope)})"
        if isinstance(e, E.Quant):
            inner = dict(scope)
            pn = self._fresh(f"q_{e.var}_")
            inner[e.var] = Local(pn)
            fn = "all" if e.kind == "forall" else "any"
            return (f"{fn}({self.ex(e.body, inner)} for {pn} in "
                    f"range({self.ex(e.lo, scope)}, ({self.ex(e.hi, scope)}) + 1))")
        raise CompileError(f"unsupported expression {E.show(e)}")

    # ---------------------------------------------------------------- clock constraints
    def _mentions_clock(self, e: E.Expr, scope: dict) -> bool:
        for node in E.walk(e):
            if isinstance(node, E.Name) and isinstance(scope.get(node.id), Clock):
                return True
            if isinstance(node, E.Quant):
                pass
        return False

    def _linear(self, e: E.Expr, scope: dict, sign: int, terms: list, consts: list) -> None:
        """Split ``e`` into clock terms (sign, index code, clock sym) and discrete parts."""
        if not self._mentions_clock(e, scope):
            consts.append((sign, e))
            return
        if isinstance(e, (E.Name, E.Index)):
            root, _ = self._indices(e)
            sym = scope.get(root)
            if isinstance(sym, Clock):
                terms.append((sign, self._clock_index(e, sym, scope), sym, e))
                return
        if isinstance(e, E.Binary) and e.op in ("+", "-"):
            self._linear(e.left, scope, sign, terms, consts)
            self._linear(e.right, scope, sign if e.op == "+" else -sign, terms, consts)
            return
        if isinstance(e, E.Unary) and e.op == "-":
            self._linear(e.operand, scope, -sign, terms, consts)
            return
        raise CompileError(f"unsupported clock expression {E.show(e)}")

    def _constraint(self, e: E.Expr, scope: dict, ind: str, out: list[str]) -> None:
        """Emit code that appends atoms to ``A`` or returns None when false."""
        if not self._mentions_clock(e, scope):
            if e == E.TRUE:
                return
            out.append(f"{ind}if not ({self.ex(e, scope)}): return None")
            return
        if isinstance(e, E.Binary) and e.op == "&&":
            self._constraint(e.left, scope, ind, out)
            self._constraint(e.right, scope, ind, out)
            return
        if isinstance(e, E.Binary) and e.op in ("imply", "||"):
            left, right = e.left, e.right
            if e.op == "||":
                if not self._mentions_clock(left, scope):
                    left = E.Unary("!", left)
                elif not self._mentions_clock(right, scope):
                    left, right = E.Unary("!", right), left
                else:
                    raise CompileError(f"disjunction of clock constraints: {E.show(e)}")
            if self._mentions_clock(left, scope):
                raise CompileError(f"clock constraint on the left of imply: {E.show(e)}")
            out.append(f"{ind}if {self.ex(left, scope)}:")
            n = len(out)
            self._constraint(right, scope, ind + "    ", out)
            if len(out) == n:
                out.append(f"{ind}    pass")
            return
        if isinstance(e, E.Unary) and e.op == "!":
            inner = e.operand
            if isinstance(inner, E.Binary) and inner.op in _NEGATE and inner.op not in ("==", "!="):
                self._constraint(E.Binary(_NEGATE[inner.op], inner.left, inner.right), scope, ind, out)
                return
            if isinstance(inner, E.Unary) and inner.op == "!":
                self._constraint(inner.operand, scope, ind, out)
                return
            raise CompileError(f"negation of a clock constraint: {E.show(e)}")
        if isinstance(e, E.Quant) and e.kind == "forall":
            inner = dict(scope)
            pn = self._fresh(f"q_{e.var}_")
            lo, hi = self.ex(e.lo, scope), self.ex(e.hi, scope)
            try:
                rng = (self._const(e.lo, scope, "quantifier"), self._const(e.hi, scope, "quantifier"))
            except (CompileError, KeyError):
                rng = None
            inner[e.var] = Local(pn, (), rng)
            out.append(f"{ind}for {pn} in range({lo}, ({hi}) + 1):")
            self._constraint(e.body, inner, ind + "    ", out)
            return
        if isinstance(e, E.Cond) and not self._mentions_clock(e.test, scope):
            out.append(f"{ind}if {self.ex(e.test, scope)}:")
            n = len(out)
            self._constraint(e.then, scope, ind + "    ", out)
            if len(out) == n:
                out.append(f"{ind}    pass")
            out.append(f"{ind}else:")
            n = len(out)
            self._constraint(e.other, scope, ind + "    ", out)
            if len(out) == n:
                out.append(f"{ind}    pass")
            return
        if isinstance(e, E.Binary) and e.op in _OPCODE:
            terms: list = []
            consts: list = []
            self._linear(e.left, scope, 1, terms, consts)
            self._linear(e.right, scope, -1, terms, consts)
            op = e.op
            # sum(terms) + sum(consts) op 0
            if len(terms) == 1:
                sgn, idx, sym, _ = terms[0]
                if sgn < 0:
                    op = _FLIP[op]
                    k_parts = consts  # -x + K op 0  <=>  x flip(op) K
                else:
                    k_parts = [(-s, x) for s, x in consts]  # x op -K
                i_code, j_code = idx, "0"
                clocks = [(sym, terms[0][3])]
            elif len(terms) == 2 and terms[0][0] != terms[1][0]:
                pos = terms[0] if terms[0][0] > 0 else terms[1]
                neg = terms[1] if terms[0][0] > 0 else terms[0]
                k_parts = [(-s, x) for s, x in consts]
                i_code, j_code = pos[1], neg[1]
                clocks = [(pos[2], pos[3]), (neg[2], neg[3])]
            else:
                raise CompileError(f"unsupported clock constraint {E.show(e)}")
            bound = " + ".join(
                (f"({self.ex(x, scope)})" if s > 0 else f"-({self.ex(x, scope)})") for s, x in k_parts
            ) or "0"
            self._note_max(k_parts, clocks, scope)
            out.append(f"{ind}if not _atom(A, {i_code}, {j_code}, {_OPCODE[op]}, {bound}): return None")
            return
        raise CompileError(f"unsupported clock constraint {E.show(e)}")

    # ---------------------------------------------------------------- extrapolation constants
    def _interval(self, e: E.Expr, scope: dict) -> tuple[int, int]:
        if isinstance(e, E.Int):
            return e.value, e.value
        if isinstance(e, E.Bool):
            return int(e.value), int(e.value)
        if isinstance(e, (E.Name, E.Index)):
            root, idx = self._indices(e)
            sym = scope.get(root)
            if isinstance(sym, Const):
                if not sym.dims:
                    return sym.value, sym.value
                return min(sym.value), max(sym.value)
            if isinstance(sym, Var):
                return sym.info.lo, sym.info.hi
            if isinstance(sym, Local) and sym.rng is not None:
                return sym.rng
            raise CompileError(f"no range for {root}")
        if isinstance(e, E.Unary) and e.op == "-":
            lo, hi = self._interval(e.operand, scope)
            return -hi, -lo
        if isinstance(e, E.Binary) and e.op in ("+", "-", "*"):
            a = self._interval(e.left, scope)
            b = self._interval(e.right, scope)
            if e.op == "+":
                return a[0] + b[0], a[1] + b[1]
            if e.op == "-":
                return a[0] - b[1], a[1] - b[0]
            prods = [x * y for x in a for y in b]
            return min(prods), max(prods)
        if isinstance(e, E.Cond):
            a = self._interval(e.then, scope)
            b = self._interval(e.other, scope)
            return min(a[0], b[0]), max(a[1], b[1])
        raise CompileError(f"no range for {E.show(e)}")

    def _note_max(self, k_parts, clocks, scope: dict) -> None:
        lo = hi = 0
        try:
            for s, x in k_parts:
                a, b = self._interval(x, scope)
                if s < 0:
                    a, b = -b, -a
                lo += a
                hi += b
            m = max(abs(lo), abs(hi))
        except CompileError:
            m = INT_MAX
        for sym, ref in clocks:
            _, idx = self._indices(ref)
            flat = None
            try:
                flat = self._flat_index(idx, sym.info.dims, scope, sym.info.name)
            except CompileError:
                pass
            if isinstance(flat, int):
                targets = [sym.info.base + flat]
            else:
                targets = range(sym.info.base, sym.info.base + sym.info.size)
            for c in targets:
                self._max[c] = max(self._max.get(c, 0), m)

    # ---------------------------------------------------------------- instances
    def _constraint_fn(self, e: E.Expr, scope: dict, name: str) -> Optional[str]:
        if e == E.TRUE:
            return None
        out = [f"def {name}(v):", "    R = None", "    A = []"]
        self._constraint(e, scope, "    ", out)
        out.append("    return A")
        self._src.append("\n".join(out))
        return name

    def _compile_inactive(self, info: ClockInfo, pred: E.Expr, scope: dict) -> None:
        name = self._fresh("inactive_")
        inner = dict(scope)
        pn = self._fresh("q_i_")
        inner["i"] = Local(pn)
        body = self.ex(pred, inner)
        self._src.append(
            f"def {name}(v):\n"
            f"    R = None\n"
            f"    return [{info.base} + {pn} for {pn} in range({info.size}) if {body}]"
        )
        self._inactive_src.append(name)

    def _compile_instance(self, k: int, inst: Instance, t: Template, scope: dict) -> InstanceRT:
        loc_ids = [loc.id for loc in t.locations]
        index = {lid: n for n, lid in enumerate(loc_ids)}
        if t.initial is None or t.initial not in index:
            raise CompileError(f"template {t.name} has no valid initial location")
        # initial location first
        init = index[t.initial]
        order = [init] + [n for n in range(len(loc_ids)) if n != init]
        locs = [t.locations[n] for n in order]
        loc_ids = [loc.id for loc in locs]
        index = {lid: n for n, lid in enumerate(loc_ids)}
        urg = [2 if loc.urgency is Urgency.COMMITTED else 1 if loc.urgency is Urgency.URGENT else 0
               for loc in locs]
        invs: list = []
        for n, loc in enumerate(locs):
            try:
                name = self._constraint_fn(loc.invariant, scope, self._fresh(f"inv_{k}_"))
            except CompileError as exc:
                raise CompileError(f"{inst.name}.{loc.id} invariant: {exc}") from exc
            invs.append(None)
            if name:
                self._pending.append((name, _setter(invs, n)))
        edges: list[list[EdgeRT]] = [[] for _ in locs]
        for ei, e in enumerate(t.edges):
            try:
                rt = self._compile_edge(k, ei, e, index, scope)
            except CompileError as exc:
                raise CompileError(f"{inst.name} edge {e.describe()}: {exc}") from exc
            edges[rt.src].append(rt)
        rt_inst = InstanceRT(inst.name, t, loc_ids, urg, invs, edges)
        rt_inst.scope = scope
        return rt_inst

    def _compile_edge(self, k: int, ei: int, e, index: dict, scope: dict) -> EdgeRT:
        guard_name = self._constraint_fn(e.guard, scope, self._fresh(f"g_{k}_{ei}_"))
        direction, key, key_name, urgent = 0, None, None, False
        if e.sync is not None:
            sym = scope.get(e.sync.channel)
            if not isinstance(sym, Chan):
                raise CompileError(f"undeclared channel {e.sync.channel}")
            direction = 1 if e.sync.direction == "send" else 2
            urgent = sym.info.urgent
            flat = self._flat_index(list(e.sync.indices), sym.info.dims, scope, sym.info.name)
            if isinstance(flat, int):
                key = sym.info.base + flat
            else:
                key_name = self._fresh(f"k_{k}_{ei}_")
                self._src.append(f"def {key_name}(v):\n    R = None\n    return {sym.info.base} + {flat}")
        upd_name = None
        resets_ref = False
        if e.updates:
            upd_name = self._fresh(f"u_{k}_{ei}_")
            lines = [f"def {upd_name}(v, R):"]
            for u in e.updates:
                lines.extend(self._effect(u, scope, "    "))
            self._src.append("\n".join(lines))
        rt = EdgeRT(k, ei, index[e.src], index[e.dst], None, direction, key, None, urgent, None,
                    resets_ref, e)
        if guard_name:
            self._pending.append((guard_name, lambda f, rt=rt: setattr(rt, "guard", f)))
        if key_name:
            self._pending.append((key_name, lambda f, rt=rt: setattr(rt, "key_fn", f)))
        if upd_name:
            self._pending.append((upd_name, lambda f, rt=rt: setattr(rt, "update", f)))
        return rt

    # ---------------------------------------------------------------- liveness of scalar clocks
    def _clocks_in(self, e: E.Expr, scope: dict) -> set[int]:
        out = set()
        for node in E.walk(e):
            if isinstance(node, E.Name):
                sym = scope.get(node.id)
                if isinstance(sym, Clock) and sym.info.base in self._scalar_clocks:
                    out.add(sym.info.base)
        return out

    def _edge_resets(self, e, scope: dict) -> set[int]:
        out = set()
        for u in e.updates:
            if isinstance(u, E.Assign) and isinstance(u.target, E.Name):
                sym = scope.get(u.target.id)
                if isinstance(sym, Clock) and sym.info.base in self._scalar_clocks:
                    out.add(sym.info.base)
        return out

    def _edge_reads(self, e, scope: dict) -> set[int]:
        reads = self._clocks_in(e.guard, scope)
        for u in e.updates:
            if isinstance(u, E.Assign):
                reads |= self._clocks_in(u.value, scope)
                if isinstance(u.target, E.Index):
                    reads |= self._clocks_in(u.target.index, scope)
            elif isinstance(u, E.Call):
                # called functions may only reset clocks; they never read them
                pass
        return reads

    def _compute_liveness(self) -> None:
        for inst in self.instances:
            t, scope = inst.template, inst.scope
            n = len(inst.loc_ids)
            index = {lid: i for i, lid in enumerate(inst.loc_ids)}
            inv = [self._clocks_in(t.location(lid).invariant, scope) for lid in inst.loc_ids]
            out_edges = [[] for _ in range(n)]
            for e in t.edges:
                out_edges[index[e.src]].append(
                    (index[e.dst], self._edge_reads(e, scope), self._edge_resets(e, scope))
                )
            live = [set(s) for s in inv]
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    new = set(inv[i])
                    for dst, reads, resets in out_edges[i]:
                        new |= reads
                        new |= live[dst] - resets
                    if new != live[i]:
                        live[i] = new
                        changed = True
            inst.live = [frozenset(s) for s in live]

    # ---------------------------------------------------------------- queries on layout
    def var(self, name: str) -> VarInfo:
        for info in self.vars:
            if info.name == name:
                return info
        raise KeyError(name)

    def instance_index(self, name: str) -> int:
        for k, inst in enumerate(self.instances):
            if inst.name == name:
                return k
        raise KeyError(name)

    def compile_predicate(self, e: E.Expr, instance: Optional[str] = None) -> Callable:
        """Discrete predicate over ``v`` in global (or an instance's) scope."""
        scope = self.gscope if instance is None else self.instances[self.instance_index(instance)].scope
        name = self._fresh("pred_")
        src = f"def {name}(v):\n    R = None\n    return {self.ex(e, scope)}"
        exec(compile(src, "<predicate>", "exec"), self.ns)
        return self.ns[name]

    def compile_constraint(self, e: E.Expr, instance: Optional[str] = None) -> Callable:
        scope = self.gscope if instance is None else self.instances[self.instance_index(instance)].scope
        name = self._fresh("cons_")
        out = [f"def {name}(v):", "    R = None", "    A = []"]
        self._constraint(e, scope, "    ", out)
        out.append("    return A")
        exec(compile("\n".join(out), "<constraint>", "exec"), self.ns)
        return self.ns[name]

    def describe_vars(self, v) -> dict:
        out = {}
        for info in self.vars:
            vals = [bool(x) if info.is_bool else int(x) for x in v[info.offset:info.offset + info.size]]
            out[info.name] = vals if info.dims else vals[0]
        return out


def _setter(lst: list, n: int):
    def set_(f):
        lst[n] = f
    return set_


# --------------------------------------------------------------------------
# determinism support

class GuardProbe:
    """Evaluate guard overlap of edges of one template for the determinism check."""

    def __init__(self, t: Template, globals: Declarations, args: dict[str, int]):
        argv = tuple(int(args.get(p.name, 0)) for p in t.params)
        system = SystemModel([t], globals, [Instance("probe", t.name, argv)])
        self.net = Network(system)
        self.inst = self.net.instances[0]
        self.by_edge = {}
        for lst in self.inst.edges:
            for rt in lst:
                self.by_edge[id(rt.edge)] = rt

    def _rt(self, e) -> EdgeRT:
        return self.by_edge[id(e)]

    def action(self, e) -> tuple:
        if e.sync is None:
            return ("tau",)
        return (e.sync.channel, e.sync.direction)

    def _vars_of(self, e) -> list[int]:
        scope = self.inst.scope
        slots: set[int] = set()
        exprs = [e.guard] + list(e.sync.indices if e.sync else ())
        for ex in exprs:
            for n in E.names(ex):
                sym = scope.get(n)
                if isinstance(sym, Var) and not sym.info.meta:
                    slots.update(range(sym.info.offset, sym.info.offset + sym.info.size))
                elif isinstance(sym, Func):
                    for info in self.net.vars:
                        if not info.meta:
                            slots.update(range(info.offset, info.offset + info.size))
        return sorted(slots)

    def overlap(self, e1, e2, limit: int) -> bool:
        r1, r2 = self._rt(e1), self._rt(e2)
        slots = sorted(set(self._vars_of(e1)) | set(self._vars_of(e2)))
        domains = []
        total = 1
        for s in slots:
            info = next(i for i in self.net.vars if i.offset <= s < i.offset + i.size)
            domains.append(range(info.lo, info.hi + 1))
            total *= info.hi - info.lo + 1
        if total > limit:
            return True  # conservative: cannot refute overlap
        base = list(self.net.init_vars)
        n = self.net.nclocks
        for combo in itertools.product(*domains):
            v = list(base)
            for s, x in zip(slots, combo):
                v[s] = x
            try:
                if r1.direction and r2.direction:
                    k1 = r1.key if r1.key is not None else r1.key_fn(v)
                    k2 = r2.key if r2.key is not None else r2.key_fn(v)
                    if k1 != k2:
                        continue
                a1 = r1.guard(v) if r1.guard else []
                a2 = r2.guard(v) if r2.guard else []
            except ModelRuntimeError:
                continue
            if a1 is None or a2 is None:
                continue
            z = dbm.from_constraints(n, list(a1) + list(a2))
            if not dbm.is_empty(z):
                return True
        return False
