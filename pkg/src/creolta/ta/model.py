"""Intermediate representation of timed-automata networks.

A :class:`SystemModel` holds global :class:`Declarations`, a list of
:class:`Template` objects and the instances that make up the network. Guards,
invariants and updates are kept as :mod:`creolta.ta.expr` trees so that the
same model can be printed as UPPAAL XML and executed by the analysis engine.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Union

from . import expr as E
from .expr import Decl, Expr, FuncDecl, Param, TypeSpec, VarDecl


class ModelError(ValueError):
    """Structural error while building or finalising a model."""


class Urgency(str, Enum):
    NORMAL = "normal"
    URGENT = "urgent"
    COMMITTED = "committed"


@dataclass(frozen=True)
class ClockAtom:
    clock: str
    rel: str  # '<', '<=', '==', '>=', '>'
    bound: int

    def to_expr(self) -> Expr:
        return E.Binary(self.rel, _clock_ref(self.clock), E.Int(self.bound))


@dataclass(frozen=True)
class ClockConstraint:
    """Conjunction of simple clock atoms; the empty conjunction is ``true``."""

    atoms: tuple[ClockAtom, ...] = ()

    def to_expr(self) -> Expr:
        return E.conj([a.to_expr() for a in self.atoms])

    def __and__(self, other: "ClockConstraint") -> "ClockConstraint":
        return ClockConstraint(self.atoms + other.atoms)


def _clock_ref(text: str) -> Expr:
    return E.parse_expr(text)


def ge(clock: str, bound: int) -> ClockConstraint:
    return ClockConstraint((ClockAtom(clock, ">=", bound),))


def le(clock: str, bound: int) -> ClockConstraint:
    return ClockConstraint((ClockAtom(clock, "<=", bound),))


@dataclass(frozen=True)
class Sync:
    channel: str
    indices: tuple[Expr, ...]
    direction: str  # 'send' | 'recv'

    def show(self) -> str:
        idx = "".join(f"[{E.show(i)}]" for i in self.indices)
        return f"{self.channel}{idx}{'!' if self.direction == 'send' else '?'}"

    @classmethod
    def parse(cls, text: str) -> "Sync":
        return cls(*E.parse_sync(text))


@dataclass(frozen=True)
class Location:
    id: str
    name: Optional[str] = None
    urgency: Urgency = Urgency.NORMAL
    invariant: Expr = E.TRUE

    @property
    def urgent(self) -> bool:
        return self.urgency is Urgency.URGENT

    @property
    def committed(self) -> bool:
        return self.urgency is Urgency.COMMITTED


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    guard: Expr = E.TRUE
    sync: Optional[Sync] = None
    updates: tuple[Expr, ...] = ()
    tag: str = ""  # free-form provenance label (e.g. scheduler transition number)

    def describe(self) -> str:
        parts = []
        if self.guard != E.TRUE:
            parts.append(E.show(self.guard))
        if self.sync is not None:
            parts.append(self.sync.show())
        if self.updates:
            parts.append(", ".join(E.show(u) for u in self.updates))
        return f"{self.src} -> {self.dst}" + (f" [{'; '.join(parts)}]" if parts else "")


_INACTIVE_RE = re.compile(r"^\s*clock\s+([A-Za-z_]\w*)[^;\n]*;\s*//\s*inactive when (.*?)\s*$",
                          re.MULTILINE)


class Declarations:
    """Ordered list of variable, constant, channel and function declarations.

    ``inactive`` maps a clock (array) name to a predicate over the element index
    ``i``; the analysis engine treats a clock as unconstrained while its
    predicate holds. It is an exploration hint only and is exported as a
    comment.
    """

    def __init__(self, decls: Iterable[Decl] = (), inactive: Optional[dict[str, Expr]] = None):
        self.decls: list[Decl] = list(decls)
        self.inactive: dict[str, Expr] = dict(inactive or {})

    @classmethod
    def parse(cls, text: str) -> "Declarations":
        hints = {m.group(1): E.parse_expr(m.group(2))
                 for m in _INACTIVE_RE.finditer(text)}
        return cls(E.parse_declarations(text), hints)

    def add(self, decl: Union[Decl, str]) -> None:
        if isinstance(decl, str):
            self.decls.extend(E.parse_declarations(decl))
        else:
            self.decls.append(decl)

    def extend(self, decls: Iterable[Decl]) -> None:
        for d in decls:
            self.add(d)

    def __iter__(self) -> Iterator[Decl]:
        return iter(self.decls)

    def __len__(self) -> int:
        return len(self.decls)

    def names(self) -> list[str]:
        return [d.name for d in self.decls]

    def lookup(self, name: str) -> Optional[Decl]:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def variables(self) -> list[VarDecl]:
        return [d for d in self.decls if isinstance(d, VarDecl)]

    def functions(self) -> list[FuncDecl]:
        return [d for d in self.decls if isinstance(d, FuncDecl)]

    def constants(self) -> list[VarDecl]:
        return [d for d in self.variables() if d.type.const]

    def clocks(self) -> list[VarDecl]:
        return [d for d in self.variables() if d.type.base == "clock"]

    def channels(self) -> list[VarDecl]:
        return [d for d in self.variables() if d.type.base == "chan"]

    def text(self) -> str:
        lines = []
        for d in self.decls:
            line = E.show_decl(d)
            if isinstance(d, VarDecl) and d.name in self.inactive:
                line += f" // inactive when {E.show(self.inactive[d.name])}"
            lines.append(line)
        return "\n".join(lines)

    def __eq__(self, other) -> bool:
        return isinstance(other, Declarations) and self.decls == other.decls

    def __repr__(self) -> str:
        return f"Declarations({len(self.decls)} items)"


@dataclass
class Template:
    name: str
    params: tuple[Param, ...] = ()
    declarations: Declarations = field(default_factory=Declarations)
    locations: list[Location] = field(default_factory=list)
    initial: Optional[str] = None
    edges: list[Edge] = field(default_factory=list)

    def location(self, loc_id: str) -> Location:
        for loc in self.locations:
            if loc.id == loc_id:
                return loc
        raise KeyError(f"template {self.name}: no location {loc_id!r}")

    def location_ids(self) -> list[str]:
        return [loc.id for loc in self.locations]

    def outgoing(self, loc_id: str) -> list[Edge]:
        return [e for e in self.edges if e.src == loc_id]

    def param_names(self) -> list[str]:
        return [p.name for p in self.params]

    def normalised(self) -> "Template":
        """Copy with locations and edges in a canonical order."""
        return Template(
            self.name,
            self.params,
            self.declarations,
            sorted(self.locations, key=lambda loc: loc.id),
            self.initial,
            sorted(self.edges, key=lambda e: (e.src, e.dst, e.describe())),
        )


@dataclass(frozen=True)
class Instance:
    name: str
    template: str
    args: tuple[int, ...] = ()


@dataclass
class SystemModel:
    templates: list[Template] = field(default_factory=list)
    globals: Declarations = field(default_factory=Declarations)
    instances: list[Instance] = field(default_factory=list)

    def template(self, name: str) -> Template:
        for t in self.templates:
            if t.name == name:
                return t
        raise KeyError(f"no template {name!r}")

    def instance(self, name: str) -> Instance:
        for i in self.instances:
            if i.name == name:
                return i
        raise KeyError(f"no instance {name!r}")


# --------------------------------------------------------------------------
# builder

class TemplateBuilder:
    """Incremental construction of a :class:`Template`.

    >>> b = TemplateBuilder("T")
    >>> b.add_location("l0", initial=True)
    >>> t = b.finalize()
    """

    def __init__(self, name: str, params: Iterable[Param] | str = ()):
        if isinstance(params, str):
            params = E.parse_params(params)
        self.template = Template(name, tuple(params))
        self._ids: set[str] = set()

    def declare(self, decl: Union[Decl, str]) -> "TemplateBuilder":
        self.template.declarations.add(decl)
        return self

    def add_location(self, loc_id: str, *, name: Optional[str] = None,
                     urgency: Urgency | str = Urgency.NORMAL,
                     invariant: Union[Expr, ClockConstraint, str] = E.TRUE,
                     initial: bool = False) -> None:
        if loc_id in self._ids:
            raise ModelError(f"template {self.template.name}: duplicate location {loc_id!r}")
        self._ids.add(loc_id)
        self.template.locations.append(
            Location(loc_id, name, Urgency(urgency), _as_expr(invariant))
        )
        if initial:
            if self.template.initial is not None:
                raise ModelError(f"template {self.template.name}: second initial location {loc_id!r}")
            self.template.initial = loc_id

    def add_edge(self, src: str, dst: str, *,
                 guard: Union[Expr, ClockConstraint, str] = E.TRUE,
                 sync: Union[Sync, str, None] = None,
                 updates: Union[Iterable[Expr], str] = (),
                 tag: str = "") -> Edge:
        for loc in (src, dst):
            if loc not in self._ids:
                raise ModelError(f"template {self.template.name}: edge references unknown location {loc!r}")
        if isinstance(sync, str):
            sync = Sync.parse(sync)
        if isinstance(updates, str):
            updates = E.parse_expr_list(updates)
        edge = Edge(src, dst, _as_expr(guard), sync, tuple(updates), tag)
        self.template.edges.append(edge)
        return edge

    def finalize(self, globals: Optional[Declarations] = None) -> Template:
        if self.template.initial is None:
            raise ModelError(f"template {self.template.name}: no initial location")
        from .checks import template_diagnostics

        errors = [d for d in template_diagnostics(self.template, globals) if d.severity == "error"]
        if errors:
            raise ModelError("; ".join(d.message for d in errors))
        return self.template


def new_template(name: str, params: Iterable[Param] | str = ()) -> TemplateBuilder:
    return TemplateBuilder(name, params)


def _as_expr(x: Union[Expr, ClockConstraint, str]) -> Expr:
    if isinstance(x, ClockConstraint):
        return x.to_expr()
    if isinstance(x, str):
        return E.parse_expr(x) if x.strip() else E.TRUE
    return x
