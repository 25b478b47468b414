"""Plain-text form of timed-automata systems.

::

    const int SPEED = 25;
    template C1(const int self) {
      clock x;
      location run init invariant x <= SPEED;
      location b0 committed;
      edge run -> run [tick] guard x >= SPEED sync invoke[0][op_m1][self][0]! assign deadline = MD, x = 0;
    }

Lines inside a template that start with ``location`` or ``edge`` describe the
graph; the optional ``[tag]`` after an edge's target is a free-form label.
All other lines are local declarations. Top-level text outside
templates is global declarations, except ``system`` lines of the form
``system Name = Template(args);``.
"""
from __future__ import annotations

import re
from pathlib import Path
from typing import Union

from ..ta import expr as E
from ..ta.model import Declarations, Edge, Instance, Location, ModelError, Sync, SystemModel, \
    Template, Urgency


class TextFormatError(ValueError):
    pass


_TEMPLATE = re.compile(r"^\s*template\s+([A-Za-z_]\w*)\s*\((.*)\)\s*\{\s*$")
_LOCATION = re.compile(r"^location\s+([A-Za-z_]\w*)(.*);$")
_EDGE = re.compile(r"^edge\s+([A-Za-z_]\w*)\s*->\s*([A-Za-z_]\w*)(?:\s*\[([\w\-]*)\])?(.*);$")
_CLAUSE = re.compile(r"\b(guard|sync|assign)\b")
_INSTANCE = re.compile(r"^\s*system\s+([A-Za-z_]\w*)\s*=\s*([A-Za-z_]\w*)\s*\((.*)\)\s*;\s*$")


def _clauses(text: str, where: str) -> dict[str, str]:
    parts = _CLAUSE.split(text)
    if parts[0].strip():
        raise TextFormatError(f"{where}: unexpected {parts[0].strip()!r}")
    out = {}
    for key, val in zip(parts[1::2], parts[2::2]):
        if key in out:
            raise TextFormatError(f"{where}: repeated {key}")
        out[key] = val.strip()
    return out


def _location(m: re.Match, where: str) -> tuple[Location, bool]:
    loc_id, rest = m.group(1), m.group(2).strip()
    initial = urgency = None
    inv = E.TRUE
    words = rest.split(None, 1)
    while words:
        w = words[0]
        if w == "init":
            initial = True
        elif w in ("urgent", "committed"):
            urgency = Urgency(w)
        elif w == "invariant":
            inv = E.parse_expr(words[1]) if len(words) > 1 else None
            if inv is None:
                raise TextFormatError(f"{where}: empty invariant")
            break
        else:
            raise TextFormatError(f"{where}: unexpected {w!r}")
        rest = words[1] if len(words) > 1 else ""
        words = rest.split(None, 1)
    return Location(loc_id, loc_id, urgency or Urgency.NORMAL, inv), bool(initial)


def _edge(m: re.Match, where: str) -> Edge:
    cl = _clauses(m.group(4), where)
    guard = E.parse_expr(cl["guard"]) if cl.get("guard") else E.TRUE
    sync = Sync.parse(cl["sync"]) if cl.get("sync") else None
    upd = E.parse_expr_list(cl["assign"]) if cl.get("assign") else ()
    return Edge(m.group(1), m.group(2), guard, sync, upd, m.group(3) or "")


def parse_system(text: str, where: str = "<text>") -> SystemModel:
    """Globals, templates and optional ``system`` instances."""
    lines = text.splitlines()
    glob: list[str] = []
    templates: list[Template] = []
    instances: list[Instance] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        m = _TEMPLATE.match(line)
        if m:
            i, t = _template(lines, i, m, where)
            templates.append(t)
            continue
        mi = _INSTANCE.match(line)
        if mi:
            args = tuple(int(a) for a in mi.group(3).split(",") if a.strip())
            instances.append(Instance(mi.group(1), mi.group(2), args))
        else:
            glob.append(line)
        i += 1
    try:
        decls = Declarations.parse("\n".join(glob))
    except E.ExprSyntaxError as exc:
        raise TextFormatError(f"{where}: global declarations: {exc}") from None
    return SystemModel(templates, decls, instances)


def _template(lines: list[str], i: int, m: re.Match, where: str) -> tuple[int, Template]:
    name = m.group(1)
    try:
        params = E.parse_params(m.group(2)) if m.group(2).strip() else ()
    except E.ExprSyntaxError as exc:
        raise TextFormatError(f"{where}:{i + 1}: {exc}") from None
    decl_lines: list[str] = []
    locs: list[Location] = []
    edges: list[Edge] = []
    initial = None
    depth = 0
    i += 1
    while i < len(lines):
        raw = lines[i]
        s = raw.strip()
        here = f"{where}:{i + 1}"
        if depth == 0 and s == "}":
            break
        try:
            if depth == 0 and s.startswith("location "):
                loc, is_init = _location(_must(_LOCATION, s, here), here)
                locs.append(loc)
                if is_init:
                    if initial is not None:
                        raise TextFormatError(f"{here}: second initial location")
                    initial = loc.id
            elif depth == 0 and s.startswith("edge "):
                edges.append(_edge(_must(_EDGE, s, here), here))
            else:
                depth += raw.count("{") - raw.count("}")
                decl_lines.append(raw)
        except E.ExprSyntaxError as exc:
            raise TextFormatError(f"{here}: {exc}") from None
        i += 1
    else:
        raise TextFormatError(f"{where}: template {name} is not closed")
    if initial is None:
        raise TextFormatError(f"{where}: template {name} has no initial location")
    ids = {l.id for l in locs}
    for e in edges:
        for x in (e.src, e.dst):
            if x not in ids:
                raise TextFormatError(f"{where}: template {name}: unknown location {x!r}")
    try:
        decls = Declarations.parse("\n".join(decl_lines))
    except E.ExprSyntaxError as exc:
        raise TextFormatError(f"{where}: template {name}: {exc}") from None
    return i + 1, Template(name, tuple(params), decls, locs, initial, edges)


def _must(rx: re.Pattern, s: str, where: str) -> re.Match:
    m = rx.match(s)
    if m is None:
        raise TextFormatError(f"{where}: cannot parse {s!r}")
    return m


def load_system(path: Union[str, Path]) -> SystemModel:
    p = Path(path)
    return parse_system(p.read_text(), str(p))


# --------------------------------------------------------------------------
# printing

def show_template(t: Template) -> str:
    params = ", ".join(_show_param(p) for p in t.params)
    out = [f"template {t.name}({params}) {{"]
    body = t.declarations.text().rstrip()
    if body:
        out += ["  " + l if l else l for l in body.splitlines()]
    for loc in t.locations:
        bits = [f"location {loc.id}"]
        if loc.id == t.initial:
            bits.append("init")
        if loc.urgency is not Urgency.NORMAL:
            bits.append(loc.urgency.value)
        if loc.invariant != E.TRUE:
            bits.append(f"invariant {E.show(loc.invariant)}")
        out.append("  " + " ".join(bits) + ";")
    for e in t.edges:
        bits = [f"edge {e.src} -> {e.dst}" + (f" [{e.tag}]" if e.tag else "")]
        if e.guard != E.TRUE:
            bits.append(f"guard {E.show(e.guard)}")
        if e.sync is not None:
            bits.append(f"sync {e.sync.show()}")
        if e.updates:
            bits.append("assign " + ", ".join(E.show(u) for u in e.updates))
        out.append("  " + " ".join(bits) + ";")
    out.append("}")
    return "\n".join(out)


def _show_param(p: E.Param) -> str:
    return E.show_type(p.type) + (" &" if p.ref else " ") + p.name


def show_system(sys: SystemModel) -> str:
    parts = [sys.globals.text().rstrip()]
    parts += [show_template(t) for t in sys.templates]
    parts += [f"system {i.name} = {i.template}({', '.join(map(str, i.args))});"
              for i in sys.instances]
    return "\n\n".join(p for p in parts if p) + "\n"


def show_translation(tr) -> str:
    """Reviewable dump of a translation: declarations, templates, tasks, line map."""
    parts = [tr.declarations.text().rstrip()]
    parts += [show_template(t) for t in tr.templates]
    tasks = ["// tasks: name id method enabler"]
    for row in tr.table.as_dict()["tasks"]:
        tasks.append(f"// {row['name']} {row['id']} {row['method']} {row['enabler']}")
    parts.append("\n".join(tasks))
    lines = ["// locations: template.location method:line"]
    for key, span in tr.locmap.as_dict().items():
        lines.append(f"// {key} {span['method']}:{span['line']}")
    parts.append("\n".join(lines))
    return "\n\n".join(p for p in parts if p) + "\n"


__all__ = ["TextFormatError", "load_system", "parse_system", "show_system", "show_template",
           "show_translation", "ModelError"]
