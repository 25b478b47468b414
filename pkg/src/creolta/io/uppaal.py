"""UPPAAL 4.x XML documents."""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Union

from ..ta import expr as E
from ..ta.model import Declarations, Edge, Instance, Location, Sync, SystemModel, Template, \
    Urgency

DOCTYPE = ("<!DOCTYPE nta PUBLIC '-//Uppaal Team//DTD Flat System 1.1//EN' "
           "'http://www.it.uu.se/research/group/darts/uppaal/flat-1_2.dtd'>")


class XmlFormatError(ValueError):
    pass


def _sub(parent: ET.Element, tag: str, text: str = None, **attrs) -> ET.Element:
    el = ET.SubElement(parent, tag, attrs)
    if text is not None:
        el.text = text
    return el


def _label(parent, kind: str, text: str) -> None:
    _sub(parent, "label", text, kind=kind)


def _params(t: Template) -> str:
    return ", ".join(E.show_type(p.type) + (" &" if p.ref else " ") + p.name for p in t.params)


def system_line(model: SystemModel) -> str:
    lines = [f"{i.name} = {i.template}({', '.join(map(str, i.args))});" for i in model.instances]
    names = ", ".join(i.name for i in model.instances)
    lines.append(f"system {names};")
    return "\n".join(lines)


def to_xml(model: SystemModel, queries: list[str] = ()) -> str:
    """Deterministic document text (locations are numbered in template order)."""
    nta = ET.Element("nta")
    _sub(nta, "declaration", model.globals.text())
    counter = 0
    for t in model.templates:
        tel = _sub(nta, "template")
        _sub(tel, "name", t.name)
        if t.params:
            _sub(tel, "parameter", _params(t))
        _sub(tel, "declaration", t.declarations.text())
        ids = {}
        for loc in t.locations:
            ids[loc.id] = f"id{counter}"
            counter += 1
            lel = _sub(tel, "location", id=ids[loc.id])
            _sub(lel, "name", loc.id)
            if loc.invariant != E.TRUE:
                _label(lel, "invariant", E.show(loc.invariant))
            if loc.urgency is Urgency.URGENT:
                _sub(lel, "urgent")
            elif loc.urgency is Urgency.COMMITTED:
                _sub(lel, "committed")
        if t.initial is not None:
            _sub(tel, "init", ref=ids[t.initial])
        for e in t.edges:
            eel = _sub(tel, "transition")
            _sub(eel, "source", ref=ids[e.src])
            _sub(eel, "target", ref=ids[e.dst])
            if e.guard != E.TRUE:
                _label(eel, "guard", E.show(e.guard))
            if e.sync is not None:
                _label(eel, "synchronisation", e.sync.show())
            if e.updates:
                _label(eel, "assignment", ", ".join(E.show(u) for u in e.updates))
            if e.tag:
                _label(eel, "comments", e.tag)
    _sub(nta, "system", system_line(model))
    qel = _sub(nta, "queries")
    for q in queries:
        qq = _sub(qel, "query")
        _sub(qq, "formula", q)
        _sub(qq, "comment", "")
    ET.indent(nta, space="  ")
    body = ET.tostring(nta, encoding="unicode")
    return f'<?xml version="1.0" encoding="utf-8"?>\n{DOCTYPE}\n{body}\n'


_INST = re.compile(r"^\s*([A-Za-z_]\w*)\s*=\s*([A-Za-z_]\w*)\s*\((.*)\)\s*;\s*$")


def _text(el) -> str:
    return (el.text or "") if el is not None else ""


def from_xml(text: str) -> SystemModel:
    """Read a document (or a bare ``<template>``) written in the flat format."""
    text = re.sub(r"<!DOCTYPE[^>]*>", "", text)
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise XmlFormatError(str(exc)) from None
    if root.tag == "template":
        tels, glob, system = [root], "", ""
    elif root.tag == "nta":
        tels = root.findall("template")
        glob = _text(root.find("declaration"))
        system = _text(root.find("system"))
    else:
        raise XmlFormatError(f"unexpected root element <{root.tag}>")
    try:
        templates = [_template(t) for t in tels]
        globs = Declarations.parse(glob)
    except E.ExprSyntaxError as exc:
        raise XmlFormatError(str(exc)) from None
    instances = []
    for line in system.splitlines():
        m = _INST.match(line)
        if m:
            args = tuple(int(a) for a in m.group(3).split(",") if a.strip())
            instances.append(Instance(m.group(1), m.group(2), args))
    return SystemModel(templates, globs, instances)


def _template(tel) -> Template:
    name = _text(tel.find("name")).strip()
    params = E.parse_params(_text(tel.find("parameter"))) if tel.find("parameter") is not None else ()
    decls = Declarations.parse(_text(tel.find("declaration")))
    ids: dict[str, str] = {}
    locs = []
    for lel in tel.findall("location"):
        lid = lel.get("id")
        nm = _text(lel.find("name")).strip() or lid
        ids[lid] = nm
        inv = E.TRUE
        for lab in lel.findall("label"):
            if lab.get("kind") == "invariant" and _text(lab).strip():
                inv = E.parse_expr(_text(lab))
        urg = Urgency.NORMAL
        if lel.find("urgent") is not None:
            urg = Urgency.URGENT
        elif lel.find("committed") is not None:
            urg = Urgency.COMMITTED
        locs.append(Location(nm, nm, urg, inv))
    init = tel.find("init")
    if init is None:
        raise XmlFormatError(f"template {name} has no initial location")
    edges = []
    for tr in tel.findall("transition"):
        labels = {lab.get("kind"): _text(lab).strip() for lab in tr.findall("label")}
        if labels.get("select"):
            raise XmlFormatError(f"template {name}: select labels are not supported")
        guard = E.parse_expr(labels["guard"]) if labels.get("guard") else E.TRUE
        sync = Sync.parse(labels["synchronisation"]) if labels.get("synchronisation") else None
        upd = E.parse_expr_list(labels["assignment"]) if labels.get("assignment") else ()
        edges.append(Edge(ids[tr.find("source").get("ref")], ids[tr.find("target").get("ref")],
                          guard, sync, upd, labels.get("comments", "")))
    return Template(name, tuple(params), decls, locs, ids[init.get("ref")], edges)


def load_xml(path: Union[str, Path]) -> SystemModel:
    return from_xml(Path(path).read_text())
