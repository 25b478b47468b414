"""From a project configuration to a composed, checkable system."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .creol.parser import parse_file
from .interface import BehavioralInterface, constants_of, load_interface, periodic
from .io.config import ConfigError, ProjectConfig
from .io.tatext import load_system
from .io.uppaal import load_xml
from .scheduler import SchedulerConfig, SchedulerError, extract_timing_bounds, queue_bound
from .system import ObjectSystem, build_system
from .ta.model import Declarations, SystemModel
from .translate import AbstractionPolicy, DeadlineRange, Translation, translate_model


@dataclass
class Project:
    config: ProjectConfig
    translation: Translation
    system: ObjectSystem
    bound: Optional[int]


def constant_decls(consts: dict) -> Declarations:
    return Declarations.parse("".join(f"const int {k} = {v};\n" for k, v in consts.items()))


def _load_file(path) -> SystemModel:
    if path.suffix.lower() == ".xml":
        return load_xml(path)
    return load_system(path)


def load_interfaces(cfg: ProjectConfig, tr: Translation) -> list[BehavioralInterface]:
    consts = constant_decls(cfg.constants)
    out = []
    cache: dict = {}
    for spec in cfg.interfaces:
        if spec.periodic is not None:
            p = dict(spec.periodic)
            name = spec.name or f"Env{len(out) + 1}"
            t = periodic(name, p["method"], tr, p.get("period", "SPEED"), p.get("deadline", "MD"),
                         p.get("jitter", 0), p.get("burst", 0), p.get("offset"))
            glob = Declarations(list(consts))
        else:
            if spec.file not in cache:
                cache[spec.file] = _load_file(spec.file)
            sysm = cache[spec.file]
            names = [t.name for t in sysm.templates]
            if spec.template is None and len(names) != 1:
                raise ConfigError(f"{spec.file}: name the template to use ({', '.join(names)})")
            tname = spec.template or names[0]
            if tname not in names:
                raise ConfigError(f"{spec.file}: no template {tname!r}")
            t = sysm.template(tname)
            seen = {d.name for d in consts}
            glob = Declarations(list(consts) + [d for d in sysm.globals if d.name not in seen])
        out.append(load_interface(t, spec.provides, tr, spec.known, glob, cfg.self_id))
    return out


def build_project(cfg: ProjectConfig) -> Project:
    model = parse_file(cfg.source)
    cls = model.cls(cfg.class_name)
    policy = AbstractionPolicy.default(cls, cfg.keep, cfg.drop, cfg.ranges)
    drange = DeadlineRange(*cfg.deadline_range) if cfg.deadline_range else None
    tr = translate_model(model, cfg.class_name, policy, drange)
    ifaces = load_interfaces(cfg, tr)
    bound = None
    try:
        env = constants_of(list(constant_decls(cfg.constants))
                           + [d for b in ifaces for d in b.globals])
        d_max, b_min = extract_timing_bounds(tr.templates, [b.template for b in ifaces], env)
        bound = queue_bound(max(d_max, tr.deadline_range.init), b_min)
    except SchedulerError:
        pass
    if cfg.max_queue is not None:
        cap = cfg.max_queue
    elif bound is not None:
        cap = min(bound, cfg.hard_limit)
    else:
        cap = cfg.hard_limit
    sc = SchedulerConfig(cfg.strategy, cap, dict(cfg.priorities), cfg.tie)
    osys = build_system(tr, sc, ifaces, cfg.self_id, cfg.wiring, constant_decls(cfg.constants))
    return Project(cfg, tr, osys, bound)
