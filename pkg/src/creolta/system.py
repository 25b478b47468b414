"""Assembly of a closed system: method automata, scheduler and environment."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .interface import BehavioralInterface, compose_environment
from .scheduler import SchedulerConfig, build_scheduler
from .ta.model import Declarations, Instance, SystemModel
from .translate import Translation

SCHEDULER = "Sched"


def method_instance(method: str) -> str:
    return f"M_{method}"


@dataclass
class ObjectSystem:
    """A single object together with its scheduler and environment."""

    model: SystemModel
    translation: Translation
    config: SchedulerConfig
    interfaces: list[BehavioralInterface] = field(default_factory=list)
    self_id: int = 0

    @property
    def scheduler(self) -> str:
        return SCHEDULER

    def instance_of_method(self, method: str) -> str:
        return method_instance(method)

    def method_of_instance(self, name: str) -> Optional[str]:
        for m in self.translation.table.methods:
            if method_instance(m) == name:
                return m
        return None


def build_system(tr: Translation, config: SchedulerConfig,
                 interfaces: Iterable[BehavioralInterface] = (), self_id: int = 0,
                 wiring: Optional[dict[str, int]] = None,
                 extra_globals: Optional[Declarations] = None) -> ObjectSystem:
    """Instantiate every method template and the scheduler for object ``self_id``.

    ``wiring`` gives the object id of every class parameter; unspecified
    parameters are wired to ``self_id``. ``extra_globals`` take precedence
    over same-named declarations that come with the interfaces.
    """
    interfaces = list(interfaces)
    wiring = dict(wiring or {})
    unknown = set(wiring) - {p.name for p in tr.cls.params}
    if unknown:
        raise ValueError(f"wiring names unknown parameter(s) {sorted(unknown)}")
    n_obj = len(tr.cls.params) + 1
    bad = sorted(k for k, v in wiring.items() if not 0 <= v < n_obj)
    if bad:
        raise ValueError(f"wiring of {', '.join(bad)} is outside the object ids 0..{n_obj - 1}")
    args = tuple(wiring.get(p.name, self_id) for p in tr.cls.params) + (self_id,)
    globs = Declarations(list(tr.declarations))
    seen = set(globs.names())
    extra = list(extra_globals or ())
    for b in interfaces:
        extra += list(b.globals)
    for d in extra:
        if d.name not in seen:
            globs.add(d)
            seen.add(d.name)
    sched = build_scheduler(tr, config, SCHEDULER + "T")
    templates = list(tr.templates) + [sched] + [b.template for b in interfaces]
    instances = [Instance(method_instance(m), tr.naming.template(m), args)
                 for m in tr.table.methods]
    instances.append(Instance(SCHEDULER, sched.name, (self_id,)))
    instances += compose_environment(interfaces, self_id)
    model = SystemModel(templates, globs, instances)
    return ObjectSystem(model, tr, config, interfaces, self_id)
