"""Project files: one TOML document describing what to translate and check.

Example::

    [model]
    source = "coordinator.creol"
    class = "Coordinator"

    [constants]
    SPEED = 25
    MD = 21

    [scheduler]
    strategy = "edf"        # edf | fps | fcfs
    hard_limit = 10         # cap on the derived queue capacity

    [deadline]
    range = [0, 50]
    initial = 50

    [[interface]]
    file = "interfaces.ta"
    template = "C1"
    provides = ["m1"]

    [[query]]
    text = "reach line m1:26"
    expect = true
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import tomli

from ..scheduler import STRATEGIES


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InterfaceSpec:
    provides: tuple[str, ...]
    file: Optional[Path] = None
    template: Optional[str] = None
    name: Optional[str] = None
    known: tuple[int, ...] = (0,)
    periodic: Optional[dict] = None

    @property
    def label(self) -> str:
        return self.name or self.template or "interface"


@dataclass(frozen=True)
class QuerySpec:
    text: str
    expect: Optional[bool] = None


@dataclass(frozen=True)
class ProjectConfig:
    source: Path
    class_name: Optional[str] = None
    interfaces: tuple[InterfaceSpec, ...] = ()
    keep: tuple[str, ...] = ()
    drop: tuple[str, ...] = ()
    ranges: dict = field(default_factory=dict, hash=False)
    strategy: str = "edf"
    max_queue: Optional[int] = None
    hard_limit: int = 10
    tie: str = "last"
    priorities: dict = field(default_factory=dict, hash=False)
    deadline_range: Optional[tuple[int, int, int]] = None
    wiring: dict = field(default_factory=dict, hash=False)
    constants: dict = field(default_factory=dict, hash=False)
    queries: tuple[QuerySpec, ...] = ()
    budget: int = 5_000_000
    expect_schedulable: Optional[bool] = None
    self_id: int = 0
    path: Optional[Path] = None

    def replace(self, **kw) -> "ProjectConfig":
        return dataclasses.replace(self, **kw)

    def with_constant(self, name: str, value: int) -> "ProjectConfig":
        consts = dict(self.constants)
        consts[name] = value
        return self.replace(constants=consts)

    def echo(self) -> dict:
        """JSON-friendly copy for reports."""
        return {
            "source": str(self.source),
            "class": self.class_name,
            "interfaces": [
                {"name": i.label, "file": str(i.file) if i.file else None,
                 "provides": list(i.provides), "known": list(i.known),
                 "periodic": dict(i.periodic) if i.periodic else None}
                for i in self.interfaces
            ],
            "abstraction": {"keep": list(self.keep), "drop": list(self.drop),
                            "ranges": {k: list(v) for k, v in self.ranges.items()}},
            "scheduler": {"strategy": self.strategy, "max_queue": self.max_queue,
                          "hard_limit": self.hard_limit, "tie": self.tie,
                          "priorities": dict(self.priorities)},
            "deadline": list(self.deadline_range) if self.deadline_range else None,
            "wiring": dict(self.wiring),
            "constants": dict(self.constants),
            "queries": [{"text": q.text, "expect": q.expect} for q in self.queries],
            "budget": self.budget,
            "expect_schedulable": self.expect_schedulable,
        }


def _get(d: dict, key: str, typ, default=None, where: str = ""):
    if key not in d:
        return default
    v = d[key]
    if typ is int and isinstance(v, bool):
        raise ConfigError(f"{where}{key}: expected an integer")
    if not isinstance(v, typ):
        raise ConfigError(f"{where}{key}: expected {getattr(typ, '__name__', typ)}")
    return v


def parse_config(data: dict, base: Path = Path("."), path: Optional[Path] = None) -> ProjectConfig:
    known = {"model", "constants", "abstraction", "scheduler", "deadline", "wiring",
             "interface", "query", "analysis"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    model = _get(data, "model", dict, {}, "")
    src = _get(model, "source", str, None, "model.")
    if src is None:
        raise ConfigError("model.source is required")
    source = (base / src).resolve()
    if not source.is_file():
        raise ConfigError(f"model source {source} does not exist")
    ifaces = []
    for k, item in enumerate(_get(data, "interface", list, [], "")):
        where = f"interface[{k}]."
        provides = tuple(_get(item, "provides", list, [], where))
        known_ids = tuple(_get(item, "known", list, [0], where))
        per = _get(item, "periodic", dict, None, where)
        f = _get(item, "file", str, None, where)
        if (per is None) == (f is None):
            raise ConfigError(f"{where[:-1]}: give exactly one of 'file' and 'periodic'")
        fp = None
        if f is not None:
            fp = (base / f).resolve()
            if not fp.is_file():
                raise ConfigError(f"interface file {fp} does not exist")
        if per is not None and "method" not in per:
            raise ConfigError(f"{where}periodic: 'method' is required")
        if not provides and per is not None:
            provides = (per["method"],)
        ifaces.append(InterfaceSpec(provides, fp, _get(item, "template", str, None, where),
                                    _get(item, "name", str, None, where), known_ids, per))
    absn = _get(data, "abstraction", dict, {}, "")
    ranges = {}
    for name, r in _get(absn, "ranges", dict, {}, "abstraction.").items():
        if not (isinstance(r, list) and len(r) == 2 and all(isinstance(x, int) for x in r)):
            raise ConfigError(f"abstraction.ranges.{name}: expected [lo, hi]")
        ranges[name] = tuple(r)
    sch = _get(data, "scheduler", dict, {}, "")
    strategy = _get(sch, "strategy", str, "edf", "scheduler.").lower()
    if strategy not in STRATEGIES:
        raise ConfigError(f"scheduler.strategy: unknown strategy {strategy!r}")
    dl = _get(data, "deadline", dict, None, "")
    drange = None
    if dl is not None:
        r = _get(dl, "range", list, None, "deadline.")
        if r is None or len(r) != 2:
            raise ConfigError("deadline.range: expected [lo, hi]")
        drange = (r[0], r[1], _get(dl, "initial", int, r[1], "deadline."))
    consts = _get(data, "constants", dict, {}, "")
    for k, v in consts.items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"constants.{k}: expected an integer")
    queries = []
    for k, q in enumerate(_get(data, "query", list, [], "")):
        if isinstance(q, str):
            queries.append(QuerySpec(q))
        else:
            queries.append(QuerySpec(_get(q, "text", str, "", f"query[{k}]."),
                                     _get(q, "expect", bool, None, f"query[{k}].")))
    an = _get(data, "analysis", dict, {}, "")
    return ProjectConfig(
        source=source,
        class_name=_get(model, "class", str, None, "model."),
        interfaces=tuple(ifaces),
        keep=tuple(_get(absn, "keep", list, [], "abstraction.")),
        drop=tuple(_get(absn, "drop", list, [], "abstraction.")),
        ranges=ranges,
        strategy=strategy,
        max_queue=_get(sch, "max_queue", int, None, "scheduler."),
        hard_limit=_get(sch, "hard_limit", int, 10, "scheduler."),
        tie=_get(sch, "tie", str, "last", "scheduler."),
        priorities=dict(_get(sch, "priorities", dict, {}, "scheduler.")),
        deadline_range=drange,
        wiring=dict(_get(data, "wiring", dict, {}, "")),
        constants=dict(consts),
        queries=tuple(queries),
        budget=_get(an, "budget", int, 5_000_000, "analysis."),
        expect_schedulable=_get(an, "expect_schedulable", bool, None, "analysis."),
        self_id=_get(model, "self", int, 0, "model."),
        path=path,
    )


def load_config(path: Union[str, Path]) -> ProjectConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {p} does not exist")
    try:
        data = tomli.loads(p.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from None
    return parse_config(data, p.parent, p.resolve())
