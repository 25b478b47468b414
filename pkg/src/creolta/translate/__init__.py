"""Translation of timed Creol classes into timed-automata templates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..creol import ast as A
from ..creol.validate import validate
from ..diagnostics import Diagnostic, errors
from ..ta import expr as E
from ..ta.model import Declarations, Template
from .abstraction import Abstraction, AbstractionError, AbstractionPolicy, label_reset
from .declarations import DeadlineRange, gen_declarations
from .method import L0, U, Fragment, LocMap, MethodContext, SourceSpan, TranslationError, \
    translate_method, translate_stmt
from .tasks import Naming, TaskTable, labels_of, mthds_of

__all__ = [
    "AbstractionPolicy", "DeadlineRange", "Fragment", "LocMap", "Naming", "SourceSpan",
    "TaskTable", "Translation", "TranslationError", "collect_helpers", "label_reset",
    "translate_class", "translate_model", "translate_stmt",
]


@dataclass
class Translation:
    cls: A.ClassDecl
    declarations: Declarations
    templates: list[Template]
    table: TaskTable
    locmap: LocMap
    naming: Naming
    policy: AbstractionPolicy
    deadline_range: DeadlineRange
    diagnostics: tuple[Diagnostic, ...] = ()

    def template_for(self, method: str) -> Template:
        name = self.naming.template(method)
        for t in self.templates:
            if t.name == name:
                return t
        raise KeyError(method)


def _params(cls: A.ClassDecl) -> tuple:
    ts = E.TypeSpec("int", const=True)
    return tuple(E.Param(ts, p.name) for p in cls.params) + (E.Param(ts, "self"),)


def collect_helpers(cls: A.ClassDecl, enablers: Optional[dict] = None):
    """``(labels, methods, tasks, starts)`` for ``cls``.

    ``enablers`` maps each method to its ``[(subtask, guard)]`` list; when it
    is omitted the class is translated with the default policy to obtain it.
    """
    if enablers is None:
        tr = translate_class(cls)
        return (list(tr.table.label_ids), _called(cls), list(tr.table.tasks), tr.table.starts)
    labels: list[str] = []
    for m in cls.methods:
        labels += [x for x in labels_of(m.body) if x not in labels]
    tasks: list[str] = []
    starts = []
    for m in cls.methods:
        tasks.append(m.name)
        for n, en in enablers.get(m.name, ()):
            tasks.append(n)
            starts.append((n, en))
    return labels, _called(cls), tasks, starts


def _called(cls: A.ClassDecl) -> list[str]:
    out: list[str] = []
    for m in cls.methods:
        out += [x for x in mthds_of(m.body) if x not in out]
    return out


def translate_class(cls: A.ClassDecl, policy: Optional[AbstractionPolicy] = None,
                    deadline_range: Optional[DeadlineRange] = None, file: str = "") -> Translation:
    policy = policy or AbstractionPolicy.default(cls)
    policy.check(cls)
    if deadline_range is None:
        hi = max(_deadlines(cls) or [0])
        deadline_range = DeadlineRange(0, hi, hi)
    drange = deadline_range
    naming = Naming(frozenset(p.name for p in cls.params))
    labels, _, _, _ = collect_helpers(cls, {})
    label_ids = {l: i + 1 for i, l in enumerate(labels)}
    absn = Abstraction(policy, [p.name for p in cls.params], naming.var, naming.label)
    params = _params(cls)
    method_names = frozenset(m.name for m in cls.methods)

    table = TaskTable(methods=[m.name for m in cls.methods], label_ids=label_ids)
    templates: list[Template] = []
    locmap = LocMap()
    for m in cls.methods:
        ctx = MethodContext(m, naming, absn, label_ids, file, method_names)
        try:
            t, frag = translate_method(m, ctx, params)
        except AbstractionError as exc:
            raise TranslationError(f"method {m.name}: {exc}") from exc
        templates.append(t)
        for loc, span in ctx.loc.items():
            locmap[(t.name, loc)] = span
        table.tasks.append(m.name)
        table.enablers[m.name] = E.TRUE
        table.source_enablers[m.name] = None
        for n, en, src in frag.enablers:
            table.tasks.append(n)
            table.enablers[n] = en
            table.source_enablers[n] = src
            table.parents[n] = m.name
    table.task_ids = {t: i for i, t in enumerate(table.tasks)}
    remote = [x for x in _called(cls) if x not in table.task_ids]
    table.remote_method_ids = {x: i for i, x in enumerate(remote)}
    decls = gen_declarations(cls, table, naming, policy, drange)
    return Translation(cls, decls, templates, table, locmap, naming, policy, drange)


def _deadlines(cls: A.ClassDecl) -> list[int]:
    return [s.ann.deadline for m in cls.methods for s in A.walk_stmts(m.body)
            if isinstance(s, A.Call) and s.ann.deadline is not None]


def translate_model(model: A.SourceModel, class_name: Optional[str] = None,
                    policy: Optional[AbstractionPolicy] = None,
                    deadline_range: Optional[DeadlineRange] = None) -> Translation:
    """Validate ``model`` and translate one of its classes."""
    diags = validate(model)
    errs = errors(diags)
    if errs:
        raise TranslationError("\n".join(str(d) for d in errs))
    cls = model.cls(class_name)
    tr = translate_class(cls, policy, deadline_range, model.file)
    tr.diagnostics = tuple(diags)
    return tr
