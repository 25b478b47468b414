"""Command-line driver: ``creolta translate | check | report``."""
from __future__ import annotations

import json
import re
import sys
import time
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .analysis.compiler import Network
from .analysis.query import (BUDGET, SCHEDULABLE, QueryError, check_schedulability, parse_query,
                             render_trace, run_query, trace_to_source)
from .io.config import ConfigError, ProjectConfig, load_config
from .io.report import ReportError, dumps, make_report, read_report
from .io.uppaal import to_xml
from .project import build_project
from .translate import TranslationError

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _fail(msg: str, code: int = EXIT_CONFIG):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _load(config: str, strategy: Optional[str], max_queue: Optional[int],
          budget: Optional[int]) -> ProjectConfig:
    try:
        cfg = load_config(config)
    except ConfigError as exc:
        _fail(str(exc))
    if strategy:
        cfg = cfg.replace(strategy=strategy.lower())
    if max_queue is not None:
        cfg = cfg.replace(max_queue=max_queue)
    if budget is not None:
        cfg = cfg.replace(budget=budget)
    return cfg


def _build(cfg: ProjectConfig):
    try:
        return build_project(cfg)
    except (ConfigError, TranslationError, ValueError) as exc:
        _fail(str(exc))


_SWEEP = re.compile(r"^([A-Za-z_]\w*)=(-?\d+)\.\.(-?\d+)$")


def parse_sweep(text: str) -> tuple[str, list[int]]:
    m = _SWEEP.match(text.strip())
    if not m:
        raise click.BadParameter("expected VAR=a..b")
    a, b = int(m.group(2)), int(m.group(3))
    step = 1 if b >= a else -1
    return m.group(1), list(range(a, b + step, step))


@click.group()
@click.version_option(__version__, prog_name="creolta")
def main():
    """Schedulability analysis of timed Creol classes."""


_common = [
    click.option("--strategy", type=click.Choice(["edf", "fps", "fcfs"], case_sensitive=False)),
    click.option("--max-queue", type=click.IntRange(min=1)),
    click.option("--budget", type=click.IntRange(min=1)),
    click.option("--out", type=click.Path(dir_okay=False)),
]


def common(f):
    for opt in reversed(_common):
        f = opt(f)
    return f


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@common
@click.option("--tables", type=click.Path(dir_okay=False),
              help="Also write the task table and location map as JSON.")
def translate(config, strategy, max_queue, budget, out, tables):
    """Write the composed system as UPPAAL XML."""
    cfg = _load(config, strategy, max_queue, budget)
    proj = _build(cfg)
    queries = [q.text for q in cfg.queries]
    xml = to_xml(proj.system.model, [uppaal_query(q) for q in queries])
    if out:
        Path(out).write_text(xml)
    else:
        click.echo(xml, nl=False)
    if tables:
        data = {"tasks": proj.translation.table.as_dict(),
                "locations": proj.translation.locmap.as_dict(),
                "queue_bound": proj.bound, "max_queue": proj.system.config.max_queue}
        Path(tables).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def uppaal_query(text: str) -> str:
    t = " ".join(text.split())
    if t == "reach Error":
        return "E<> Sched.Error"
    if t == "invariant not Error":
        return "A[] not Sched.Error"
    return f"// {t}"


def run_check(cfg: ProjectConfig, with_trace: bool = True) -> tuple[dict, int]:
    """Schedulability plus configured queries; returns (report fragment, exit code)."""
    proj = build_project(cfg)
    osys = proj.system
    net = Network(osys.model)
    t0 = time.perf_counter()
    res = check_schedulability(osys, cfg.budget, net)
    sched = res.as_dict()
    if with_trace and res.trace is not None:
        sched["trace"] = trace_to_source(net, osys, res.trace)
    code = EXIT_OK
    if res.verdict == BUDGET:
        code = EXIT_BUDGET
    elif cfg.expect_schedulable is not None and (res.verdict == SCHEDULABLE) != cfg.expect_schedulable:
        code = EXIT_MISMATCH
    queries = []
    for spec in cfg.queries:
        q = parse_query(spec.text, osys, net)
        r = run_query(net, q, cfg.budget)
        entry = {"text": spec.text, "verdict": r.verdict.kind, "holds": r.holds,
                 "expect": spec.expect, "states": r.verdict.states,
                 "seconds": round(r.verdict.seconds, 3), "replayed": r.replayed}
        if with_trace and r.trace is not None:
            entry["trace"] = trace_to_source(net, osys, r.trace)
        if r.verdict.kind == "budget":
            code = max(code, EXIT_BUDGET)
        elif spec.expect is not None and r.holds != spec.expect and code == EXIT_OK:
            code = EXIT_MISMATCH
        queries.append(entry)
    stats = {"seconds": round(time.perf_counter() - t0, 3), "clocks": net.nclocks - 1,
             "instances": len(net.instances)}
    return {"schedulability": sched, "queries": queries, "stats": stats}, code


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@common
@click.option("--sweep", help="Re-check for every value of a constant, e.g. SPEED=20..30.")
def check(config, strategy, max_queue, budget, out, sweep):
    """Check schedulability and the configured queries; write a JSON report."""
    cfg = _load(config, strategy, max_queue, budget)
    rows = []
    try:
        if sweep:
            name, values = parse_sweep(sweep)
            code = EXIT_OK
            for val in values:
                part, c = run_check(cfg.with_constant(name, val), with_trace=False)
                s = part["schedulability"]
                rows.append({"variable": name, "value": val, "verdict": s["verdict"],
                             "occupancy": s["occupancy"], "states": s["states"],
                             "seconds": s["seconds"]})
                click.echo(f"{name}={val:<6} {s['verdict']:<16} occupancy={s['occupancy']} "
                           f"states={s['states']}", err=True)
                if c == EXIT_BUDGET:
                    code = EXIT_BUDGET
            part = {"schedulability": {}, "queries": [], "stats": {}}
        else:
            part, code = run_check(cfg)
    except (ConfigError, TranslationError, QueryError, ValueError) as exc:
        _fail(str(exc))
    report = make_report(__version__, cfg.echo(), part["schedulability"], part["queries"], rows,
                         part["stats"])
    text = dumps(report)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    if not sweep:
        s = part["schedulability"]
        click.echo(f"{s['verdict']} (occupancy {s['occupancy']}, {s['states']} states)", err=True)
    sys.exit(code)


@main.command()
@click.argument("report_file", type=click.Path(exists=True, dir_okay=False))
def report(report_file):
    """Render a JSON report as text."""
    try:
        data = read_report(report_file)
    except ReportError as exc:
        _fail(str(exc))
    click.echo(render_report(data))


def render_report(data: dict) -> str:
    lines = [f"creolta report (schema version {data['version']}, tool {data['tool']['version']})"]
    s = data.get("schedulability") or {}
    if s:
        lines.append(f"schedulability: {s['verdict']}  occupancy {s['occupancy']}"
                     f"  capacity {s['max_queue']}  bound {s['queue_bound']}  states {s['states']}")
        if s.get("cause"):
            lines.append(f"  cause: {s['cause']}" + (f", missed {s['missed']}" if s.get("missed") else ""))
        if s.get("trace"):
            lines.append(render_trace(s["trace"]))
    for q in data["queries"]:
        lines.append(f"query {q['text']!r}: {q['verdict']}"
                     + (f" (expected {'true' if q['expect'] else 'false'}, holds {q['holds']})"
                        if q.get("expect") is not None else ""))
        if q.get("trace"):
            lines.append(render_trace(q["trace"]))
    if data.get("sweep"):
        lines.append("sweep:")
        for r in data["sweep"]:
            lines.append(f"  {r['variable']}={r['value']}: {r['verdict']} (occupancy {r['occupancy']})")
    if not s and not data["queries"] and not data.get("sweep"):
        lines.append("no results")
    stats = data.get("stats") or {}
    if stats:
        lines.append("stats: " + ", ".join(f"{k}={v}" for k, v in sorted(stats.items())))
    return "\n".join(lines)


if __name__ == "__main__":
    main()
