import json
import xml.etree.ElementTree as ET

import pytest
from click.testing import CliRunner

from creolta import __version__
from creolta.cli import main, parse_sweep, render_report, uppaal_query
from creolta.io.config import ConfigError, load_config, parse_config
from creolta.io.report import ReportError, make_report, read_report, validate_report, write_report
from creolta.io.uppaal import from_xml, to_xml
from creolta.project import build_project

from conftest import COORD, MODELS

SINGLE = MODELS / "single"


def write_config(tmp_path, text, name="p.toml"):
    (tmp_path / "single.creol").write_text((SINGLE / "single.creol").read_text())
    p = tmp_path / name
    p.write_text(text)
    return p


BASE = """[model]
source = "single.creol"

[deadline]
range = [0, 10]

[[interface]]
periodic = { method = "m", period = 5, deadline = 4 }
"""


# configuration -------------------------------------------------------------------

def test_load_coordinator_config(coordinator_cfg):
    cfg = coordinator_cfg
    assert cfg.source == COORD / "coordinator.creol"
    assert cfg.constants == {"SPEED": 25, "MD": 21, "JIT": 0}
    assert [i.template for i in cfg.interfaces] == ["C1", "C2", "C3"]
    assert cfg.deadline_range == (0, 50, 50) and cfg.strategy == "edf"
    assert cfg.queries[0].text == "reach line m1:26" and cfg.queries[0].expect is True


@pytest.mark.parametrize("data, message", [
    ({}, "model.source"),
    ({"model": {"source": "missing.creol"}}, "does not exist"),
    ({"model": {"source": "single.creol"}, "bogus": {}}, "unknown section"),
    ({"model": {"source": "single.creol"}, "scheduler": {"strategy": "rr"}}, "strategy"),
    ({"model": {"source": "single.creol"}, "constants": {"A": "x"}}, "integer"),
    ({"model": {"source": "single.creol"}, "interface": [{"file": "none.ta"}]}, "does not exist"),
    ({"model": {"source": "single.creol"}, "interface": [{"provides": ["m"]}]}, "exactly one"),
])
def test_config_errors(data, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(data, SINGLE)


def test_wiring_checked(tmp_path):
    p = write_config(tmp_path, BASE + "[wiring]\nx = 1\n")
    with pytest.raises(ValueError, match="unknown parameter"):
        build_project(load_config(p))


# reports --------------------------------------------------------------------------

def test_report_round_trip(tmp_path):
    rep = make_report("1.0", {"source": "x"}, {"verdict": "schedulable"},
                      [{"text": "reach Error", "verdict": "unreachable"}], stats={"seconds": 1})
    write_report(rep, tmp_path / "r.json")
    assert read_report(tmp_path / "r.json") == rep


def test_report_versions():
    old = {"schema": "creolta-report", "version": 1, "tool": {}, "config": {},
           "schedulability": {"verdict": "schedulable"}, "queries": []}
    assert validate_report(old)["sweep"] == []
    with pytest.raises(ReportError, match="newer"):
        validate_report(dict(old, version=99))
    with pytest.raises(ReportError):
        validate_report({"schema": "other"})


def test_empty_report_renders_stats_only():
    rep = make_report("1.0", {}, {}, [], stats={"seconds": 0.5})
    text = render_report(validate_report(rep))
    assert "no results" in text and "stats: seconds=0.5" in text


# XML --------------------------------------------------------------------------------

def test_xml_structure_and_golden(coordinator_cfg):
    model = build_project(coordinator_cfg).system.model
    text = to_xml(model, [uppaal_query(q.text) for q in coordinator_cfg.queries])
    assert text == to_xml(model, [uppaal_query(q.text) for q in coordinator_cfg.queries])
    assert text == (COORD / "coordinator.xml").read_text()
    root = ET.fromstring(text.split("\n", 2)[2])
    assert root.tag == "nta"
    assert [c.tag for c in root][:1] == ["declaration"] and [c.tag for c in root][-2:] == ["system", "queries"]
    assert len(root.findall("template")) == 10
    assert root.findall(".//location/urgent") and root.findall(".//location/committed")
    assert "urgent chan start" in root.find("declaration").text
    assert root.find("system").text.endswith(
        "system M_init, M_body, M_run, M_m1, M_m2, M_m3, Sched, Env_C1, Env_C2, Env_C3;")


def test_single_golden_and_round_trip():
    cfg = load_config(SINGLE / "single.toml")
    model = build_project(cfg).system.model
    text = to_xml(model, [uppaal_query(q.text) for q in cfg.queries])
    assert text == (SINGLE / "single.xml").read_text()
    assert to_xml(from_xml(text), ["A[] not Sched.Error"]) == text


# command line --------------------------------------------------------------------------

def test_translate_command(tmp_path):
    out, tables = tmp_path / "o.xml", tmp_path / "t.json"
    r = CliRunner().invoke(main, ["translate", str(COORD / "coordinator.toml"), "--out", str(out),
                                  "--tables", str(tables)])
    assert r.exit_code == 0, r.output
    assert out.read_text() == (COORD / "coordinator.xml").read_text()
    data = json.loads(tables.read_text())
    assert len(data["tasks"]["tasks"]) == 14 and data["locations"]["C_m1.L26"]["line"] == 26


def test_translate_missing_interface_file(tmp_path):
    p = write_config(tmp_path, BASE.replace('periodic = { method = "m", period = 5, deadline = 4 }',
                                            'file = "gone.ta"\nprovides = ["m"]'))
    r = CliRunner().invoke(main, ["translate", str(p)])
    assert r.exit_code == 2 and "<nta>" not in r.output


def test_check_command(tmp_path):
    out = tmp_path / "r.json"
    r = CliRunner().invoke(main, ["check", str(SINGLE / "single.toml"), "--out", str(out)])
    assert r.exit_code == 0
    rep = read_report(out)
    assert rep["schedulability"]["verdict"] == "schedulable"
    assert rep["tool"]["version"] == __version__
    assert [q["holds"] for q in rep["queries"]] == [True]
    r = CliRunner().invoke(main, ["report", str(out)])
    assert r.exit_code == 0 and "schedulability: schedulable" in r.output


def test_check_exit_codes(tmp_path):
    p = write_config(tmp_path, BASE + "[analysis]\nexpect_schedulable = false\n")
    assert CliRunner().invoke(main, ["check", str(p), "--out", str(tmp_path / "a.json")]).exit_code == 1
    r = CliRunner().invoke(main, ["check", str(SINGLE / "single.toml"), "--budget", "2",
                                  "--out", str(tmp_path / "b.json")])
    assert r.exit_code == 3
    bad = write_config(tmp_path, "[model]\n", "bad.toml")
    assert CliRunner().invoke(main, ["check", str(bad)]).exit_code == 2


def test_strategy_override(tmp_path):
    out = tmp_path / "r.json"
    r = CliRunner().invoke(main, ["check", str(MODELS / "strategy" / "edf.toml"), "--strategy", "fcfs",
                                  "--out", str(out)])
    assert r.exit_code == 1
    rep = read_report(out)
    assert rep["schedulability"]["verdict"] == "nonschedulable"
    assert "missed quick" in render_report(rep)


def test_sweep(tmp_path):
    out = tmp_path / "s.json"
    r = CliRunner().invoke(main, ["check", str(SINGLE / "single.toml"), "--sweep", "DL=1..4",
                                  "--out", str(out)])
    assert r.exit_code == 0
    rows = read_report(out)["sweep"]
    assert [(x["value"], x["verdict"]) for x in rows] == [
        (1, "nonschedulable"), (2, "nonschedulable"), (3, "schedulable"), (4, "schedulable")]


@pytest.mark.parametrize("text, expected", [("SPEED=20..22", ("SPEED", [20, 21, 22])),
                                            ("X=3..1", ("X", [3, 2, 1]))])
def test_parse_sweep(text, expected):
    assert parse_sweep(text) == expected
