from pathlib import Path

import pytest

from creolta.creol.parser import parse_file
from creolta.io.config import load_config
from creolta.translate import translate_model

ROOT = Path(__file__).resolve().parents[1]
MODELS = ROOT / "models"
COORD = MODELS / "coordinator"
STRATEGY = MODELS / "strategy"


@pytest.fixture(scope="session")
def coordinator_model():
    return parse_file(COORD / "coordinator.creol")


@pytest.fixture(scope="session")
def coordinator_tr(coordinator_model):
    return translate_model(coordinator_model)


@pytest.fixture(scope="session")
def coordinator_cfg():
    return load_config(COORD / "coordinator.toml")


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
