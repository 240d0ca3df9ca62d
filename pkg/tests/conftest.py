import sys

import pytest

from paigeloops.loop_core import build_table
from paigeloops.paige import paige_loop


@pytest.fixture(scope="session")
def m2():
    return paige_loop(2, 1)


@pytest.fixture(scope="session")
def t2(m2):
    return build_table(m2)


@pytest.fixture(scope="session")
def m3():
    return paige_loop(3, 1)


@pytest.fixture(scope="session")
def t3(m3):
    return build_table(m3)


@pytest.fixture(scope="session")
def m4():
    return paige_loop(2, 2)


@pytest.fixture(autouse=True)
def _cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("PAIGE_CACHE_DIR", str(tmp_path / "cache"))


def _criterion(line: str) -> int:
    return int(line.split("criterion")[1].split(":")[0])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=_criterion):
        terminalreporter.write_line(line)
    for n in sorted(set(range(1, 14)) - {_criterion(s) for s in lines}):
        terminalreporter.write_line(f"SKIP criterion {n:2d}: not run in this session")
