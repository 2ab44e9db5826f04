import re
import sys
from pathlib import Path

import pytest

_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


@pytest.fixture
def tmp_cfg(tmp_path: Path):
    def write(text: str) -> Path:
        p = tmp_path / "run.cfg"
        p.write_text(text)
        return p

    return write


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    cid, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _CRITERIA[cid] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: (int(re.match(r"\d+", c).group()), c)):
        title, status = _CRITERIA[cid]
        terminalreporter.write_line(f"criterion {cid:<4} {status}  {title}")


def pytest_report_header(config):
    return f"python {sys.version.split()[0]}"
