import os
import sys

import pytest

# acceptance criterion -> list of (passed, detail); printed once at the end of the run
_CRITERIA: dict[int, list] = {}
_TITLES = {
    1: "algebraic identities",
    2: "jet correctness",
    3: "radial determinant formula",
    4: "volume scaling",
    5: "constants pipeline",
    6: "theorem suites",
    7: "chain geometry",
    8: "oscillation constant",
    9: "measure stability",
    10: "determinism",
}


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records one clause of acceptance criterion ``k``."""

    def record(k: int, ok: bool, detail: str) -> bool:
        _CRITERIA.setdefault(k, []).append((bool(ok), detail))
        print(f"criterion {k} [{'PASS' if ok else 'FAIL'}] {detail}")
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        parts = _CRITERIA[k]
        ok = all(p for p, _ in parts)
        terminalreporter.write_line(f"criterion {k:2d} {_TITLES.get(k, ''):28s} {'PASS' if ok else 'FAIL'}")
        for p, detail in parts:
            if not p:
                terminalreporter.write_line(f"    failed clause: {detail}")


@pytest.fixture
def cli_env():
    env = dict(os.environ)
    env.pop("HMA_THREADS", None)
    return env


@pytest.fixture
def python():
    return sys.executable
