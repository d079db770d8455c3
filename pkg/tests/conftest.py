import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from zonoflip import ZonotopeSpec, enumerate_space  # noqa: E402

_SPACES = {}


@pytest.fixture(scope="session")
def space_of():
    """Cached enumeration by bundle sizes."""

    def get(*sizes):
        if sizes not in _SPACES:
            _SPACES[sizes] = enumerate_space(ZonotopeSpec(sizes))
        return _SPACES[sizes]

    return get


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[str, str] = {}


def record(criterion: str, ok: bool, detail: str) -> bool:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: (len(k), k)):
            terminalreporter.write_line(ACCEPTANCE[key])
