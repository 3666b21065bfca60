import pytest

from urel import SearchDomain, load_program, load_script
from urel.corpus import corpus_path


@pytest.fixture(scope="session")
def left():
    return load_program("fig3_left")


@pytest.fixture(scope="session")
def middle():
    return load_program("fig3_middle")


@pytest.fixture(scope="session")
def right():
    return load_program("fig3_right")


@pytest.fixture(scope="session")
def left_dom():
    return SearchDomain({"x": (0, 1), "low": (0, 1)}, fuel=16)


@pytest.fixture(scope="session")
def scripts():
    return {name: load_script(corpus_path(f"fig3_{name}.proof")) for name in ("left", "middle", "right")}


_CRITERIA: dict[str, str] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(ok, detail)``."""
    name = request.node.name

    def record(ok: bool, detail: str) -> bool:
        _CRITERIA[name] = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        print(_CRITERIA[name])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA.values():
            terminalreporter.write_line(line)
