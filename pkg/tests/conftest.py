import numpy as np
import pytest

from codeloop import CodeLoop, TrialityGroup, builtin, from_code


@pytest.fixture(scope="session")
def spaces():
    names = ("zero_1", "zero_2", "hamming8_sub3", "hamming8", "golay24")
    return {name: from_code(builtin(name)) for name in names}


@pytest.fixture(scope="session")
def groups(spaces):
    return {name: TrialityGroup(sp) for name, sp in spaces.items()}


@pytest.fixture(scope="session")
def loops(groups):
    return {name: CodeLoop(G) for name, G in groups.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_acceptance: list[tuple[str, str, bool, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, text): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (rep.when != "call" and rep.passed):
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _acceptance.append((marker.args[0], marker.args[1], rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for cid, text, ok, detail in sorted(_acceptance, key=lambda r: int(r[0])):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {text}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
