from pathlib import Path

import numpy as np
import pytest

from skc import audit_net, build_net, clifford_t_set, load_instruction_set

GATESETS = Path(__file__).resolve().parent.parent / "gatesets"

# criterion number -> (title, outcome, detail)
_CRITERIA: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not (rep.when == "setup" and rep.failed)):
        return
    num, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed and not detail:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else "error"
    _CRITERIA[num] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}  {title}: {detail}")


@pytest.fixture(scope="session")
def ct_set():
    return clifford_t_set()


@pytest.fixture(scope="session")
def ct_net16(ct_set):
    """The l0 = 16 Clifford+T net, audited on 1000 seeded samples."""
    net = build_net(ct_set, 16)
    audit_net(net, 1000, seed=0)
    return net


@pytest.fixture(scope="session")
def ct_net8(ct_set):
    net = build_net(ct_set, 8)
    audit_net(net, 200, seed=0)
    return net


@pytest.fixture(scope="session")
def qutrit_set():
    return load_instruction_set(GATESETS / "qutrit_mixed.json")


@pytest.fixture(scope="session")
def qutrit_net4(qutrit_set):
    return build_net(qutrit_set, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
