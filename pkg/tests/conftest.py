import pytest

from shellgame.engine import SimConfig, run_trial
from shellgame.world import ArenaSpec, Button, Policy, TrialSetup


@pytest.fixture(scope="session")
def scenario_results():
    """Every policy x human choice x correct button trial on the default arena."""
    arena, config = ArenaSpec(), SimConfig()
    out = {}
    for policy in Policy:
        for correct in Button:
            for choice in ("correct", "incorrect"):
                human = correct if choice == "correct" else correct.other
                out[policy, choice, correct] = run_trial(arena, TrialSetup(correct, human, policy), config)
    return out


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, label = mark.kwargs["n"], mark.kwargs["label"]
    ok = call.excinfo is None
    prev = _criteria.get(n, (label, True))
    _criteria[n] = (label, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        label, ok = _criteria[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  AC{n:<2} {label}")
