import json
from importlib import resources

import pytest

from labelbudget import InformationProfile, SimWorld, TaskSet

_RESULTS = pytest.StashKey[list]()


def load_bundle(name):
    return json.loads(resources.files("labelbudget").joinpath("fixtures", f"{name}.json").read_text())


def _parts(name):
    d = load_bundle(name)
    return TaskSet.from_dict(d["task_set"]), InformationProfile.from_dict(d["profile"]), SimWorld.from_dict(d["world"])


@pytest.fixture(scope="session")
def pascal():
    return _parts("pascal_voc")


@pytest.fixture(scope="session")
def taskonomy():
    return _parts("taskonomy")


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(label, passed, detail)``."""

    def record(label, passed, detail=""):
        request.config.stash[_RESULTS].append((label, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(_RESULTS, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in rows:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
