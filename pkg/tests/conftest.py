import pytest

from mmdrone.engine import Scenario
from mmdrone.kinematics import Trajectory
from mmdrone.phy_mcs import load_mcs_table
from mmdrone.video import VideoProfile


@pytest.fixture(scope="session")
def mcs_table():
    return load_mcs_table()


@pytest.fixture
def hover(mcs_table):
    """Builder for the 100 m hover scenario with keyword overrides."""

    def make(fps=7.5, duration=60.0, **kwargs):
        kwargs.setdefault("trajectory", Trajectory.hover((0.0, 0.0, 100.0), max(duration, 1.0)))
        return Scenario(
            mcs_table=mcs_table,
            duration_s=duration,
            video=VideoProfile(3840, 2160, fps, 24),
            **kwargs,
        )

    return make


# --- acceptance criteria reporting ------------------------------------------


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion, reported by label")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    label = marker.args[0]
    ok = item.config._criteria.get(label, True)
    # a criterion with several tests passes only if all of them pass
    if rep.failed or (rep.when == "call" and not rep.passed):
        ok = False
    item.config._criteria[label] = ok


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(config._criteria, key=lambda s: int(s.split()[0][2:])):
        verdict = "PASS" if config._criteria[label] else "FAIL"
        terminalreporter.write_line(f"{verdict}  {label}")
