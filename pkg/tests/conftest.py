from pathlib import Path

import pytest

from react_planner.scenario import load_scenario
from react_planner.world_sim import ArmState, ObjectEntry, RobotState, Room, WorldState

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
GOLDEN = SCENARIOS / "golden.json"
SUITE = SCENARIOS / "suite"


def make_world(robot_xy=(1.0, 1.0), robot_room="kitchen", objects=(), rooms=None, right=None, left=None):
    rooms = rooms or [Room("kitchen", (0.0, 0.0, 10.0, 6.0)), Room("bedroom", (10.0, 0.0, 16.0, 6.0))]
    objs = {o.id: o for o in objects}
    robot = RobotState(
        (robot_xy[0], robot_xy[1], 0.0),
        robot_room,
        {"right": ArmState(holding=right), "left": ArmState(holding=left)},
    )
    return WorldState(rooms, objs, robot)


def obj(id, xyz, room="kitchen", support=None, surface=False, label=None):
    return ObjectEntry(id, label or id, tuple(float(v) for v in xyz), room, support, surface)


@pytest.fixture
def golden():
    return load_scenario(GOLDEN)


@pytest.fixture
def golden_world(golden):
    return golden.world.copy()


_criteria: dict[str, tuple[int, str, bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and (rep.when == "call" or rep.failed):
        number, title = mark.args
        _criteria[item.nodeid] = (number, title, rep.passed and not rep.failed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, title, ok in sorted(_criteria.values()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}")
