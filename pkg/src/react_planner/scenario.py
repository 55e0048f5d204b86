"""Scenario files: loading, running, golden comparison and suite summaries.

A scenario is one JSON document; see ``docs/scenario_schema.md`` for the
field reference.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .execution import FaultInjector
from .explainer import Explainer, FailureRecord, load_dataset
from .grammar import ActionParseError, parse_action
from .planner import DEFAULT_BUDGET, PlannerOutcome, outcome_report, plan_and_execute
from .policy import Policy, PolicyError, ScriptedPolicy, ScriptStep
from .world_sim import (
    ARMS,
    AfterSkillIndex,
    ArmState,
    AtStep,
    BlockPath,
    MoveObject,
    ObjectEntry,
    RemoveObject,
    RobotState,
    Room,
    ScheduledEvent,
    UnblockPath,
    WorldError,
    WorldState,
    validate_world,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT_ERROR = 2

CATEGORIES = ("simple", "moderate", "complex")
CATEGORY_TITLES = {
    "simple": "Simple requests",
    "moderate": "Moderately complex requests",
    "complex": "Complex requests",
}


class ScenarioError(ValueError):
    code = "SCENARIO_PARSE_ERROR"


@dataclass
class Scenario:
    name: str
    world: WorldState
    request: str
    category: Optional[str] = None
    script: Optional[list[ScriptStep]] = None
    expected_actions: Optional[list[str]] = None
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    faults: list[dict] = field(default_factory=list)


# -- parsing ----------------------------------------------------------------


def _pose(value: Any, n: int, what: str) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ScenarioError(f"{what} must be a list of {n} numbers")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{what} must be numeric") from exc


def parse_world(data: dict) -> WorldState:
    try:
        rooms = [Room(r["name"], _pose(r["bounds"], 4, f"room {r['name']} bounds")) for r in data.get("rooms", [])]
        objects = {}
        for o in data.get("objects", []):
            if o["id"] in objects:
                raise ScenarioError(f"duplicate object id {o['id']!r}")
            objects[o["id"]] = ObjectEntry(
                id=o["id"],
                label=o.get("label", o["id"]),
                pose=_pose(o["pose"], 3, f"object {o['id']} pose"),
                room=o.get("room"),
                supported_by=o.get("supported_by"),
                is_surface=bool(o.get("is_surface", False)),
            )
        r = data["robot"]
        arms_in = r.get("arms", {})
        arms = {a: ArmState(holding=arms_in.get(a)) for a in ARMS}
        robot = RobotState(_pose(r["pose"], 3, "robot pose"), r["room"], arms)
        blocked = frozenset(frozenset(p) for p in data.get("blocked_paths", []))
    except KeyError as exc:
        raise ScenarioError(f"missing field {exc}") from exc
    world = WorldState(rooms, objects, robot, blocked_paths=blocked)
    try:
        validate_world(world)
    except WorldError as exc:
        raise ScenarioError(str(exc)) from exc
    for obj in objects.values():
        if obj.room is not None and not world.room(obj.room).contains(*obj.pose[:2]):
            raise ScenarioError(f"object {obj.id!r} lies outside room {obj.room!r}")
    if not world.room(robot.room).contains(*robot.pose[:2]):
        raise ScenarioError("robot lies outside its room")
    return world


def parse_event(data: dict) -> ScheduledEvent:
    trig = data.get("trigger", {})
    if "after_skill" in trig:
        trigger = AfterSkillIndex(int(trig["after_skill"]))
    elif "at_step" in trig:
        trigger = AtStep(int(trig["at_step"]))
    else:
        raise ScenarioError(f"event trigger must have after_skill or at_step: {trig}")
    m = data.get("mutation", {})
    kind = m.get("type")
    try:
        if kind == "move_object":
            mutation = MoveObject(m["object"], _pose(m["pose"], 3, "event pose"), m.get("support"), m["room"])
        elif kind == "remove_object":
            mutation = RemoveObject(m["object"])
        elif kind == "block_path":
            mutation = BlockPath(*m["rooms"])
        elif kind == "unblock_path":
            mutation = UnblockPath(*m["rooms"])
        else:
            raise ScenarioError(f"unknown mutation type {kind!r}")
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"bad {kind} mutation: {exc}") from exc
    return ScheduledEvent(trigger, mutation)


def parse_script(steps: list) -> list[ScriptStep]:
    out = []
    for i, step in enumerate(steps, 1):
        if isinstance(step, str):
            step = {"action": step}
        try:
            action = parse_action(step["action"])
        except ActionParseError as exc:
            raise ScenarioError(f"script step {i}: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"script step {i} needs an action") from exc
        out.append(ScriptStep(action, step.get("expect")))
    return out


def parse_scenario(data: dict, name: str = "scenario") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    if "world" not in data:
        raise ScenarioError("scenario has no world")
    world = parse_world(data["world"])
    world.pending_events = [parse_event(e) for e in data.get("events", [])]
    script = parse_script(data["script"]) if data.get("script") is not None else None
    expected = data.get("expected_actions")
    if expected is not None and script is None:
        raise ScenarioError("expected_actions requires a script")
    category = data.get("category")
    if category is not None and category not in CATEGORIES:
        raise ScenarioError(f"category must be one of {CATEGORIES}")
    budget = int(data.get("budget", DEFAULT_BUDGET))
    if budget < 1:
        raise ScenarioError("budget must be at least 1")
    return Scenario(
        name=data.get("name", name),
        world=world,
        request=data.get("request", ""),
        category=category,
        script=script,
        expected_actions=list(expected) if expected is not None else None,
        budget=budget,
        seed=int(data.get("seed", 0)),
        faults=list(data.get("faults", [])),
    )


def load_scenario(path: str | os.PathLike) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return parse_scenario(data, Path(path).stem)


def load_world(path: str | os.PathLike) -> WorldState:
    """A world from either a scenario file or a bare world document."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("world file must be a JSON object")
    world = parse_world(data.get("world", data))
    world.pending_events = [parse_event(e) for e in data.get("events", [])]
    return world


# -- running ----------------------------------------------------------------


@dataclass
class RunResult:
    scenario: Scenario
    outcome: PlannerOutcome
    exit_code: int
    golden: Optional[dict]
    log: str
    report: dict


def compare_actions(expected: list[str], executed: list[str], planner_failed: bool) -> dict:
    """Golden comparison. ``divergence`` is the 1-based index of the first
    action that differs, or whose outcome broke the script when the run
    stopped early on a matching prefix."""
    matched = expected == executed
    divergence = None
    if not matched:
        for i, (e, x) in enumerate(zip(expected, executed)):
            if e != x:
                divergence = i + 1
                break
        else:
            n = len(executed)
            divergence = n if (planner_failed and n < len(expected) and n > 0) else n + 1
    return {
        "matched": matched,
        "expected_count": len(expected),
        "executed_count": len(executed),
        "divergence": divergence,
    }


def build_policy(scenario: Scenario, policy: Optional[Policy] = None) -> Policy:
    if policy is not None:
        return policy
    if scenario.script is None:
        raise ScenarioError(f"scenario {scenario.name!r} has no script; pass an endpoint policy")
    return ScriptedPolicy(list(scenario.script))


def run_scenario(
    scenario: Scenario,
    policy: Optional[Policy] = None,
    dataset: Optional[list[FailureRecord]] = None,
    budget: Optional[int] = None,
    seed: Optional[int] = None,
) -> RunResult:
    pol = build_policy(scenario, policy)
    explainer = Explainer(dataset if dataset is not None else load_dataset())
    faults = [FaultInjector(**f) for f in scenario.faults]
    outcome = plan_and_execute(
        scenario.request,
        scenario.world.copy(),
        pol,
        budget or scenario.budget,
        explainer,
        faults=faults,
    )
    golden = None
    exit_code = EXIT_OK if outcome.ok else EXIT_MISMATCH
    if scenario.expected_actions is not None and policy is None:
        golden = compare_actions(scenario.expected_actions, outcome.actions, not outcome.ok)
        if not golden["matched"]:
            exit_code = EXIT_MISMATCH
    report = {"scenario": scenario.name, "category": scenario.category, "seed": scenario.seed if seed is None else seed}
    report.update(outcome_report(outcome))
    report["golden"] = golden
    report["exit_code"] = exit_code
    return RunResult(scenario, outcome, exit_code, golden, outcome.transcript.render(), report)


def scenario_passed(result: RunResult) -> bool:
    return result.exit_code == EXIT_OK


@dataclass
class SuiteRow:
    category: str
    attempts: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.attempts if self.attempts else 0.0


def run_suite(
    directory: str | os.PathLike,
    dataset: Optional[list[FailureRecord]] = None,
    workers: int = 1,
) -> tuple[list[SuiteRow], list[tuple[str, Optional[RunResult], Optional[str]]]]:
    """Run every ``*.json`` scenario under ``directory``.

    Returns per-category rows (only categories that have scenarios) and the
    per-file results; a file that fails to load counts as a failed attempt.
    """
    paths = sorted(Path(directory).glob("*.json"))
    data = dataset if dataset is not None else load_dataset()

    def one(path: Path) -> tuple[str, Optional[RunResult], Optional[str], Optional[str]]:
        try:
            sc = load_scenario(path)
        except ScenarioError as exc:
            return path.name, None, None, str(exc)
        try:
            return path.name, run_scenario(sc, dataset=data), sc.category, None
        except (ScenarioError, PolicyError) as exc:
            return path.name, None, sc.category, str(exc)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(one, paths))
    else:
        runs = [one(p) for p in paths]

    counts = {c: [0, 0] for c in CATEGORIES}
    for _, result, category, _ in runs:
        if category is None:
            continue
        counts[category][0] += 1
        if result is not None and scenario_passed(result):
            counts[category][1] += 1
    rows = [SuiteRow(c, n, ok) for c, (n, ok) in counts.items() if n]
    return rows, [(name, result, err) for name, result, _, err in runs]


def format_table(rows: list[SuiteRow]) -> str:
    header = ("Request type", "Number of attempts", "Success rate")
    body = [(CATEGORY_TITLES[r.category], str(r.attempts), f"{round(100 * r.rate)}%") for r in rows]
    widths = [max(len(x) for x in col) for col in zip(header, *body)]

    def line(cells: tuple[str, ...]) -> str:
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    sep = "|" + "|".join("-" * (w + 2) for w in widths) + "|"
    return "\n".join([line(header), sep] + [line(b) for b in body]) + "\n"
