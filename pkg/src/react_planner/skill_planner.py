"""Skill-level planning: preconditions, target nodes and HTN decomposition."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Mapping, Optional

from .grammar import SkillCall
from .perception import ROOM, MapNode, SemanticMap
from .world_sim import (
    COMMAND_SIGNATURES,
    REACH_RADIUS,
    STANDOFF_DISTANCE,
    Command,
    RobotState,
    WorldState,
    arm_busy_message,
    distance_xy,
    not_visible_message,
    object_visible,
    path_blocked_message,
    too_far_message,
)


class SkillPlanningError(LookupError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.reason = message


@dataclass(frozen=True)
class PrecondResult:
    satisfied: bool
    error_code: Optional[str] = None
    reason: Optional[str] = None

    def __post_init__(self) -> None:
        if self.satisfied == (self.error_code is not None):
            raise ValueError("error_code must be present exactly when unsatisfied")


OK = PrecondResult(True)


def _fail(code: str, reason: str) -> PrecondResult:
    return PrecondResult(False, code, reason)


@dataclass(frozen=True)
class HtnMethod:
    skill: str
    expansion: tuple[tuple[str, tuple[tuple[str, Any], ...]], ...]

    def __post_init__(self) -> None:
        if not self.expansion:
            raise ValueError(f"method for {self.skill} expands to no commands")
        for name, args in self.expansion:
            sig = COMMAND_SIGNATURES.get(name)
            if sig is None:
                raise ValueError(f"method {self.skill}: unknown command {name!r}")
            if tuple(k for k, _ in args) != sig:
                raise ValueError(f"method {self.skill}: {name} needs args {sig}")


DEFAULT_METHOD_TABLE: dict[str, list[dict]] = {
    "GOTO": [
        {"command": "plan_path", "args": {"target": "{node}", "room": "{room}", "goal": "{goal}"}},
        {"command": "move_base", "args": {"target": "{node}", "room": "{room}", "goal": "{goal}"}},
    ],
    "PICK": [
        # approach
        {"command": "approach_arm", "args": {"arm": "{arm}", "target": "{node}", "pose": "{pose}", "skill": "{skill}"}},
        {"command": "open_gripper", "args": {"arm": "{arm}"}},
        # grasp
        {"command": "close_gripper", "args": {"arm": "{arm}"}},
        {"command": "verify_grasp", "args": {"arm": "{arm}"}},
        # lifting
        {"command": "lift_arm", "args": {"arm": "{arm}"}},
    ],
    "PLACE": [
        {"command": "approach_arm", "args": {"arm": "{arm}", "target": "{node}", "pose": "{pose}", "skill": "{skill}"}},
        {"command": "open_gripper", "args": {"arm": "{arm}"}},
        {"command": "retract_arm", "args": {"arm": "{arm}"}},
    ],
}


def methods_from_table(table: Mapping[str, list[dict]]) -> dict[str, HtnMethod]:
    out = {}
    for skill, steps in table.items():
        expansion = []
        for step in steps:
            name = step["command"]
            args = step.get("args", {})
            sig = COMMAND_SIGNATURES.get(name, tuple(args))
            expansion.append((name, tuple((k, args[k]) for k in sig if k in args)))
        out[skill] = HtnMethod(skill, tuple(expansion))
    return out


def load_methods(path: str) -> dict[str, HtnMethod]:
    """Load a method table from JSON, overriding the built-in entries it names."""
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    methods = dict(DEFAULT_METHODS)
    methods.update(methods_from_table(table))
    return methods


DEFAULT_METHODS = methods_from_table(DEFAULT_METHOD_TABLE)


# -- target resolution ------------------------------------------------------


def resolve_node(name: str, smap: SemanticMap, robot: RobotState) -> MapNode:
    """Id match first; otherwise the label match nearest the robot (ties: smallest id)."""
    node = smap.nodes.get(name)
    if node is not None:
        return node
    matches = [n for n in smap.nodes.values() if n.label == name]
    if not matches:
        raise SkillPlanningError("NODE_NOT_FOUND", f"There is no {name} in the semantic map")
    return min(matches, key=lambda n: (distance_xy(robot.pose, n.pose), n.id))


def nearest_surface(smap: SemanticMap, robot: RobotState) -> Optional[MapNode]:
    """Closest surface in the robot's room within reach (ties: smallest id)."""
    cands = [
        n
        for n in smap.nodes.values()
        if n.is_surface
        and smap.room_of(n.id) == robot.room
        and distance_xy(robot.pose, n.pose) <= REACH_RADIUS
    ]
    if not cands:
        return None
    return min(cands, key=lambda n: (distance_xy(robot.pose, n.pose), n.id))


def extract_target_nodes(call: SkillCall, smap: SemanticMap, robot: RobotState) -> MapNode:
    if call.name == "PLACE":
        node = nearest_surface(smap, robot)
        if node is None:
            raise SkillPlanningError("NODE_NOT_FOUND", "There is no surface within reach to place on")
        return node
    return resolve_node(call.params[0], smap, robot)


# -- preconditions ----------------------------------------------------------


def check_preconditions(call: SkillCall, world: WorldState, smap: SemanticMap) -> PrecondResult:
    """Return the first violated precondition, in declaration order.

    Nodes come from the (possibly stale) map; visibility and reach are judged
    on the live world, as the robot's own sensors would.
    """
    robot = world.robot
    if call.name == "GOTO":
        try:
            node = resolve_node(call.params[0], smap, robot)
        except SkillPlanningError as exc:
            return _fail(exc.code, exc.reason)
        room = smap.room_of(node.id)
        if room is not None and world.is_blocked(robot.room, room):
            return _fail("PATH_BLOCKED", path_blocked_message(robot.room, room))
        return OK

    if call.name == "PICK":
        target, arm = call.params
        try:
            node = resolve_node(target, smap, robot)
        except SkillPlanningError as exc:
            return _fail(exc.code, exc.reason)
        obj = world.objects.get(node.id)
        if node.kind == ROOM or not object_visible(world, node.id):
            return _fail("OBJECT_NOT_VISIBLE", not_visible_message(node.label, "PICK"))
        if distance_xy(robot.pose, obj.pose) > REACH_RADIUS:
            return _fail("OBJECT_TOO_FAR", too_far_message("PICK"))
        if not robot.arms[arm].is_free:
            return _fail("ARM_BUSY", arm_busy_message(arm, robot.arms[arm].holding))
        return OK

    if call.name == "PLACE":
        target, arm = call.params
        held = robot.arms[arm].holding
        if held is None or (held != target and world.objects[held].label != target):
            return _fail("NOT_HOLDING", f"The {arm} arm is not holding the {target}")
        if nearest_surface(smap, robot) is None:
            return _fail("NO_SURFACE_IN_REACH", f"There is no surface within reach to place the {target}")
        return OK

    raise ValueError(f"unknown skill {call.name!r}")


# -- decomposition ----------------------------------------------------------


def navigation_goal(node: MapNode, room: str, world: WorldState) -> tuple[float, float]:
    """Room centre for rooms; otherwise a point at standoff distance from the
    object on the side facing the robot, clamped into the object's room."""
    if node.kind == ROOM:
        return (node.pose[0], node.pose[1])
    rx, ry = world.robot.pose[:2]
    ox, oy = node.pose[:2]
    d = math.hypot(rx - ox, ry - oy)
    ux, uy = ((rx - ox) / d, (ry - oy) / d) if d > 1e-9 else (-1.0, 0.0)
    gx, gy = ox + STANDOFF_DISTANCE * ux, oy + STANDOFF_DISTANCE * uy
    bounds = world.room(room).bounds if world.room(room) else None
    if bounds is not None:
        gx = min(max(gx, bounds[0]), bounds[2])
        gy = min(max(gy, bounds[1]), bounds[3])
    return (round(gx, 9), round(gy, 9))


def decompose(
    call: SkillCall,
    node: MapNode,
    world: WorldState,
    smap: Optional[SemanticMap] = None,
    methods: Optional[Mapping[str, HtnMethod]] = None,
) -> list[Command]:
    method = (methods or DEFAULT_METHODS)[call.name]
    room = (smap.room_of(node.id) if smap is not None else None) or _world_room(node, world)
    slots = {
        "skill": call.name,
        "node": node.id,
        "pose": tuple(node.pose),
        "room": room,
        "goal": navigation_goal(node, room, world),
        "arm": call.params[1] if len(call.params) > 1 else None,
    }
    return [Command(name, tuple((k, _bind(v, slots)) for k, v in args)) for name, args in method.expansion]


def _world_room(node: MapNode, world: WorldState) -> Optional[str]:
    if node.kind == ROOM:
        return node.id
    obj = world.objects.get(node.id)
    return obj.room if obj else world.robot.room


def _bind(value: Any, slots: Mapping[str, Any]) -> Any:
    if isinstance(value, str) and value.startswith("{") and value.endswith("}"):
        key = value[1:-1]
        if key not in slots:
            raise KeyError(f"unbound slot {value}")
        return slots[key]
    return value
