"""Ground-truth simulated household world and its low-level command semantics.

The world is a value: every operation returns a fresh ``WorldState`` and
leaves its input untouched.
"""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Union

logger = logging.getLogger(__name__)

REACH_RADIUS = 0.8
VISIBILITY_RADIUS = 4.0
GRASP_TOLERANCE = 0.10
# distance kept from an object when navigating to it
STANDOFF_DISTANCE = 0.5

ARMS = ("right", "left")

Pose3 = tuple[float, float, float]


@dataclass(frozen=True)
class Room:
    name: str
    bounds: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax

    @property
    def center(self) -> tuple[float, float]:
        xmin, ymin, xmax, ymax = self.bounds
        return ((xmin + xmax) / 2.0, (ymin + ymax) / 2.0)

    def contains(self, x: float, y: float) -> bool:
        xmin, ymin, xmax, ymax = self.bounds
        return xmin <= x <= xmax and ymin <= y <= ymax


@dataclass
class ObjectEntry:
    id: str
    label: str
    pose: Pose3
    room: Optional[str]
    supported_by: Optional[str] = None
    is_surface: bool = False


@dataclass
class ArmState:
    """One arm. ``holding`` is None when the arm is Free."""

    holding: Optional[str] = None
    gripper_point: Optional[Pose3] = None
    target: Optional[str] = None
    gripper_open: bool = False
    lifted: bool = False

    @property
    def is_free(self) -> bool:
        return self.holding is None


@dataclass
class RobotState:
    pose: tuple[float, float, float]  # x, y, heading
    room: str
    arms: dict[str, ArmState] = field(default_factory=lambda: {a: ArmState() for a in ARMS})


# -- events -----------------------------------------------------------------


@dataclass(frozen=True)
class AtStep:
    n: int


@dataclass(frozen=True)
class AfterSkillIndex:
    k: int


Trigger = Union[AtStep, AfterSkillIndex]


@dataclass(frozen=True)
class MoveObject:
    object_id: str
    pose: Pose3
    support: Optional[str]
    room: str


@dataclass(frozen=True)
class RemoveObject:
    object_id: str


@dataclass(frozen=True)
class BlockPath:
    room_a: str
    room_b: str


@dataclass(frozen=True)
class UnblockPath:
    room_a: str
    room_b: str


Mutation = Union[MoveObject, RemoveObject, BlockPath, UnblockPath]


@dataclass(frozen=True)
class ScheduledEvent:
    trigger: Trigger
    mutation: Mutation


@dataclass
class WorldState:
    rooms: list[Room]
    objects: dict[str, ObjectEntry]
    robot: RobotState
    clock: int = 0
    pending_events: list[ScheduledEvent] = field(default_factory=list)
    blocked_paths: frozenset = frozenset()

    def room(self, name: str) -> Optional[Room]:
        for r in self.rooms:
            if r.name == name:
                return r
        return None

    def held_objects(self) -> set[str]:
        return {arm.holding for arm in self.robot.arms.values() if arm.holding}

    def is_blocked(self, room_a: str, room_b: str) -> bool:
        return room_a != room_b and frozenset((room_a, room_b)) in self.blocked_paths

    def copy(self) -> WorldState:
        return copy.deepcopy(self)


class WorldError(ValueError):
    """A world definition violates a structural invariant."""


def validate_world(world: WorldState) -> None:
    """Raise WorldError if any WorldState invariant is broken."""
    names = [r.name for r in world.rooms]
    if len(set(names)) != len(names):
        raise WorldError("room names must be unique")
    for i, a in enumerate(world.rooms):
        ax0, ay0, ax1, ay1 = a.bounds
        if ax0 >= ax1 or ay0 >= ay1:
            raise WorldError(f"room {a.name!r} has empty bounds")
        for b in world.rooms[i + 1:]:
            bx0, by0, bx1, by1 = b.bounds
            if ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1:
                raise WorldError(f"rooms {a.name!r} and {b.name!r} overlap")
    if world.room(world.robot.room) is None:
        raise WorldError(f"robot is in unknown room {world.robot.room!r}")
    if set(world.robot.arms) != set(ARMS):
        raise WorldError("robot must have exactly a left and a right arm")
    held = [arm.holding for arm in world.robot.arms.values() if arm.holding]
    if len(held) != len(set(held)):
        raise WorldError("an object is held by both arms")
    for oid, obj in world.objects.items():
        if oid != obj.id:
            raise WorldError(f"object key {oid!r} does not match id {obj.id!r}")
        if oid in held:
            if obj.supported_by is not None or obj.room is not None:
                raise WorldError(f"held object {oid!r} must have no support and no room")
            continue
        if obj.room is None or world.room(obj.room) is None:
            raise WorldError(f"object {oid!r} is not located in a known room")
        if obj.supported_by is not None:
            sup = world.objects.get(obj.supported_by)
            if sup is None or not sup.is_surface or sup.room != obj.room:
                raise WorldError(f"object {oid!r} has an invalid support {obj.supported_by!r}")
    for h in held:
        if h not in world.objects:
            raise WorldError(f"robot holds unknown object {h!r}")
    if _support_cycle(world.objects):
        raise WorldError("supported_by relation has a cycle")


def _support_cycle(objects: dict[str, ObjectEntry]) -> bool:
    for start in objects:
        seen = set()
        cur: Optional[str] = start
        while cur is not None:
            if cur in seen:
                return True
            seen.add(cur)
            nxt = objects.get(cur)
            cur = nxt.supported_by if nxt else None
    return False


# -- commands ---------------------------------------------------------------

COMMAND_SIGNATURES: dict[str, tuple[str, ...]] = {
    "plan_path": ("target", "room", "goal"),
    "move_base": ("target", "room", "goal"),
    "approach_arm": ("arm", "target", "pose", "skill"),
    "open_gripper": ("arm",),
    "close_gripper": ("arm",),
    "verify_grasp": ("arm",),
    "lift_arm": ("arm",),
    "retract_arm": ("arm",),
}


@dataclass(frozen=True)
class Command:
    name: str
    args: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self) -> None:
        sig = COMMAND_SIGNATURES.get(self.name)
        if sig is None:
            raise ValueError(f"unknown command {self.name!r}")
        if tuple(k for k, _ in self.args) != sig:
            raise ValueError(f"{self.name} expects args {sig}, got {tuple(k for k, _ in self.args)}")
        arm = dict(self.args).get("arm")
        if "arm" in sig and arm not in ARMS:
            raise ValueError(f"invalid arm {arm!r}")

    @classmethod
    def make(cls, name: str, **kwargs: Any) -> Command:
        sig = COMMAND_SIGNATURES.get(name, tuple(kwargs))
        return cls(name, tuple((k, kwargs[k]) for k in sig if k in kwargs))

    def arg(self, key: str) -> Any:
        return dict(self.args)[key]

    def render(self) -> str:
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.args if k in ("arm", "target", "room"))
        return f"{self.name}({shown})"


def _fmt(v: Any) -> str:
    if isinstance(v, tuple):
        return "(" + ", ".join(f"{x:.2f}" for x in v) + ")"
    return str(v)


@dataclass(frozen=True)
class CommandFeedback:
    ok: bool
    error_code: Optional[str] = None
    message: Optional[str] = None

    def __post_init__(self) -> None:
        if self.ok != (self.error_code is None) or self.ok != (self.message is None):
            raise ValueError("error_code and message are present iff the command failed")

    @classmethod
    def success(cls) -> CommandFeedback:
        return cls(True)

    @classmethod
    def failure(cls, code: str, message: str) -> CommandFeedback:
        return cls(False, code, message)


def distance_xy(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def distance_xyz(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    return math.sqrt(sum((p - q) ** 2 for p, q in zip(a[:3], b[:3])))


def object_visible(world: WorldState, object_id: str) -> bool:
    """Same room as the robot, not held, and within the visibility radius."""
    obj = world.objects.get(object_id)
    if obj is None or obj.room is None or object_id in world.held_objects():
        return False
    return obj.room == world.robot.room and distance_xy(world.robot.pose, obj.pose) <= VISIBILITY_RADIUS


def too_far_message(skill: str) -> str:
    return f"Cannot execute the approach movement for the {skill} skill, object too far"


def not_visible_message(label: str, skill: str) -> str:
    return f"The robot can't see the {label} to {skill.lower()}"


def path_blocked_message(room_a: str, room_b: str) -> str:
    return f"The path from the {room_a} to the {room_b} is blocked"


def arm_busy_message(arm: str, held: str) -> str:
    return f"The {arm} arm is busy holding the {held}"


def apply_command(world: WorldState, cmd: Command) -> tuple[WorldState, CommandFeedback]:
    """Execute one low-level command; the input world is never mutated."""
    handler = _HANDLERS[cmd.name]
    nxt = world.copy()
    nxt.clock = world.clock + 1
    feedback = handler(nxt, cmd)
    if not feedback.ok:
        failed = world.copy()
        failed.clock = world.clock + 1
        return failed, feedback
    return nxt, feedback


def _nav(world: WorldState, cmd: Command, move: bool) -> CommandFeedback:
    room = cmd.arg("room")
    if world.room(room) is None:
        raise ValueError(f"{cmd.name}: unknown room {room!r}")
    if world.is_blocked(world.robot.room, room):
        return CommandFeedback.failure("PATH_BLOCKED", path_blocked_message(world.robot.room, room))
    if move:
        gx, gy = cmd.arg("goal")[:2]
        rx, ry, _ = world.robot.pose
        heading = math.atan2(gy - ry, gx - rx) if (gx, gy) != (rx, ry) else world.robot.pose[2]
        world.robot.pose = (gx, gy, heading)
        world.robot.room = room
    return CommandFeedback.success()


def _plan_path(world: WorldState, cmd: Command) -> CommandFeedback:
    return _nav(world, cmd, move=False)


def _move_base(world: WorldState, cmd: Command) -> CommandFeedback:
    return _nav(world, cmd, move=True)


def _approach_arm(world: WorldState, cmd: Command) -> CommandFeedback:
    arm_name, target, pose, skill = cmd.arg("arm"), cmd.arg("target"), cmd.arg("pose"), cmd.arg("skill")
    obj = world.objects.get(target)
    label = obj.label if obj else target
    if not object_visible(world, target):
        return CommandFeedback.failure("OBJECT_NOT_VISIBLE", not_visible_message(label, skill))
    if distance_xy(world.robot.pose, pose) > REACH_RADIUS:
        return CommandFeedback.failure("OBJECT_TOO_FAR", too_far_message(skill))
    arm = world.robot.arms[arm_name]
    if skill == "PICK" and arm.holding is not None:
        return CommandFeedback.failure("ARM_BUSY", arm_busy_message(arm_name, arm.holding))
    arm.gripper_point = tuple(pose)
    arm.target = target
    return CommandFeedback.success()


def _open_gripper(world: WorldState, cmd: Command) -> CommandFeedback:
    arm = world.robot.arms[cmd.arg("arm")]
    if arm.holding is not None:
        obj = world.objects[arm.holding]
        surface = world.objects.get(arm.target) if arm.target else None
        if surface is not None and surface.is_surface and surface.room == world.robot.room:
            obj.pose = surface.pose
            obj.supported_by = surface.id
            obj.room = surface.room
        else:
            x, y = (arm.gripper_point or world.robot.pose)[:2]
            obj.pose = (x, y, 0.0)
            obj.supported_by = None
            obj.room = world.robot.room
        arm.holding = None
    arm.gripper_open = True
    return CommandFeedback.success()


def _close_gripper(world: WorldState, cmd: Command) -> CommandFeedback:
    arm_name = cmd.arg("arm")
    arm = world.robot.arms[arm_name]
    if arm.holding is not None:
        return CommandFeedback.failure("ARM_BUSY", arm_busy_message(arm_name, arm.holding))
    arm.gripper_open = False
    if arm.gripper_point is None:
        return CommandFeedback.success()
    held = world.held_objects()
    candidates = sorted(
        (distance_xyz(o.pose, arm.gripper_point), o.id)
        for o in world.objects.values()
        if not o.is_surface and o.id not in held and o.room == world.robot.room
    )
    if candidates and candidates[0][0] <= GRASP_TOLERANCE:
        obj = world.objects[candidates[0][1]]
        arm.holding = obj.id
        obj.supported_by = None
        obj.room = None
    return CommandFeedback.success()


def _verify_grasp(world: WorldState, cmd: Command) -> CommandFeedback:
    if world.robot.arms[cmd.arg("arm")].holding is None:
        return CommandFeedback.failure("GRASP_FAILED", "Grasp verification failed, there is no object in the gripper")
    return CommandFeedback.success()


def _lift_arm(world: WorldState, cmd: Command) -> CommandFeedback:
    world.robot.arms[cmd.arg("arm")].lifted = True
    return CommandFeedback.success()


def _retract_arm(world: WorldState, cmd: Command) -> CommandFeedback:
    arm = world.robot.arms[cmd.arg("arm")]
    arm.gripper_point = None
    arm.target = None
    arm.lifted = False
    return CommandFeedback.success()


_HANDLERS = {
    "plan_path": _plan_path,
    "move_base": _move_base,
    "approach_arm": _approach_arm,
    "open_gripper": _open_gripper,
    "close_gripper": _close_gripper,
    "verify_grasp": _verify_grasp,
    "lift_arm": _lift_arm,
    "retract_arm": _retract_arm,
}


# -- scheduled events -------------------------------------------------------


def trigger_matches(event_trigger: Trigger, trigger: Trigger) -> bool:
    if isinstance(event_trigger, AtStep) and isinstance(trigger, AtStep):
        return event_trigger.n <= trigger.n
    if isinstance(event_trigger, AfterSkillIndex) and isinstance(trigger, AfterSkillIndex):
        return event_trigger.k == trigger.k
    return False


def fire_events(world: WorldState, trigger: Trigger) -> WorldState:
    """Fire every pending event matching ``trigger`` in declaration order.

    ``AtStep(n)`` matches events scheduled at any step up to n, so a caller
    polling with the current clock never misses one.
    """
    if not any(trigger_matches(ev.trigger, trigger) for ev in world.pending_events):
        return world
    nxt = world.copy()
    remaining = []
    for ev in nxt.pending_events:
        if trigger_matches(ev.trigger, trigger):
            _apply_mutation(nxt, ev.mutation)
        else:
            remaining.append(ev)
    nxt.pending_events = remaining
    return nxt


def _apply_mutation(world: WorldState, m: Mutation) -> None:
    if isinstance(m, BlockPath):
        world.blocked_paths = world.blocked_paths | {frozenset((m.room_a, m.room_b))}
    elif isinstance(m, UnblockPath):
        world.blocked_paths = world.blocked_paths - {frozenset((m.room_a, m.room_b))}
    elif isinstance(m, RemoveObject):
        if m.object_id not in world.objects:
            logger.warning("skipping removal of unknown object %s", m.object_id)
        elif m.object_id in world.held_objects():
            logger.warning("skipping removal of held object %s", m.object_id)
        else:
            del world.objects[m.object_id]
            for o in world.objects.values():
                if o.supported_by == m.object_id:
                    o.supported_by = None
    elif isinstance(m, MoveObject):
        _move_object(world, m)
    else:
        raise TypeError(f"unknown mutation {m!r}")


def _move_object(world: WorldState, m: MoveObject) -> None:
    obj = world.objects.get(m.object_id)
    if obj is None:
        logger.warning("skipping move of unknown object %s", m.object_id)
        return
    if m.object_id in world.held_objects():
        logger.warning("skipping move of held object %s", m.object_id)
        return
    if world.room(m.room) is None:
        logger.warning("skipping move of %s into unknown room %s", m.object_id, m.room)
        return
    if m.support is not None:
        sup = world.objects.get(m.support)
        if sup is None or not sup.is_surface or sup.room != m.room or sup.id in _dependents(world, obj.id) | {obj.id}:
            logger.warning("skipping move of %s onto invalid support %s", m.object_id, m.support)
            return
    dx, dy, dz = (m.pose[i] - obj.pose[i] for i in range(3))
    for dep in sorted(_dependents(world, obj.id)):
        d = world.objects[dep]
        d.pose = (d.pose[0] + dx, d.pose[1] + dy, d.pose[2] + dz)
        d.room = m.room
    obj.pose = tuple(m.pose)
    obj.room = m.room
    obj.supported_by = m.support


def _dependents(world: WorldState, object_id: str) -> set[str]:
    """Objects resting (transitively) on ``object_id``."""
    out: set[str] = set()
    frontier = [object_id]
    while frontier:
        cur = frontier.pop()
        for o in world.objects.values():
            if o.supported_by == cur and o.id not in out:
                out.add(o.id)
                frontier.append(o.id)
    return out
