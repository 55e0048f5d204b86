"""Simulated perception: the semantic map and the perception queries."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional

from .world_sim import ARMS, WorldState

ROOM = "Room"
OBJECT = "Object"


@dataclass(frozen=True)
class MapNode:
    id: str
    kind: str
    label: str
    pose: tuple[float, float, float]
    is_surface: bool = False


@dataclass(frozen=True)
class Edge:
    src: str
    relation: str  # "contains" | "on"
    dst: str


@dataclass(frozen=True)
class SemanticMap:
    """Directed scene graph snapshot. Immutable once built."""

    nodes: Mapping[str, MapNode]
    edges: tuple[Edge, ...]
    snapshot_step: int = 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SemanticMap):
            return NotImplemented
        return (
            list(self.nodes.items()) == list(other.nodes.items())
            and self.edges == other.edges
            and self.snapshot_step == other.snapshot_step
        )

    def __hash__(self) -> int:
        return hash((tuple(self.nodes.items()), self.edges, self.snapshot_step))

    def rooms(self) -> list[MapNode]:
        return [n for n in self.nodes.values() if n.kind == ROOM]

    def room_of(self, node_id: str) -> Optional[str]:
        node = self.nodes.get(node_id)
        if node is None:
            return None
        if node.kind == ROOM:
            return node.id
        for e in self.edges:
            if e.relation == "contains" and e.dst == node_id:
                return e.src
        return None

    def support_of(self, node_id: str) -> Optional[str]:
        for e in self.edges:
            if e.relation == "on" and e.src == node_id:
                return e.dst
        return None


@dataclass(frozen=True)
class PerceptionCall:
    name: str
    args: tuple[str, ...] = ()


PERCEPTION_ARITY = {"GetMapRooms": 0, "GetObjectInRoom": 1, "GetRobotState": 0}


class RoomNotFound(LookupError):
    code = "ROOM_NOT_FOUND"


def build_map(world: WorldState) -> SemanticMap:
    held = world.held_objects()
    nodes: dict[str, MapNode] = {}
    edges: list[Edge] = []
    for room in world.rooms:
        cx, cy = room.center
        nodes[room.name] = MapNode(room.name, ROOM, room.name, (cx, cy, 0.0))
    for obj in world.objects.values():
        if obj.id in held:
            continue
        nodes[obj.id] = MapNode(obj.id, OBJECT, obj.label, tuple(obj.pose), obj.is_surface)
        edges.append(Edge(obj.room, "contains", obj.id))
    for obj in world.objects.values():
        if obj.id not in held and obj.supported_by is not None:
            edges.append(Edge(obj.id, "on", obj.supported_by))
    return SemanticMap(MappingProxyType(nodes), tuple(edges), world.clock)


def get_map_rooms(smap: SemanticMap) -> list[str]:
    return [n.id for n in smap.rooms()]


def get_objects_in_room(smap: SemanticMap, room: str) -> list[str]:
    """Describe the objects of a room.

    Supported objects come first, grouped by their support in map order,
    then free-standing objects, then surfaces with nothing recorded under them.
    Objects are named by node id, the name skills accept.
    """
    node = smap.nodes.get(room)
    if node is None or node.kind != ROOM:
        raise RoomNotFound(f"Room {room!r} not found in the semantic map")
    members = [e.dst for e in smap.edges if e.relation == "contains" and e.src == room]
    support = {m: smap.support_of(m) for m in members}

    supported: list[str] = []
    for sup in members:
        supported += [f"{m} on the {sup}" for m in members if support[m] == sup]
    free = [m for m in members if support[m] is None and not smap.nodes[m].is_surface]
    surfaces = [m for m in members if support[m] is None and smap.nodes[m].is_surface]
    # surfaces resting on other surfaces are reported through the supported group
    return supported + free + surfaces


def get_robot_state(world: WorldState) -> str:
    robot = world.robot
    holding = {a: robot.arms[a].holding for a in ARMS}
    prefix = f"The robot is currently in the {robot.room}"
    if not any(holding.values()):
        return prefix + " and has both the right and left arms empty."
    parts = [f"{a} arm holding {holding[a]}" if holding[a] else f"{a} arm empty" for a in ARMS]
    return prefix + "; " + "; ".join(parts) + "."


def describe_rooms(smap: SemanticMap) -> str:
    return "The robot identifies the rooms: [" + ", ".join(get_map_rooms(smap)) + "]."


def describe_room_objects(smap: SemanticMap, room: str) -> str:
    items = get_objects_in_room(smap, room)
    return f"The robot finds the following objects in the {room}: [" + ", ".join(items) + "]."


def perceive(call: PerceptionCall, world: WorldState, smap: SemanticMap) -> str:
    """Answer a perception action as observation text."""
    if call.name == "GetMapRooms":
        return describe_rooms(smap)
    if call.name == "GetObjectInRoom":
        return describe_room_objects(smap, call.args[0])
    if call.name == "GetRobotState":
        return get_robot_state(world)
    raise ValueError(f"unknown perception action {call.name!r}")
