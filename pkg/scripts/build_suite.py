"""Regenerate scenarios/suite/*.json.

Request wordings marked "quoted" are the three published example requests;
every other wording is an original variant.

    python scripts/build_suite.py
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "scenarios" / "suite"

BASE_WORLD = {
    "rooms": [
        {"name": "kitchen", "bounds": [0, 0, 10, 6]},
        {"name": "bedroom", "bounds": [10, 0, 16, 6]},
    ],
    "objects": [
        {"id": "sink", "label": "sink", "pose": [2.2, 4.5, 0.75], "room": "kitchen", "supported_by": "table_1"},
        {"id": "stove", "label": "stove", "pose": [1.6, 4.5, 0.75], "room": "kitchen", "supported_by": "table_1"},
        {"id": "bottle", "label": "bottle", "pose": [4.0, 1.5, 0.9], "room": "kitchen"},
        {"id": "table_1", "label": "table", "pose": [2.0, 4.5, 0.75], "room": "kitchen", "is_surface": True},
        {"id": "table_2", "label": "table", "pose": [8.5, 4.5, 0.75], "room": "kitchen", "is_surface": True},
        {"id": "table", "label": "table", "pose": [14.5, 1.5, 0.75], "room": "bedroom", "is_surface": True},
        {"id": "bed", "label": "bed", "pose": [14.5, 4.5, 0.5], "room": "bedroom"},
        {"id": "lamp", "label": "lamp", "pose": [14.7, 1.5, 0.75], "room": "bedroom", "supported_by": "table"},
    ],
    "robot": {"pose": [13.0, 3.0, 0.0], "room": "bedroom", "arms": {"left": None, "right": None}},
}


def world(robot_pose=None, robot_room=None, arms=None, extra=(), drop=(), moves=None):
    w = copy.deepcopy(BASE_WORLD)
    w["objects"] = [o for o in w["objects"] if o["id"] not in drop]
    if moves:
        for o in w["objects"]:
            if o["id"] in moves:
                o.update(moves[o["id"]])
    w["objects"] += [dict(o) for o in extra]
    if robot_pose is not None:
        w["robot"]["pose"] = robot_pose
    if robot_room is not None:
        w["robot"]["room"] = robot_room
    if arms is not None:
        w["robot"]["arms"] = arms
    return w


def step(action, expect=None):
    return {"expect": expect, "action": action} if expect else action


def actions_of(script):
    out = []
    for s in script:
        line = s if isinstance(s, str) else s["action"]
        for tag in ("Skill action: ", "Perception action: "):
            if line.startswith(tag):
                out.append(line[len(tag):])
    return out


def scenario(name, category, request, w, script, events=(), faults=(), budget=40):
    return {
        "name": name,
        "category": category,
        "request": request,
        "budget": budget,
        "seed": 0,
        "world": w,
        "events": list(events),
        "faults": list(faults),
        "script": script,
        "expected_actions": actions_of(script),
    }


CUP = {"id": "cup", "label": "cup", "pose": [8.5, 4.5, 0.75], "room": "kitchen", "supported_by": "table_2"}
APPLE = {"id": "apple", "label": "apple", "pose": [2.0, 4.5, 0.75], "room": "kitchen", "supported_by": "table_1"}
BOOK = {"id": "book", "label": "book", "pose": [14.5, 1.5, 0.75], "room": "bedroom", "supported_by": "table"}

NEAR_BOTTLE = [4.3, 1.9, 0.0]
NEAR_TABLE_2 = [8.1, 4.2, 0.0]
NEAR_TABLE_1 = [2.0, 4.0, 0.0]
NEAR_BED_TABLE = [14.1, 1.8, 0.0]


def simple():
    yield scenario(
        "simple_01_pick_bottle_in_front",  # quoted
        "simple",
        "Pick up the bottle in front of you",
        world(NEAR_BOTTLE, "kitchen"),
        [
            "Thought: The bottle is right in front of me, I pick it with the right arm.",
            "Skill action: PICK(bottle, right)",
            step("Finish: I picked up the bottle.", "successfully picks up the bottle"),
        ],
    )
    yield scenario(
        "simple_02_goto_kitchen",
        "simple",
        "Go to the kitchen",
        world(),
        [
            "Thought: I only need to navigate to the kitchen.",
            "Skill action: GOTO(kitchen)",
            step("Finish: I am in the kitchen.", "moves to the kitchen"),
        ],
    )
    yield scenario(
        "simple_03_pick_left_arm",
        "simple",
        "Grab the bottle with your left hand",
        world(NEAR_BOTTLE, "kitchen"),
        [
            "Thought: The user asked for the left hand.",
            "Skill action: PICK(bottle, left)",
            step("Finish: The bottle is in my left hand.", "successfully picks up the bottle"),
        ],
    )
    yield scenario(
        "simple_04_place_on_table",
        "simple",
        "Put the bottle on the table",
        world(NEAR_BED_TABLE, "bedroom", {"left": None, "right": "bottle"},
              moves={"bottle": {"room": None}}),
        [
            "Thought: I hold the bottle in the right hand and the table is next to me.",
            "Skill action: PLACE(bottle, right)",
            step("Finish: The bottle is on the table.", "places the bottle on the table successfully"),
        ],
    )
    yield scenario(
        "simple_05_goto_bedroom",
        "simple",
        "Go to the bedroom",
        world([5.0, 3.0, 0.0], "kitchen"),
        [
            "Thought: Navigate to the bedroom.",
            "Skill action: GOTO(bedroom)",
            step("Finish: I am in the bedroom.", "moves to the bedroom"),
        ],
    )
    yield scenario(
        "simple_06_pick_cup",
        "simple",
        "Pick up the cup on the table",
        world(NEAR_TABLE_2, "kitchen", extra=[CUP]),
        [
            "Thought: The cup is on the table next to me.",
            "Skill action: PICK(cup, right)",
            step("Finish: I have the cup.", "successfully picks up the cup"),
        ],
    )
    yield scenario(
        "simple_07_goto_bed",
        "simple",
        "Go near the bed",
        world(),
        [
            "Thought: The bed is in this room, I move next to it.",
            "Skill action: GOTO(bed)",
            step("Finish: I am next to the bed.", "moves to the bed in the bedroom"),
        ],
    )
    yield scenario(
        "simple_08_pick_apple",
        "simple",
        "Take the apple from the table",
        world(NEAR_TABLE_1, "kitchen", extra=[APPLE]),
        [
            "Thought: The apple is on the table in front of me.",
            "Skill action: PICK(apple, right)",
            step("Finish: I took the apple.", "successfully picks up the apple"),
        ],
    )
    yield scenario(
        "simple_09_pick_book",
        "simple",
        "Pick up the book",
        world(NEAR_BED_TABLE, "bedroom", extra=[BOOK]),
        [
            "Thought: The book lies on the bedroom table next to me.",
            "Skill action: PICK(book, left)",
            step("Finish: The book is in my left hand.", "successfully picks up the book"),
        ],
    )
    yield scenario(
        "simple_10_goto_table",
        "simple",
        "Go to the table",
        world(),
        [
            "Thought: The table in this room is the closest one.",
            "Skill action: GOTO(table)",
            step("Finish: I am at the table.", "moves to the table in the bedroom"),
        ],
    )
    yield scenario(
        "simple_11_place_left",
        "simple",
        "Leave the cup on the table",
        world(NEAR_TABLE_2, "kitchen", {"left": "cup", "right": None},
              extra=[dict(CUP, room=None, supported_by=None)]),
        [
            "Thought: The cup is in my left hand and the table is in reach.",
            "Skill action: PLACE(cup, left)",
            step("Finish: The cup is on the table.", "places the cup on the table_2 successfully"),
        ],
    )
    yield scenario(
        "simple_12_pick_too_far_recover",
        "simple",
        "Pick up the bottle",
        world([6.0, 1.5, 0.0], "kitchen"),
        [
            "Thought: I try to pick the bottle.",
            "Skill action: PICK(bottle, right)",
            step("Thought: The bottle is too far, I move closer as suggested.", "Use the GOTO skill"),
            "Skill action: GOTO(bottle)",
            step("Skill action: PICK(bottle, right)", "moves to the bottle"),
            step("Finish: I picked up the bottle.", "successfully picks up the bottle"),
        ],
    )


def moderate():
    yield scenario(
        "moderate_01_kitchen_to_bedroom",  # quoted
        "moderate",
        "Go to the kitchen, pick up the bottle, and bring it to the table in the bedroom",
        world(),
        [
            "Skill action: GOTO(kitchen)",
            step("Skill action: GOTO(bottle)", "moves to the kitchen"),
            step("Skill action: PICK(bottle, right)", "moves to the bottle"),
            step("Skill action: GOTO(bedroom)", "successfully picks up the bottle"),
            step("Skill action: GOTO(table)", "moves to the bedroom"),
            step("Skill action: PLACE(bottle, right)", "moves to the table"),
            step("Finish: The bottle is on the bedroom table.", "places the bottle on the table successfully"),
        ],
    )
    yield scenario(
        "moderate_02_cup_to_other_table",
        "moderate",
        "Move the cup from one kitchen table to the other",
        world([5.0, 3.0, 0.0], "kitchen", extra=[CUP]),
        [
            "Perception action: GetObjectInRoom(kitchen)",
            step("Thought: The cup is on table_2, I bring it to table_1.", "cup on the table_2"),
            "Skill action: GOTO(table_2)",
            step("Skill action: PICK(cup, left)", "moves to the table_2"),
            step("Skill action: GOTO(table_1)", "picks up the cup"),
            step("Skill action: PLACE(cup, left)", "moves to the table_1"),
            step("Finish: The cup is on table_1.", "places the cup on the table_1 successfully"),
        ],
    )
    yield scenario(
        "moderate_03_blocked_then_open",
        "moderate",
        "Go to the kitchen and pick up the bottle",
        dict(world(), blocked_paths=[["bedroom", "kitchen"]]),
        [
            "Skill action: GOTO(kitchen)",
            step("Thought: The door is blocked, I check my state and try again.", "is blocked"),
            "Perception action: GetRobotState()",
            step("Skill action: GOTO(kitchen)", "currently in the bedroom"),
            step("Skill action: GOTO(bottle)", "moves to the kitchen"),
            step("Skill action: PICK(bottle, right)", "moves to the bottle"),
            step("Finish: I have the bottle.", "successfully picks up the bottle"),
        ],
        events=[{"trigger": {"after_skill": 1}, "mutation": {"type": "unblock_path", "rooms": ["bedroom", "kitchen"]}}],
    )
    yield scenario(
        "moderate_04_grasp_retry",
        "moderate",
        "Pick up the apple on the kitchen table and bring it to the bedroom",
        world([5.0, 3.0, 0.0], "kitchen", extra=[APPLE]),
        [
            "Skill action: GOTO(apple)",
            step("Skill action: PICK(apple, right)", "moves to the apple"),
            step("Thought: The grasp failed, I refresh the map and retry.", "could not close on the object"),
            "Perception action: GetObjectInRoom(kitchen)",
            step("Skill action: PICK(apple, right)", "apple on the table_1"),
            step("Skill action: GOTO(bedroom)", "successfully picks up the apple"),
            step("Finish: The apple is in the bedroom.", "moves to the bedroom"),
        ],
        faults=[{"command": "close_gripper", "occurrence": 1, "error_code": "GRASP_FAILED",
                 "message": "The gripper slipped and could not close on the object"}],
    )
    yield scenario(
        "moderate_05_book_to_kitchen",
        "moderate",
        "Bring the book from the bedroom table to the kitchen table next to the sink",
        world(extra=[BOOK]),
        [
            "Skill action: GOTO(book)",
            step("Skill action: PICK(book, right)", "moves to the book"),
            step("Skill action: GOTO(kitchen)", "picks up the book"),
            step("Skill action: GOTO(table_1)", "moves to the kitchen"),
            step("Skill action: PLACE(book, right)", "moves to the table_1"),
            step("Finish: The book is on the kitchen table.", "places the book on the table_1 successfully"),
        ],
    )
    yield scenario(
        "moderate_06_two_hands",
        "moderate",
        "Pick up the bottle and the cup, one in each hand",
        world([5.0, 3.0, 0.0], "kitchen", extra=[CUP]),
        [
            "Skill action: GOTO(bottle)",
            step("Skill action: PICK(bottle, right)", "moves to the bottle"),
            step("Skill action: GOTO(cup)", "picks up the bottle"),
            step("Skill action: PICK(cup, left)", "moves to the cup"),
            step("Perception action: GetRobotState()", "picks up the cup"),
            step("Finish: I hold both objects.", "right arm holding bottle; left arm holding cup"),
        ],
    )


def complex_():
    yield scenario(
        "complex_01_thirsty",  # quoted
        "complex",
        "I'm thirsty, can you help me?",
        world(),
        [
            "Thought: The user wants something to drink. A bottle is a likely candidate; I look for one.",
            "Perception action: GetMapRooms()",
            step("Perception action: GetObjectInRoom(bedroom)", "[kitchen, bedroom]"),
            step("Perception action: GetObjectInRoom(kitchen)", "bed"),
            step("Thought: There is a bottle in the kitchen, I bring it to the user in the bedroom.", "bottle"),
            "Skill action: GOTO(bottle)",
            step("Skill action: PICK(bottle, right)", "moves to the bottle"),
            step("Skill action: GOTO(table)", "picks up the bottle"),
            step("Skill action: PLACE(bottle, right)", "moves to the table"),
            step("Finish: I brought you a bottle, it is on the bedroom table.", "successfully"),
        ],
    )
    yield scenario(
        "complex_02_tidy_table",
        "complex",
        "The bedroom table is cluttered, make some room on it",
        world(extra=[BOOK]),
        [
            "Perception action: GetObjectInRoom(bedroom)",
            step("Thought: The book and the lamp are on the table; I move the book to the kitchen.", "book on the table"),
            "Skill action: GOTO(book)",
            step("Skill action: PICK(book, left)", "moves to the book"),
            step("Skill action: GOTO(table_2)", "picks up the book"),
            step("Skill action: PLACE(book, left)", "moves to the table_2"),
            step("Finish: I moved the book to the kitchen.", "places the book on the table_2 successfully"),
        ],
    )
    yield scenario(
        "complex_03_prepare_for_cooking",
        "complex",
        "I want to cook, get the kitchen ready",
        world([5.0, 3.0, 0.0], "kitchen", extra=[CUP]),
        [
            "Thought: I interpret this as clearing the free kitchen table near the stove of clutter.",
            "Perception action: GetObjectInRoom(kitchen)",
            step("Skill action: GOTO(cup)", "cup on the table_2"),
            step("Skill action: PICK(cup, right)", "moves to the cup"),
            step("Skill action: GOTO(bedroom)", "picks up the cup"),
            step("Skill action: GOTO(table)", "moves to the bedroom"),
            step("Skill action: PLACE(cup, right)", "moves to the table"),
            step("Finish: The kitchen tables are free.", "places the cup on the table successfully"),
        ],
    )


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()
    for sc in [*simple(), *moderate(), *complex_()]:
        (OUT / f"{sc['name']}.json").write_text(json.dumps(sc, indent=2) + "\n", encoding="utf-8")
        print("wrote", sc["name"])


if __name__ == "__main__":
    main()
