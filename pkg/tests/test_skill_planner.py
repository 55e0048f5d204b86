import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from react_planner.grammar import SkillCall
from react_planner.perception import build_map
from react_planner.skill_planner import (
    DEFAULT_METHODS,
    HtnMethod,
    SkillPlanningError,
    check_preconditions,
    decompose,
    extract_target_nodes,
    load_methods,
    resolve_node,
)
from react_planner.world_sim import REACH_RADIUS, VISIBILITY_RADIUS

from conftest import make_world, obj

PICK_BOTTLE = SkillCall("PICK", ("bottle", "right"))


def check(call, world):
    return check_preconditions(call, world, build_map(world))


def test_pick_satisfied_when_close():
    w = make_world((3.5, 1.5), objects=[obj("bottle", (4.0, 1.5, 0.9))])
    assert check(PICK_BOTTLE, w).satisfied


def test_pick_not_visible_after_move(golden_world):
    w = golden_world.copy()
    w.robot.pose = (4.5, 1.5, 0.0)
    w.robot.room = "kitchen"
    smap = build_map(w)
    # the bottle leaves for the bedroom after the map was taken
    w.objects["bottle"].pose = (15.0, 5.0, 0.9)
    w.objects["bottle"].room = "bedroom"
    res = check_preconditions(PICK_BOTTLE, w, smap)
    assert res.error_code == "OBJECT_NOT_VISIBLE"
    assert "can't see the bottle to pick" in res.reason


def test_pick_too_far():
    w = make_world((1.0, 1.5), objects=[obj("bottle", (4.0, 1.5, 0.9))])
    res = check(PICK_BOTTLE, w)
    assert (res.satisfied, res.error_code) == (False, "OBJECT_TOO_FAR")
    assert res.reason == "Cannot execute the approach movement for the PICK skill, object too far"


def test_pick_arm_busy():
    w = make_world((3.5, 1.5), objects=[obj("bottle", (4.0, 1.5, 0.9)), obj("cup", (0, 0, 0), room=None)], right="cup")
    assert check(PICK_BOTTLE, w).error_code == "ARM_BUSY"


def test_pick_order_visible_before_reach_before_arm():
    # everything fails at once: the first bullet wins
    w = make_world((1.0, 1.0), objects=[obj("bottle", (12.0, 1.0, 0.9), room="bedroom"), obj("cup", (0, 0, 0), room=None)], right="cup")
    assert check(PICK_BOTTLE, w).error_code == "OBJECT_NOT_VISIBLE"
    w.objects["bottle"].pose, w.objects["bottle"].room = (4.0, 1.0, 0.9), "kitchen"
    assert check(PICK_BOTTLE, w).error_code == "OBJECT_TOO_FAR"


def test_pick_missing_node():
    assert check(SkillCall("PICK", ("unicorn", "left")), make_world()).error_code == "NODE_NOT_FOUND"


def test_place_preconditions():
    table = obj("table", (2.0, 1.0, 0.7), surface=True)
    bottle = obj("bottle", (0, 0, 0), room=None)
    call = SkillCall("PLACE", ("bottle", "right"))
    assert check(call, make_world((1.5, 1.0), objects=[table, bottle])).error_code == "NOT_HOLDING"
    assert check(call, make_world((5.0, 1.0), objects=[table, bottle], right="bottle")).error_code == "NO_SURFACE_IN_REACH"
    assert check(call, make_world((1.5, 1.0), objects=[table, bottle], right="bottle")).satisfied


def test_goto_preconditions():
    w = make_world(objects=[obj("bed", (14.0, 3.0, 0.5), room="bedroom", surface=True)])
    assert check(SkillCall("GOTO", ("bed",)), w).satisfied
    assert check(SkillCall("GOTO", ("garage",)), w).error_code == "NODE_NOT_FOUND"
    w.blocked_paths = frozenset({frozenset({"kitchen", "bedroom"})})
    assert check(SkillCall("GOTO", ("bed",)), w).error_code == "PATH_BLOCKED"
    assert check(SkillCall("GOTO", ("kitchen",)), w).satisfied


def test_preconditions_have_no_side_effects(golden_world):
    before = golden_world.copy()
    smap = build_map(golden_world)
    for call in [PICK_BOTTLE, SkillCall("GOTO", ("bottle",)), SkillCall("PLACE", ("bottle", "left"))]:
        check_preconditions(call, golden_world, smap)
    assert golden_world == before
    assert smap == build_map(before)


def test_resolve_single_and_missing(golden_world):
    smap = build_map(golden_world)
    assert resolve_node("bottle", smap, golden_world.robot).id == "bottle"
    with pytest.raises(SkillPlanningError) as info:
        resolve_node("garage", smap, golden_world.robot)
    assert info.value.code == "NODE_NOT_FOUND"


def test_resolve_prefers_id_over_label():
    w = make_world(objects=[obj("table", (9.0, 5.0, 0.7), surface=True), obj("t2", (1.2, 1.0, 0.7), label="table", surface=True)])
    assert resolve_node("table", build_map(w), w.robot).id == "table"


def test_resolve_nearest_label():
    w = make_world(
        (1.0, 1.0),
        objects=[obj("b_far", (3.0, 1.0, 0.9), label="bottle"), obj("b_near", (2.0, 1.0, 0.9), label="bottle")],
    )
    assert resolve_node("bottle", build_map(w), w.robot).id == "b_near"


coords = st.floats(min_value=0.0, max_value=9.9, allow_nan=False)


@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=6), coords, coords)
def test_resolve_matches_brute_force(points, rx, ry):
    objs = [obj(f"cup_{i}", (x, y, 0.8), label="cup") for i, (x, y) in enumerate(points)]
    w = make_world((rx, min(ry, 5.9)), objects=objs)
    chosen = resolve_node("cup", build_map(w), w.robot)
    dists = sorted((math.dist((rx, min(ry, 5.9)), o.pose[:2]), o.id) for o in objs)
    assert chosen.id == dists[0][1]


def test_decompose_pick(golden_world):
    w = golden_world.copy()
    w.robot.pose, w.robot.room = (4.5, 1.5, 0.0), "kitchen"
    smap = build_map(w)
    node = extract_target_nodes(PICK_BOTTLE, smap, w.robot)
    cmds = decompose(PICK_BOTTLE, node, w, smap)
    assert [c.name for c in cmds] == ["approach_arm", "open_gripper", "close_gripper", "verify_grasp", "lift_arm"]
    assert cmds[0].arg("target") == "bottle" and cmds[0].arg("pose") == (4.0, 1.5, 0.9)
    assert all(c.arg("arm") == "right" for c in cmds)


def test_decompose_goto_room(golden_world):
    smap = build_map(golden_world)
    call = SkillCall("GOTO", ("kitchen",))
    cmds = decompose(call, extract_target_nodes(call, smap, golden_world.robot), golden_world, smap)
    assert [c.name for c in cmds] == ["plan_path", "move_base"]
    assert cmds[1].arg("goal") == (5.0, 3.0)


def test_decompose_place_targets_nearest_surface():
    w = make_world(
        (8.0, 4.5),
        objects=[obj("table_2", (8.5, 4.5, 0.7), surface=True), obj("table_1", (2.0, 4.5, 0.7), surface=True), obj("bottle", (0, 0, 0), room=None)],
        right="bottle",
    )
    smap = build_map(w)
    call = SkillCall("PLACE", ("bottle", "right"))
    node = extract_target_nodes(call, smap, w.robot)
    assert node.id == "table_2"
    cmds = decompose(call, node, w, smap)
    assert [c.name for c in cmds] == ["approach_arm", "open_gripper", "retract_arm"]
    assert cmds[0].arg("target") == "table_2"


def test_goto_goal_keeps_standoff():
    w = make_world((1.0, 1.0), objects=[obj("bottle", (4.0, 1.0, 0.9))])
    smap = build_map(w)
    call = SkillCall("GOTO", ("bottle",))
    goal = decompose(call, extract_target_nodes(call, smap, w.robot), w, smap)[1].arg("goal")
    assert goal == (3.5, 1.0)
    assert math.dist(goal, (4.0, 1.0)) <= REACH_RADIUS < VISIBILITY_RADIUS


def test_command_names_depend_only_on_skill():
    w1 = make_world((1, 1), objects=[obj("a", (1.5, 1, 0.5))])
    w2 = make_world((13, 3), "bedroom", objects=[obj("b", (13.2, 3.4, 0.5), room="bedroom")])
    for w, target in ((w1, "a"), (w2, "b")):
        smap = build_map(w)
        for call in (SkillCall("GOTO", (target,)), SkillCall("PICK", (target, "left"))):
            cmds = decompose(call, extract_target_nodes(call, smap, w.robot), w, smap)
            assert [c.name for c in cmds] == [n for n, _ in DEFAULT_METHODS[call.name].expansion]


def test_method_table_override(tmp_path):
    path = tmp_path / "methods.json"
    path.write_text(json.dumps({"GOTO": [{"command": "move_base", "args": {"target": "{node}", "room": "{room}", "goal": "{goal}"}}]}))
    methods = load_methods(str(path))
    assert [n for n, _ in methods["GOTO"].expansion] == ["move_base"]
    assert methods["PICK"] == DEFAULT_METHODS["PICK"]
    w = make_world()
    smap = build_map(w)
    call = SkillCall("GOTO", ("bedroom",))
    assert [c.name for c in decompose(call, extract_target_nodes(call, smap, w.robot), w, smap, methods)] == ["move_base"]


def test_method_validation():
    with pytest.raises(ValueError):
        HtnMethod("GOTO", ())
    with pytest.raises(ValueError):
        HtnMethod("GOTO", (("teleport", ()),))
    with pytest.raises(ValueError):
        HtnMethod("GOTO", (("open_gripper", ()),))
