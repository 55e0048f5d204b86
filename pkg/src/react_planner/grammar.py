"""Strict line syntax for policy actions.

Each action is one line, introduced by a tag::

    Thought: <free text>
    Skill action: PICK(bottle, right)
    Perception action: GetObjectInRoom(kitchen)
    Finish: <final answer>
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .perception import PERCEPTION_ARITY, PerceptionCall

SKILL_ARITY = {"GOTO": 1, "PICK": 2, "PLACE": 2}
ARM_SKILLS = ("PICK", "PLACE")
ARM_VALUES = ("left", "right")

THOUGHT_TAG = "Thought:"
SKILL_TAG = "Skill action:"
PERCEPTION_TAG = "Perception action:"
FINISH_TAG = "Finish:"

_CALL_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)$")


class ActionParseError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class SkillCall:
    name: str
    params: tuple[str, ...]

    def render(self) -> str:
        return f"{self.name}({', '.join(self.params)})"


@dataclass(frozen=True)
class Thought:
    text: str


@dataclass(frozen=True)
class Perception:
    call: PerceptionCall


@dataclass(frozen=True)
class Skill:
    call: SkillCall


@dataclass(frozen=True)
class Finish:
    answer: str


PolicyAction = Union[Thought, Perception, Skill, Finish]


def render_call(name: str, args: tuple[str, ...]) -> str:
    return f"{name}({', '.join(args)})"


def action_call(action: PolicyAction) -> str:
    """The bare call string of a perception or skill action, e.g. ``GOTO(kitchen)``."""
    if isinstance(action, Skill):
        return action.call.render()
    if isinstance(action, Perception):
        return render_call(action.call.name, action.call.args)
    raise TypeError(f"{type(action).__name__} has no call form")


def render_action(action: PolicyAction) -> str:
    if isinstance(action, Thought):
        return f"{THOUGHT_TAG} {action.text}".rstrip()
    if isinstance(action, Finish):
        return f"{FINISH_TAG} {action.answer}".rstrip()
    if isinstance(action, Skill):
        return f"{SKILL_TAG} {action_call(action)}"
    if isinstance(action, Perception):
        return f"{PERCEPTION_TAG} {action_call(action)}"
    raise TypeError(f"not a policy action: {action!r}")


def _split_call(body: str) -> tuple[str, tuple[str, ...]]:
    if body.count("(") != body.count(")"):
        raise ActionParseError("MALFORMED_ACTION", f"unbalanced parentheses in {body!r}")
    m = _CALL_RE.match(body)
    if m is None:
        raise ActionParseError("MALFORMED_ACTION", f"expected NAME(arg, ...), got {body!r}")
    name, inner = m.group(1), m.group(2)
    if "(" in inner or ")" in inner:
        raise ActionParseError("MALFORMED_ACTION", f"nested parentheses in {body!r}")
    if not inner.strip():
        return name, ()
    args = tuple(a.strip() for a in inner.split(","))
    if any(not a or re.search(r"\s", a) for a in args):
        raise ActionParseError("MALFORMED_ACTION", f"empty or spaced argument in {body!r}")
    return name, args


def _check_arity(name: str, args: tuple[str, ...], table: dict[str, int]) -> None:
    if name not in table:
        raise ActionParseError("UNKNOWN_ACTION_NAME", f"unknown action {name!r}")
    if len(args) != table[name]:
        raise ActionParseError(
            "ARITY_MISMATCH", f"{name} takes {table[name]} argument(s), got {len(args)}"
        )


def parse_action(line: str) -> PolicyAction:
    if "\n" in line.strip():
        raise ActionParseError("MALFORMED_ACTION", "an action must fit on a single line")
    text = line.strip()
    if text.startswith(THOUGHT_TAG):
        return Thought(text[len(THOUGHT_TAG):].strip())
    if text.startswith(FINISH_TAG):
        return Finish(text[len(FINISH_TAG):].strip())
    if text.startswith(SKILL_TAG):
        name, args = _split_call(text[len(SKILL_TAG):].strip())
        _check_arity(name, args, SKILL_ARITY)
        if name in ARM_SKILLS and args[1] not in ARM_VALUES:
            raise ActionParseError("INVALID_ARM", f"arm must be left or right, got {args[1]!r}")
        return Skill(SkillCall(name, args))
    if text.startswith(PERCEPTION_TAG):
        name, args = _split_call(text[len(PERCEPTION_TAG):].strip())
        _check_arity(name, args, PERCEPTION_ARITY)
        return Perception(PerceptionCall(name, args))
    raise ActionParseError("MALFORMED_ACTION", f"no recognised action tag in {text!r}")


def parse_reply(text: str) -> list[PolicyAction]:
    """Parse raw model output: an optional Thought line followed by one action line.

    Blank lines are ignored. A lone Thought is a valid reply.
    """
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ActionParseError("MALFORMED_ACTION", "empty reply")
    if len(lines) > 2:
        raise ActionParseError("MALFORMED_ACTION", f"expected at most two lines, got {len(lines)}")
    actions = [parse_action(ln) for ln in lines]
    if len(actions) == 2 and not isinstance(actions[0], Thought):
        raise ActionParseError("MALFORMED_ACTION", "a two-line reply must start with a Thought")
    if len(actions) == 2 and isinstance(actions[1], Thought):
        raise ActionParseError("MALFORMED_ACTION", "a two-line reply must end with an action")
    return actions
