"""The decision function behind the task planner.

A policy maps the current context to the next action. ``ScriptedPolicy`` is a
deterministic stand-in used by tests and scenario files; ``EndpointPolicy``
talks to an OpenAI-style chat-completions endpoint.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Protocol, Sequence

import httpx

from .grammar import (
    ActionParseError,
    PolicyAction,
    Thought,
    parse_reply,
    render_action,
)

logger = logging.getLogger(__name__)

USER_REQUEST = "UserRequest"
ROBOT_STATE = "RobotStateSummary"
THOUGHT = "Thought"
ACTION_TAKEN = "ActionTaken"
OBSERVATION = "Observation"

ENTRY_KINDS = (USER_REQUEST, ROBOT_STATE, THOUGHT, ACTION_TAKEN, OBSERVATION)


class PolicyError(RuntimeError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class ContextEntry:
    kind: str
    text: str

    def __post_init__(self) -> None:
        if self.kind not in ENTRY_KINDS:
            raise ValueError(f"unknown context entry kind {self.kind!r}")


@dataclass(frozen=True)
class Context:
    request: str
    entries: tuple[ContextEntry, ...] = ()

    @property
    def step(self) -> int:
        """Number of policy decisions recorded so far."""
        return sum(1 for e in self.entries if e.kind in (THOUGHT, ACTION_TAKEN))

    def last_observation(self) -> Optional[str]:
        for e in reversed(self.entries):
            if e.kind == OBSERVATION:
                return e.text
        return None


def initial_context(request: str, robot_state: str) -> Context:
    return Context(request, (ContextEntry(USER_REQUEST, request), ContextEntry(ROBOT_STATE, robot_state)))


def update_context(ctx: Context, entry: ContextEntry) -> Context:
    return replace(ctx, entries=ctx.entries + (entry,))


def entry_line(entry: ContextEntry) -> str:
    if entry.kind == USER_REQUEST:
        return f'User Request: "{entry.text}"'
    if entry.kind == ROBOT_STATE:
        return f"Robot State: {entry.text}"
    if entry.kind == OBSERVATION:
        return f"Observation: {entry.text}"
    # Thought and ActionTaken entries already hold a rendered action line
    return entry.text


# Original text; not taken from any published prompt.
SYSTEM_PREAMBLE = """\
You control a household service robot with two arms (left and right).
A semantic map of the environment is available through perception actions.
Reply with exactly one Thought line, optionally followed by exactly one action line.

Skill actions (change the world):
  Skill action: GOTO(target)          navigate to a room or an object
  Skill action: PICK(object, arm)     grasp an object, arm is left or right
  Skill action: PLACE(object, arm)    put the held object on the nearest surface
Perception actions (read the world):
  Perception action: GetMapRooms()
  Perception action: GetObjectInRoom(room)
  Perception action: GetRobotState()
When the request is fulfilled, reply:
  Finish: <short summary>

Example 1
User Request: "Bring the cup from the living room to the desk"
Robot State: The robot is currently in the office and has both the right and left arms empty.
Thought: I need the list of rooms first.
Perception action: GetMapRooms()
Observation: The robot identifies the rooms: [office, living_room].
Thought: The cup should be in the living room.
Skill action: GOTO(living_room)
Observation: The robot moves to the living_room.
Thought: I need to find the cup.
Perception action: GetObjectInRoom(living_room)
Observation: The robot finds the following objects in the living_room: [cup on the sofa_table, sofa_table].
Thought: I go next to the cup.
Skill action: GOTO(cup)
Observation: The robot moves to the cup in the living_room.
Thought: Now I can grasp it.
Skill action: PICK(cup, left)
Observation: The robot successfully picks up the cup.
Thought: Back to the office desk.
Skill action: GOTO(desk)
Observation: The robot moves to the desk in the office.
Thought: Put the cup down.
Skill action: PLACE(cup, left)
Observation: The robot places the cup on the desk successfully.
Finish: The cup is on the desk.

Example 2
User Request: "Pick up the apple"
Robot State: The robot is currently in the kitchen and has both the right and left arms empty.
Thought: I try to grasp the apple directly.
Skill action: PICK(apple, right)
Observation: Cannot execute the approach movement for the PICK skill, object too far; Suggestion: Use the GOTO skill to move near the object to pick
Thought: I follow the suggestion and move closer first.
Skill action: GOTO(apple)
Observation: The robot moves to the apple in the kitchen.
Skill action: PICK(apple, right)
Observation: The robot successfully picks up the apple.
Finish: The apple is in the right hand.
"""


def render_prompt(ctx: Context) -> str:
    """Render the context entries as the user turn, ending with a Thought cue.

    The action catalog travels separately as the system message, see
    ``build_messages``.
    """
    lines = [entry_line(e) for e in ctx.entries]
    lines.append("Thought:")
    return "\n".join(lines)


def build_messages(ctx: Context, corrections: Sequence[str] = ()) -> list[dict]:
    messages = [
        {"role": "system", "content": SYSTEM_PREAMBLE},
        {"role": "user", "content": render_prompt(ctx)},
    ]
    for note in corrections:
        messages.append({"role": "user", "content": note})
    return messages


class Policy(Protocol):
    def decide(self, ctx: Context) -> PolicyAction: ...


@dataclass(frozen=True)
class ScriptStep:
    action: PolicyAction
    expect: Optional[str] = None


@dataclass
class ScriptedPolicy:
    """Replays a fixed list of actions.

    The step to play is the number of decisions already in the context, so
    the policy keeps no hidden cursor. A step's ``expect`` substring must
    occur in the latest observation.
    """

    steps: list[ScriptStep] = field(default_factory=list)

    def decide(self, ctx: Context) -> PolicyAction:
        i = ctx.step
        if i >= len(self.steps):
            raise PolicyError("SCRIPT_EXHAUSTED", f"script has {len(self.steps)} step(s), asked for step {i + 1}")
        step = self.steps[i]
        if step.expect is not None:
            obs = ctx.last_observation()
            if obs is None or step.expect not in obs:
                raise PolicyError(
                    "SCRIPT_PATTERN_MISMATCH",
                    f"step {i + 1} expected {step.expect!r} in the last observation, got {obs!r}",
                )
        return step.action


@dataclass(frozen=True)
class EndpointPolicyConfig:
    url: str
    model: str
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    max_retries_on_malformed: int = 2

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries_on_malformed < 0:
            raise ValueError("max_retries_on_malformed must be >= 0")

    @classmethod
    def from_file(cls, path: str) -> EndpointPolicyConfig:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(**data)


class EndpointPolicy:
    """Chat-completions backed policy.

    A reply holding a Thought and an action yields the Thought now and the
    action on the next call, so the planner still sees one action per step.
    """

    def __init__(self, config: EndpointPolicyConfig, client: Optional[httpx.Client] = None):
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout)
        self._pending: list[PolicyAction] = []
        self.calls = 0

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.config.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _chat(self, messages: list[dict]) -> str:
        body = {"model": self.config.model, "messages": messages}
        self.calls += 1
        try:
            resp = self._client.post(
                self.config.url, json=body, headers=self._headers(), timeout=self.config.timeout
            )
        except httpx.TimeoutException as exc:
            raise PolicyError("ENDPOINT_TIMEOUT", f"no reply within {self.config.timeout}s") from exc
        except httpx.HTTPError as exc:
            raise PolicyError("ENDPOINT_ERROR", str(exc)) from exc
        if resp.status_code >= 400:
            raise PolicyError("ENDPOINT_ERROR", f"HTTP {resp.status_code} from {self.config.url}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise PolicyError("ENDPOINT_ERROR", "reply is not a chat-completions response") from exc

    def decide(self, ctx: Context) -> PolicyAction:
        if self._pending:
            return self._pending.pop(0)
        corrections: list[str] = []
        for attempt in range(self.config.max_retries_on_malformed + 1):
            reply = self._chat(build_messages(ctx, corrections))
            try:
                actions = parse_reply(reply)
            except ActionParseError as exc:
                logger.info("malformed reply on attempt %d: %s", attempt + 1, exc)
                corrections.append(
                    f"Your previous reply could not be parsed ({exc}). "
                    "Answer again with one Thought line and at most one action line."
                )
                continue
            self._pending = actions[1:]
            return actions[0]
        raise PolicyError(
            "MALFORMED_AFTER_RETRIES",
            f"no parseable reply after {self.config.max_retries_on_malformed + 1} attempt(s)",
        )


def action_entry(action: PolicyAction) -> ContextEntry:
    kind = THOUGHT if isinstance(action, Thought) else ACTION_TAKEN
    return ContextEntry(kind, render_action(action))
