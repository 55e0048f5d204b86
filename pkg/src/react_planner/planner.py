"""The extended ReAct loop: reason, perceive, act, explain failures, repeat."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .execution import FailureMessage, FaultInjector, SkillResult, execute_skill
from .explainer import Explainer
from .grammar import Finish, Perception, SkillCall, Thought, action_call
from .perception import ROOM, RoomNotFound, SemanticMap, build_map, get_robot_state, perceive
from .policy import (
    OBSERVATION,
    Context,
    ContextEntry,
    Policy,
    PolicyError,
    action_entry,
    entry_line,
    initial_context,
    update_context,
)
from .skill_planner import (
    HtnMethod,
    SkillPlanningError,
    check_preconditions,
    decompose,
    extract_target_nodes,
)
from .world_sim import AfterSkillIndex, AtStep, WorldState, fire_events

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 40

SUCCESS = "Success"
FAILURE = "Failure"
BUDGET_EXHAUSTED = "BudgetExhausted"

FEEDBACK = "Feedback"


@dataclass
class Transcript:
    lines: list[tuple[str, str]] = field(default_factory=list)

    def add(self, kind: str, text: str) -> None:
        self.lines.append((kind, text))

    def render(self, verbose: bool = True) -> str:
        out = []
        for kind, text in self.lines:
            if kind == FEEDBACK:
                if verbose:
                    out.append(f"  > {text}")
            else:
                out.append(entry_line(ContextEntry(kind, text)))
        return "\n".join(out) + "\n"

    def entries(self) -> list[ContextEntry]:
        """The context entries, in order, with execution feedback left out."""
        return [ContextEntry(k, t) for k, t in self.lines if k != FEEDBACK]

    def to_json(self) -> list[dict]:
        return [{"kind": k, "text": t} for k, t in self.lines]


@dataclass
class SkillRecord:
    call: SkillCall
    result: SkillResult


@dataclass
class PlannerOutcome:
    status: str
    steps_used: int
    transcript: Transcript
    context: Context
    world: WorldState
    final_answer: Optional[str] = None
    reason: Optional[str] = None
    actions: list[str] = field(default_factory=list)
    skills: list[SkillRecord] = field(default_factory=list)
    context_lengths: list[int] = field(default_factory=list)
    error_code: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == SUCCESS


def skill_success_text(call: SkillCall, node_kind: str, room: Optional[str]) -> str:
    if call.name == "GOTO":
        if node_kind == ROOM:
            return f"The robot moves to the {call.params[0]}."
        return f"The robot moves to the {call.params[0]} in the {room}."
    if call.name == "PICK":
        return f"The robot successfully picks up the {call.params[0]}."
    return f"The robot places the {call.params[0]} on the {room} successfully."


def failure_observation(failure: FailureMessage, explainer: Optional[Explainer], request: str) -> str:
    hint = explainer.explain(failure, request) if explainer is not None else None
    if hint is None:
        return failure.reason
    return f"{failure.reason}; Suggestion: {hint.text}"


class TaskPlanner:
    """Runs one request against one world. Not safe to share across threads."""

    def __init__(
        self,
        policy: Policy,
        explainer: Optional[Explainer] = None,
        budget: int = DEFAULT_BUDGET,
        methods: Optional[Mapping[str, HtnMethod]] = None,
        faults: Sequence[FaultInjector] = (),
    ):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.policy = policy
        self.explainer = explainer
        self.budget = budget
        self.methods = methods
        self.faults = list(faults)

    def run(self, request: str, world: WorldState) -> PlannerOutcome:
        world = fire_events(world, AtStep(world.clock))
        smap = build_map(world)
        ctx = initial_context(request, get_robot_state(world))
        transcript = Transcript([(e.kind, e.text) for e in ctx.entries])
        outcome = PlannerOutcome(BUDGET_EXHAUSTED, 0, transcript, ctx, world)
        skill_index = 0

        def append(entry: ContextEntry) -> None:
            nonlocal ctx
            ctx = update_context(ctx, entry)
            transcript.add(entry.kind, entry.text)

        while outcome.steps_used < self.budget:
            world = fire_events(world, AtStep(world.clock))
            try:
                action = self.policy.decide(ctx)
            except PolicyError as exc:
                outcome.status, outcome.reason, outcome.error_code = FAILURE, str(exc), exc.code
                break
            outcome.steps_used += 1

            if isinstance(action, Finish):
                append(action_entry(action))
                append(ContextEntry(OBSERVATION, "The task is finished."))
                outcome.context_lengths.append(len(ctx.entries))
                outcome.status, outcome.final_answer = SUCCESS, action.answer
                break

            append(action_entry(action))
            if isinstance(action, Thought):
                outcome.context_lengths.append(len(ctx.entries))
                continue

            outcome.actions.append(action_call(action))
            if isinstance(action, Perception):
                smap = build_map(world)
                try:
                    observation = perceive(action.call, world, smap)
                except RoomNotFound as exc:
                    observation = f"{exc.code}: {exc}"
            else:
                skill_index += 1
                world, observation = self._run_skill(action.call, world, smap, request, transcript, outcome)
                world = fire_events(world, AfterSkillIndex(skill_index))
            append(ContextEntry(OBSERVATION, observation))
            outcome.context_lengths.append(len(ctx.entries))

        outcome.context = ctx
        outcome.world = world
        return outcome

    def _run_skill(
        self,
        call: SkillCall,
        world: WorldState,
        smap: SemanticMap,
        request: str,
        transcript: Transcript,
        outcome: PlannerOutcome,
    ) -> tuple[WorldState, str]:
        pre = check_preconditions(call, world, smap)
        if not pre.satisfied:
            failure = FailureMessage(call.name, pre.error_code, pre.reason, "precondition")
            transcript.add(FEEDBACK, f"precondition -> Failure [{pre.error_code}] {pre.reason}")
            outcome.skills.append(SkillRecord(call, SkillResult(False, 0, failure)))
            return world, failure_observation(failure, self.explainer, request)

        try:
            node = extract_target_nodes(call, smap, world.robot)
        except SkillPlanningError as exc:
            failure = FailureMessage(call.name, exc.code, exc.reason, "target")
            outcome.skills.append(SkillRecord(call, SkillResult(False, 0, failure)))
            return world, failure_observation(failure, self.explainer, request)
        commands = decompose(call, node, world, smap, self.methods)
        world, result = execute_skill(
            commands,
            world,
            skill=call.name,
            faults=self.faults,
            before_command=lambda w: fire_events(w, AtStep(w.clock)),
        )
        for cmd, fb in result.feedback:
            status = "Success" if fb.ok else f"Failure [{fb.error_code}] {fb.message}"
            transcript.add(FEEDBACK, f"{cmd.render()} -> {status}")
        outcome.skills.append(SkillRecord(call, result))
        if not result.success:
            return world, failure_observation(result.failure, self.explainer, request)
        place = node.id if call.name == "PLACE" else smap.room_of(node.id)
        return world, skill_success_text(call, node.kind, place)


def plan_and_execute(
    request: str,
    world: WorldState,
    policy: Policy,
    budget: int = DEFAULT_BUDGET,
    explainer: Optional[Explainer] = None,
    **kwargs,
) -> PlannerOutcome:
    return TaskPlanner(policy, explainer, budget, **kwargs).run(request, world)


def outcome_report(outcome: PlannerOutcome) -> dict:
    return {
        "status": outcome.status,
        "final_answer": outcome.final_answer,
        "reason": outcome.reason,
        "steps_used": outcome.steps_used,
        "actions": outcome.actions,
        "skills": [
            {
                "skill": rec.call.render(),
                "success": rec.result.success,
                "executed_commands": rec.result.executed_count,
                "error_code": rec.result.failure.error_code if rec.result.failure else None,
            }
            for rec in outcome.skills
        ],
        "entries": outcome.transcript.to_json(),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"

