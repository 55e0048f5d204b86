"""Executor and Controller: run a skill's commands fail-fast and judge the outcome."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from . import world_sim
from .world_sim import Command, CommandFeedback, WorldState


@dataclass(frozen=True)
class FailureMessage:
    skill: str
    error_code: str
    reason: str
    failed_command: str

    def __post_init__(self) -> None:
        if not self.reason:
            raise ValueError("a failure message needs a reason")


@dataclass(frozen=True)
class SkillResult:
    success: bool
    executed_count: int
    failure: Optional[FailureMessage] = None
    feedback: tuple[tuple[Command, CommandFeedback], ...] = ()

    def __post_init__(self) -> None:
        if self.success == (self.failure is not None):
            raise ValueError("failure must be present exactly when the skill failed")


@dataclass(frozen=True)
class Continue:
    pass


@dataclass(frozen=True)
class SkillSucceeded:
    pass


@dataclass(frozen=True)
class SkillFailed:
    failure: FailureMessage


Verdict = Union[Continue, SkillSucceeded, SkillFailed]


def classify(feedback: CommandFeedback, is_last: bool, skill: str = "", command: str = "") -> Verdict:
    if not feedback.ok:
        return SkillFailed(FailureMessage(skill, feedback.error_code, feedback.message, command))
    return SkillSucceeded() if is_last else Continue()


@dataclass
class FaultInjector:
    """Force the ``occurrence``-th execution of ``command`` to fail.

    Occurrences are counted across every skill run with this injector.
    """

    command: str
    occurrence: int = 1
    error_code: str = "INJECTED_FAULT"
    message: str = "Injected fault"
    seen: int = field(default=0, init=False)

    def check(self, cmd: Command) -> Optional[CommandFeedback]:
        if cmd.name != self.command:
            return None
        self.seen += 1
        if self.seen == self.occurrence:
            return CommandFeedback.failure(self.error_code, self.message)
        return None


def execute_skill(
    commands: Sequence[Command],
    world: WorldState,
    skill: str = "",
    faults: Sequence[FaultInjector] = (),
    before_command: Optional[Callable[[WorldState], WorldState]] = None,
) -> tuple[WorldState, SkillResult]:
    """Apply ``commands`` in order and stop at the first failure.

    ``before_command`` runs ahead of every command (the planner uses it to
    fire clock-triggered events mid-skill).
    """
    log: list[tuple[Command, CommandFeedback]] = []
    for i, cmd in enumerate(commands):
        if before_command is not None:
            world = before_command(world)
        injected = None
        for fault in faults:
            injected = fault.check(cmd) or injected
        if injected is not None:
            # a forced failure behaves like a real one: only the clock moves
            world = world.copy()
            world.clock += 1
            feedback = injected
        else:
            world, feedback = world_sim.apply_command(world, cmd)
        log.append((cmd, feedback))
        verdict = classify(feedback, i == len(commands) - 1, skill, cmd.name)
        if isinstance(verdict, SkillFailed):
            return world, SkillResult(False, i + 1, verdict.failure, tuple(log))
    return world, SkillResult(True, len(commands), None, tuple(log))
