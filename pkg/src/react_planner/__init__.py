"""Deterministic simulator and planner for LLM-driven robot task execution."""

from .explainer import Explainer, FailureRecord, Suggestion, cosine, embed, load_dataset, retrieve, suggest
from .grammar import Finish, Perception, Skill, SkillCall, Thought, parse_action, parse_reply, render_action
from .perception import SemanticMap, build_map, get_map_rooms, get_objects_in_room, get_robot_state
from .planner import PlannerOutcome, TaskPlanner, plan_and_execute
from .policy import Context, ContextEntry, EndpointPolicy, EndpointPolicyConfig, ScriptedPolicy, ScriptStep, update_context
from .world_sim import Command, CommandFeedback, WorldState, apply_command, fire_events

__all__ = [
    "Command",
    "CommandFeedback",
    "Context",
    "ContextEntry",
    "EndpointPolicy",
    "EndpointPolicyConfig",
    "Explainer",
    "FailureRecord",
    "Finish",
    "Perception",
    "PlannerOutcome",
    "ScriptStep",
    "ScriptedPolicy",
    "SemanticMap",
    "Skill",
    "SkillCall",
    "Suggestion",
    "TaskPlanner",
    "Thought",
    "WorldState",
    "apply_command",
    "build_map",
    "cosine",
    "embed",
    "fire_events",
    "get_map_rooms",
    "get_objects_in_room",
    "get_robot_state",
    "load_dataset",
    "parse_action",
    "parse_reply",
    "plan_and_execute",
    "render_action",
    "retrieve",
    "suggest",
    "update_context",
]
