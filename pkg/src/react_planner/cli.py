"""Command line entry point: ``react-planner run|suite|repl``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence, TextIO

from .explainer import DatasetError, Explainer, load_dataset
from .planner import DEFAULT_BUDGET, plan_and_execute
from .policy import EndpointPolicy, EndpointPolicyConfig, PolicyError, ScriptedPolicy
from .scenario import (
    EXIT_INPUT_ERROR,
    EXIT_MISMATCH,
    EXIT_OK,
    ScenarioError,
    format_table,
    load_scenario,
    load_world,
    run_scenario,
    run_suite,
)


def _endpoint_policy(args: argparse.Namespace) -> EndpointPolicy:
    if not args.endpoint_config:
        raise ScenarioError("--policy endpoint needs --endpoint-config")
    try:
        return EndpointPolicy(EndpointPolicyConfig.from_file(args.endpoint_config))
    except (OSError, ValueError, TypeError) as exc:
        raise ScenarioError(f"endpoint config: {exc}") from exc


def _dataset(args: argparse.Namespace):
    return load_dataset(args.explainer_data)


def cmd_run(args: argparse.Namespace, out: TextIO) -> int:
    scenario = load_scenario(args.file)
    policy = _endpoint_policy(args) if args.policy == "endpoint" else None
    result = run_scenario(scenario, policy, _dataset(args), budget=args.budget, seed=args.seed)
    out.write(result.log)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(result.log)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(result.report, fh, indent=2)
            fh.write("\n")
    outcome = result.outcome
    out.write(f"\nstatus: {outcome.status} ({outcome.steps_used} steps)\n")
    if outcome.reason:
        out.write(f"reason: {outcome.reason}\n")
    if result.golden is not None:
        g = result.golden
        if g["matched"]:
            out.write(f"golden: {g['expected_count']} actions matched\n")
        else:
            out.write(f"GOLDEN_MISMATCH: diverged at action {g['divergence']}\n")
    return result.exit_code


def cmd_suite(args: argparse.Namespace, out: TextIO) -> int:
    rows, runs = run_suite(args.directory, _dataset(args), workers=args.workers)
    for name, result, err in runs:
        if err is not None:
            out.write(f"{name}: ERROR {err}\n")
        else:
            out.write(f"{name}: {'PASS' if result.exit_code == EXIT_OK else 'FAIL'} ({result.outcome.status})\n")
    out.write("\n" + format_table(rows))
    failed = any(err is not None or result.exit_code != EXIT_OK for _, result, err in runs)
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_repl(args: argparse.Namespace, out: TextIO, inp: TextIO) -> int:
    world = load_world(args.world)
    explainer = Explainer(_dataset(args))
    if args.policy == "endpoint":
        make_policy = lambda: _endpoint_policy(args)  # noqa: E731
    else:
        scenario = load_scenario(args.world)
        if scenario.script is None:
            raise ScenarioError("scripted repl needs a scenario file with a script")
        make_policy = lambda: ScriptedPolicy(list(scenario.script))  # noqa: E731
    out.write("Enter a request, or :quit to exit.\n")
    for line in inp:
        request = line.strip()
        if not request:
            continue
        if request == ":quit":
            break
        try:
            outcome = plan_and_execute(request, world.copy(), make_policy(), args.budget or DEFAULT_BUDGET, explainer)
        except (PolicyError, ScenarioError) as exc:
            out.write(f"error: {exc}\n")
            continue
        out.write(outcome.transcript.render())
        out.write(f"status: {outcome.status}\n")
        if outcome.reason:
            out.write(f"reason: {outcome.reason}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--policy", choices=("scripted", "endpoint"), default="scripted")
    common.add_argument("--budget", type=int, default=None, help="step budget (default: scenario value or 40)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--log", help="write the transcript log here")
    common.add_argument("--explainer-data", help="JSON-lines failure dataset (default: bundled seed)")
    common.add_argument("--endpoint-config", help="JSON file with url, model, api_key_env, timeout, ...")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="react-planner", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run one scenario file")
    p.add_argument("file")
    p.add_argument("--report", help="write the JSON run report here")
    p = sub.add_parser("suite", parents=[common], help="run every scenario in a directory")
    p.add_argument("directory")
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("repl", parents=[common], help="interactive requests against a world")
    p.add_argument("world")
    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, inp: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    inp = inp or sys.stdin
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.budget is not None and args.budget < 1:
        parser.error("--budget must be at least 1")
    try:
        if args.command == "run":
            return cmd_run(args, out)
        if args.command == "suite":
            return cmd_suite(args, out)
        return cmd_repl(args, out, inp)
    except (ScenarioError, DatasetError) as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
