"""Command-line interface.

Subcommands: validate, ckc, check, decide, verify, simulate, multi,
potential, demo.  Output is JSON by default (``--format text`` renders
human-readable reports).  Exit codes: 0 success, 1 unreadable or malformed
input, 2 rejection verdict, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import fixtures, jsonio
from .consistency import Certificate, check_reciprocity, ratio_labeling, solve_labeling
from .generator import synthesize_multi
from .implement import decide_implementable, verify_exact, verify_monte_carlo
from .infograph import build_information_graph, common_knowledge_components, component_graph
from .model import (
    JointBelief,
    Model,
    SignalHasZeroProbability,
    ValidationError,
    format_rational,
)
from .potential import CycleViolation, recover_potential

OK = 0
INPUT_ERROR = 1
REJECTED = 2
MISMATCH = 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    instance: Optional[str] = None
    jb: tuple[str, ...] = ()
    ratios: Optional[str] = None
    kernel: Optional[str] = None
    signal: str = "s"
    game: Optional[str] = None
    demo_name: Optional[str] = None
    samples: int = 0
    seed: Optional[int] = None
    semantics: str = "spp"
    format: str = "json"


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc


def _load_instance(
    config: RunConfig, need_jb: bool, use_jb_arg: bool = True
) -> tuple[Model, Optional[JointBelief]]:
    if not config.instance:
        raise InputError("an instance file is required")
    data = _load_json(config.instance)
    try:
        model, jb = jsonio.parse_instance(data)
        if use_jb_arg and config.jb:
            jb = jsonio.parse_joint_belief(model, _load_json(config.jb[0]))
    except jsonio.SchemaError as exc:
        raise InputError(str(exc)) from exc
    if need_jb and jb is None:
        raise InputError("a joint belief is required (embed it or pass --jb)")
    return model, jb


def _violations_payload(exc: ValidationError) -> dict:
    return {
        "valid": False,
        "violations": [{"code": v.code, "message": v.message} for v in exc.violations],
    }


def run(config: RunConfig) -> tuple[int, dict]:
    handler = _HANDLERS[config.command]
    return handler(config)


def _cmd_validate(config: RunConfig) -> tuple[int, dict]:
    try:
        model, jb = _load_instance(config, need_jb=False)
    except ValidationError as exc:
        return REJECTED, _violations_payload(exc)
    return OK, {
        "valid": True,
        "states": len(model.states),
        "players": list(model.player_ids),
        "joint_belief": "valid" if jb is not None else "absent",
    }


def _cmd_ckc(config: RunConfig) -> tuple[int, dict]:
    model, _ = _load_instance(config, need_jb=False)
    graph = build_information_graph(model)
    components = common_knowledge_components(graph)
    compgraph = component_graph(graph, components, model.mediator)
    payload = jsonio.components_to_json(components, compgraph)
    payload["edges"] = [
        {"between": list(edge), "players": sorted(players)}
        for edge, players in graph.edges.items()
    ]
    return OK, payload


def _cmd_check(config: RunConfig) -> tuple[int, dict]:
    model, _ = _load_instance(config, need_jb=False)
    if not config.ratios:
        raise InputError("--ratios is required for check")
    table = jsonio.parse_ratio_table(_load_json(config.ratios))
    graph = build_information_graph(model)
    try:
        labeling = ratio_labeling(graph, table)
        check_reciprocity(graph, labeling)
    except ValueError as exc:
        return REJECTED, {"consistent": False, "reason": str(exc)}
    result = solve_labeling(graph, model.mediator, labeling)
    if isinstance(result, Certificate):
        return REJECTED, {
            "consistent": False,
            "certificate": jsonio.certificate_to_json(result),
        }
    return OK, {"consistent": True, "labeling": jsonio.labeling_to_json(result)}


def _cmd_decide(config: RunConfig) -> tuple[int, dict]:
    model, jb = _load_instance(config, need_jb=True)
    verdict = decide_implementable(model, jb)
    return (OK if verdict.implementable else REJECTED), jsonio.verdict_to_json(verdict)


def _cmd_verify(config: RunConfig) -> tuple[int, dict]:
    model, jb = _load_instance(config, need_jb=True)
    if not config.kernel:
        raise InputError("--kernel is required for verify")
    kernel = jsonio.parse_kernel(model, _load_json(config.kernel))
    mismatches = verify_exact(model, kernel, config.signal, jb)
    payload = {"ok": not mismatches, "mismatches": jsonio.mismatches_to_json(mismatches)}
    return (OK if not mismatches else MISMATCH), payload


def _cmd_simulate(config: RunConfig) -> tuple[int, dict]:
    model, jb = _load_instance(config, need_jb=True)
    if config.seed is None:
        raise InputError("--seed is required whenever samples are drawn")
    if config.kernel:
        kernel = jsonio.parse_kernel(model, _load_json(config.kernel))
        signal = config.signal
    else:
        verdict = decide_implementable(model, jb)
        if not verdict.implementable:
            return REJECTED, jsonio.verdict_to_json(verdict)
        kernel, signal = verdict.kernel, verdict.signal
    report = verify_monte_carlo(model, kernel, signal, jb, config.samples, config.seed)
    return (OK if report.ok else MISMATCH), jsonio.simulation_to_json(report)


def _cmd_multi(config: RunConfig) -> tuple[int, dict]:
    model, _ = _load_instance(config, need_jb=False, use_jb_arg=False)
    if not config.jb:
        raise InputError("pass at least one --jb file for multi")
    beliefs = []
    try:
        for path in config.jb:
            beliefs.append(jsonio.parse_joint_belief(model, _load_json(path)))
    except jsonio.SchemaError as exc:
        raise InputError(str(exc)) from exc
    result = synthesize_multi(model, beliefs, semantics=config.semantics)
    return (OK if result.ok else REJECTED), jsonio.multi_to_json(result)


def _cmd_potential(config: RunConfig) -> tuple[int, dict]:
    if not config.game:
        raise InputError("a game file is required")
    try:
        game = jsonio.parse_game(_load_json(config.game))
    except jsonio.SchemaError as exc:
        raise InputError(str(exc)) from exc
    result = recover_potential(game)
    if isinstance(result, CycleViolation):
        return REJECTED, {
            "potential_game": False,
            "violating_cycle": jsonio.cycle_violation_to_json(result),
        }
    return OK, {
        "potential_game": True,
        "potential": {
            jsonio.profile_key(profile): format_rational(value)
            for profile, value in sorted(result.items())
        },
    }


def _cmd_demo(config: RunConfig) -> tuple[int, dict]:
    if config.demo_name == "negotiation":
        return OK, _demo_negotiation()
    if config.demo_name == "example1":
        return OK, _demo_example1()
    raise InputError(f"unknown demo {config.demo_name!r} (choose negotiation or example1)")


def _demo_negotiation() -> dict:
    model = fixtures.negotiation_model()
    bad = fixtures.negotiation_infeasible_beliefs(model)
    verdict = decide_implementable(model, bad)
    matched = {}
    for p in (Fraction(1, 3), Fraction(1, 4), Fraction(1, 2)):
        v = decide_implementable(model, fixtures.negotiation_matched_beliefs(model, p))
        matched[format_rational(p)] = v.implementable
    indifference = [
        {
            "player": case["player"],
            "belief": {s: format_rational(w) for s, w in sorted(case["belief"].items())},
            "expected": {a: format_rational(v) for a, v in sorted(case["expected"].items())},
        }
        for case in fixtures.negotiation_indifference()
    ]
    return {
        "mismatched_pair": jsonio.verdict_to_json(verdict),
        "loop_product": format_rational(verdict.certificate.product),
        "matched_pair_implementable": matched,
        "indifference": indifference,
    }


def _demo_example1() -> dict:
    model = fixtures.five_state_model()
    baseline = fixtures.five_state_baseline_beliefs(model)
    plain_kernel, plain_signal = fixtures.uninformative_kernel(model)
    baseline_ok = not verify_exact(model, plain_kernel, plain_signal, baseline)

    target = fixtures.five_state_signal_beliefs(model)
    verdict = decide_implementable(model, target)
    row = verdict.kernel.table[verdict.signal]
    low = min(row[s] for s in model.states)
    ratios = ":".join(str(row[s] / low) for s in model.states)
    verified = not verify_exact(model, verdict.kernel, verdict.signal, target)

    rejected = decide_implementable(model, fixtures.five_state_modified_beliefs(model))
    return {
        "baseline_reproduced_by_uninformative_kernel": baseline_ok,
        "synthesis": jsonio.verdict_to_json(verdict),
        "signal_ratios": ratios,
        "synthesis_verified": verified,
        "modified_profile": jsonio.verdict_to_json(rejected),
    }


_HANDLERS = {
    "validate": _cmd_validate,
    "ckc": _cmd_ckc,
    "check": _cmd_check,
    "decide": _cmd_decide,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "multi": _cmd_multi,
    "potential": _cmd_potential,
    "demo": _cmd_demo,
}


def _render_text(payload, indent: int = 0) -> list[str]:
    lines = []
    pad = "  " * indent
    if isinstance(payload, dict):
        for key, value in payload.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(payload, list):
        for value in payload:
            if isinstance(value, (dict, list)):
                lines.extend(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}- {value}")
    else:
        lines.append(f"{pad}{payload}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medsig",
        description="Mediated signaling: implementability checks, signal synthesis, "
        "and potential-game detection, all in exact arithmetic.",
    )
    parser.add_argument("--format", choices=("json", "text"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    def instance_command(name, help_text, jb=False):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("instance", help="instance JSON file")
        if jb:
            cmd.add_argument("--jb", action="append", default=[], help="joint belief JSON file")
        return cmd

    instance_command("validate", "validate an instance (and embedded joint belief)", jb=True)
    instance_command("ckc", "print common-knowledge components and their mediator links")
    check = instance_command("check", "check a ratio table for consistency")
    check.add_argument("--ratios", required=True, help="JSON mapping 'a|b' -> 'p/q'")
    instance_command("decide", "decide implementability and synthesize a kernel", jb=True)
    verify = instance_command("verify", "verify a kernel against a joint belief", jb=True)
    verify.add_argument("--kernel", required=True)
    verify.add_argument("--signal", default="s")
    simulate = instance_command("simulate", "Monte Carlo check of a kernel", jb=True)
    simulate.add_argument("--kernel")
    simulate.add_argument("--signal", default="s")
    simulate.add_argument("--samples", type=int, required=True)
    simulate.add_argument("--seed", type=int, required=True)
    multi = instance_command("multi", "synthesize one kernel for several joint beliefs", jb=True)
    multi.add_argument("--semantics", choices=("pp", "spp"), default="spp")
    potential = sub.add_parser("potential", help="detect an exact potential game")
    potential.add_argument("game", help="game JSON file")
    demo = sub.add_parser("demo", help="run a built-in walkthrough")
    demo.add_argument("name", choices=("negotiation", "example1"))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        instance=getattr(args, "instance", None),
        jb=tuple(getattr(args, "jb", []) or []),
        ratios=getattr(args, "ratios", None),
        kernel=getattr(args, "kernel", None),
        signal=getattr(args, "signal", "s"),
        game=getattr(args, "game", None),
        demo_name=getattr(args, "name", None),
        samples=getattr(args, "samples", 0),
        seed=getattr(args, "seed", None),
        semantics=getattr(args, "semantics", "spp"),
        format=args.format,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = config_from_args(args)
    try:
        code, payload = run(config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ValidationError as exc:
        code, payload = REJECTED, _violations_payload(exc)
    except SignalHasZeroProbability as exc:
        print(f"error: signal {exc} has zero probability", file=sys.stderr)
        return INPUT_ERROR
    if config.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(_render_text(payload)))
    return code


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
