"""JSON schemas for instances, belief profiles, kernels, ratio tables, games,
and result objects.

Rationals travel as lowest-term "p/q" strings (plain integers allowed);
floats are rejected so exactness survives a round trip.  Parsing raises
:class:`SchemaError` with a path-like message; serializers emit plain dicts
ready for ``json.dumps``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .consistency import Certificate, Labeling
from .generator import MultiSynthesis, PPVerdict, SPPVerdict
from .implement import Mismatch, SimulationReport, Verdict
from .infograph import ComponentGraph, Components
from .model import (
    JointBelief,
    Model,
    SignalKernel,
    format_rational,
    parse_rational,
    validate_joint_belief,
    validate_kernel,
    validate_model,
)
from .potential import CycleViolation, StrategicGame, strategic_game


class SchemaError(Exception):
    pass


def _rational(value, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _require(data, key, kind, where: str):
    if not isinstance(data, dict) or key not in data:
        raise SchemaError(f"{where}: missing required key {key!r}")
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"{where}: {key!r} has the wrong type")
    return value


def parse_instance(data) -> tuple[Model, Optional[JointBelief]]:
    """Parse {"states", "prior", "players", "mediator"[, "joint_belief"]}."""
    states = _require(data, "states", list, "instance")
    prior_raw = _require(data, "prior", dict, "instance")
    players_raw = _require(data, "players", dict, "instance")
    mediator_raw = _require(data, "mediator", list, "instance")
    prior = {s: _rational(v, f"prior[{s!r}]") for s, v in prior_raw.items()}
    players = {}
    for pid, cells in players_raw.items():
        if not isinstance(cells, list):
            raise SchemaError(f"players[{pid!r}]: expected a list of cells")
        players[pid] = [list(c) for c in cells]
    model = validate_model(states, players, mediator_raw, prior)
    jb = None
    if data.get("joint_belief") is not None:
        jb = parse_joint_belief(model, data["joint_belief"])
    return model, jb


def instance_to_json(model: Model, jb: Optional[JointBelief] = None) -> dict:
    data = {
        "states": list(model.states),
        "prior": {s: format_rational(model.prior[s]) for s in model.states},
        "players": {
            pid: [sorted(cell) for cell in model.players[pid]]
            for pid in model.player_ids
        },
        "mediator": [sorted(cell) for cell in model.mediator],
    }
    if jb is not None:
        data["joint_belief"] = joint_belief_to_json(jb)
    return data


def parse_joint_belief(model: Model, data) -> JointBelief:
    """Parse {state: {player: {state: "p/q"} | null}}; accepts a wrapping
    {"joint_belief": ...} object as well."""
    if isinstance(data, dict) and set(data) == {"joint_belief"}:
        data = data["joint_belief"]
    if not isinstance(data, dict):
        raise SchemaError("joint_belief: expected an object keyed by state")
    entries: dict[str, dict[str, Optional[dict[str, Fraction]]]] = {}
    for state, row in data.items():
        if not isinstance(row, dict):
            raise SchemaError(f"joint_belief[{state!r}]: expected an object keyed by player")
        entries[state] = {}
        for player, dist in row.items():
            if dist is None:
                entries[state][player] = None
            elif isinstance(dist, dict):
                entries[state][player] = {
                    s: _rational(v, f"joint_belief[{state!r}][{player!r}][{s!r}]")
                    for s, v in dist.items()
                }
            else:
                raise SchemaError(
                    f"joint_belief[{state!r}][{player!r}]: expected an object or null"
                )
    return validate_joint_belief(model, entries)


def joint_belief_to_json(jb: JointBelief) -> dict:
    return {
        state: {
            player: (
                None
                if jb.belief(state, player) is None
                else {
                    s: format_rational(p)
                    for s, p in jb.belief(state, player).items()
                }
            )
            for player in jb.players
        }
        for state in jb.states
    }


def parse_kernel(model: Model, data) -> SignalKernel:
    """Parse {"signals": [...], "table": {signal: {state: "p/q"}}}; omitted
    states default to probability zero."""
    signals = _require(data, "signals", list, "kernel")
    table_raw = _require(data, "table", dict, "kernel")
    table = {}
    for sig, row in table_raw.items():
        if not isinstance(row, dict):
            raise SchemaError(f"kernel.table[{sig!r}]: expected an object keyed by state")
        table[sig] = {
            s: _rational(v, f"kernel.table[{sig!r}][{s!r}]") for s, v in row.items()
        }
    return validate_kernel(model, signals, table)


def kernel_to_json(kernel: SignalKernel) -> dict:
    return {
        "signals": list(kernel.signals),
        "table": {
            sig: {s: format_rational(p) for s, p in sorted(kernel.table[sig].items())}
            for sig in kernel.signals
        },
    }


def parse_ratio_table(data) -> dict[tuple[str, str], Fraction]:
    """Parse {"a|b": "p/q"} into directed edge ratios."""
    if not isinstance(data, dict):
        raise SchemaError("ratio table: expected an object")
    table = {}
    for key, value in data.items():
        parts = key.split("|")
        if len(parts) != 2 or not all(parts):
            raise SchemaError(f"ratio table: key {key!r} must look like 'state|state'")
        table[(parts[0], parts[1])] = _rational(value, f"ratio[{key!r}]")
    return table


def ratio_table_to_json(values: Mapping[tuple[str, str], Fraction]) -> dict:
    return {f"{a}|{b}": format_rational(v) for (a, b), v in sorted(values.items())}


def profile_key(profile) -> str:
    return "|".join(profile)


def parse_game(data) -> StrategicGame:
    """Parse {"players", "actions", "payoffs": {"a|b|...": {player: "p/q"}}};
    profile keys join actions with '|' in player order."""
    players = _require(data, "players", list, "game")
    actions_raw = _require(data, "actions", dict, "game")
    payoffs_raw = _require(data, "payoffs", dict, "game")
    actions = {}
    for p in players:
        if p not in actions_raw:
            raise SchemaError(f"game.actions: missing player {p!r}")
        actions[p] = list(actions_raw[p])
    payoffs = {}
    for key, row in payoffs_raw.items():
        profile = tuple(key.split("|"))
        if len(profile) != len(players):
            raise SchemaError(
                f"game.payoffs: profile key {key!r} must have one action per player"
            )
        if not isinstance(row, dict):
            raise SchemaError(f"game.payoffs[{key!r}]: expected an object keyed by player")
        for p, v in row.items():
            payoffs[(p, profile)] = _rational(v, f"game.payoffs[{key!r}][{p!r}]")
    return strategic_game(players, actions, payoffs)


def game_to_json(game: StrategicGame) -> dict:
    return {
        "players": list(game.players),
        "actions": {p: list(game.actions[p]) for p in game.players},
        "payoffs": {
            profile_key(profile): {
                p: format_rational(game.payoff(p, profile)) for p in game.players
            }
            for profile in game.profiles()
        },
    }


def certificate_to_json(cert: Certificate) -> dict:
    data = {"kind": cert.kind, "product": format_rational(cert.product)}
    if cert.kind == "cycle":
        data["path"] = list(cert.states)
    else:
        data["pairs"] = [list(p) for p in cert.pairs]
    return data


def parse_certificate(data) -> Certificate:
    kind = _require(data, "kind", str, "certificate")
    product = _rational(_require(data, "product", None, "certificate"), "certificate.product")
    if kind == "cycle":
        path = _require(data, "path", list, "certificate")
        return Certificate(kind, product=product, states=tuple(path))
    if kind == "loop":
        pairs = _require(data, "pairs", list, "certificate")
        return Certificate(kind, product=product, pairs=tuple(tuple(p) for p in pairs))
    raise SchemaError(f"certificate: unknown kind {kind!r}")


def labeling_to_json(labeling: Labeling) -> dict:
    return {s: format_rational(v) for s, v in sorted(labeling.values.items())}


def distribution_to_json(dist: Optional[Mapping[str, Fraction]]) -> Optional[dict]:
    if dist is None:
        return None
    return {s: format_rational(p) for s, p in sorted(dist.items())}


def components_to_json(components: Components, compgraph: ComponentGraph) -> dict:
    return {
        "components": [sorted(c) for c in components.sets],
        "component_graph": [
            {"between": list(edge), "witness_cells": [sorted(c) for c in cells]}
            for edge, cells in compgraph.edges.items()
        ],
    }


def verdict_to_json(verdict: Verdict) -> dict:
    data: dict = {"implementable": verdict.implementable}
    if verdict.implementable:
        data["signal"] = verdict.signal
        data["kernel"] = kernel_to_json(verdict.kernel)
        data["labeling"] = labeling_to_json(verdict.labeling)
        return data
    data["reason"] = verdict.reason
    if verdict.certificate is not None:
        data["certificate"] = certificate_to_json(verdict.certificate)
    if verdict.witness_cell is not None:
        data["witness_cell"] = sorted(verdict.witness_cell)
    if verdict.edge is not None:
        data["edge"] = list(verdict.edge)
        data["edge_values"] = {
            p: format_rational(v) for p, v in sorted(verdict.edge_values.items())
        }
    if verdict.detail:
        data["detail"] = verdict.detail
    return data


def mismatches_to_json(mismatches: list[Mismatch]) -> list[dict]:
    return [
        {
            "state": m.state,
            "player": m.player,
            "expected": distribution_to_json(m.expected),
            "got": distribution_to_json(m.got),
        }
        for m in mismatches
    ]


def simulation_to_json(report: SimulationReport) -> dict:
    return {
        "samples": report.samples,
        "seed": report.seed,
        "signal": report.signal,
        "signal_hits": report.signal_hits,
        "max_deviation": report.max_deviation,
        "low_confidence": report.low_confidence,
        "ok": report.ok,
        "cells": [
            {
                "player": c.player,
                "cell": list(c.cell),
                "hits": c.hits,
                "max_deviation": c.max_deviation,
                "tolerance": c.tolerance,
                "low_confidence": c.low_confidence,
                "failed": c.failed,
            }
            for c in report.cells
        ],
    }


def pp_to_json(verdict: PPVerdict) -> dict:
    data: dict = {"holds": verdict.holds}
    if verdict.weights is not None:
        data["weights"] = [format_rational(w) for w in verdict.weights]
    if verdict.option is not None:
        data["option"] = {s: format_rational(v) for s, v in sorted(verdict.option.items())}
    return data


def spp_to_json(verdict: SPPVerdict) -> dict:
    data = pp_to_json(PPVerdict(verdict.holds, verdict.weights, verdict.option))
    if verdict.member_index is not None:
        data["member_index"] = verdict.member_index
    return data


def multi_to_json(result: MultiSynthesis) -> dict:
    data: dict = {"ok": result.ok, "semantics": result.semantics}
    if result.ok:
        data["signals"] = list(result.signals)
        data["weights"] = [format_rational(w) for w in result.weights]
        data["kernel"] = kernel_to_json(result.kernel)
        data["posteriors"] = [distribution_to_json(p) for p in result.posteriors]
        data["merged_members"] = [list(m) for m in result.merged_members]
        if result.dropped:
            data["dropped_members"] = list(result.dropped)
        return data
    data["reason"] = result.reason
    if result.option is not None:
        data["option"] = {s: format_rational(v) for s, v in sorted(result.option.items())}
    if result.member_index is not None:
        data["member_index"] = result.member_index
    if result.member_verdict is not None:
        data["member_verdict"] = verdict_to_json(result.member_verdict)
    return data


def cycle_violation_to_json(violation: CycleViolation) -> dict:
    return {
        "cycle": [list(p) if isinstance(p, tuple) else p for p in violation.cycle],
        "sum": format_rational(violation.total),
    }
