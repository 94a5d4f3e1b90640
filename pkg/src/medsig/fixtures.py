"""Built-in demo instances: a four-state negotiation setup whose mediator
cannot implement the natural belief pair, and a five-state setup where a
two-signal kernel can.  Shipped with the CLI and reused across the tests."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .model import JointBelief, Model, SignalKernel, validate_joint_belief, validate_kernel, validate_model
from .potential import StrategicGame, strategic_game

F = Fraction


def beliefs_by_cell(model: Model, assignments) -> JointBelief:
    """Expand per-cell belief assignments into a full validated profile.

    ``assignments``: player -> list of (cell member tuple, distribution or
    None); every state of each cell receives the cell's entry.
    """
    entries = {s: {} for s in model.states}
    for player, cells in assignments.items():
        for members, dist in cells:
            for s in members:
                entries[s][player] = dict(dist) if dist is not None else None
    return validate_joint_belief(model, entries)


# ---------------------------------------------------------------------------
# Negotiation instance: 4 states, uniform prior, mediator cells pairing the
# states across the two common-knowledge components.
# ---------------------------------------------------------------------------


def negotiation_model() -> Model:
    return validate_model(
        states=["w1", "w2", "w3", "w4"],
        players={
            "p1": [["w1", "w2"], ["w3"], ["w4"]],
            "p2": [["w1"], ["w2"], ["w3", "w4"]],
        },
        mediator=[["w1", "w3"], ["w2", "w4"]],
        prior={s: F(1, 4) for s in ("w1", "w2", "w3", "w4")},
    )


def negotiation_infeasible_beliefs(model: Model) -> JointBelief:
    """Player 1 weighs the first pair 1/3 : 2/3 while player 2 weighs the
    second pair 3/4 : 1/4; the mediator cell links force these ratios to
    match, so the profile is not implementable."""
    return beliefs_by_cell(
        model,
        {
            "p1": [
                (("w1", "w2"), {"w1": F(1, 3), "w2": F(2, 3)}),
                (("w3",), {"w3": F(1)}),
                (("w4",), {"w4": F(1)}),
            ],
            "p2": [
                (("w1",), {"w1": F(1)}),
                (("w2",), {"w2": F(1)}),
                (("w3", "w4"), {"w3": F(3, 4), "w4": F(1, 4)}),
            ],
        },
    )


def negotiation_matched_beliefs(model: Model, p: Fraction) -> JointBelief:
    """Both uninformed players weigh their pair p : 1-p; implementable for
    every p strictly between 0 and 1."""
    p = F(p)
    return beliefs_by_cell(
        model,
        {
            "p1": [
                (("w1", "w2"), {"w1": p, "w2": 1 - p}),
                (("w3",), {"w3": F(1)}),
                (("w4",), {"w4": F(1)}),
            ],
            "p2": [
                (("w1",), {"w1": F(1)}),
                (("w2",), {"w2": F(1)}),
                (("w3", "w4"), {"w3": p, "w4": 1 - p}),
            ],
        },
    )


def negotiation_stage_payoffs() -> dict[str, dict[tuple[str, str], tuple[Fraction, Fraction]]]:
    """Per-state payoff matrices, keyed by (player-1 action, player-2 action).

    The bonus payoff is 2 in the first two states and 3 in the last two.
    """
    def first_matrix(x: int):
        return {
            ("A", "A"): (F(2), F(-5)),
            ("A", "C"): (F(x), F(-4)),
            ("C", "A"): (F(-1), F(-1)),
            ("C", "C"): (F(0), F(0)),
        }

    def second_matrix(x: int):
        return {
            ("A", "A"): (F(-5), F(2)),
            ("A", "C"): (F(-1), F(-1)),
            ("C", "A"): (F(-4), F(x)),
            ("C", "C"): (F(0), F(0)),
        }

    return {
        "w1": first_matrix(2),
        "w2": second_matrix(2),
        "w3": first_matrix(3),
        "w4": second_matrix(3),
    }


def dominant_action(matrix, player_index: int) -> str:
    """The action strictly dominating every alternative for one player in a
    single 2x2 stage matrix."""
    actions = sorted({key[player_index] for key in matrix})
    others = sorted({key[1 - player_index] for key in matrix})

    def payoff(mine, theirs):
        key = (mine, theirs) if player_index == 0 else (theirs, mine)
        return matrix[key][player_index]

    for mine in actions:
        if all(
            payoff(mine, theirs) > payoff(alt, theirs)
            for alt in actions
            if alt != mine
            for theirs in others
        ):
            return mine
    raise ValueError("no strictly dominant action")


def negotiation_indifference() -> list[dict]:
    """Expected payoffs of the uninformed player when the informed opponent
    plays its dominant action: both actions tie exactly under the demo
    beliefs, which is what makes the mediated agreement possible."""
    payoffs = negotiation_stage_payoffs()
    cases = [
        ("p1", 0, {"w1": F(1, 3), "w2": F(2, 3)}),
        ("p2", 1, {"w3": F(3, 4), "w4": F(1, 4)}),
    ]
    results = []
    for player, index, belief in cases:
        expected = {}
        for action in ("A", "C"):
            total = F(0)
            for state, weight in belief.items():
                opponent = dominant_action(payoffs[state], 1 - index)
                key = (action, opponent) if index == 0 else (opponent, action)
                total += weight * payoffs[state][key][index]
            expected[action] = total
        results.append({"player": player, "belief": dict(belief), "expected": expected})
    return results


# ---------------------------------------------------------------------------
# Five-state instance.
# ---------------------------------------------------------------------------


def five_state_model() -> Model:
    return validate_model(
        states=["w1", "w2", "w3", "w4", "w5"],
        players={
            "p1": [["w1", "w2"], ["w3"], ["w4", "w5"]],
            "p2": [["w1", "w2", "w3"], ["w4"], ["w5"]],
        },
        mediator=[["w1", "w4"], ["w2", "w3", "w5"]],
        prior={s: F(1, 5) for s in ("w1", "w2", "w3", "w4", "w5")},
    )


def _five_state_beliefs(model: Model, p1_first, p1_last, p2_first) -> JointBelief:
    return beliefs_by_cell(
        model,
        {
            "p1": [
                (("w1", "w2"), p1_first),
                (("w3",), {"w3": F(1)}),
                (("w4", "w5"), p1_last),
            ],
            "p2": [
                (("w1", "w2", "w3"), p2_first),
                (("w4",), {"w4": F(1)}),
                (("w5",), {"w5": F(1)}),
            ],
        },
    )


def five_state_baseline_beliefs(model: Model) -> JointBelief:
    """The profile the prior alone induces (no extra information)."""
    return _five_state_beliefs(
        model,
        {"w1": F(1, 2), "w2": F(1, 2)},
        {"w4": F(1, 2), "w5": F(1, 2)},
        {"w1": F(1, 3), "w2": F(1, 3), "w3": F(1, 3)},
    )


def five_state_signal_beliefs(model: Model) -> JointBelief:
    """The profile a 1:2:2:1:2 signal induces; the implementable demo case."""
    return _five_state_beliefs(
        model,
        {"w1": F(1, 3), "w2": F(2, 3)},
        {"w4": F(1, 3), "w5": F(2, 3)},
        {"w1": F(1, 5), "w2": F(2, 5), "w3": F(2, 5)},
    )


def five_state_modified_beliefs(model: Model) -> JointBelief:
    """As the signal profile, but player 1 weighs the last pair 1/5 : 4/5.

    A valid profile on its own, yet the two pairs now pin conflicting ratios
    (1/2 against 1/4) on states the mediator cannot distinguish.
    """
    return _five_state_beliefs(
        model,
        {"w1": F(1, 3), "w2": F(2, 3)},
        {"w4": F(1, 5), "w5": F(4, 5)},
        {"w1": F(1, 5), "w2": F(2, 5), "w3": F(2, 5)},
    )


def five_state_kernel(model: Model) -> tuple[SignalKernel, str]:
    """The canonical 1:2:2:1:2 two-signal kernel."""
    row = {
        "w1": F(1, 5),
        "w2": F(2, 5),
        "w3": F(2, 5),
        "w4": F(1, 5),
        "w5": F(2, 5),
    }
    kernel = validate_kernel(
        model,
        ("s", "s0"),
        {"s": row, "s0": {s: 1 - p for s, p in row.items()}},
    )
    return kernel, "s"


def uninformative_kernel(model: Model) -> tuple[SignalKernel, str]:
    """A single always-emitted signal: observing it teaches nothing."""
    kernel = validate_kernel(
        model, ("s",), {"s": {s: F(1) for s in model.states}}
    )
    return kernel, "s"


# ---------------------------------------------------------------------------
# Small games for the potential-detection demo and tests.
# ---------------------------------------------------------------------------


def prisoners_dilemma() -> StrategicGame:
    payoffs = {
        ("C", "C"): (F(3), F(3)),
        ("D", "C"): (F(4), F(1)),
        ("C", "D"): (F(1), F(4)),
        ("D", "D"): (F(2), F(2)),
    }
    return strategic_game(
        ["p1", "p2"],
        {"p1": ["C", "D"], "p2": ["C", "D"]},
        {
            (player, profile): payoffs[profile][i]
            for profile in payoffs
            for i, player in enumerate(("p1", "p2"))
        },
    )


def matching_pennies() -> StrategicGame:
    def u1(profile):
        return F(1) if profile[0] == profile[1] else F(-1)

    profiles = [(a, b) for a in ("H", "T") for b in ("H", "T")]
    payoffs = {}
    for profile in profiles:
        payoffs[("p1", profile)] = u1(profile)
        payoffs[("p2", profile)] = -u1(profile)
    return strategic_game(
        ["p1", "p2"], {"p1": ["H", "T"], "p2": ["H", "T"]}, payoffs
    )
