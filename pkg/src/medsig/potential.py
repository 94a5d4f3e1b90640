"""Additive consistency on directed graphs and exact potential games.

A strategic game is an exact potential game iff the unilateral payoff
differences, read as an antisymmetric edge function on the graph of
single-player deviations, sum to zero around every cycle.  The checker
assigns heights along a spanning tree and tests the remaining edges, so
detection is polynomial; failures come back as an explicit cycle whose sum
is nonzero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Mapping, Optional, Sequence, Union

from .model import ZERO, Violation, ValidationError


class AntisymmetryViolation(ValueError):
    pass


@dataclass(frozen=True)
class StrategicGame:
    players: tuple[str, ...]
    actions: Mapping[str, tuple[str, ...]]
    payoffs: Mapping[tuple[str, tuple[str, ...]], Fraction]

    def profiles(self) -> list[tuple[str, ...]]:
        return [tuple(p) for p in iproduct(*(self.actions[i] for i in self.players))]

    def payoff(self, player: str, profile: tuple[str, ...]) -> Fraction:
        return self.payoffs[(player, tuple(profile))]


def strategic_game(players, actions, payoffs) -> StrategicGame:
    """Validate and freeze a strategic game: every (player, profile) pair
    must carry a payoff."""
    player_list = tuple(players)
    action_map = {p: tuple(actions[p]) for p in player_list}
    violations = []
    if len(set(player_list)) != len(player_list):
        violations.append(Violation("DuplicatePlayer", "duplicate player identifiers"))
    for p in player_list:
        if not action_map[p]:
            violations.append(Violation("EmptyActionSet", f"player {p!r} has no actions"))
    table: dict[tuple[str, tuple[str, ...]], Fraction] = {}
    profiles = [tuple(pr) for pr in iproduct(*(action_map[p] for p in player_list))]
    for profile in profiles:
        for p in player_list:
            key = (p, profile)
            if key not in payoffs:
                violations.append(
                    Violation("MissingPayoff", f"no payoff for {p!r} at {profile}")
                )
            else:
                table[key] = Fraction(payoffs[key])
    if violations:
        raise ValidationError(violations)
    return StrategicGame(player_list, action_map, table)


@dataclass(frozen=True)
class DeviationGraph:
    """Action profiles as vertices; an edge whenever two profiles differ in
    exactly one player's action, carrying that player's payoff difference in
    both directions (antisymmetric by construction)."""

    profiles: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    deviator: Mapping[tuple[tuple[str, ...], tuple[str, ...]], str]
    delta: Mapping[tuple[tuple[str, ...], tuple[str, ...]], Fraction]


def build_deviation_graph(game: StrategicGame) -> DeviationGraph:
    profiles = sorted(game.profiles())
    edges = []
    deviator = {}
    delta = {}
    for a in profiles:
        for i, player in enumerate(game.players):
            for alt in game.actions[player]:
                if alt <= a[i]:
                    continue
                b = a[:i] + (alt,) + a[i + 1 :]
                edges.append((a, b))
                deviator[(a, b)] = player
                deviator[(b, a)] = player
                gap = game.payoff(player, a) - game.payoff(player, b)
                delta[(a, b)] = gap
                delta[(b, a)] = -gap
    return DeviationGraph(tuple(profiles), tuple(sorted(edges)), deviator, delta)


@dataclass(frozen=True)
class CycleViolation:
    """A closed walk whose edge values do not sum to zero."""

    cycle: tuple
    total: Fraction


def check_additive_consistency(
    vertices: Sequence, edges: Sequence[tuple], delta: Mapping[tuple, Fraction]
) -> Union[dict, CycleViolation]:
    """Decide whether an antisymmetric edge function is a difference of
    vertex heights; works per connected component on any finite graph.

    Returns the height function (anchored at each component's smallest
    vertex, height 0) or a violating cycle.
    """
    adjacency: dict = {v: [] for v in vertices}
    for a, b in edges:
        if delta[(a, b)] != -delta[(b, a)]:
            raise AntisymmetryViolation(
                f"delta({a}, {b}) and delta({b}, {a}) must be opposite"
            )
        adjacency[a].append(b)
        adjacency[b].append(a)
    for v in adjacency:
        adjacency[v].sort()

    heights: dict = {}
    parent: dict = {}
    for start in sorted(adjacency):
        if start in heights:
            continue
        heights[start] = ZERO
        parent[start] = None
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adjacency[v]:
                if w not in heights:
                    # delta(v, w) = height(v) - height(w)
                    heights[w] = heights[v] - delta[(v, w)]
                    parent[w] = v
                    queue.append(w)

    for a, b in edges:
        if parent.get(a) == b or parent.get(b) == a:
            continue
        if delta[(a, b)] != heights[a] - heights[b]:
            path = _tree_path(parent, a, b) + (a,)
            total = sum(delta[(u, v)] for u, v in zip(path, path[1:]))
            assert total != 0
            return CycleViolation(path, total)
    return heights


def _tree_path(parent: Mapping, a, b) -> tuple:
    up_a = [a]
    while parent[up_a[-1]] is not None:
        up_a.append(parent[up_a[-1]])
    index_a = {v: i for i, v in enumerate(up_a)}
    up_b = [b]
    while up_b[-1] not in index_a:
        up_b.append(parent[up_b[-1]])
    meet = up_b[-1]
    return tuple(up_a[: index_a[meet] + 1] + list(reversed(up_b[:-1])))


@dataclass(frozen=True)
class FailingEdge:
    profile: tuple[str, ...]
    player: str
    deviation: tuple[str, ...]


def recover_potential(
    game: StrategicGame,
) -> Union[dict[tuple[str, ...], Fraction], CycleViolation]:
    """Find an exact potential for the game or a deviation cycle proving none
    exists.  The potential is anchored at 0 on the smallest profile and is
    unique up to an additive constant."""
    graph = build_deviation_graph(game)
    result = check_additive_consistency(graph.profiles, graph.edges, graph.delta)
    if isinstance(result, CycleViolation):
        return result
    failing = verify_potential(game, result)
    assert failing is None, f"recovered potential fails at {failing}"
    return result


def verify_potential(
    game: StrategicGame, heights: Mapping[tuple[str, ...], Fraction]
) -> Optional[FailingEdge]:
    """Check the potential identity on every unilateral deviation, exactly."""
    graph = build_deviation_graph(game)
    for a, b in graph.edges:
        player = graph.deviator[(a, b)]
        if heights[a] - heights[b] != game.payoff(player, a) - game.payoff(player, b):
            return FailingEdge(a, player, b)
    return None
