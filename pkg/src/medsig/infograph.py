"""The information graph: states as vertices, an edge wherever some player
cannot tell two states apart; common-knowledge components and the coarser
graph linking them through mediator cells."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import Model, UnknownPlayer


class EmptySubgroup(ValueError):
    pass


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class InfoGraph:
    """Undirected graph over states; each edge carries the set of players
    whose information sets contain both endpoints.  No self-edges."""

    states: tuple[str, ...]
    edges: Mapping[tuple[str, str], frozenset[str]]
    adjacency: Mapping[str, tuple[str, ...]]

    def has_edge(self, a: str, b: str) -> bool:
        return edge_key(a, b) in self.edges

    def players_on(self, a: str, b: str) -> frozenset[str]:
        return self.edges[edge_key(a, b)]

    def neighbors(self, state: str) -> tuple[str, ...]:
        return self.adjacency.get(state, ())

    def edge_list(self) -> list[tuple[str, str]]:
        return sorted(self.edges)


def _make_graph(states: Iterable[str], edges: dict[tuple[str, str], set[str]]) -> InfoGraph:
    adjacency: dict[str, list[str]] = {s: [] for s in states}
    for a, b in edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    return InfoGraph(
        states=tuple(states),
        edges={e: frozenset(p) for e, p in sorted(edges.items())},
        adjacency={s: tuple(sorted(n)) for s, n in adjacency.items()},
    )


def build_information_graph(model: Model) -> InfoGraph:
    """Edge (a, b) iff some player's information set contains both states."""
    edges: dict[tuple[str, str], set[str]] = {}
    for player in model.player_ids:
        for cell in model.players[player]:
            members = sorted(cell)
            for i, a in enumerate(members):
                for b in members[i + 1 :]:
                    edges.setdefault((a, b), set()).add(player)
    return _make_graph(model.states, edges)


def restrict_states(graph: InfoGraph, keep) -> InfoGraph:
    """Induced subgraph on the given set of states."""
    keep_set = set(keep)
    states = tuple(s for s in graph.states if s in keep_set)
    edges = {
        e: set(players)
        for e, players in graph.edges.items()
        if e[0] in keep_set and e[1] in keep_set
    }
    return _make_graph(states, edges)


@dataclass(frozen=True)
class Components:
    """Common-knowledge components: the connected components of the
    information graph, numbered by their lexicographically smallest state."""

    sets: tuple[frozenset[str], ...]
    index_of: Mapping[str, int]

    def of(self, state: str) -> int:
        return self.index_of[state]

    def set_of(self, state: str) -> frozenset[str]:
        return self.sets[self.index_of[state]]


def common_knowledge_components(graph: InfoGraph) -> Components:
    seen: set[str] = set()
    comps: list[frozenset[str]] = []
    for start in sorted(graph.states):
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        members = {start}
        while queue:
            v = queue.popleft()
            for w in graph.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    members.add(w)
                    queue.append(w)
        comps.append(frozenset(members))
    comps.sort(key=lambda c: sorted(c))
    index_of = {s: i for i, c in enumerate(comps) for s in c}
    return Components(tuple(comps), index_of)


@dataclass(frozen=True)
class ComponentGraph:
    """Components as vertices; an edge for every mediator cell that contains
    states from two different components.  Kept as a multigraph: every
    witnessing cell is retained because each one constrains the solution
    independently."""

    count: int
    edges: Mapping[tuple[int, int], tuple[frozenset[str], ...]]


def component_graph(
    graph: InfoGraph, components: Components, mediator
) -> ComponentGraph:
    present = set(graph.states)
    edges: dict[tuple[int, int], list[frozenset[str]]] = {}
    for cell in mediator:
        inside = sorted(c for c in cell if c in present)
        comps = sorted({components.of(s) for s in inside})
        for i, ca in enumerate(comps):
            for cb in comps[i + 1 :]:
                edges.setdefault((ca, cb), []).append(frozenset(inside))
    return ComponentGraph(
        count=len(components.sets),
        edges={e: tuple(w) for e, w in sorted(edges.items())},
    )


def restrict_players(model: Model, group) -> Model:
    """The model as seen by a subgroup of players.

    Keeps states, prior, and the mediator partition; drops the partitions of
    everyone outside the group.  Single-player groups are allowed here even
    though a top-level model requires two players.
    """
    ids = sorted(set(group))
    if not ids:
        raise EmptySubgroup("player subgroup must be non-empty")
    for pid in ids:
        if pid not in model.players:
            raise UnknownPlayer(pid)
    return Model(
        states=model.states,
        players={pid: model.players[pid] for pid in ids},
        mediator=model.mediator,
        prior=dict(model.prior),
    )
