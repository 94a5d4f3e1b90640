import random
from fractions import Fraction as F

import pytest

from medsig.fixtures import five_state_model, negotiation_model
from medsig.infograph import (
    EmptySubgroup,
    build_information_graph,
    common_knowledge_components,
    component_graph,
    restrict_players,
    restrict_states,
)
from medsig.model import validate_model

from helpers import random_model


def discrete_two_player_model():
    return validate_model(
        ["a", "b", "c"],
        {"p1": [["a"], ["b"], ["c"]], "p2": [["a"], ["b"], ["c"]]},
        [["a", "b", "c"]],
        {s: F(1, 3) for s in ("a", "b", "c")},
    )


class TestBuildGraph:
    def test_five_state_edges(self):
        graph = build_information_graph(five_state_model())
        assert dict(graph.edges) == {
            ("w1", "w2"): frozenset({"p1", "p2"}),
            ("w1", "w3"): frozenset({"p2"}),
            ("w2", "w3"): frozenset({"p2"}),
            ("w4", "w5"): frozenset({"p1"}),
        }

    def test_negotiation_edges(self):
        graph = build_information_graph(negotiation_model())
        assert dict(graph.edges) == {
            ("w1", "w2"): frozenset({"p1"}),
            ("w3", "w4"): frozenset({"p2"}),
        }

    def test_discrete_partitions_no_edges(self):
        graph = build_information_graph(discrete_two_player_model())
        assert not graph.edges

    def test_edge_symmetry(self):
        rng = random.Random(404)
        for _ in range(30):
            graph = build_information_graph(random_model(rng, max_states=6))
            for a, b in graph.edge_list():
                assert graph.has_edge(a, b) and graph.has_edge(b, a)
                assert graph.players_on(a, b) == graph.players_on(b, a)
                assert b in graph.neighbors(a) and a in graph.neighbors(b)


class TestComponents:
    def test_five_state_components(self):
        graph = build_information_graph(five_state_model())
        comps = common_knowledge_components(graph)
        assert comps.sets == (
            frozenset({"w1", "w2", "w3"}),
            frozenset({"w4", "w5"}),
        )

    def test_negotiation_components(self):
        graph = build_information_graph(negotiation_model())
        comps = common_knowledge_components(graph)
        assert comps.sets == (frozenset({"w1", "w2"}), frozenset({"w3", "w4"}))

    def test_discrete_every_state_alone(self):
        graph = build_information_graph(discrete_two_player_model())
        comps = common_knowledge_components(graph)
        assert comps.sets == (frozenset({"a"}), frozenset({"b"}), frozenset({"c"}))


class TestComponentGraph:
    def test_negotiation_single_edge_two_witnesses(self):
        model = negotiation_model()
        graph = build_information_graph(model)
        comps = common_knowledge_components(graph)
        cg = component_graph(graph, comps, model.mediator)
        assert list(cg.edges) == [(0, 1)]
        assert set(cg.edges[(0, 1)]) == {
            frozenset({"w1", "w3"}),
            frozenset({"w2", "w4"}),
        }

    def test_five_state_single_edge_two_witnesses(self):
        model = five_state_model()
        graph = build_information_graph(model)
        comps = common_knowledge_components(graph)
        cg = component_graph(graph, comps, model.mediator)
        assert list(cg.edges) == [(0, 1)]
        assert set(cg.edges[(0, 1)]) == {
            frozenset({"w1", "w4"}),
            frozenset({"w2", "w3", "w5"}),
        }

    def test_cells_inside_components_contribute_nothing(self):
        model = validate_model(
            ["a", "b", "c", "d"],
            {"p1": [["a", "b"], ["c", "d"]], "p2": [["a", "b"], ["c", "d"]]},
            [["a", "b"], ["c"], ["d"]],
            {s: F(1, 4) for s in ("a", "b", "c", "d")},
        )
        graph = build_information_graph(model)
        comps = common_knowledge_components(graph)
        cg = component_graph(graph, comps, model.mediator)
        assert not cg.edges


class TestRestrictions:
    def test_restrict_players_to_first(self):
        model = five_state_model()
        sub = restrict_players(model, ["p1"])
        comps = common_knowledge_components(build_information_graph(sub))
        assert comps.sets == (
            frozenset({"w1", "w2"}),
            frozenset({"w3"}),
            frozenset({"w4", "w5"}),
        )

    def test_restrict_players_to_second_negotiation(self):
        model = negotiation_model()
        sub = restrict_players(model, ["p2"])
        comps = common_knowledge_components(build_information_graph(sub))
        assert comps.sets == (
            frozenset({"w1"}),
            frozenset({"w2"}),
            frozenset({"w3", "w4"}),
        )

    def test_restrict_to_full_group_is_identity(self):
        model = five_state_model()
        sub = restrict_players(model, model.player_ids)
        assert build_information_graph(sub).edges == build_information_graph(model).edges

    def test_empty_subgroup_rejected(self):
        with pytest.raises(EmptySubgroup):
            restrict_players(five_state_model(), [])

    def test_restrict_states_full_and_triangle_and_empty(self):
        graph = build_information_graph(five_state_model())
        assert restrict_states(graph, graph.states).edges == graph.edges
        triangle = restrict_states(graph, {"w1", "w2", "w3"})
        assert sorted(triangle.edges) == [("w1", "w2"), ("w1", "w3"), ("w2", "w3")]
        assert not restrict_states(graph, set()).states

    def test_subgroup_components_refine_full_components(self):
        rng = random.Random(405)
        for _ in range(40):
            model = random_model(rng, max_states=6)
            graph = build_information_graph(model)
            full = common_knowledge_components(graph)
            players = list(model.player_ids)
            for size in range(1, len(players)):
                group = rng.sample(players, size)
                sub = restrict_players(model, group)
                sub_comps = common_knowledge_components(build_information_graph(sub))
                for comp in sub_comps.sets:
                    anchor = min(comp)
                    assert comp <= full.set_of(anchor)
