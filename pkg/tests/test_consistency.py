import random
from fractions import Fraction as F

import pytest

from medsig.consistency import (
    CYCLE,
    LOOP,
    Certificate,
    ExtendedRatios,
    MalformedCertificate,
    NotAComponent,
    NotSameComponent,
    ReciprocityViolation,
    brute_force_check,
    check_external,
    check_internal,
    check_reciprocity,
    evaluate_certificate,
    induced_component_distribution,
    ratio_labeling,
    solve_labeling,
)
from medsig.fixtures import five_state_model, negotiation_model
from medsig.infograph import build_information_graph

from helpers import (
    labeling_from_values,
    perturbed_labeling,
    random_measurable_values,
    random_model,
)


def five_state_setup(w31=F(2)):
    """The worked five-state labeling; ratio(w3, w1) is overridable to break
    the triangle."""
    model = five_state_model()
    graph = build_information_graph(model)
    labeling = ratio_labeling(
        graph,
        {
            ("w1", "w2"): F(1, 2),
            ("w2", "w3"): F(1),
            ("w3", "w1"): w31,
            ("w4", "w5"): F(1, 2),
        },
    )
    return model, graph, labeling


def negotiation_setup(first=F(1, 2), second=F(1, 3)):
    """Ratios on the negotiation graph: first on (w1, w2), second on (w4, w3)."""
    model = negotiation_model()
    graph = build_information_graph(model)
    labeling = ratio_labeling(
        graph, {("w1", "w2"): first, ("w4", "w3"): second}
    )
    return model, graph, labeling


class TestReciprocity:
    def test_reciprocal_closure_accepted(self):
        _, graph, labeling = five_state_setup()
        check_reciprocity(graph, labeling)
        assert labeling.ratio("w2", "w1") == F(2)

    def test_all_ones_accepted(self):
        model = five_state_model()
        graph = build_information_graph(model)
        labeling = ratio_labeling(graph, {e: F(1) for e in graph.edge_list()})
        check_reciprocity(graph, labeling)

    def test_conflicting_directions_rejected(self):
        _, graph, _ = five_state_setup()
        with pytest.raises(ReciprocityViolation):
            ratio_labeling(graph, {("w1", "w2"): F(1, 2), ("w2", "w1"): F(3)})

    def test_nonpositive_rejected(self):
        _, graph, _ = five_state_setup()
        with pytest.raises(ReciprocityViolation):
            ratio_labeling(graph, {("w1", "w2"): F(-1)})


class TestInternal:
    def test_five_state_consistent(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        assert isinstance(extended, ExtendedRatios)
        # closing the triangle through the mediator cell multiplies to one
        assert (
            labeling.ratio("w1", "w2")
            * labeling.ratio("w2", "w3")
            * labeling.ratio("w3", "w1")
            == 1
        )

    def test_triangle_violation_certificate(self):
        model, graph, labeling = five_state_setup(w31=F(3))
        cert = check_internal(graph, model.mediator, labeling)
        assert isinstance(cert, Certificate) and cert.kind == CYCLE
        assert cert.product != 1
        assert evaluate_certificate(graph, model.mediator, labeling, cert) == cert.product
        # the hand-computed closed triangle evaluates to 3/2
        hand = Certificate(CYCLE, product=F(3, 2), states=("w1", "w2", "w3", "w1"))
        assert evaluate_certificate(graph, model.mediator, labeling, hand) == F(3, 2)

    def test_tree_with_free_cells_always_consistent(self):
        # path graph, no mediator cell meets one component twice
        from medsig.model import validate_model

        model = validate_model(
            ["a", "b", "c"],
            {"p1": [["a", "b"], ["c"]], "p2": [["a"], ["b", "c"]]},
            [["a"], ["b"], ["c"]],
            {s: F(1, 3) for s in ("a", "b", "c")},
        )
        graph = build_information_graph(model)
        labeling = ratio_labeling(graph, {("a", "b"): F(5), ("b", "c"): F(7, 3)})
        assert isinstance(check_internal(graph, model.mediator, labeling), ExtendedRatios)

    def test_cell_meeting_component_twice(self):
        # a--b edge inside one mediator cell forces ratio 1
        from medsig.model import validate_model

        model = validate_model(
            ["a", "b"],
            {"p1": [["a", "b"]], "p2": [["a", "b"]]},
            [["a", "b"]],
            {"a": F(1, 2), "b": F(1, 2)},
        )
        graph = build_information_graph(model)
        bad = ratio_labeling(graph, {("a", "b"): F(2)})
        cert = check_internal(graph, model.mediator, bad)
        assert isinstance(cert, Certificate) and cert.kind == CYCLE
        good = ratio_labeling(graph, {("a", "b"): F(1)})
        assert isinstance(check_internal(graph, model.mediator, good), ExtendedRatios)


class TestExtension:
    def test_extend_reciprocal(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        assert extended.ratio("w2", "w1") == F(2)

    def test_extend_self_is_one(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        assert extended.ratio("w3", "w3") == F(1)

    def test_extend_across_components_fails(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        with pytest.raises(NotSameComponent):
            extended.ratio("w1", "w5")

    def test_path_independence(self):
        # triangle: direct edge ratio equals any two-step product
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        assert extended.ratio("w2", "w3") == labeling.ratio("w2", "w1") * labeling.ratio(
            "w1", "w3"
        )
        assert extended.ratio("w2", "w3") == labeling.ratio("w2", "w3")


class TestExternal:
    def test_mismatched_ratios_loop_product(self):
        model, graph, labeling = negotiation_setup()
        extended = check_internal(graph, model.mediator, labeling)
        cert = check_external(graph, model.mediator, extended)
        assert isinstance(cert, Certificate) and cert.kind == LOOP
        assert cert.pairs == (("w1", "w2"), ("w4", "w3"))
        assert cert.product == F(1, 6)

    def test_matched_ratios_consistent(self):
        for p in (F(1, 3), F(1, 4), F(1, 2)):
            ratio = p / (1 - p)
            model, graph, labeling = negotiation_setup(first=ratio, second=1 / ratio)
            extended = check_internal(graph, model.mediator, labeling)
            assert check_external(graph, model.mediator, extended) is None

    def test_vacuous_when_cells_stay_inside_components(self):
        from medsig.model import validate_model

        model = validate_model(
            ["a", "b", "c", "d"],
            {"p1": [["a", "b"], ["c", "d"]], "p2": [["a", "b"], ["c", "d"]]},
            [["a"], ["b"], ["c"], ["d"]],
            {s: F(1, 4) for s in ("a", "b", "c", "d")},
        )
        graph = build_information_graph(model)
        labeling = ratio_labeling(graph, {("a", "b"): F(9), ("c", "d"): F(1, 7)})
        extended = check_internal(graph, model.mediator, labeling)
        assert check_external(graph, model.mediator, extended) is None


class TestSolve:
    def test_five_state_labeling_ratios(self):
        model, graph, labeling = five_state_setup()
        solved = solve_labeling(graph, model.mediator, labeling)
        target = {"w1": F(1, 5), "w2": F(2, 5), "w3": F(2, 5), "w4": F(1, 5), "w5": F(2, 5)}
        anchor = solved.values["w1"] / target["w1"]
        for s in model.states:
            assert solved.values[s] == anchor * target[s]

    def test_all_ones_constant(self):
        model = five_state_model()
        graph = build_information_graph(model)
        labeling = ratio_labeling(graph, {e: F(1) for e in graph.edge_list()})
        solved = solve_labeling(graph, model.mediator, labeling)
        assert len(set(solved.values.values())) == 1

    def test_infeasible_returns_loop(self):
        model, graph, labeling = negotiation_setup()
        cert = solve_labeling(graph, model.mediator, labeling)
        assert isinstance(cert, Certificate) and cert.kind == LOOP

    def test_round_trip_small(self):
        rng = random.Random(406)
        for _ in range(120):
            model = random_model(rng, max_states=6)
            graph = build_information_graph(model)
            values = random_measurable_values(rng, model)
            labeling = labeling_from_values(graph, values)
            solved = solve_labeling(graph, model.mediator, labeling)
            assert not isinstance(solved, Certificate)
            for a, b in graph.edge_list():
                assert solved.values[a] / solved.values[b] == values[a] / values[b]


class TestInducedDistribution:
    def test_five_state_first_component(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        dist = induced_component_distribution(extended, {"w1", "w2", "w3"})
        assert dist == {"w1": F(1, 5), "w2": F(2, 5), "w3": F(2, 5)}

    def test_second_component(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        assert induced_component_distribution(extended, {"w4", "w5"}) == {
            "w4": F(1, 3),
            "w5": F(2, 3),
        }

    def test_all_ones_uniform(self):
        model = five_state_model()
        graph = build_information_graph(model)
        labeling = ratio_labeling(graph, {e: F(1) for e in graph.edge_list()})
        extended = check_internal(graph, model.mediator, labeling)
        assert induced_component_distribution(extended, {"w1", "w2", "w3"}) == {
            "w1": F(1, 3),
            "w2": F(1, 3),
            "w3": F(1, 3),
        }

    def test_not_a_component(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        with pytest.raises(NotAComponent):
            induced_component_distribution(extended, {"w1", "w2"})

    def test_anchor_independence(self):
        model, graph, labeling = five_state_setup()
        extended = check_internal(graph, model.mediator, labeling)
        comp = sorted({"w1", "w2", "w3"})
        reference = induced_component_distribution(extended, comp)
        for anchor in comp:
            weights = {s: extended.ratio(s, anchor) for s in comp}
            total = sum(weights.values())
            assert {s: w / total for s, w in weights.items()} == reference


class TestEvaluateCertificate:
    def test_two_step_cycle_is_one(self):
        model, graph, labeling = five_state_setup()
        cert = Certificate(CYCLE, product=F(1), states=("w1", "w2", "w1"))
        assert evaluate_certificate(graph, model.mediator, labeling, cert) == 1

    def test_loop_product_recomputed(self):
        model, graph, labeling = negotiation_setup()
        cert = Certificate(LOOP, product=F(1, 6), pairs=(("w1", "w2"), ("w4", "w3")))
        assert evaluate_certificate(graph, model.mediator, labeling, cert) == F(1, 6)

    def test_stored_product_must_match(self):
        model, graph, labeling = negotiation_setup()
        wrong = Certificate(LOOP, product=F(1, 5), pairs=(("w1", "w2"), ("w4", "w3")))
        with pytest.raises(MalformedCertificate):
            evaluate_certificate(graph, model.mediator, labeling, wrong)

    def test_structural_violations_rejected(self):
        model, graph, labeling = five_state_setup()
        with pytest.raises(MalformedCertificate):
            evaluate_certificate(
                graph,
                model.mediator,
                labeling,
                Certificate(CYCLE, product=F(1), states=("w1", "w4", "w1")),
            )
        with pytest.raises(MalformedCertificate):
            evaluate_certificate(
                graph,
                model.mediator,
                labeling,
                Certificate(LOOP, product=F(1), pairs=(("w1", "w5"), ("w4", "w3"))),
            )


class TestOracleAgreement:
    def test_brute_force_matches_fast_checks(self):
        rng = random.Random(407)
        for trial in range(150):
            model = random_model(rng, max_states=6)
            graph = build_information_graph(model)
            values = random_measurable_values(rng, model)
            if trial % 2 == 0:
                labeling = labeling_from_values(graph, values)
            else:
                labeling = perturbed_labeling(rng, graph, values)
            fast = check_internal(graph, model.mediator, labeling)
            if not isinstance(fast, Certificate):
                fast = check_external(graph, model.mediator, fast)
            oracle = brute_force_check(graph, model.mediator, labeling)
            assert (fast is None) == (oracle is None)
            if isinstance(fast, Certificate):
                assert oracle is not None and oracle.kind == fast.kind
                # both certificates are self-evident
                assert evaluate_certificate(graph, model.mediator, labeling, fast) != 1
                assert evaluate_certificate(graph, model.mediator, labeling, oracle) != 1

    def test_oracle_trivial_cases(self):
        from medsig.model import validate_model

        model = validate_model(
            ["a", "b"],
            {"p1": [["a"], ["b"]], "p2": [["a"], ["b"]]},
            [["a"], ["b"]],
            {"a": F(1, 2), "b": F(1, 2)},
        )
        graph = build_information_graph(model)
        labeling = ratio_labeling(graph, {})
        assert brute_force_check(graph, model.mediator, labeling) is None
