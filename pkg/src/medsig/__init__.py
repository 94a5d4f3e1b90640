"""medsig: exact-arithmetic tools for mediated public signaling.

Decides whether a joint profile of posterior beliefs can be induced by a
partially informed mediator's public signal, synthesizes the signaling
kernel when it can, produces a re-checkable cycle or loop certificate when
it cannot, extends to one kernel generating a whole family of posteriors,
and includes an exact potential-game detector built on the same additive
cycle-consistency idea.
"""

from .consistency import (
    Certificate,
    ExtendedRatios,
    Labeling,
    RatioLabeling,
    brute_force_check,
    check_external,
    check_internal,
    check_reciprocity,
    evaluate_certificate,
    induced_component_distribution,
    ratio_labeling,
    solve_labeling,
)
from .generator import (
    MultiSynthesis,
    PPVerdict,
    SPPVerdict,
    check_pp,
    check_spp,
    posterior_over_states,
    synthesize_multi,
)
from .implement import (
    Mismatch,
    SimulationReport,
    SupportInfo,
    Verdict,
    decide_implementable,
    positive_support,
    ratios_from_beliefs,
    subgroup_check,
    synthesize_kernel,
    verify_exact,
    verify_monte_carlo,
)
from .infograph import (
    ComponentGraph,
    Components,
    InfoGraph,
    build_information_graph,
    common_knowledge_components,
    component_graph,
    restrict_players,
    restrict_states,
)
from .model import (
    JointBelief,
    Model,
    Rational,
    SignalKernel,
    ValidationError,
    Violation,
    bayes_posterior,
    joint_posterior,
    signal_probability,
    validate_joint_belief,
    validate_kernel,
    validate_model,
)
from .potential import (
    CycleViolation,
    DeviationGraph,
    FailingEdge,
    StrategicGame,
    build_deviation_graph,
    check_additive_consistency,
    recover_potential,
    strategic_game,
    verify_potential,
)

__version__ = "0.1.0"
