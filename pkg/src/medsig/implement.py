"""End-to-end implementability: from a joint belief to a signaling kernel.

The pipeline: collect the states whose own probability is positive, check
that this set is a union of mediator cells, derive the prior-corrected ratio
labeling on the surviving subgraph, solve for a mediator-measurable state
labeling, and scale it into a two-signal kernel.  Each stage's failure is
reported with its own reason so rejections are explainable and re-checkable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .consistency import (
    Certificate,
    Labeling,
    RatioLabeling,
    ratio_labeling,
    solve_labeling,
)
from .infograph import InfoGraph, build_information_graph, restrict_players, restrict_states
from .model import (
    JointBelief,
    Model,
    SignalKernel,
    ZERO,
    clean_distribution,
    joint_posterior,
    validate_kernel,
)

SIGNAL = "s"
COMPLEMENT_SIGNAL = "s0"

SUPPORT_NOT_MEASURABLE = "support-not-measurable"
EMPTY_SUPPORT = "empty-support"
RATIO_CONFLICT = "ratio-conflict"
OFF_SUPPORT_INCOHERENT = "off-support-incoherent"
CERTIFICATE = "certificate"


class RatioConflictAcrossPlayers(ValueError):
    """Two players disagree on the ratio a shared edge must carry."""

    def __init__(self, edge, values):
        self.edge = edge
        self.values = dict(values)
        super().__init__(
            f"edge {edge}: players disagree on the likelihood ratio: "
            + ", ".join(f"{p}={v}" for p, v in sorted(values.items()))
        )


@dataclass(frozen=True)
class SupportInfo:
    """States that keep positive own-probability, plus whether that set is a
    union of mediator cells (witness cell given when it is not)."""

    states: frozenset[str]
    measurable: bool
    witness_cell: Optional[frozenset[str]] = None


@dataclass(frozen=True)
class Verdict:
    implementable: bool
    labeling: Optional[Labeling] = None
    kernel: Optional[SignalKernel] = None
    signal: Optional[str] = None
    reason: Optional[str] = None
    certificate: Optional[Certificate] = None
    witness_cell: Optional[frozenset[str]] = None
    edge: Optional[tuple[str, str]] = None
    edge_values: Optional[Mapping[str, Fraction]] = None
    detail: Optional[str] = None


@dataclass(frozen=True)
class Mismatch:
    state: str
    player: str
    expected: Optional[Mapping[str, Fraction]]
    got: Optional[Mapping[str, Fraction]]


def positive_support(model: Model, jb: JointBelief) -> SupportInfo:
    """States with positive own-probability for some (equivalently, every)
    player, and whether the mediator can tell them apart from the rest."""
    support = frozenset(
        s for s in model.states if any(jb.self_prob(s, p) > 0 for p in model.player_ids)
    )
    for cell in model.mediator:
        inside = cell & support
        if inside and inside != cell:
            return SupportInfo(support, False, cell)
    return SupportInfo(support, True)


def ratios_from_beliefs(
    model: Model, jb: JointBelief, support: frozenset[str]
) -> RatioLabeling:
    """The prior-corrected ratio labeling a joint belief pins on each edge of
    the surviving subgraph.

    For an edge (a, b) and a player who cannot tell a and b apart, the ratio
    is belief(a)/belief(b) times prior(b)/prior(a); every such player must
    give the identical value, or :class:`RatioConflictAcrossPlayers` is
    raised.
    """
    graph = restrict_states(build_information_graph(model), support)
    table: dict[tuple[str, str], Fraction] = {}
    for a, b in graph.edge_list():
        values: dict[str, Fraction] = {}
        for player in sorted(graph.players_on(a, b)):
            pa = jb.self_prob(a, player)
            pb = jb.self_prob(b, player)
            if pa == 0 or pb == 0:
                continue
            values[player] = (pa / pb) * (model.prior[b] / model.prior[a])
        if not values:
            # Both endpoints lie in the support, so their own-probabilities
            # are positive for every player sharing the edge.
            raise RatioConflictAcrossPlayers((a, b), {})
        if len(set(values.values())) > 1:
            raise RatioConflictAcrossPlayers((a, b), values)
        table[(a, b)] = next(iter(values.values()))
    return ratio_labeling(graph, table)


def _off_support_problem(
    model: Model, jb: JointBelief, support: frozenset[str]
) -> Optional[str]:
    """Zero-likelihood conditioning forces the entries outside the support:
    a state whose information set still has surviving members must carry the
    cell's common entry; a state whose whole set died must carry the
    no-belief marker."""
    for state in model.states:
        if state in support:
            continue
        for player in model.player_ids:
            cell = model.cell(player, state)
            alive = sorted(cell & support)
            entry = jb.belief(state, player)
            if alive:
                if entry != jb.belief(alive[0], player):
                    return (
                        f"({state!r}, {player!r}) must carry the same belief as the "
                        f"surviving states of its information set"
                    )
            elif entry is not None:
                return (
                    f"({state!r}, {player!r}) conditions on a zero-probability event "
                    "and must carry the no-belief marker"
                )
    return None


def synthesize_kernel(
    model: Model,
    labeling: Labeling,
    support: frozenset[str],
    scale: Optional[Fraction] = None,
) -> tuple[SignalKernel, str]:
    """Turn a solved labeling into a two-signal kernel.

    The designated signal gets probability ``scale * labeling(state)`` on the
    support and 0 elsewhere; the complementary signal absorbs the rest.  The
    default scale puts the largest probability at 1/2; any scale in
    (0, 1/max] produces the same posteriors, since only ratios matter.
    """
    peak = max(labeling.values[s] for s in support)
    if scale is None:
        scale = Fraction(1, 2) / peak
    if not 0 < scale <= 1 / peak:
        raise ValueError(f"scale must lie in (0, {1 / peak}], got {scale}")
    row = {s: scale * labeling.values[s] if s in support else ZERO for s in model.states}
    table = {
        SIGNAL: row,
        COMPLEMENT_SIGNAL: {s: 1 - p for s, p in row.items()},
    }
    return validate_kernel(model, (SIGNAL, COMPLEMENT_SIGNAL), table), SIGNAL


def decide_implementable(model: Model, jb: JointBelief) -> Verdict:
    """Decide whether some mediator-measurable signal induces ``jb``, and
    synthesize one when it does."""
    info = positive_support(model, jb)
    if not info.measurable:
        return Verdict(
            False,
            reason=SUPPORT_NOT_MEASURABLE,
            witness_cell=info.witness_cell,
            detail="the mediator cannot separate the surviving states from the rest",
        )
    if not info.states:
        return Verdict(
            False,
            reason=EMPTY_SUPPORT,
            detail="no state keeps positive own-probability, so no signal can induce this profile",
        )
    problem = _off_support_problem(model, jb, info.states)
    if problem is not None:
        return Verdict(False, reason=OFF_SUPPORT_INCOHERENT, detail=problem)
    try:
        ratios = ratios_from_beliefs(model, jb, info.states)
    except RatioConflictAcrossPlayers as exc:
        return Verdict(False, reason=RATIO_CONFLICT, edge=exc.edge, edge_values=exc.values)

    graph = restrict_states(build_information_graph(model), info.states)
    solved = solve_labeling(graph, model.mediator, ratios)
    if isinstance(solved, Certificate):
        return Verdict(False, reason=CERTIFICATE, certificate=solved)

    kernel, signal = synthesize_kernel(model, solved, info.states)
    mismatches = verify_exact(model, kernel, signal, jb)
    assert not mismatches, f"synthesized kernel failed verification: {mismatches[0]}"
    return Verdict(True, labeling=solved, kernel=kernel, signal=signal)


def verify_exact(
    model: Model, kernel: SignalKernel, signal: str, jb: JointBelief
) -> list[Mismatch]:
    """Recompute the induced belief profile and compare entry by entry,
    exactly, including the placement of no-belief markers."""
    induced = joint_posterior(model, kernel, signal)
    mismatches = []
    for state in model.states:
        for player in model.player_ids:
            expected = jb.belief(state, player)
            if expected is not None:
                expected = clean_distribution(expected)
            got = induced.belief(state, player)
            if expected != got:
                mismatches.append(Mismatch(state, player, expected, got))
    return mismatches


@dataclass(frozen=True)
class CellReport:
    player: str
    cell: tuple[str, ...]
    hits: int
    max_deviation: float
    tolerance: float
    low_confidence: bool
    failed: bool


@dataclass(frozen=True)
class SimulationReport:
    samples: int
    seed: int
    signal: str
    signal_hits: int
    cells: tuple[CellReport, ...] = ()
    failures: tuple[CellReport, ...] = ()

    @property
    def max_deviation(self) -> float:
        return max((c.max_deviation for c in self.cells), default=0.0)

    @property
    def low_confidence(self) -> bool:
        return any(c.low_confidence for c in self.cells)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_monte_carlo(
    model: Model,
    kernel: SignalKernel,
    signal: str,
    jb: JointBelief,
    samples: int,
    seed: int,
    min_cell_hits: int = 30,
) -> SimulationReport:
    """Empirical check of the induced beliefs: draw states from the prior and
    signals from the kernel, then compare conditional frequencies with the
    profile.

    Per compared entry the tolerance is ``max(0.01, 4 * standard error)``.
    Cells observed fewer than ``min_cell_hits`` times are marked low
    confidence and never counted as failures.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    states = list(model.states)
    prior_weights = [float(model.prior[s]) for s in states]
    signal_names = list(kernel.signals)
    per_state = {
        s: [float(kernel.prob(sig, s)) for sig in signal_names] for s in states
    }

    counts: dict[str, int] = {s: 0 for s in states}
    for _ in range(samples):
        state = rng.choices(states, weights=prior_weights)[0]
        emitted = rng.choices(signal_names, weights=per_state[state])[0]
        if emitted == signal:
            counts[state] += 1
    signal_hits = sum(counts.values())

    reports = []
    for player in model.player_ids:
        for cell in model.players[player]:
            members = sorted(cell)
            hits = sum(counts[s] for s in members)
            expected = jb.belief(members[0], player)
            if hits == 0:
                continue
            if expected is None:
                # The profile says this event cannot coincide with the signal.
                reports.append(
                    CellReport(player, tuple(members), hits, 1.0, 0.0, False, True)
                )
                continue
            max_dev = 0.0
            tolerance = 0.01
            for s in members:
                p = float(expected.get(s, ZERO))
                dev = abs(counts[s] / hits - p)
                if dev > max_dev:
                    max_dev = dev
                se = (p * (1 - p) / hits) ** 0.5
                tolerance = max(tolerance, 4 * se)
            low = hits < min_cell_hits
            failed = (not low) and max_dev > tolerance
            reports.append(
                CellReport(player, tuple(members), hits, max_dev, tolerance, low, failed)
            )
    failures = tuple(r for r in reports if r.failed)
    return SimulationReport(samples, seed, signal, signal_hits, tuple(reports), failures)


def subgroup_check(model: Model, group, jb: JointBelief) -> Verdict:
    """Run the implementability decision for a subgroup of players, keeping
    the same beliefs on the edges that survive the restriction."""
    sub = restrict_players(model, group)
    entries = {
        state: {player: jb.belief(state, player) for player in sub.player_ids}
        for state in model.states
    }
    sub_jb = JointBelief(model.states, sub.player_ids, entries)
    return decide_implementable(sub, sub_jb)
