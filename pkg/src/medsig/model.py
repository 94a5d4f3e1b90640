"""Core data model: states, information partitions, priors, belief profiles,
and public signal kernels.

Every probability, ratio, and payoff in this package is an exact
`fractions.Fraction`.  Verdicts depend on products being *exactly* one, so
floating point never enters a decision path.

Conventions used throughout:

* state, player, and signal identifiers are opaque strings; wherever a
  canonical order is needed (anchors, component numbering, JSON output) it is
  the lexicographic one;
* a belief distribution is a ``dict`` mapping states to positive Fractions
  (zero entries are dropped on construction);
* ``None`` marks the "no well-defined belief" entry that arises when a signal
  has zero likelihood on a player's whole information set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class UnknownState(ValueError):
    pass


class UnknownPlayer(ValueError):
    pass


class UnknownSignal(ValueError):
    pass


class SignalHasZeroProbability(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    """One named invariant failure, pointing at the offending cell or state."""

    code: str
    message: str


class ValidationError(Exception):
    """Raised when a model, belief profile, or kernel breaks an invariant.

    Carries the full list of violations so callers can report every problem
    at once instead of fixing them one by one.
    """

    def __init__(self, violations: Iterable[Violation]):
        self.violations = list(violations)
        detail = "; ".join(v.message for v in self.violations)
        super().__init__(detail or "invalid input")


def parse_rational(value) -> Fraction:
    """Parse an exact rational from a "p/q" (or "p") string or an int.

    Floats are rejected: they would silently destroy exactness.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text or "E" in text:
            raise ValueError(f"rationals must be written p/q, got {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as a lowest-terms "p/q" (or "p") string."""
    return str(Fraction(value))


def clean_distribution(dist: Mapping[str, Fraction]) -> dict[str, Fraction]:
    """Drop zero entries; keys are sorted for deterministic iteration."""
    return {s: p for s, p in sorted(dist.items()) if p != 0}


def _canonical_partition(cells) -> tuple[frozenset[str], ...]:
    return tuple(
        sorted((frozenset(c) for c in cells), key=lambda c: sorted(c))
    )


@dataclass(frozen=True)
class Model:
    """A finite state space with per-player partitions, a mediator partition,
    and a strictly positive common prior.

    ``states`` keeps the order the instance was written in (used for table
    rendering); algorithms that need a canonical order sort lexicographically.
    """

    states: tuple[str, ...]
    players: Mapping[str, tuple[frozenset[str], ...]]
    mediator: tuple[frozenset[str], ...]
    prior: Mapping[str, Fraction]

    @property
    def player_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.players))

    def cell(self, player: str, state: str) -> frozenset[str]:
        """The information set of ``player`` containing ``state``."""
        if player not in self.players:
            raise UnknownPlayer(player)
        for cell in self.players[player]:
            if state in cell:
                return cell
        raise UnknownState(state)

    def mediator_cell(self, state: str) -> frozenset[str]:
        for cell in self.mediator:
            if state in cell:
                return cell
        raise UnknownState(state)


def validate_model(states, players, mediator, prior) -> Model:
    """Build a :class:`Model`, verifying every structural invariant.

    Raises :class:`ValidationError` listing all violations: overlapping or
    incomplete partition cells, non-positive or non-normalized priors, and
    fewer than two players.
    """
    violations: list[Violation] = []
    state_list = tuple(states)
    state_set = set(state_list)
    if not state_list:
        violations.append(Violation("EmptyStateSpace", "state space is empty"))
    if len(state_set) != len(state_list):
        violations.append(Violation("DuplicateState", "duplicate state identifiers"))
    if len(players) < 2:
        violations.append(
            Violation("FewerThanTwoPlayers", f"need at least 2 players, got {len(players)}")
        )

    def check_partition(owner: str, cells) -> None:
        seen: set[str] = set()
        for cell in cells:
            if not cell:
                violations.append(Violation("EmptyCell", f"{owner}: empty cell"))
            for s in cell:
                if s not in state_set:
                    violations.append(
                        Violation("UnknownState", f"{owner}: cell state {s!r} not in the state space")
                    )
                elif s in seen:
                    violations.append(
                        Violation("OverlappingCells", f"{owner}: state {s!r} appears in two cells")
                    )
                seen.add(s)
        for s in state_list:
            if s not in seen:
                violations.append(
                    Violation("UncoveredState", f"{owner}: state {s!r} not covered by any cell")
                )

    player_partitions = {}
    for pid in sorted(players):
        cells = _canonical_partition(players[pid])
        check_partition(f"player {pid}", cells)
        player_partitions[pid] = cells
    mediator_cells = _canonical_partition(mediator)
    check_partition("mediator", mediator_cells)

    prior_map: dict[str, Fraction] = {}
    for s, p in prior.items():
        if s not in state_set:
            violations.append(Violation("UnknownState", f"prior: unknown state {s!r}"))
            continue
        prior_map[s] = Fraction(p)
    for s in state_list:
        p = prior_map.get(s, ZERO)
        if p <= 0:
            violations.append(
                Violation("ZeroOrNegativePrior", f"prior of {s!r} is {format_rational(p)}, must be positive")
            )
        prior_map.setdefault(s, p)
    total = sum(prior_map.get(s, ZERO) for s in state_list)
    if state_list and total != 1:
        violations.append(
            Violation("PriorNotNormalized", f"prior sums to {format_rational(total)}, not 1")
        )

    if violations:
        raise ValidationError(violations)
    return Model(
        states=state_list,
        players=player_partitions,
        mediator=mediator_cells,
        prior={s: prior_map[s] for s in state_list},
    )


@dataclass(frozen=True)
class JointBelief:
    """A full profile of beliefs: one entry per (state, player).

    An entry is either a distribution over the player's information set or
    ``None``, the marker for "the conditioning event has zero likelihood".
    """

    states: tuple[str, ...]
    players: tuple[str, ...]
    entries: Mapping[str, Mapping[str, Optional[Mapping[str, Fraction]]]]

    def belief(self, state: str, player: str) -> Optional[Mapping[str, Fraction]]:
        try:
            return self.entries[state][player]
        except KeyError as exc:
            raise UnknownState(f"({state}, {player})") from exc

    def self_prob(self, state: str, player: str) -> Fraction:
        """Probability the entry at (state, player) assigns to its own state."""
        dist = self.belief(state, player)
        if dist is None:
            return ZERO
        return dist.get(state, ZERO)


def validate_joint_belief(model: Model, entries) -> JointBelief:
    """Verify a raw belief profile against all the structural conditions.

    Checks, per entry: support inside the player's information set and exact
    normalization.  Per player: all states of one information set carry the
    same entry (a belief can only depend on what the player observes).
    Across players: (i) if one player puts positive weight on the realized
    state, all do; (ii) for two states that a pair of players both cannot
    distinguish, both players agree on the ratio of their probabilities.
    """
    violations: list[Violation] = []
    players = model.player_ids
    cleaned: dict[str, dict[str, Optional[dict[str, Fraction]]]] = {}

    for state in model.states:
        row = entries.get(state)
        if row is None:
            violations.append(Violation("MissingEntry", f"no entries for state {state!r}"))
            continue
        cleaned[state] = {}
        for player in players:
            if player not in row:
                violations.append(
                    Violation("MissingEntry", f"no entry for ({state!r}, {player!r})")
                )
                continue
            dist = row[player]
            if dist is None:
                cleaned[state][player] = None
                continue
            cell = model.cell(player, state)
            bad = False
            total = ZERO
            for s, p in dist.items():
                if s not in model.prior:
                    violations.append(
                        Violation("UnknownState", f"({state!r}, {player!r}): unknown state {s!r}")
                    )
                    bad = True
                    continue
                if p < 0:
                    violations.append(
                        Violation(
                            "NotNormalized",
                            f"({state!r}, {player!r}): negative probability on {s!r}",
                        )
                    )
                    bad = True
                if p > 0 and s not in cell:
                    violations.append(
                        Violation(
                            "SupportOutsideCell",
                            f"({state!r}, {player!r}): positive weight on {s!r} outside the information set",
                        )
                    )
                    bad = True
                total += p
            if total != 1:
                violations.append(
                    Violation(
                        "NotNormalized",
                        f"({state!r}, {player!r}): probabilities sum to {format_rational(total)}",
                    )
                )
                bad = True
            cleaned[state][player] = None if bad else clean_distribution(dist)

    if violations:
        raise ValidationError(violations)

    # One entry per observed information set.
    for player in players:
        for cell in model.players[player]:
            members = sorted(cell)
            first = cleaned[members[0]][player]
            for s in members[1:]:
                if cleaned[s][player] != first:
                    violations.append(
                        Violation(
                            "CellInconsistent",
                            f"player {player!r}: entries differ across {members[0]!r} and {s!r} "
                            "although both lie in the same information set",
                        )
                    )

    jb = JointBelief(model.states, players, cleaned)

    # Condition (i): positive weight on the realized state is player-independent.
    for state in model.states:
        positives = [p for p in players if jb.self_prob(state, p) > 0]
        if positives and len(positives) < len(players):
            zeros = [p for p in players if p not in positives]
            violations.append(
                Violation(
                    "ConditionIViolated",
                    f"state {state!r}: player {positives[0]!r} puts positive weight on it "
                    f"but player {zeros[0]!r} does not",
                )
            )

    # Condition (ii): ratio agreement on states shared by two players'
    # information sets.  After condition (i) the denominators are positive for
    # both players or neither; a one-sided zero is reported as an asymmetry.
    for ia, pa in enumerate(players):
        for pb in players[ia + 1 :]:
            for state in model.states:
                shared = model.cell(pa, state) & model.cell(pb, state)
                for other in sorted(shared):
                    if other <= state:
                        continue
                    da, db = jb.self_prob(other, pa), jb.self_prob(other, pb)
                    na, nb = jb.self_prob(state, pa), jb.self_prob(state, pb)
                    if (da == 0) != (db == 0):
                        violations.append(
                            Violation(
                                "ConditionIIViolated",
                                f"states ({state!r}, {other!r}): ratio defined for only one of "
                                f"players {pa!r}, {pb!r} (one-sided zero)",
                            )
                        )
                        continue
                    if da == 0:
                        continue
                    if na * db != nb * da:
                        violations.append(
                            Violation(
                                "ConditionIIViolated",
                                f"states ({state!r}, {other!r}): players {pa!r} and {pb!r} "
                                f"disagree on the probability ratio "
                                f"({format_rational(na)}:{format_rational(da)} vs "
                                f"{format_rational(nb)}:{format_rational(db)})",
                            )
                        )

    if violations:
        raise ValidationError(violations)
    return jb


@dataclass(frozen=True)
class SignalKernel:
    """A public signaling rule: for every state, a distribution over signals,
    constant on each mediator cell."""

    signals: tuple[str, ...]
    table: Mapping[str, Mapping[str, Fraction]]

    def prob(self, signal: str, state: str) -> Fraction:
        if signal not in self.table:
            raise UnknownSignal(signal)
        row = self.table[signal]
        if state not in row:
            raise UnknownState(state)
        return row[state]


def validate_kernel(model: Model, signals, table) -> SignalKernel:
    """Verify that a raw signal table is a mediator-measurable stochastic kernel."""
    violations: list[Violation] = []
    sig_list = tuple(signals)
    if len(set(sig_list)) != len(sig_list) or not sig_list:
        violations.append(Violation("BadSignalAlphabet", "signal names must be unique and non-empty"))
    full: dict[str, dict[str, Fraction]] = {sig: {} for sig in sig_list}
    for sig in table:
        if sig not in full:
            violations.append(Violation("UnknownSignal", f"kernel row for unknown signal {sig!r}"))
            continue
        for state, p in table[sig].items():
            if state not in model.prior:
                violations.append(Violation("UnknownState", f"kernel entry for unknown state {state!r}"))
                continue
            full[sig][state] = Fraction(p)
    for sig in sig_list:
        for state in model.states:
            full[sig].setdefault(state, ZERO)
            if full[sig][state] < 0:
                violations.append(
                    Violation("NegativeKernelEntry", f"kernel({sig!r}|{state!r}) is negative")
                )
    for state in model.states:
        total = sum(full[sig][state] for sig in sig_list)
        if total != 1:
            violations.append(
                Violation(
                    "KernelNotNormalized",
                    f"signal probabilities at {state!r} sum to {format_rational(total)}",
                )
            )
    for cell in model.mediator:
        members = sorted(cell)
        base = members[0]
        for state in members[1:]:
            for sig in sig_list:
                if full[sig][state] != full[sig][base]:
                    violations.append(
                        Violation(
                            "NotMediatorMeasurable",
                            f"kernel({sig!r}|·) differs across {base!r} and {state!r}, "
                            "which the mediator cannot distinguish",
                        )
                    )
    if violations:
        raise ValidationError(violations)
    return SignalKernel(sig_list, {sig: dict(full[sig]) for sig in sig_list})


def signal_probability(model: Model, kernel: SignalKernel, signal: str) -> Fraction:
    """Prior probability that ``signal`` is emitted."""
    return sum(model.prior[s] * kernel.prob(signal, s) for s in model.states)


def bayes_posterior(
    model: Model, kernel: SignalKernel, signal: str, state: str, player: str
) -> Optional[dict[str, Fraction]]:
    """The player's posterior over their information set after seeing ``signal``.

    Returns ``None`` when the signal has zero likelihood on the whole
    information set, in which case conditioning is undefined.
    """
    cell = model.cell(player, state)
    weights = {s: model.prior[s] * kernel.prob(signal, s) for s in sorted(cell)}
    total = sum(weights.values())
    if total == 0:
        return None
    return clean_distribution({s: w / total for s, w in weights.items()})


def joint_posterior(model: Model, kernel: SignalKernel, signal: str) -> JointBelief:
    """Assemble the belief profile induced by observing ``signal``.

    Entries where the signal is impossible on the player's whole information
    set become ``None``.  The result always satisfies the joint-belief
    conditions, because it is produced by Bayes' rule from a common prior.
    """
    if signal_probability(model, kernel, signal) == 0:
        raise SignalHasZeroProbability(signal)
    players = model.player_ids
    entries: dict[str, dict[str, Optional[dict[str, Fraction]]]] = {}
    cache: dict[tuple[str, frozenset[str]], Optional[dict[str, Fraction]]] = {}
    for state in model.states:
        entries[state] = {}
        for player in players:
            cell = model.cell(player, state)
            key = (player, cell)
            if key not in cache:
                cache[key] = bayes_posterior(model, kernel, signal, state, player)
            entries[state][player] = cache[key]
    return JointBelief(model.states, players, entries)
