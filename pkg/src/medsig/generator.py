"""Multi-signal synthesis: when can one kernel generate a whole family of
posteriors over the state space?

The decisions reduce to exact linear programming: the family preserves
positivity w.r.t. the prior iff the prior is a convex combination of the
members, and strictly preserves positivity iff some combination uses every
member with positive weight.  A small dense simplex over Fractions (Bland's
rule, two phases) answers both questions; infeasibility and forced-zero
weights are converted into separating options that certify the failure by
direct evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Optional, Sequence

from .implement import Verdict, decide_implementable
from .model import (
    JointBelief,
    Model,
    ONE,
    SignalHasZeroProbability,
    SignalKernel,
    ZERO,
    signal_probability,
    validate_kernel,
)


def posterior_over_states(
    model: Model, kernel: SignalKernel, signal: str
) -> dict[str, Fraction]:
    """The outside-observer posterior over all states given a signal.

    Returned as a full vector (zeros included) so it can enter the convex
    feasibility problems directly.
    """
    total = signal_probability(model, kernel, signal)
    if total == 0:
        raise SignalHasZeroProbability(signal)
    return {
        s: model.prior[s] * kernel.prob(signal, s) / total for s in model.states
    }


# ---------------------------------------------------------------------------
# Exact simplex
# ---------------------------------------------------------------------------


class _Infeasible(Exception):
    def __init__(self, duals):
        self.duals = duals


class _Tableau:
    """Dense simplex tableau over Fractions with Bland's rule.

    Columns 0..n-1 are the structural variables, n..n+m-1 the artificials.
    The objective row stores reduced costs; duals are read off the artificial
    columns.  Problem sizes here are tiny (members x states), so clarity
    beats sparsity.
    """

    def __init__(self, columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
        self.n = len(columns)
        self.m = len(rhs)
        assert all(v >= 0 for v in rhs), "right-hand side must be nonnegative"
        self.rows = [
            [columns[j][i] for j in range(self.n)]
            + [ONE if k == i else ZERO for k in range(self.m)]
            + [rhs[i]]
            for i in range(self.m)
        ]
        self.basis = [self.n + i for i in range(self.m)]
        self.active = list(range(self.m))  # original constraint index per row
        self.obj: list[Fraction] = []

    def _pivot(self, row: int, col: int) -> None:
        pivot = self.rows[row][col]
        self.rows[row] = [v / pivot for v in self.rows[row]]
        for r in range(len(self.rows)):
            if r != row and self.rows[r][col] != 0:
                factor = self.rows[r][col]
                self.rows[r] = [
                    v - factor * w for v, w in zip(self.rows[r], self.rows[row])
                ]
        if self.obj and self.obj[col] != 0:
            factor = self.obj[col]
            self.obj = [v - factor * w for v, w in zip(self.obj, self.rows[row])]
        self.basis[row] = col

    def _bland(self, allowed) -> bool:
        """One simplex step; returns False at optimality."""
        enter = next((j for j in allowed if self.obj[j] < 0), None)
        if enter is None:
            return False
        best: Optional[tuple[Fraction, int, int]] = None
        for r, row in enumerate(self.rows):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                key = (ratio, self.basis[r], r)
                if best is None or key < best:
                    best = key
        if best is None:
            raise ArithmeticError("unbounded objective on a bounded polytope")
        self._pivot(best[2], enter)
        return True

    def _set_objective(self, costs: Sequence[Fraction]) -> None:
        """Reduced costs for minimizing ``costs`` (length n + m)."""
        obj = list(costs) + [ZERO]
        for r, var in enumerate(self.basis):
            if costs[var] != 0:
                c = costs[var]
                obj = [v - c * w for v, w in zip(obj, self.rows[r])]
        self.obj = obj

    def phase1(self) -> None:
        """Minimize the artificial total; raises :class:`_Infeasible` with the
        separating duals when it cannot reach zero."""
        costs = [ZERO] * self.n + [ONE] * self.m
        self._set_objective(costs)
        allowed = list(range(self.n + self.m))
        while self._bland(allowed):
            pass
        value = -self.obj[-1]
        if value != 0:
            duals = [ONE - self.obj[self.n + i] for i in range(self.m)]
            raise _Infeasible(duals)
        self._drive_out_artificials()

    def _drive_out_artificials(self) -> None:
        for r in range(len(self.rows) - 1, -1, -1):
            if self.basis[r] < self.n:
                continue
            col = next(
                (j for j in range(self.n) if self.rows[r][j] != 0),
                None,
            )
            if col is not None:
                self._pivot(r, col)
            else:
                # Constraint is implied by the others; drop the row.
                del self.rows[r]
                del self.basis[r]
                del self.active[r]

    def solution(self) -> list[Fraction]:
        q = [ZERO] * self.n
        for r, var in enumerate(self.basis):
            if var < self.n:
                q[var] = self.rows[r][-1]
        return q

    def maximize(self, j: int) -> tuple[Fraction, list[Fraction], list[Fraction]]:
        """Maximize variable ``j`` over the feasible region (run after
        :meth:`phase1`).  Returns (optimum, solution, duals), the duals
        indexed by original constraint with zeros for dropped redundant rows.
        """
        costs = [ZERO] * (self.n + self.m)
        costs[j] = -ONE
        self._set_objective(costs)
        allowed = list(range(self.n))  # artificials must not re-enter
        while self._bland(allowed):
            pass
        value = self.obj[-1]  # obj[-1] = -(objective) = -(-q_j) = q_j
        duals = [ZERO] * self.m
        for orig in self.active:
            duals[orig] = -self.obj[self.n + orig]
        return value, self.solution(), duals


def _feasible_combination(
    columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
):
    """Solve ``sum_j q_j column_j = rhs, q >= 0`` exactly.

    Returns ``(weights, None)`` when feasible, else ``(None, duals)`` with
    duals y satisfying y.column_j <= 0 for all j and y.rhs > 0.
    """
    tableau = _Tableau(columns, rhs)
    try:
        tableau.phase1()
    except _Infeasible as exc:
        return None, exc.duals
    return tableau.solution(), None


def _integerize(values: Sequence[Fraction]) -> list[Fraction]:
    """Clear denominators and divide by the common factor; keeps signs."""
    mult = lcm(*(v.denominator for v in values)) if values else 1
    ints = [int(v * mult) for v in values]
    common = 0
    for v in ints:
        common = gcd(common, abs(v))
    if common > 1:
        ints = [v // common for v in ints]
    return [Fraction(v) for v in ints]


@dataclass(frozen=True)
class PPVerdict:
    """Positivity preservation: either convex weights expressing the prior in
    terms of the members, or an option with nonnegative expectation under
    every member and negative expectation under the prior."""

    holds: bool
    weights: Optional[tuple[Fraction, ...]] = None
    option: Optional[Mapping[str, Fraction]] = None


@dataclass(frozen=True)
class SPPVerdict:
    """Strict positivity preservation: either all-positive convex weights, or
    an option that is prior-neutral, weakly favorable under every member, and
    strictly favorable under the member whose weight is forced to zero
    (``member_index``; None when plain preservation already fails)."""

    holds: bool
    weights: Optional[tuple[Fraction, ...]] = None
    option: Optional[Mapping[str, Fraction]] = None
    member_index: Optional[int] = None


def _expectation(option, dist) -> Fraction:
    return sum(option[s] * p for s, p in dist.items())


def check_pp(
    states: Sequence[str],
    prior: Mapping[str, Fraction],
    members: Sequence[Mapping[str, Fraction]],
) -> PPVerdict:
    """Decide whether the family preserves positivity w.r.t. the prior."""
    order = list(states)
    columns = [[m.get(s, ZERO) for s in order] for m in members]
    rhs = [prior[s] for s in order]
    weights, duals = _feasible_combination(columns, rhs)
    if weights is not None:
        verdict = PPVerdict(True, weights=tuple(weights))
        assert _combination_matches(order, prior, members, verdict.weights)
        return verdict
    option_values = _integerize([-y for y in duals])
    option = dict(zip(order, option_values))
    assert _expectation(option, prior) < 0
    assert all(_expectation(option, m) >= 0 for m in members)
    return PPVerdict(False, option=option)


def check_spp(
    states: Sequence[str],
    prior: Mapping[str, Fraction],
    members: Sequence[Mapping[str, Fraction]],
) -> SPPVerdict:
    """Decide strict positivity preservation.

    For each member the maximal feasible weight is computed exactly; strict
    preservation holds iff all maxima are positive, in which case averaging
    the per-member maximizers yields an all-positive combination.
    """
    order = list(states)
    columns = [[m.get(s, ZERO) for s in order] for m in members]
    rhs = [prior[s] for s in order]

    pp = check_pp(states, prior, members)
    if not pp.holds:
        # Shift the separating option to prior-mean zero; it then strictly
        # favors every member.
        shift = _expectation(pp.option, prior)
        shifted = _integerize([pp.option[s] - shift for s in order])
        option = dict(zip(order, shifted))
        assert _expectation(option, prior) == 0
        assert all(_expectation(option, m) > 0 for m in members)
        return SPPVerdict(False, option=option, member_index=None)

    solutions = []
    for j in range(len(members)):
        tableau = _Tableau(columns, rhs)
        tableau.phase1()
        value, solution, duals = tableau.maximize(j)
        if value == 0:
            option_values = _integerize([-y for y in duals])
            option = dict(zip(order, option_values))
            assert _expectation(option, prior) == 0
            assert all(_expectation(option, m) >= 0 for m in members)
            assert _expectation(option, members[j]) > 0
            return SPPVerdict(False, option=option, member_index=j)
        solutions.append(solution)

    n = len(members)
    weights = tuple(sum(sol[i] for sol in solutions) / n for i in range(n))
    assert all(w > 0 for w in weights)
    assert _combination_matches(order, prior, members, weights)
    return SPPVerdict(True, weights=weights)


def _combination_matches(order, prior, members, weights) -> bool:
    if sum(weights) != 1:
        return False
    for s in order:
        if sum(w * m.get(s, ZERO) for w, m in zip(weights, members)) != prior[s]:
            return False
    return True


# ---------------------------------------------------------------------------
# Multi-signal synthesis
# ---------------------------------------------------------------------------

MEMBER_REJECTED = "member-rejected"
NOT_PP = "not-pp"
NOT_SPP = "not-spp"


@dataclass(frozen=True)
class MultiSynthesis:
    ok: bool
    semantics: str
    kernel: Optional[SignalKernel] = None
    signals: tuple[str, ...] = ()
    weights: tuple[Fraction, ...] = ()
    posteriors: tuple[Mapping[str, Fraction], ...] = ()
    merged_members: tuple[tuple[int, ...], ...] = ()
    dropped: tuple[int, ...] = ()
    reason: Optional[str] = None
    option: Optional[Mapping[str, Fraction]] = None
    member_index: Optional[int] = None
    member_verdict: Optional[Verdict] = None


def synthesize_multi(
    model: Model, beliefs: Sequence[JointBelief], semantics: str = "spp"
) -> MultiSynthesis:
    """Build one kernel whose signals generate all the posteriors the given
    belief profiles induce.

    Each profile must be implementable on its own; its canonical kernel then
    fixes a posterior over the states.  Duplicate posteriors are merged
    before the feasibility check.  Under ``spp`` semantics the returned
    kernel emits every posterior with positive probability; under ``pp``
    semantics members forced to weight zero are dropped and flagged.
    """
    if semantics not in ("pp", "spp"):
        raise ValueError(f"semantics must be 'pp' or 'spp', got {semantics!r}")
    posteriors: list[dict[str, Fraction]] = []
    for i, jb in enumerate(beliefs):
        verdict = decide_implementable(model, jb)
        if not verdict.implementable:
            return MultiSynthesis(
                False,
                semantics,
                reason=MEMBER_REJECTED,
                member_index=i,
                member_verdict=verdict,
            )
        posteriors.append(posterior_over_states(model, verdict.kernel, verdict.signal))

    reps: list[dict[str, Fraction]] = []
    merged: list[list[int]] = []
    for i, post in enumerate(posteriors):
        for k, rep in enumerate(reps):
            if rep == post:
                merged[k].append(i)
                break
        else:
            reps.append(post)
            merged.append([i])

    if semantics == "spp":
        spp = check_spp(model.states, model.prior, reps)
        if not spp.holds:
            return MultiSynthesis(
                False,
                semantics,
                reason=NOT_SPP,
                option=spp.option,
                member_index=spp.member_index,
            )
        weights = spp.weights
    else:
        pp = check_pp(model.states, model.prior, reps)
        if not pp.holds:
            return MultiSynthesis(False, semantics, reason=NOT_PP, option=pp.option)
        weights = pp.weights

    kept = [k for k, w in enumerate(weights) if w > 0]
    dropped = tuple(k for k, w in enumerate(weights) if w == 0)
    signals = tuple(f"s{i + 1}" for i in range(len(kept)))
    table = {
        sig: {
            s: weights[k] * reps[k][s] / model.prior[s] for s in model.states
        }
        for sig, k in zip(signals, kept)
    }
    kernel = validate_kernel(model, signals, table)
    for sig, k in zip(signals, kept):
        assert posterior_over_states(model, kernel, sig) == reps[k]
    return MultiSynthesis(
        True,
        semantics,
        kernel=kernel,
        signals=signals,
        weights=tuple(weights[k] for k in kept),
        posteriors=tuple(reps[k] for k in kept),
        merged_members=tuple(tuple(merged[k]) for k in kept),
        dropped=dropped,
    )
