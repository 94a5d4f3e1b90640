"""Shared test machinery: seeded random instance generators and independent
brute-force oracles (exact linear algebra, vertex enumeration, four-cycle
payoff checks)."""

from __future__ import annotations

from fractions import Fraction as F

from medsig.consistency import RatioLabeling, ratio_labeling
from medsig.infograph import build_information_graph
from medsig.model import validate_kernel, validate_model
from medsig.potential import StrategicGame, strategic_game


def random_partition(rng, states):
    order = list(states)
    rng.shuffle(order)
    cells, current = [], [order[0]]
    for s in order[1:]:
        if rng.random() < 0.5:
            cells.append(current)
            current = [s]
        else:
            current.append(s)
    cells.append(current)
    return cells


def random_model(rng, max_states=7, max_players=3):
    n = rng.randint(3, max_states)
    states = [f"w{i + 1}" for i in range(n)]
    k = rng.randint(2, max_players)
    players = {f"p{i + 1}": random_partition(rng, states) for i in range(k)}
    mediator = random_partition(rng, states)
    weights = [rng.randint(1, 9) for _ in states]
    total = sum(weights)
    prior = {s: F(w, total) for s, w in zip(states, weights)}
    return validate_model(states, players, mediator, prior)


def random_measurable_values(rng, model):
    """A positive state labeling constant on every mediator cell."""
    values = {}
    for cell in model.mediator:
        v = F(rng.randint(1, 9), rng.randint(1, 9))
        for s in cell:
            values[s] = v
    return values


def labeling_from_values(graph, values) -> RatioLabeling:
    return ratio_labeling(
        graph, {(a, b): values[a] / values[b] for a, b in graph.edge_list()}
    )


def perturbed_labeling(rng, graph, values) -> RatioLabeling:
    """Start from quotient ratios, then multiply one random edge by a factor
    other than 1 (keeping reciprocity).  Usually, not always, inconsistent."""
    table = {(a, b): values[a] / values[b] for a, b in graph.edge_list()}
    if table:
        edge = rng.choice(sorted(table))
        table[edge] *= rng.choice([F(2), F(3), F(1, 2), F(5, 3)])
    return ratio_labeling(graph, table)


def random_kernel(rng, model, n_signals=None):
    """A mediator-measurable kernel with random per-cell signal weights,
    plus one signal guaranteed a positive emission probability."""
    k = n_signals or rng.randint(2, 3)
    signals = [f"s{i + 1}" for i in range(k)]
    table = {sig: {} for sig in signals}
    for cell in model.mediator:
        weights = [rng.randint(0, 5) for _ in signals]
        if sum(weights) == 0:
            weights[rng.randrange(k)] = 1
        total = sum(weights)
        for sig, w in zip(signals, weights):
            for s in cell:
                table[sig][s] = F(w, total)
    kernel = validate_kernel(model, signals, table)
    for sig in signals:
        if sum(model.prior[s] * kernel.prob(sig, s) for s in model.states) > 0:
            return kernel, sig
    raise AssertionError("some signal must have positive probability")


# ---------------------------------------------------------------------------
# Exact linear algebra and vertex enumeration (LP oracle)
# ---------------------------------------------------------------------------


def solve_square(columns, rhs):
    """Gaussian elimination over Fractions for ``sum_j x_j columns[j] = rhs``.

    Returns ("unique", solution), ("dependent", None), or
    ("inconsistent", None).
    """
    m = len(rhs)
    k = len(columns)
    rows = [[columns[j][i] for j in range(k)] + [rhs[i]] for i in range(m)]
    pivots = []
    r = 0
    for c in range(k):
        pivot_row = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        rows[r] = [v / rows[r][c] for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [v - factor * w for v, w in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][-1] != 0:
            return "inconsistent", None
    if len(pivots) < k:
        return "dependent", None
    solution = [F(0)] * k
    for i, c in enumerate(pivots):
        solution[c] = rows[i][-1]
    return "unique", solution


def polytope_vertices(states, prior, members):
    """All vertices of {q >= 0 : sum q_i member_i = prior} by subset
    enumeration: a vertex is a unique nonnegative solution over an
    independent column subset."""
    order = list(states)
    columns = [[m.get(s, F(0)) for s in order] for m in members]
    rhs = [prior[s] for s in order]
    n = len(members)
    vertices = []
    for mask in range(1, 1 << n):
        subset = [j for j in range(n) if mask & (1 << j)]
        status, solution = solve_square([columns[j] for j in subset], rhs)
        if status != "unique" or any(v < 0 for v in solution):
            continue
        full = [F(0)] * n
        for j, v in zip(subset, solution):
            full[j] = v
        if full not in vertices:
            vertices.append(full)
    return vertices


def pp_oracle(states, prior, members) -> bool:
    return bool(polytope_vertices(states, prior, members))


def spp_oracle(states, prior, members) -> bool:
    vertices = polytope_vertices(states, prior, members)
    if not vertices:
        return False
    return all(any(v[j] > 0 for v in vertices) for j in range(len(members)))


def random_family(rng, max_members=4, max_states=4):
    n_states = rng.randint(2, max_states)
    states = [f"x{i + 1}" for i in range(n_states)]
    weights = [rng.randint(1, 6) for _ in states]
    total = sum(weights)
    prior = {s: F(w, total) for s, w in zip(states, weights)}
    members = []
    n = rng.randint(1, max_members)
    for _ in range(n):
        if members and rng.random() < 0.2:
            members.append(dict(rng.choice(members)))  # deliberate duplicate
            continue
        w = [rng.randint(0, 6) for _ in states]
        if sum(w) == 0:
            w[rng.randrange(n_states)] = 1
        t = sum(w)
        members.append({s: F(v, t) for s, v in zip(states, w)})
    return states, prior, members


# ---------------------------------------------------------------------------
# Game generators and the four-cycle oracle
# ---------------------------------------------------------------------------


def random_game(rng, max_players=3, max_actions=3) -> StrategicGame:
    k = rng.randint(2, max_players)
    players = [f"p{i + 1}" for i in range(k)]
    actions = {p: [f"a{j + 1}" for j in range(rng.randint(2, max_actions))] for p in players}
    payoffs = {
        (p, profile): F(rng.randint(-9, 9))
        for p in players
        for profile in _profiles(players, actions)
    }
    return strategic_game(players, actions, payoffs)


def _profiles(players, actions):
    from itertools import product

    return [tuple(pr) for pr in product(*(actions[p] for p in players))]


def identical_interest_game(rng, max_players=3, max_actions=3) -> StrategicGame:
    k = rng.randint(2, max_players)
    players = [f"p{i + 1}" for i in range(k)]
    actions = {p: [f"a{j + 1}" for j in range(rng.randint(2, max_actions))] for p in players}
    shared = {profile: F(rng.randint(-9, 9)) for profile in _profiles(players, actions)}
    payoffs = {(p, profile): shared[profile] for p in players for profile in shared}
    return strategic_game(players, actions, payoffs)


def congestion_game(rng, max_players=3, max_resources=3) -> StrategicGame:
    """Players pick one resource each; a resource's cost depends on how many
    players chose it.  Always an exact potential game."""
    k = rng.randint(2, max_players)
    players = [f"p{i + 1}" for i in range(k)]
    resources = [f"r{j + 1}" for j in range(rng.randint(2, max_resources))]
    costs = {
        r: [F(rng.randint(0, 9)) for _ in range(k + 1)] for r in resources
    }  # costs[r][load]
    actions = {p: list(resources) for p in players}
    payoffs = {}
    for profile in _profiles(players, actions):
        load = {r: profile.count(r) for r in resources}
        for i, p in enumerate(players):
            payoffs[(p, profile)] = -costs[profile[i]][load[profile[i]]]
    return strategic_game(players, actions, payoffs)


def four_cycle_oracle(game: StrategicGame) -> bool:
    """Classic exact-potential criterion: around every two-player unilateral
    deviation square the payoff differences sum to zero."""
    players = game.players
    for i, pi in enumerate(players):
        for j in range(i + 1, len(players)):
            pj = players[j]
            for a in game.profiles():
                for ai in game.actions[pi]:
                    if ai == a[i]:
                        continue
                    for aj in game.actions[pj]:
                        if aj == a[j]:
                            continue
                        b = a[:i] + (ai,) + a[i + 1 :]
                        c = b[:j] + (aj,) + b[j + 1 :]
                        d = a[:j] + (aj,) + a[j + 1 :]
                        total = (
                            (game.payoff(pi, a) - game.payoff(pi, b))
                            + (game.payoff(pj, b) - game.payoff(pj, c))
                            + (game.payoff(pi, c) - game.payoff(pi, d))
                            + (game.payoff(pj, d) - game.payoff(pj, a))
                        )
                        if total != 0:
                            return False
    return True


def consistency_graph(model):
    return build_information_graph(model)
