"""Likelihood-ratio labelings on the information graph and the two
consistency conditions that decide whether a mediator can realize them.

A ratio labeling assigns a positive rational to every directed edge, with
reciprocal values on opposite directions.  The question answered here is
whether those ratios can be written as ``f(a)/f(b)`` for a strictly positive
``f`` that is constant on every mediator cell.  Two obstructions exist:

* a *cycle* violation: an edge path that starts and ends inside one mediator
  cell whose ratio product differs from 1 (checked per component with a
  spanning tree instead of enumerating cycles);
* a *loop* violation: a chain of within-component segments, glued across
  components by shared mediator cells, whose product differs from 1 (checked
  with a union-find over components carrying relative scales).

Both checks return an explicit :class:`Certificate` on failure, re-checkable
from the raw labeling by :func:`evaluate_certificate`.  The exponential
enumeration of cycles and loops survives only as the test oracle
:func:`brute_force_check`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product as iproduct
from typing import Mapping, Optional, Union

from .infograph import Components, InfoGraph, common_knowledge_components, edge_key
from .model import ONE

CYCLE = "cycle"
LOOP = "loop"


class ReciprocityViolation(ValueError):
    def __init__(self, edge, message):
        self.edge = edge
        super().__init__(message)


class MissingRatio(ValueError):
    pass


class NotSameComponent(ValueError):
    pass


class NotAComponent(ValueError):
    pass


class MalformedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class RatioLabeling:
    """Positive ratios on the directed edges of an information graph."""

    values: Mapping[tuple[str, str], Fraction]

    def ratio(self, a: str, b: str) -> Fraction:
        if a == b:
            return ONE
        try:
            return self.values[(a, b)]
        except KeyError as exc:
            raise MissingRatio(f"no ratio for edge ({a}, {b})") from exc


def ratio_labeling(graph: InfoGraph, table: Mapping[tuple[str, str], Fraction]) -> RatioLabeling:
    """Build a labeling for ``graph`` from a table of directed ratios.

    Missing reverse directions are filled with reciprocals; if both
    directions are present they must multiply to exactly 1.  Every edge of
    the graph must end up labeled, and every value must be positive.
    """
    values: dict[tuple[str, str], Fraction] = {}
    for (a, b), v in table.items():
        if not graph.has_edge(a, b):
            raise MissingRatio(f"({a}, {b}) is not an edge of the graph")
        v = Fraction(v)
        if v <= 0:
            raise ReciprocityViolation((a, b), f"ratio on ({a}, {b}) must be positive, got {v}")
        values[(a, b)] = v
    for a, b in list(values):
        if (b, a) in values:
            if values[(a, b)] * values[(b, a)] != 1:
                raise ReciprocityViolation(
                    (a, b),
                    f"ratios on ({a}, {b}) and ({b}, {a}) multiply to "
                    f"{values[(a, b)] * values[(b, a)]}, not 1",
                )
        else:
            values[(b, a)] = 1 / values[(a, b)]
    for a, b in graph.edge_list():
        if (a, b) not in values:
            raise MissingRatio(f"no ratio for edge ({a}, {b})")
    return RatioLabeling(dict(sorted(values.items())))


def check_reciprocity(graph: InfoGraph, labeling: RatioLabeling) -> None:
    """Verify positivity and reciprocal closure on every edge of the graph."""
    for a, b in graph.edge_list():
        fwd = labeling.ratio(a, b)
        back = labeling.ratio(b, a)
        if fwd <= 0 or back <= 0:
            raise ReciprocityViolation((a, b), f"non-positive ratio on ({a}, {b})")
        if fwd * back != 1:
            raise ReciprocityViolation(
                (a, b),
                f"ratio({a},{b}) * ratio({b},{a}) = {fwd * back}, expected 1",
            )


@dataclass(frozen=True)
class Certificate:
    """An explicit witness that no mediator-measurable labeling exists.

    ``kind == "cycle"``: ``states`` is an edge path whose last state lies in
    the same mediator cell as the first; the ratio product along it is
    ``product`` and differs from 1.

    ``kind == "loop"``: ``pairs`` is a cyclic chain of within-component state
    pairs, each pair's second state sharing a mediator cell with the next
    pair's first state; the product of extended ratios over the pairs is
    ``product`` and differs from 1.
    """

    kind: str
    product: Fraction
    states: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ExtendedRatios:
    """Ratios extended from edges to arbitrary same-component state pairs.

    ``weights`` holds, per state, the anchored value assigned by the spanning
    tree of its component (anchor = lexicographically smallest state, weight
    1); for connected states the extended ratio is the weight quotient and is
    path-independent.
    """

    components: Components
    anchors: tuple[str, ...]
    weights: Mapping[str, Fraction]

    def ratio(self, a: str, b: str) -> Fraction:
        if a == b:
            return ONE
        if self.components.of(a) != self.components.of(b):
            raise NotSameComponent(f"{a} and {b} lie in different components")
        return self.weights[a] / self.weights[b]


@dataclass(frozen=True)
class Labeling:
    """A strictly positive state labeling, constant on every mediator cell,
    whose quotients reproduce a ratio labeling edge by edge."""

    values: Mapping[str, Fraction]

    def value(self, state: str) -> Fraction:
        return self.values[state]


def _cells_on(mediator, states) -> list[tuple[str, ...]]:
    present = set(states)
    cells = [tuple(sorted(c for c in cell if c in present)) for cell in mediator]
    return sorted(c for c in cells if c)


def _tree_path(parent: Mapping[str, Optional[str]], a: str, b: str) -> tuple[str, ...]:
    """Path from a to b inside one spanning tree, spliced at the lowest
    common ancestor."""
    up_a = [a]
    while parent[up_a[-1]] is not None:
        up_a.append(parent[up_a[-1]])
    index_a = {s: i for i, s in enumerate(up_a)}
    up_b = [b]
    while up_b[-1] not in index_a:
        up_b.append(parent[up_b[-1]])
    meet = up_b[-1]
    return tuple(up_a[: index_a[meet] + 1] + list(reversed(up_b[:-1])))


def check_internal(
    graph: InfoGraph, mediator, labeling: RatioLabeling
) -> Union[ExtendedRatios, Certificate]:
    """Decide the cycle condition constructively.

    Per component: a BFS spanning tree from the smallest state fixes anchored
    weights, then every non-tree edge must match the weight quotient and
    every mediator cell must assign equal weights to its states within the
    component.  Any failure is turned into an explicit cycle certificate via
    tree paths.  Requires reciprocity (checked by the caller or upfront).
    """
    components = common_knowledge_components(graph)
    weights: dict[str, Fraction] = {}
    parent: dict[str, Optional[str]] = {}
    anchors: list[str] = []
    for comp in components.sets:
        anchor = min(comp)
        anchors.append(anchor)
        weights[anchor] = ONE
        parent[anchor] = None
        queue = deque([anchor])
        while queue:
            v = queue.popleft()
            for w in graph.neighbors(v):
                if w in weights:
                    continue
                # ratio(v, w) = weight(v) / weight(w)
                weights[w] = weights[v] / labeling.ratio(v, w)
                parent[w] = v
                queue.append(w)

    for a, b in graph.edge_list():
        if parent.get(a) == b or parent.get(b) == a:
            continue
        if labeling.ratio(a, b) != weights[a] / weights[b]:
            path = _tree_path(parent, a, b) + (a,)
            prod = ONE
            for u, v in zip(path, path[1:]):
                prod *= labeling.ratio(u, v)
            return Certificate(CYCLE, product=prod, states=path)

    for cell in _cells_on(mediator, graph.states):
        by_comp: dict[int, list[str]] = {}
        for s in cell:
            by_comp.setdefault(components.of(s), []).append(s)
        for members in by_comp.values():
            base = members[0]
            for s in members[1:]:
                if weights[s] != weights[base]:
                    path = _tree_path(parent, base, s)
                    prod = ONE
                    for u, v in zip(path, path[1:]):
                        prod *= labeling.ratio(u, v)
                    return Certificate(CYCLE, product=prod, states=path)

    return ExtendedRatios(components, tuple(anchors), weights)


class _ScaledUnionFind:
    """Union-find over component indices carrying relative scales: merging
    with ratio r records scale(a) = r * scale(b)."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rel = [ONE] * n  # scale(i) relative to scale(parent[i])

    def find(self, i: int) -> tuple[int, Fraction]:
        chain = []
        while self.parent[i] != i:
            chain.append(i)
            i = self.parent[i]
        weight = ONE
        for j in reversed(chain):
            weight *= self.rel[j]
            self.rel[j] = weight
            self.parent[j] = i
        # after compression rel[j] is relative to the root
        return i, (self.rel[chain[0]] if chain else ONE)

    def merge(self, a: int, b: int, ratio: Fraction) -> Optional[bool]:
        """Impose scale(a) = ratio * scale(b).  Returns True if a new link was
        added, False if already consistent, None on conflict."""
        ra, wa = self.find(a)
        rb, wb = self.find(b)
        if ra == rb:
            return None if wa != ratio * wb else False
        # scale(ra) = scale(a)/wa = ratio * wb * scale(rb) / wa
        self.parent[ra] = rb
        self.rel[ra] = ratio * wb / wa
        return True


def check_external(
    graph: InfoGraph, mediator, extended: ExtendedRatios
) -> Optional[Certificate]:
    """Decide the loop condition given that the cycle condition holds.

    Every mediator cell forces all its states to carry one common value, so
    a cell touching several components pins the relative scale between them.
    Conflicting constraints are reconstructed into an explicit loop
    certificate by walking the forest of previously accepted links.
    """
    components = extended.components
    weights = extended.weights
    uf = _ScaledUnionFind(len(components.sets))
    # forest[c] = list of (other component, state here, state there)
    forest: dict[int, list[tuple[int, str, str]]] = {}

    for cell in _cells_on(mediator, graph.states):
        by_comp: dict[int, list[str]] = {}
        for s in cell:
            by_comp.setdefault(components.of(s), []).append(s)
        if len(by_comp) < 2:
            continue
        items = sorted(by_comp.items())
        base_comp, base_states = items[0]
        base = base_states[0]
        for comp, states in items[1:]:
            for state in states:
                # want scale(comp) * weight(state) == scale(base_comp) * weight(base)
                ratio = weights[base] / weights[state]
                outcome = uf.merge(comp, base_comp, ratio)
                if outcome is True:
                    forest.setdefault(comp, []).append((base_comp, state, base))
                    forest.setdefault(base_comp, []).append((comp, base, state))
                elif outcome is None:
                    return _build_loop(extended, forest, base_comp, base, comp, state)
    return None


def _build_loop(
    extended: ExtendedRatios,
    forest: Mapping[int, list[tuple[int, str, str]]],
    comp_a: int,
    state_a: str,
    comp_b: int,
    state_b: str,
) -> Certificate:
    """Assemble the loop closed by a conflicting constraint.

    The new mediator cell links ``state_a`` (component a) with ``state_b``
    (component b); the accepted-link forest already connects b back to a.
    """
    # BFS in the forest from comp_b to comp_a.
    prev: dict[int, tuple[int, str, str]] = {}
    seen = {comp_b}
    queue = deque([comp_b])
    while queue:
        c = queue.popleft()
        if c == comp_a:
            break
        for other, here, there in forest.get(c, ()):
            if other not in seen:
                seen.add(other)
                prev[other] = (c, here, there)
                queue.append(other)
    # Path comp_b = d0, d1, ..., dm = comp_a with link j holding
    # (exit state in d_{j-1}, entry state in d_j), both in one mediator cell.
    links: list[tuple[str, str]] = []
    c = comp_a
    while c != comp_b:
        pc, here, there = prev[c]
        links.append((here, there))  # here in d_{j-1}, there in d_j
        c = pc
    links.reverse()
    exits = [x for x, _ in links]
    entries = [y for _, y in links]
    # Pairs: start in comp_a at the forest arrival state, jump to comp_b via
    # the conflicting cell, then walk the forest links back to comp_a.
    pairs = [(entries[-1], state_a), (state_b, exits[0])]
    for j in range(len(links) - 1):
        pairs.append((entries[j], exits[j + 1]))
    prod = ONE
    for x, y in pairs:
        prod *= extended.ratio(x, y)
    assert prod != 1, "loop reconstruction must witness the conflict"
    return Certificate(LOOP, product=prod, pairs=tuple(pairs))


def solve_labeling(
    graph: InfoGraph, mediator, labeling: RatioLabeling
) -> Union[Labeling, Certificate]:
    """Find a positive, mediator-measurable state labeling reproducing the
    edge ratios, or return the certificate that rules one out.

    Within a component the anchored weights fix the labeling up to one scale;
    scales are then propagated across components through the accepted
    mediator-cell links, anchored at the smallest component of each linked
    group.  The overall labeling is unique up to one positive factor per
    group of linked components.
    """
    extended = check_internal(graph, mediator, labeling)
    if isinstance(extended, Certificate):
        return extended
    conflict = check_external(graph, mediator, extended)
    if conflict is not None:
        return conflict

    # Re-run the merges (now known to be consistent) to obtain the scales.
    components = extended.components
    uf = _ScaledUnionFind(len(components.sets))
    for cell in _cells_on(mediator, graph.states):
        by_comp: dict[int, list[str]] = {}
        for s in cell:
            by_comp.setdefault(components.of(s), []).append(s)
        if len(by_comp) < 2:
            continue
        items = sorted(by_comp.items())
        base_comp, base_states = items[0]
        base = base_states[0]
        for comp, states in items[1:]:
            for state in states:
                uf.merge(comp, base_comp, extended.weights[base] / extended.weights[state])

    # scale(anchor component of each linked group) = 1
    group_anchor: dict[int, tuple[int, Fraction]] = {}
    scales: list[Fraction] = [ONE] * len(components.sets)
    for idx in range(len(components.sets)):
        root, weight = uf.find(idx)
        if root not in group_anchor:
            group_anchor[root] = (idx, weight)
        scales[idx] = weight / group_anchor[root][1]

    values = {s: scales[components.of(s)] * extended.weights[s] for s in graph.states}
    result = Labeling(values)
    for cell in _cells_on(mediator, graph.states):
        assert len({values[s] for s in cell}) == 1, "labeling must be constant per mediator cell"
    for a, b in graph.edge_list():
        assert labeling.ratio(a, b) == values[a] / values[b]
    return result


def induced_component_distribution(
    extended: ExtendedRatios, component
) -> dict[str, Fraction]:
    """The distribution a consistent labeling induces on one component:
    extended ratios against an arbitrary anchor, normalized.  Independent of
    the anchor choice."""
    comp = frozenset(component)
    if comp not in extended.components.sets:
        raise NotAComponent(f"{sorted(comp)} is not a component")
    total = sum(extended.weights[s] for s in comp)
    return {s: extended.weights[s] / total for s in sorted(comp)}


def evaluate_certificate(
    graph: InfoGraph, mediator, labeling: RatioLabeling, cert: Certificate
) -> Fraction:
    """Recompute a certificate's product from the raw labeling.

    Validates the structural conditions of its kind and that the recomputed
    product matches the stored one; raises :class:`MalformedCertificate`
    otherwise.
    """
    cell_of: dict[str, frozenset[str]] = {}
    for cell in mediator:
        for s in cell:
            cell_of[s] = frozenset(cell)

    if cert.kind == CYCLE:
        states = cert.states
        if len(states) < 2:
            raise MalformedCertificate("cycle must contain at least one edge")
        if cell_of.get(states[-1]) != cell_of.get(states[0]):
            raise MalformedCertificate(
                "cycle endpoints must lie in one mediator cell"
            )
        prod = ONE
        for a, b in zip(states, states[1:]):
            if not graph.has_edge(a, b):
                raise MalformedCertificate(f"({a}, {b}) is not an edge")
            prod *= labeling.ratio(a, b)
    elif cert.kind == LOOP:
        pairs = cert.pairs
        if len(pairs) < 2:
            raise MalformedCertificate("loop must contain at least two pairs")
        extended = check_internal(graph, mediator, labeling)
        if isinstance(extended, Certificate):
            raise MalformedCertificate("loop certificate over a cycle-inconsistent labeling")
        comps = extended.components
        prod = ONE
        for i, (x, y) in enumerate(pairs):
            if comps.of(x) != comps.of(y):
                raise MalformedCertificate(f"pair ({x}, {y}) spans two components")
            nxt = pairs[(i + 1) % len(pairs)]
            if comps.of(x) == comps.of(nxt[0]):
                raise MalformedCertificate("consecutive pairs must lie in different components")
            if cell_of.get(y) != cell_of.get(nxt[0]):
                raise MalformedCertificate(
                    f"states {y} and {nxt[0]} must share a mediator cell"
                )
            prod *= extended.ratio(x, y)
    else:
        raise MalformedCertificate(f"unknown certificate kind {cert.kind!r}")

    if prod != cert.product:
        raise MalformedCertificate(
            f"stored product {cert.product} differs from recomputed {prod}"
        )
    return prod


def brute_force_check(
    graph: InfoGraph, mediator, labeling: RatioLabeling, max_len: Optional[int] = None
) -> Optional[Certificate]:
    """Exhaustive oracle: enumerate simple cycles and loops directly.

    Intended for small instances only; the spanning-tree and union-find
    checks are the production path.  ``max_len`` bounds the number of pairs
    in a loop (default: twice the number of states).
    """
    if max_len is None:
        max_len = 2 * len(graph.states)
    cell_of: dict[str, frozenset[str]] = {}
    for cell in mediator:
        for s in cell:
            cell_of[s] = frozenset(cell)

    # Cycles: simple edge paths whose head and tail share a mediator cell,
    # plus closed simple cycles (tail returns to the head by an edge).
    def dfs(path: list[str], prod: Fraction, visited: set[str]) -> Optional[Certificate]:
        head = path[0]
        last = path[-1]
        for nxt in graph.neighbors(last):
            step = prod * labeling.ratio(last, nxt)
            if nxt == head and len(path) >= 2:
                if step != 1:
                    return Certificate(CYCLE, product=step, states=tuple(path) + (head,))
                continue
            if nxt in visited:
                continue
            if cell_of.get(nxt) == cell_of.get(head) and step != 1:
                return Certificate(CYCLE, product=step, states=tuple(path) + (nxt,))
            found = dfs(path + [nxt], step, visited | {nxt})
            if found is not None:
                return found
        return None

    for start in sorted(graph.states):
        found = dfs([start], ONE, {start})
        if found is not None:
            return found

    # With all cycles clean the extension is well-defined; enumerate loops
    # over sequences of distinct components.
    extended = check_internal(graph, mediator, labeling)
    assert not isinstance(extended, Certificate)
    comps = extended.components
    k = len(comps.sets)
    if k < 2:
        return None
    # cross[(ca, cb)]: state pairs (x in ca, y in cb) sharing a mediator cell
    cross: dict[tuple[int, int], list[tuple[str, str]]] = {}
    for cell in _cells_on(mediator, graph.states):
        for x in cell:
            for y in cell:
                ca, cb = comps.of(x), comps.of(y)
                if ca != cb:
                    cross.setdefault((ca, cb), []).append((x, y))

    for length in range(2, min(k, max_len) + 1):
        for first in range(k):
            rest = [c for c in range(k) if c > first]
            for tail in permutations(rest, length - 1):
                seq = (first,) + tail
                link_options = []
                ok = True
                for i in range(length):
                    pair = (seq[i], seq[(i + 1) % length])
                    if pair not in cross:
                        ok = False
                        break
                    link_options.append(cross[pair])
                if not ok:
                    continue
                for links in iproduct(*link_options):
                    # links[i] = (exit of seq[i], entry of seq[i+1])
                    prod = ONE
                    pairs = []
                    for i in range(length):
                        entry = links[i - 1][1]
                        exit_ = links[i][0]
                        pairs.append((entry, exit_))
                        prod *= extended.ratio(entry, exit_)
                    if prod != 1:
                        return Certificate(LOOP, product=prod, pairs=tuple(pairs))
    return None
