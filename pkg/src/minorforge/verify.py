"""Distortion measurement and exact verification oracles.

Everything here is exact rational arithmetic; ratios involving a disconnected
pair come back as the symbolic INF.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (
    DominationViolatedError,
    MinorforgeError,
    TooLargeError,
    UnreachableError,
)
from .graph import Graph, dijkstra
from .lowerbound import GroupedInstance
from .minors import Minor, PartialPartition, apply_partition
from .rational import INF, SymbolicInfinity, is_finite

BRUTE_FORCE_VERTEX_LIMIT = 14


@dataclass(frozen=True)
class DistortionReport:
    """Worst multiplicative stretch over terminal pairs, with its witness."""

    max_ratio: Fraction | SymbolicInfinity
    witness_pair: tuple[int, int] | None
    domination_holds: bool
    ratios: tuple[tuple[tuple[int, int], Fraction | SymbolicInfinity], ...] | None = None


def _terminal_rows(graph: Graph) -> dict[int, list]:
    return {t: dijkstra(graph, t).dist for t in graph.terminals}


def distortion(graph: Graph, minor: Minor, full: bool = False) -> DistortionReport:
    """max over terminal pairs of d_H / d_G, plus a domination flag.

    Raises UnreachableError when the source graph itself disconnects a
    terminal pair; a pair disconnected only in the minor yields an INF ratio.
    """
    tmap = minor.terminal_map
    source_rows = _terminal_rows(graph)
    minor_rows = {t: dijkstra(minor.result, tmap[t]).dist for t in graph.terminals}
    best: Fraction | SymbolicInfinity = Fraction(1)
    witness = None
    domination = True
    ratios = []
    for t, s in combinations(graph.terminals, 2):
        dg = source_rows[t][s]
        if dg is None:
            raise UnreachableError(f"terminals {t}, {s} disconnected in the source")
        dh = minor_rows[t][tmap[s]]
        ratio: Fraction | SymbolicInfinity
        if dh is None:
            ratio = INF
        else:
            if dh < dg:
                domination = False
            ratio = dh / dg
        if full:
            ratios.append(((t, s), ratio))
        if witness is None or best < ratio:
            best = ratio
            witness = (t, s)
    return DistortionReport(best, witness, domination, tuple(ratios) if full else None)


@dataclass(frozen=True)
class MinorDistribution:
    """Probability distribution over minors of one source graph."""

    entries: tuple[tuple[Minor, Fraction], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise MinorforgeError("empty distribution")
        total = sum((p for _, p in self.entries), Fraction(0))
        if total != 1:
            raise MinorforgeError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for _, p in self.entries):
            raise MinorforgeError("negative probability")


def expected_distortion(graph: Graph, distribution: MinorDistribution) -> Fraction:
    """max over terminal pairs of E[d_H] / d_G.

    Every support minor must dominate the source metric (the rDAM definition);
    a violation raises DominationViolatedError.
    """
    source_rows = _terminal_rows(graph)
    support_rows = []
    for minor, prob in distribution.entries:
        rows = {
            t: dijkstra(minor.result, minor.terminal_map[t]).dist
            for t in graph.terminals
        }
        support_rows.append((minor, prob, rows))

    best = Fraction(1)
    for t, s in combinations(graph.terminals, 2):
        dg = source_rows[t][s]
        if dg is None:
            raise UnreachableError(f"terminals {t}, {s} disconnected in the source")
        expected = Fraction(0)
        for minor, prob, rows in support_rows:
            dh = rows[t][minor.terminal_map[s]]
            if dh is None:
                raise DominationViolatedError(
                    f"support minor disconnects pair ({t}, {s})"
                )
            if dh < dg:
                raise DominationViolatedError(
                    f"support minor fails domination on ({t}, {s}): {dh} < {dg}"
                )
            expected += prob * dh
        best = max(best, expected / dg)
    return best


def _unweighted_star(k: int) -> Graph:
    return Graph.build(k + 1, [(t, k, Fraction(1)) for t in range(k)], range(k))


def star_hub_contractions(k: int) -> tuple[Graph, list[Minor]]:
    """The k minors H_t of the (k+1)-vertex star: hub merged into terminal t,
    restriction lengths (every surviving edge gets weight 2)."""
    graph = _unweighted_star(k)
    minors = []
    for t in range(k):
        groups = [{t, k}] + [{x} for x in range(k) if x != t]
        minors.append(
            apply_partition(graph, PartialPartition.from_sets(groups), "restriction")
        )
    return graph, minors


def star_random_optimum(k: int) -> tuple[Fraction, MinorDistribution]:
    """Exact optimum of expected distortion over distributions on the k
    hub-contraction minors of the unweighted k-star.

    The defining linear program is symmetric under permuting the terminals, so
    some optimal solution is uniform; under any distribution pi the pair
    (t, t') suffers expected ratio 2 - pi_t - pi_t', whose maximum over pairs
    is at least its average 2 - 2/k. The uniform distribution attains exactly
    2(1 - 1/k), so that is the optimum and no solver is needed.
    """
    if k < 3:
        raise MinorforgeError(f"need k >= 3, got {k}")
    graph, minors = star_hub_contractions(k)
    uniform = MinorDistribution(tuple((m, Fraction(1, k)) for m in minors))
    value = expected_distortion(graph, uniform)
    closed_form = 2 * (1 - Fraction(1, k))
    if value != closed_form:
        raise MinorforgeError(
            f"internal error: uniform value {value} != {closed_form}"
        )
    return value, uniform


def star_grid_search(k: int, resolution: int) -> Fraction:
    """Minimum expected distortion over all distributions whose probabilities
    are multiples of 1/resolution; a brute-force cross-check of the optimum."""
    graph, minors = star_hub_contractions(k)
    best: Fraction | None = None

    def compositions(total: int, parts: int):
        if parts == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for weights in compositions(resolution, k):
        entries = tuple(
            (m, Fraction(w, resolution)) for m, w in zip(minors, weights)
        )
        value = expected_distortion(graph, MinorDistribution(entries))
        if best is None or value < best:
            best = value
    return best


def brute_force_best_minor(
    graph: Graph, budget: int, max_edges: int | None = None
) -> tuple[Fraction | SymbolicInfinity, Minor]:
    """Minimum distortion over every valid partial partition with at most
    `budget` non-terminal super-nodes, restriction-mode lengths.

    `max_edges` restricts attention to minors with at most that many edges
    (the edge-budget form of the star lower bound). Guarded to 14 vertices.
    """
    n = graph.n
    if n > BRUTE_FORCE_VERTEX_LIMIT:
        raise TooLargeError(f"{n} vertices exceeds the enumeration guard")
    terminals = list(graph.terminals)
    nonterms = [v for v in range(n) if not graph.is_terminal(v)]
    k = len(terminals)

    all_rows = [dijkstra(graph, v).dist for v in range(n)]

    best_value: Fraction | SymbolicInfinity | None = None
    best_partition: list[set[int]] | None = None

    DELETED = -1
    assignment: dict[int, int] = {}

    def evaluate() -> None:
        nonlocal best_value, best_partition
        groups: list[set[int]] = [{t} for t in terminals]
        extra: dict[int, int] = {}
        for v, label in assignment.items():
            if label == DELETED:
                continue
            if label < k:
                groups[label].add(v)
            else:
                if label not in extra:
                    extra[label] = len(groups)
                    groups.append(set())
                groups[extra[label]].add(v)
        for group in groups:
            if not graph.induced_connected(group):
                return
        # restriction-mode minor, built against precomputed distances
        order = sorted(range(len(groups)), key=lambda i: min(groups[i]))
        groups = [groups[i] for i in order]
        of_group = {v: i for i, g in enumerate(groups) for v in g}
        reps = [
            next(iter(g & graph.terminal_set)) if g & graph.terminal_set else min(g)
            for g in groups
        ]
        crossing: set[tuple[int, int]] = set()
        for edge in graph.edges:
            a, b = of_group.get(edge.u), of_group.get(edge.v)
            if a is not None and b is not None and a != b:
                crossing.add((min(a, b), max(a, b)))
        if max_edges is not None and len(crossing) > max_edges:
            return
        edge_list = []
        for a, b in crossing:
            d = all_rows[reps[a]][reps[b]]
            if d is None:
                return
            edge_list.append((a, b, d))
        h_terms = [i for i, g in enumerate(groups) if g & graph.terminal_set]
        result = Graph.build(len(groups), edge_list, h_terms)
        rows = {t: dijkstra(result, of_group[t]).dist for t in terminals}
        worst: Fraction | SymbolicInfinity = Fraction(1)
        for t, s in combinations(terminals, 2):
            dg = all_rows[t][s]
            if dg is None:
                continue
            dh = rows[t][of_group[s]]
            ratio = INF if dh is None else dh / dg
            if worst < ratio:
                worst = ratio
        if best_value is None or worst < best_value:
            best_value = worst
            best_partition = [set(g) for g in groups]

    def assign(index: int, open_extra: int) -> None:
        if index == len(nonterms):
            evaluate()
            return
        v = nonterms[index]
        assignment[v] = DELETED
        assign(index + 1, open_extra)
        for label in range(k):
            assignment[v] = label
            assign(index + 1, open_extra)
        if open_extra < budget:
            assignment[v] = k + open_extra
            assign(index + 1, open_extra + 1)
        del assignment[v]

    assign(0, 0)
    if best_partition is None:
        raise MinorforgeError("no valid partition found")
    minor = apply_partition(
        graph, PartialPartition.from_sets(best_partition), "restriction"
    )
    return best_value, minor


@dataclass(frozen=True)
class GroupDeletionEntry:
    group: int
    witness_pair: tuple[int, int]
    ratio: Fraction | SymbolicInfinity  # best pair ratio after removing the group's non-terminals
    passes: bool | None


@dataclass(frozen=True)
class GroupDeletionReport:
    threshold: Fraction | None
    entries: tuple[GroupDeletionEntry, ...]
    all_pass: bool | None


def group_deletion_check(
    instance: GroupedInstance, threshold: Fraction | None = None
) -> GroupDeletionReport:
    """For every group R, remove its non-terminals and measure how far apart
    some in-group terminal pair is forced, relative to d_G.

    Thresholds default to 2 for star instances and 5/2 for height-2 tree
    instances; other families report observed ratios only.
    """
    if threshold is None:
        if instance.gadget.family == "star":
            threshold = Fraction(2)
        elif instance.gadget.family == "tree" and instance.gadget.height == 2:
            threshold = Fraction(5, 2)

    graph = instance.graph
    base_rows = _terminal_rows(graph)
    entries = []
    for gid, group in enumerate(instance.groups):
        removed = set(group.non_terminals)
        adjacency: list[list[tuple[int, Fraction, int]]] = [[] for _ in range(graph.n)]
        for eid, edge in enumerate(graph.edges):
            if edge.u in removed or edge.v in removed or not is_finite(edge.length):
                continue
            adjacency[edge.u].append((edge.v, edge.length, eid))
            adjacency[edge.v].append((edge.u, edge.length, eid))

        from .graph import dijkstra_on_adjacency

        best_ratio: Fraction | SymbolicInfinity | None = None
        witness = None
        rows: dict[int, list] = {}
        for t, s in combinations(group.terminal_vertices, 2):
            if t not in rows:
                rows[t], _ = dijkstra_on_adjacency(graph.n, adjacency, t)
            dg = base_rows[t][s]
            if dg is None:
                continue
            after = rows[t][s]
            ratio: Fraction | SymbolicInfinity = (
                INF if after is None else after / dg
            )
            if best_ratio is None or best_ratio < ratio:
                best_ratio = ratio
                witness = (t, s)
        passes = None if threshold is None else bool(best_ratio >= threshold)
        entries.append(GroupDeletionEntry(gid, witness, best_ratio, passes))
    all_pass = None if threshold is None else all(e.passes for e in entries)
    return GroupDeletionReport(threshold, tuple(entries), all_pass)
