"""Minors of terminal-labeled graphs via partial partitions.

A partial partition is a family of disjoint, internally connected vertex
groups; contracting each group to a super-node yields a minor. Each terminal
must sit in exactly one group and no group may hold two terminals, so all
terminals survive and none merge.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal

from .errors import InvalidPartitionError, MinorforgeError
from .graph import Graph, dijkstra
from .rational import INF, Length, is_finite

LengthMode = Literal["inherited", "restriction"]


@dataclass(frozen=True)
class PartialPartition:
    """Disjoint connected vertex groups of a source graph."""

    groups: tuple[frozenset[int], ...]

    @classmethod
    def from_sets(cls, groups: Iterable[Iterable[int]]) -> "PartialPartition":
        return cls(tuple(frozenset(g) for g in groups))

    @classmethod
    def identity(cls, graph: Graph) -> "PartialPartition":
        return cls(tuple(frozenset((v,)) for v in range(graph.n)))

    def problems(self, graph: Graph) -> list[str]:
        """All constraint violations of this partition against `graph`."""
        out: list[str] = []
        seen: set[int] = set()
        for i, group in enumerate(self.groups):
            if not group:
                out.append(f"group {i} is empty")
                continue
            for v in group:
                if not 0 <= v < graph.n:
                    out.append(f"group {i} contains out-of-range vertex {v}")
                elif v in seen:
                    out.append(f"vertex {v} appears in more than one group")
            seen |= group
            if not graph.induced_connected(group):
                out.append(f"group {i} is not connected")
            terms = group & graph.terminal_set
            if len(terms) > 1:
                out.append(f"group {i} holds terminals {sorted(terms)}")
        covered = seen & graph.terminal_set
        for t in graph.terminals:
            if t not in covered:
                out.append(f"terminal {t} is not covered by any group")
        return out

    def representative(self, graph: Graph, index: int) -> int:
        """The group's terminal if it has one, otherwise its lowest vertex id."""
        group = self.groups[index]
        terms = group & graph.terminal_set
        if terms:
            return next(iter(terms))
        return min(group)


@dataclass(frozen=True)
class Minor:
    """A contracted graph together with the partition that produced it.

    Result vertex i is the super-node of `partition.groups[i]`.
    """

    source: Graph
    partition: PartialPartition
    result: Graph

    @cached_property
    def group_of_vertex(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, group in enumerate(self.partition.groups):
            for v in group:
                out[v] = i
        return out

    @cached_property
    def terminal_map(self) -> dict[int, int]:
        """Source terminal id -> result vertex id."""
        return {t: self.group_of_vertex[t] for t in self.source.terminals}

    @property
    def non_terminal_count(self) -> int:
        return self.result.n - len(self.result.terminals)


@dataclass(frozen=True)
class MinorReport:
    valid: bool
    domination_holds: bool
    problems: tuple[str, ...]


def apply_partition(
    graph: Graph, partition: PartialPartition, length_mode: LengthMode = "inherited"
) -> Minor:
    """Contract each group to a super-node.

    inherited: a super-edge gets the minimum source length crossing its groups.
    restriction: a super-edge (a, b) gets d_G(rep(a), rep(b)) between the group
    representatives, the optimal weight assignment for a fixed minor shape.

    Groups are reordered canonically (by minimum member) to assign result ids.
    """
    issues = partition.problems(graph)
    if issues:
        raise InvalidPartitionError("; ".join(issues))
    groups = tuple(sorted(partition.groups, key=min))
    canonical = PartialPartition(groups)

    of_group: dict[int, int] = {}
    for i, group in enumerate(groups):
        for v in group:
            of_group[v] = i

    crossing: dict[tuple[int, int], Length] = {}
    for edge in graph.edges:
        a = of_group.get(edge.u)
        b = of_group.get(edge.v)
        if a is None or b is None or a == b:
            continue
        key = (min(a, b), max(a, b))
        current = crossing.get(key)
        if current is None or edge.length < current:
            crossing[key] = edge.length

    if length_mode == "inherited":
        edge_list = [(a, b, length) for (a, b), length in crossing.items()]
    elif length_mode == "restriction":
        reps = [canonical.representative(graph, i) for i in range(len(groups))]
        needed = sorted({reps[a] for a, _ in crossing} | {reps[b] for _, b in crossing})
        dist_rows = {r: dijkstra(graph, r).dist for r in needed}
        edge_list = []
        for a, b in crossing:
            d = dist_rows[reps[a]][reps[b]]
            if d is None:
                raise MinorforgeError(
                    f"representatives {reps[a]}, {reps[b]} are disconnected"
                )
            edge_list.append((a, b, d))
    else:
        raise MinorforgeError(f"unknown length mode {length_mode!r}")

    terminals = sorted(
        i for i, group in enumerate(groups) if group & graph.terminal_set
    )
    result = Graph.build(len(groups), edge_list, terminals)
    return Minor(graph, canonical, result)


def identity_minor(graph: Graph) -> Minor:
    return apply_partition(graph, PartialPartition.identity(graph), "inherited")


def validate_minor(graph: Graph, minor: Minor) -> MinorReport:
    """Check partition invariants, edge witnesses, and terminal-distance domination.

    Never raises; all failures are reported.
    """
    problems = list(minor.partition.problems(graph))

    groups = minor.partition.groups
    if minor.result.n != len(groups):
        problems.append("result vertex count does not match group count")

    of_group = minor.group_of_vertex
    adjacent_ok: set[tuple[int, int]] = set()
    for edge in graph.edges:
        a = of_group.get(edge.u)
        b = of_group.get(edge.v)
        if a is not None and b is not None and a != b:
            adjacent_ok.add((min(a, b), max(a, b)))
    for edge in minor.result.edges:
        if (edge.u, edge.v) not in adjacent_ok:
            problems.append(
                f"result edge ({edge.u}, {edge.v}) has no witnessing source edge"
            )

    expected_terminals = sorted(
        i for i, group in enumerate(groups) if group & graph.terminal_set
    )
    if list(minor.result.terminals) != expected_terminals:
        problems.append("result terminals do not match groups holding terminals")

    valid = not problems

    domination = True
    if valid:
        tmap = minor.terminal_map
        source_rows = {t: dijkstra(graph, t).dist for t in graph.terminals}
        result_rows = {
            t: dijkstra(minor.result, tmap[t]).dist for t in graph.terminals
        }
        for i, t in enumerate(graph.terminals):
            for s in graph.terminals[i + 1 :]:
                dg = source_rows[t][s]
                dh = result_rows[t][tmap[s]]
                if dg is None:
                    continue
                if dh is not None and dh < dg:
                    domination = False
                    problems.append(
                        f"domination fails on pair ({t}, {s}): {dh} < {dg}"
                    )
    return MinorReport(valid, valid and domination, tuple(problems))
