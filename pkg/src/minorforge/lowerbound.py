"""Hard-instance machinery: the black-box reduction from a small gadget to a
large graph, detouring graphs over Steiner systems, detouring-cycle counting,
and the randomized pruning that kills all short detouring cycles.

The reduction embeds one gadget copy per selected block of an (s,2)-Steiner
system; terminals are shared across groups exactly as the blocks overlap,
while every non-terminal belongs to a single group.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    ArityMismatchError,
    InfeasibleError,
    LemmaViolationError,
    MinorforgeError,
    UnsupportedParametersError,
)
from .graph import Graph
from .minors import Minor
from .steiner import SteinerSystem, build_steiner
from .treebound import alpha_lower


@dataclass(frozen=True)
class Gadget:
    """A small terminal-labeled graph used as the unit of the reduction."""

    graph: Graph
    family: str  # "star", "tree", or "custom"
    height: int | None = None
    alpha: Fraction | None = None  # claimed SPR distortion lower bound
    beta: Fraction | None = None  # terminal distances lie in [1, beta]

    @property
    def s(self) -> int:
        return len(self.graph.terminals)

    @property
    def q(self) -> int:
        return self.graph.n - self.s


def star_gadget(s: int) -> Gadget:
    """Unweighted star: s terminal leaves around one non-terminal hub."""
    if s < 2:
        raise UnsupportedParametersError(f"star gadget needs s >= 2, got {s}")
    graph = Graph.build(s + 1, [(t, s, Fraction(1)) for t in range(s)], range(s))
    alpha = Fraction(2) if s >= 3 else None
    return Gadget(graph, "star", alpha=alpha, beta=Fraction(2))


def ternary_tree_gadget(height: int) -> Gadget:
    """Complete ternary tree of the given height; the 3^height leaves are the
    terminals. Vertices are heap-ordered (children of v are 3v+1..3v+3)."""
    if height < 1:
        raise UnsupportedParametersError(f"tree gadget needs height >= 1, got {height}")
    n = (3 ** (height + 1) - 1) // 2
    first_leaf = (3**height - 1) // 2
    edges = [(child, (child - 1) // 3, Fraction(1)) for child in range(1, n)]
    graph = Graph.build(n, edges, range(first_leaf, n))
    alpha = alpha_lower(height) if height >= 2 else Fraction(2)
    return Gadget(graph, "tree", height=height, alpha=alpha, beta=Fraction(2 * height))


@dataclass(frozen=True)
class InstanceGroup:
    """One embedded gadget copy: its block, terminal vertices, non-terminals."""

    block: tuple[int, ...]  # Steiner elements, 1-based, sorted
    terminal_vertices: tuple[int, ...]  # graph ids, aligned with block order
    non_terminals: tuple[int, ...]

    @cached_property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.terminal_vertices) | frozenset(self.non_terminals)


@dataclass(frozen=True)
class GroupedInstance:
    """Output of the black-box reduction. `system`/`selected` are None when an
    instance is reconstructed from a file."""

    graph: Graph
    groups: tuple[InstanceGroup, ...]
    gadget: Gadget
    system: SteinerSystem | None = None
    selected: tuple[int, ...] | None = None

    def group_of_nonterminal(self, vertex: int) -> int:
        for i, group in enumerate(self.groups):
            if vertex in group.non_terminals:
                return i
        raise MinorforgeError(f"vertex {vertex} is not a non-terminal of any group")


def blackbox_reduce(
    gadget: Gadget, system: SteinerSystem, selected: Iterable[int] | None = None
) -> GroupedInstance:
    """Embed one gadget copy per selected block (indices into system.blocks).

    Terminal j of the gadget (in sorted-id order) maps to the j-th smallest
    element of the block; gadget non-terminals get fresh ids after the k
    shared terminal vertices.
    """
    if gadget.s != system.s:
        raise ArityMismatchError(
            f"gadget has {gadget.s} terminals but blocks have size {system.s}"
        )
    indices = tuple(range(system.r)) if selected is None else tuple(selected)
    for i in indices:
        if not 0 <= i < system.r:
            raise MinorforgeError(f"block index {i} out of range")

    k = system.k
    gadget_terms = list(gadget.graph.terminals)
    gadget_nonterms = [
        v for v in range(gadget.graph.n) if not gadget.graph.is_terminal(v)
    ]
    edges: list[tuple[int, int, Fraction]] = []
    groups: list[InstanceGroup] = []
    next_free = k
    for i in indices:
        block = tuple(sorted(system.blocks[i]))
        mapping = {gv: element - 1 for gv, element in zip(gadget_terms, block)}
        fresh = tuple(range(next_free, next_free + gadget.q))
        next_free += gadget.q
        mapping.update({gv: nv for gv, nv in zip(gadget_nonterms, fresh)})
        for edge in gadget.graph.edges:
            edges.append((mapping[edge.u], mapping[edge.v], edge.length))
        groups.append(
            InstanceGroup(block, tuple(e - 1 for e in block), fresh)
        )
    graph = Graph.build(next_free, edges, range(k))
    return GroupedInstance(graph, tuple(groups), gadget, system, indices)


@dataclass(frozen=True)
class DetouringGraph:
    """Block-intersection graph: one vertex per selected block, an edge labeled
    with the unique shared terminal whenever two blocks intersect."""

    block_ids: tuple[int, ...]
    blocks: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int, int], ...]  # (i, j, terminal label), i < j
    k: int

    @property
    def m(self) -> int:
        return len(self.blocks)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.m)]
        for i, j, label in self.edges:
            adj[i].append((j, label))
            adj[j].append((i, label))
        return tuple(tuple(sorted(a)) for a in adj)

    def induced(self, keep: Sequence[int]) -> "DetouringGraph":
        keep = tuple(sorted(keep))
        renum = {old: new for new, old in enumerate(keep)}
        kept = set(keep)
        edges = tuple(
            (renum[i], renum[j], label)
            for i, j, label in self.edges
            if i in kept and j in kept
        )
        return DetouringGraph(
            tuple(self.block_ids[i] for i in keep),
            tuple(self.blocks[i] for i in keep),
            edges,
            self.k,
        )


def detouring_graph(
    system: SteinerSystem, selected: Iterable[int] | None = None
) -> DetouringGraph:
    indices = tuple(range(system.r)) if selected is None else tuple(selected)
    blocks = tuple(system.blocks[i] for i in indices)
    edges = []
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            shared = blocks[a] & blocks[b]
            if len(shared) == 1:
                edges.append((a, b, next(iter(shared))))
    return DetouringGraph(indices, blocks, tuple(edges), system.k)


def _cycle_dfs(dg: DetouringGraph, length: int, collect: bool, stop_at_first: bool):
    """Canonical enumeration of detouring cycles of exactly `length` vertices.

    Each cycle is generated once: its lowest vertex is the anchor, and of the
    two directions the one whose second vertex is smaller than its last is
    kept. Neighboring edges, including both closing joints, must carry
    different labels.
    """
    adj = dg.adjacency
    label_of: dict[tuple[int, int], int] = {}
    for i, j, label in dg.edges:
        label_of[(i, j)] = label
        label_of[(j, i)] = label
    count = 0
    cycles: list[tuple[int, ...]] = []

    def rec(anchor: int, path: list[int], labels: list[int]):
        nonlocal count
        if stop_at_first and count:
            return
        if len(path) == length:
            last = path[-1]
            closing = label_of.get((last, anchor))
            if (
                closing is not None
                and closing != labels[-1]
                and closing != labels[0]
                and path[1] < last
            ):
                count += 1
                if collect:
                    cycles.append(tuple(path))
            return
        for nxt, label in adj[path[-1]]:
            if nxt <= anchor or nxt in path:
                continue
            if labels and label == labels[-1]:
                continue
            path.append(nxt)
            labels.append(label)
            rec(anchor, path, labels)
            path.pop()
            labels.pop()
            if stop_at_first and count:
                return

    for anchor in range(dg.m):
        rec(anchor, [anchor], [])
        if stop_at_first and count:
            break
    return count, cycles


def count_detouring_cycles(
    dg: DetouringGraph, length: int, collect: bool = False
) -> tuple[int, list[tuple[int, ...]] | None]:
    """Exact count of detouring cycles with `length` vertices (always <= k^length)."""
    if length < 3:
        raise MinorforgeError(f"cycle length must be >= 3, got {length}")
    count, cycles = _cycle_dfs(dg, length, collect, stop_at_first=False)
    return count, (cycles if collect else None)


def _first_short_cycle(dg: DetouringGraph, max_length: int) -> tuple[int, ...] | None:
    for length in range(3, max_length + 1):
        _, cycles = _cycle_dfs(dg, length, collect=True, stop_at_first=True)
        if cycles:
            return cycles[0]
    return None


@dataclass(frozen=True)
class PruneResult:
    """Outcome of one seeded pruning run over a detouring graph."""

    selected: tuple[int, ...]  # positions into the input detouring graph
    block_ids: tuple[int, ...]  # the corresponding system block indices
    sampled: int  # kept by the random sampling step
    removed: int  # deleted by the cycle-removal loop
    probability: float
    seed: int


def prune_detouring(dg: DetouringGraph, max_cycle: int, seed: int) -> PruneResult:
    """Sample blocks with probability delta * k^(-(L-2)/(L-1)), then repeatedly
    remove the lowest-id vertex of the first short detouring cycle until none
    of size <= max_cycle remains. Deterministic given the seed."""
    if max_cycle < 3:
        raise MinorforgeError(f"max cycle size must be >= 3, got {max_cycle}")
    s = len(next(iter(dg.blocks))) if dg.blocks else 0
    if s < 2:
        return PruneResult((), (), 0, 0, 0.0, seed)
    delta = 1.0 / math.sqrt(8 * s * (s - 1))
    prob = delta * dg.k ** (-(max_cycle - 2) / (max_cycle - 1))
    rng = random.Random(seed)
    kept = [i for i in range(dg.m) if rng.random() < prob]
    sampled = len(kept)

    while True:
        sub = dg.induced(kept)
        cycle = _first_short_cycle(sub, max_cycle)
        if cycle is None:
            break
        victim = kept[min(cycle)]  # positions in `sub` map through sorted `kept`
        kept.remove(victim)

    for length in range(3, max_cycle + 1):
        count, _ = count_detouring_cycles(dg.induced(kept), length)
        assert count == 0, "pruning left a short detouring cycle"
    return PruneResult(
        tuple(kept),
        tuple(dg.block_ids[i] for i in kept),
        sampled,
        sampled - len(kept),
        prob,
        seed,
    )


def prune_detouring_best(
    dg: DetouringGraph, max_cycle: int, seed: int, tries: int = 32
) -> PruneResult:
    """Best of `tries` consecutive seeds by surviving-set size (ties: first)."""
    best: PruneResult | None = None
    for offset in range(tries):
        result = prune_detouring(dg, max_cycle, seed + offset)
        if best is None or len(result.selected) > len(best.selected):
            best = result
    return best


def star_instance(k: int) -> GroupedInstance:
    """Theorem-3.4-style instance: 3-terminal star gadget over every block of a
    (3,2)-Steiner system; all terminal distances equal 2."""
    try:
        system = build_steiner(k, 3)
    except (InfeasibleError, UnsupportedParametersError) as exc:
        raise UnsupportedParametersError(f"k={k} admits no (3,2)-SS: {exc}") from exc
    return blackbox_reduce(star_gadget(3), system)


def tree_instance(
    h: int, max_cycle: int, seed: int, k: int | None = None, tries: int = 32
) -> GroupedInstance:
    """Theorem-3.5-style instance: height-h ternary-tree gadget over a pruned
    block subset with no detouring cycle of size <= max_cycle.

    k defaults to (3^h)^2, the affine-plane ground-set size for s = 3^h.
    """
    s = 3**h
    if k is None:
        k = s * s
    try:
        system = build_steiner(k, s)
    except (InfeasibleError, UnsupportedParametersError) as exc:
        raise UnsupportedParametersError(
            f"k={k} admits no ({s},2)-SS: {exc}"
        ) from exc
    dg = detouring_graph(system)
    pruned = prune_detouring_best(dg, max_cycle, seed, tries)
    return blackbox_reduce(ternary_tree_gadget(h), system, pruned.block_ids)


def classify_edge_group(
    instance: GroupedInstance, minor: Minor, edge: tuple[int, int]
) -> int:
    """The unique group intersecting both endpoint super-nodes of a minor edge.

    Zero or multiple qualifying groups falsify the uniqueness lemma for
    black-box instances and raise LemmaViolationError.
    """
    u1, u2 = edge
    s1 = minor.partition.groups[u1]
    s2 = minor.partition.groups[u2]
    hits = [
        i
        for i, group in enumerate(instance.groups)
        if (s1 & group.vertex_set) and (s2 & group.vertex_set)
    ]
    if len(hits) != 1:
        raise LemmaViolationError(
            f"edge {edge} intersects groups {hits}; exactly one expected"
        )
    return hits[0]


def instance_groups_for_file(instance: GroupedInstance) -> dict[int, tuple[int, ...]]:
    """Group annotation lines: every vertex of each embedded gadget copy."""
    return {
        i: tuple(sorted(group.vertex_set)) for i, group in enumerate(instance.groups)
    }


def instance_from_document(graph: Graph, groups: dict[int, tuple[int, ...]]) -> GroupedInstance:
    """Rebuild a GroupedInstance from a parsed graph file with `g` lines.

    The gadget family is inferred from the (s, q) signature: q = 1 means a
    star, q = (3^h - 1)/2 with s = 3^h means a height-h ternary tree.
    """
    parsed: list[InstanceGroup] = []
    for gid in sorted(groups):
        members = groups[gid]
        terms = tuple(sorted(v for v in members if graph.is_terminal(v)))
        nonterms = tuple(sorted(v for v in members if not graph.is_terminal(v)))
        parsed.append(InstanceGroup(tuple(t + 1 for t in terms), terms, nonterms))
    if not parsed:
        raise MinorforgeError("no group annotations in file")
    s = len(parsed[0].terminal_vertices)
    q = len(parsed[0].non_terminals)
    if q == 1:
        gadget = star_gadget(s)
    else:
        height = round(math.log(s, 3))
        if 3**height == s and q == (s - 1) // 2:
            gadget = ternary_tree_gadget(height)
        else:
            # metadata-only carrier with the right (s, q) signature
            chain = Graph.build(
                s + q,
                [(v, v + 1, Fraction(1)) for v in range(s + q - 1)],
                range(s),
            )
            gadget = Gadget(chain, "custom")
    return GroupedInstance(graph, tuple(parsed), gadget)
