"""Upper-bound constructions for general graphs: terminal path covers, the
greedy spanner on the terminal metric, the degree-two contraction sparsifier,
and the 2-sum composition of partial results."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

from .errors import BadCorrespondenceError, MinorforgeError, UnreachableError
from .graph import Graph, Path, dijkstra, worker_count
from .minors import Minor, PartialPartition
from .rational import Length, is_finite


@dataclass(frozen=True)
class TerminalMetric:
    """The complete graph on terminals weighted by exact source distances,
    with each metric edge backed by its tie-broken shortest path."""

    graph: Graph
    weights: dict[tuple[int, int], Fraction]  # keyed (t, s) with t < s
    paths: dict[tuple[int, int], Path]  # oriented t -> s

    def weight(self, t: int, s: int) -> Fraction:
        return self.weights[(min(t, s), max(t, s))]


@dataclass(frozen=True)
class TerminalPathCover:
    """A set of source shortest paths covering the terminals with certified
    stretch `alpha` on the union subgraph. `declared_bound` is the path-count
    bound claimed by the construction, when one exists."""

    paths: tuple[Path, ...]
    alpha: Fraction
    declared_bound: int | None = None

    def covered_vertices(self) -> set[int]:
        out: set[int] = set()
        for path in self.paths:
            out.update(path.vertices)
        return out


def terminal_metric(graph: Graph) -> TerminalMetric:
    weights: dict[tuple[int, int], Fraction] = {}
    paths: dict[tuple[int, int], Path] = {}
    for t in graph.terminals:
        tree = dijkstra(graph, t)
        for s in graph.terminals:
            if s <= t:
                continue
            if tree.dist[s] is None:
                raise UnreachableError(f"terminals {t}, {s} are disconnected")
            weights[(t, s)] = tree.dist[s]
            paths[(t, s)] = tree.path_to(graph, s)
    return TerminalMetric(graph, weights, paths)


def cover_subgraph(graph: Graph, paths: Sequence[Path]) -> Graph:
    """Union of the cover paths as a subgraph on the same vertex ids."""
    edges = {}
    for path in paths:
        for u, v in path.edge_pairs():
            edges[(u, v)] = graph.edge_length(u, v)
    return Graph.build(
        graph.n, [(u, v, l) for (u, v), l in edges.items()], graph.terminals
    )


@dataclass(frozen=True)
class CoverCheck:
    ok: bool
    max_ratio: Fraction
    problems: tuple[str, ...]


def verify_cover(graph: Graph, cover: TerminalPathCover) -> CoverCheck:
    """Check the cover invariant exactly: terminals covered, every path a
    shortest path, union-subgraph stretch at most alpha."""
    problems: list[str] = []
    covered = cover.covered_vertices()
    for t in graph.terminals:
        if t not in covered:
            problems.append(f"terminal {t} not covered")
    for path in cover.paths:
        if len(path.vertices) == 1:
            continue
        tree = dijkstra(graph, path.start)
        if tree.dist[path.end] != path.length:
            problems.append(
                f"path {path.vertices} is not shortest ({path.length} vs {tree.dist[path.end]})"
            )
    max_ratio = Fraction(1)
    if not problems:
        union = cover_subgraph(graph, cover.paths)
        for t in graph.terminals:
            base = dijkstra(graph, t).dist
            in_union = dijkstra(union, t).dist
            for s in graph.terminals:
                if s <= t or base[s] is None:
                    continue
                du = in_union[s]
                if du is None:
                    problems.append(f"pair ({t}, {s}) disconnected in the cover")
                    continue
                ratio = du / base[s]
                max_ratio = max(max_ratio, ratio)
        if max_ratio > cover.alpha:
            problems.append(f"stretch {max_ratio} exceeds certificate {cover.alpha}")
    return CoverCheck(not problems, max_ratio, tuple(problems))


def _certified(graph: Graph, cover: TerminalPathCover) -> TerminalPathCover:
    check = verify_cover(graph, cover)
    if not check.ok:
        raise MinorforgeError(f"cover certificate failed: {'; '.join(check.problems)}")
    return cover


def trivial_tpc(graph: Graph) -> TerminalPathCover:
    """All terminal-pair shortest paths; stretch exactly 1, at most C(k,2) paths."""
    if len(graph.terminals) == 1:
        only = Path((graph.terminals[0],), Fraction(0))
        return TerminalPathCover((only,), Fraction(1), 1)
    metric = terminal_metric(graph)
    paths = tuple(metric.paths[pair] for pair in sorted(metric.paths))
    cover = TerminalPathCover(paths, Fraction(1), comb(len(graph.terminals), 2))
    return _certified(graph, cover)


def greedy_spanner(metric: TerminalMetric, q: int) -> list[tuple[int, int]]:
    """Classical greedy (2q-1)-spanner of the terminal metric.

    Edges are scanned in nondecreasing (weight, endpoints) order; an edge
    joins the spanner iff the current spanner distance exceeds (2q-1) times
    its weight.
    """
    if q < 1:
        raise MinorforgeError(f"need q >= 1, got {q}")
    factor = 2 * q - 1
    order = sorted((w, t, s) for (t, s), w in metric.weights.items())
    adjacency: dict[int, list[tuple[int, Fraction]]] = {
        t: [] for t in metric.graph.terminals
    }
    spanner: list[tuple[int, int]] = []
    for w, t, s in order:
        if _metric_distance(adjacency, t, s, cap=factor * w) is None:
            spanner.append((t, s))
            adjacency[t].append((s, w))
            adjacency[s].append((t, w))
    return spanner


def _metric_distance(
    adjacency: Mapping[int, list[tuple[int, Fraction]]],
    source: int,
    target: int,
    cap: Fraction,
) -> Fraction | None:
    """Distance in the partial spanner, or None if it exceeds `cap`."""
    dist = {source: Fraction(0)}
    heap = [(Fraction(0), source)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        if x == target:
            return d
        for y, w in adjacency[x]:
            cand = d + w
            if cand > cap:
                continue
            if y not in dist or cand < dist[y]:
                dist[y] = cand
                heapq.heappush(heap, (cand, y))
    return None


def spanner_tpc(graph: Graph, q: int) -> TerminalPathCover:
    """Back-map the spanner edges to their source shortest paths; the cover
    certificate (2q-1) is verified exactly before returning."""
    if len(graph.terminals) == 1:
        only = Path((graph.terminals[0],), Fraction(0))
        return TerminalPathCover((only,), Fraction(2 * q - 1), 1)
    metric = terminal_metric(graph)
    edges = greedy_spanner(metric, q)
    paths = tuple(metric.paths[(min(t, s), max(t, s))] for t, s in sorted(edges))
    cover = TerminalPathCover(paths, Fraction(2 * q - 1), None)
    return _certified(graph, cover)


def minor_sparsifier(graph: Graph, cover: TerminalPathCover) -> Minor:
    """Union the cover paths, then repeatedly contract an edge at the
    lowest-id degree-two non-terminal, assigning the surviving edge the exact
    current distance between the two neighbors. Terminal distances of the
    union subgraph are preserved exactly."""
    adjacency: dict[int, dict[int, Fraction]] = {}
    for path in cover.paths:
        for v in path.vertices:
            adjacency.setdefault(v, {})
        for u, v in path.edge_pairs():
            length = graph.edge_length(u, v)
            if length is None or not is_finite(length):
                raise MinorforgeError(f"cover path uses a non-edge ({u}, {v})")
            adjacency[u][v] = length
            adjacency[v][u] = length
    if not adjacency:
        raise MinorforgeError("cover has no vertices")

    groups: dict[int, set[int]] = {v: {v} for v in adjacency}

    def current_distance(source: int, target: int) -> Fraction:
        dist = {source: Fraction(0)}
        heap = [(Fraction(0), source)]
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist[x]:
                continue
            if x == target:
                return d
            for y, w in adjacency[x].items():
                cand = d + w
                if y not in dist or cand < dist[y]:
                    dist[y] = cand
                    heapq.heappush(heap, (cand, y))
        raise MinorforgeError("contraction disconnected the cover graph")

    while True:
        victim = None
        for v in sorted(adjacency):
            if not graph.is_terminal(v) and len(adjacency[v]) == 2:
                victim = v
                break
        if victim is None:
            break
        u, w = sorted(adjacency[victim])
        du_w = current_distance(u, w)
        del adjacency[u][victim]
        del adjacency[w][victim]
        del adjacency[victim]
        adjacency[u][w] = du_w
        adjacency[w][u] = du_w
        groups[u] |= groups.pop(victim)

    ordered = sorted(groups.values(), key=min)
    partition = PartialPartition.from_sets(ordered)
    index_of: dict[int, int] = {}
    for i, group in enumerate(ordered):
        for v in group:
            index_of[v] = i
    edges = []
    for u in adjacency:
        for w, length in adjacency[u].items():
            if u < w:
                edges.append((index_of[u], index_of[w], length))
    terminals = sorted(
        i for i, group in enumerate(ordered) if group & graph.terminal_set
    )
    result = Graph.build(len(ordered), edges, terminals)
    return Minor(graph, partition, result)


def phi_merge(first: Graph, second: Graph, phi: Mapping[int, int]) -> Graph:
    """2-sum: identify terminal phi-pairs, keep the minimum length on merged
    edges, and take the union otherwise. The second graph's unmatched vertices
    are appended after the first graph's ids."""
    for a, b in phi.items():
        if not first.is_terminal(a):
            raise BadCorrespondenceError(f"{a} is not a terminal of the first graph")
        if not second.is_terminal(b):
            raise BadCorrespondenceError(f"{b} is not a terminal of the second graph")
    if len(set(phi.values())) != len(phi):
        raise BadCorrespondenceError("correspondence is not injective")

    inverse = {b: a for a, b in phi.items()}
    mapping: dict[int, int] = {}
    next_id = first.n
    for v in range(second.n):
        if v in inverse:
            mapping[v] = inverse[v]
        else:
            mapping[v] = next_id
            next_id += 1

    edges: dict[tuple[int, int], Length] = {
        (e.u, e.v): e.length for e in first.edges
    }
    for e in second.edges:
        a, b = mapping[e.u], mapping[e.v]
        key = (min(a, b), max(a, b))
        if key in edges:
            edges[key] = min(edges[key], e.length)
        else:
            edges[key] = e.length
    terminals = set(first.terminals) | {mapping[t] for t in second.terminals}
    return Graph.build(next_id, [(u, v, l) for (u, v), l in edges.items()], terminals)


def count_branching_vertices(p1: Path, p2: Path) -> int:
    """Vertices shared by both paths where the union of the two paths has
    degree above two."""
    union: dict[int, set[int]] = {}
    for path in (p1, p2):
        vs = path.vertices
        for a, b in zip(vs, vs[1:]):
            union.setdefault(a, set()).add(b)
            union.setdefault(b, set()).add(a)
    shared = set(p1.vertices) & set(p2.vertices)
    return sum(1 for v in shared if len(union.get(v, ())) > 2)
