"""Weighted undirected graphs with exact rational lengths and consistent shortest paths.

Shortest paths are made unique by a deterministic perturbation: candidates are
compared first by exact length, then by preferring the path that uses the
lowest-indexed edge in the symmetric difference of their edge sets. The
perturbation is direction-symmetric and additive over concatenation, which
gives the two properties the rest of the package relies on:

* the chosen path for a vertex pair does not depend on query direction, and
* every subpath of a chosen path is the chosen path for its endpoints.

Edges flagged with the symbolic infinity length never appear on any returned
shortest path; they exist only to support planar triangulation.
"""

from __future__ import annotations

import heapq
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import MinorforgeError, UnreachableError
from .rational import INF, Length, is_finite

ZERO = Fraction(0)


def worker_count() -> int:
    """Parallelism cap taken from MINORFORGE_THREADS; defaults to 1."""
    raw = os.environ.get("MINORFORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Edge:
    """Undirected edge with u < v and a positive exact length (or INF)."""

    u: int
    v: int
    length: Length

    def other(self, vertex: int) -> int:
        return self.v if vertex == self.u else self.u


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph on dense vertex ids 0..n-1 with terminals.

    `edges` is sorted by (u, v); the position of an edge in that tuple is its
    edge id, which the tie-breaking scheme and the text format both use.
    """

    n: int
    edges: tuple[Edge, ...]
    terminals: tuple[int, ...]

    @classmethod
    def build(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, Length]],
        terminals: Iterable[int],
    ) -> "Graph":
        normalized = []
        for u, v, length in edges:
            if u == v:
                raise MinorforgeError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            normalized.append(Edge(u, v, length))
        normalized.sort(key=lambda e: (e.u, e.v))
        return cls(n, tuple(normalized), tuple(sorted(set(terminals))))

    def __post_init__(self) -> None:
        if self.n < 1:
            raise MinorforgeError("graph needs at least one vertex")
        if not self.terminals:
            raise MinorforgeError("terminal set must be nonempty")
        for t in self.terminals:
            if not 0 <= t < self.n:
                raise MinorforgeError(f"terminal {t} out of range")
        seen = set()
        for edge in self.edges:
            if not (0 <= edge.u < edge.v < self.n):
                raise MinorforgeError(f"bad edge endpoints ({edge.u}, {edge.v})")
            if (edge.u, edge.v) in seen:
                raise MinorforgeError(f"parallel edge ({edge.u}, {edge.v})")
            seen.add((edge.u, edge.v))
            if is_finite(edge.length):
                if not isinstance(edge.length, Fraction):
                    raise MinorforgeError("edge lengths must be Fraction or INF")
                if edge.length <= 0:
                    raise MinorforgeError(f"non-positive length on ({edge.u}, {edge.v})")

    @cached_property
    def k(self) -> int:
        return len(self.terminals)

    @cached_property
    def terminal_set(self) -> frozenset[int]:
        return frozenset(self.terminals)

    def is_terminal(self, vertex: int) -> bool:
        return vertex in self.terminal_set

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, Length, int], ...], ...]:
        """Per-vertex tuples of (neighbor, length, edge_id), INF edges included."""
        adj: list[list[tuple[int, Length, int]]] = [[] for _ in range(self.n)]
        for idx, edge in enumerate(self.edges):
            adj[edge.u].append((edge.v, edge.length, idx))
            adj[edge.v].append((edge.u, edge.length, idx))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(e.u, e.v): i for i, e in enumerate(self.edges)}

    def edge_id(self, u: int, v: int) -> int | None:
        if u > v:
            u, v = v, u
        return self.edge_index.get((u, v))

    def edge_length(self, u: int, v: int) -> Length | None:
        idx = self.edge_id(u, v)
        return None if idx is None else self.edges[idx].length

    def degree(self, vertex: int) -> int:
        return len(self.adjacency[vertex])

    def finite_components(self) -> list[list[int]]:
        """Connected components using finite-length edges only."""
        seen = [False] * self.n
        out: list[list[int]] = []
        for start in range(self.n):
            if seen[start]:
                continue
            seen[start] = True
            comp = [start]
            stack = [start]
            while stack:
                x = stack.pop()
                for y, length, _ in self.adjacency[x]:
                    if is_finite(length) and not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        stack.append(y)
            out.append(sorted(comp))
        return out

    def induced_connected(self, vertices: Iterable[int]) -> bool:
        """True iff the finite-edge subgraph induced by `vertices` is connected."""
        vset = set(vertices)
        if not vset:
            return False
        start = next(iter(vset))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y, length, _ in self.adjacency[x]:
                if y in vset and is_finite(length) and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == vset


@dataclass(frozen=True)
class Path:
    """A simple path given as a vertex sequence plus its exact total length."""

    vertices: tuple[int, ...]
    length: Fraction

    def __post_init__(self) -> None:
        if not self.vertices:
            raise MinorforgeError("empty path")
        if len(set(self.vertices)) != len(self.vertices):
            raise MinorforgeError("path repeats a vertex")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def reverse(self) -> "Path":
        return Path(tuple(reversed(self.vertices)), self.length)

    def edge_pairs(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(min(a, b), max(a, b)) for a, b in zip(vs, vs[1:])]

    def index_of(self, vertex: int) -> int:
        return self.vertices.index(vertex)


def path_from_vertices(graph: Graph, vertices: Sequence[int]) -> Path:
    """Build a Path, validating adjacency and summing exact edge lengths."""
    total = ZERO
    for a, b in zip(vertices, vertices[1:]):
        length = graph.edge_length(a, b)
        if length is None or not is_finite(length):
            raise MinorforgeError(f"vertices {a},{b} not joined by a finite edge")
        total += length
    return Path(tuple(vertices), total)


class PathCost:
    """Total order on paths: exact length, then lowest-differing-edge preference.

    Masks are bitsets over edge ids. Between equal-length candidates the one
    containing the smallest edge id in the symmetric difference wins, which is
    the deterministic analogue of perturbing edge i's length by -eps^(i+1).
    """

    __slots__ = ("length", "mask")

    def __init__(self, length: Fraction, mask: int) -> None:
        self.length = length
        self.mask = mask

    def extend(self, length: Length, edge_id: int) -> "PathCost":
        return PathCost(self.length + length, self.mask | (1 << edge_id))

    def __eq__(self, other) -> bool:
        return self.length == other.length and self.mask == other.mask

    def __lt__(self, other: "PathCost") -> bool:
        if self.length != other.length:
            return self.length < other.length
        if self.mask == other.mask:
            return False
        diff = self.mask ^ other.mask
        low = diff & -diff
        return bool(self.mask & low)

    def __repr__(self) -> str:
        return f"PathCost({self.length}, {bin(self.mask)})"


@dataclass
class ShortestPathTree:
    """Single-source result: exact distances, parent edges, perturbed costs."""

    source: int
    dist: list[Fraction | None]
    parent_edge: list[int | None]
    cost: list[PathCost | None]

    def path_to(self, graph: Graph, target: int) -> Path:
        if self.dist[target] is None:
            raise UnreachableError(f"no path from {self.source} to {target}")
        seq = [target]
        x = target
        while x != self.source:
            edge = graph.edges[self.parent_edge[x]]
            x = edge.other(x)
            seq.append(x)
        seq.reverse()
        return Path(tuple(seq), self.dist[target])


def dijkstra(graph: Graph, source: int) -> ShortestPathTree:
    """Tie-broken Dijkstra from `source`, skipping symbolic-infinity edges."""
    n = graph.n
    dist: list[Fraction | None] = [None] * n
    parent: list[int | None] = [None] * n
    best: list[PathCost | None] = [None] * n
    start = PathCost(ZERO, 0)
    best[source] = start
    dist[source] = ZERO
    heap: list[tuple[PathCost, int]] = [(start, source)]
    done = [False] * n
    while heap:
        cost, x = heapq.heappop(heap)
        if done[x] or cost != best[x]:
            continue
        done[x] = True
        for y, length, edge_id in graph.adjacency[x]:
            if not is_finite(length) or done[y]:
                continue
            cand = cost.extend(length, edge_id)
            if best[y] is None or cand < best[y]:
                best[y] = cand
                dist[y] = cand.length
                parent[y] = edge_id
                heapq.heappush(heap, (cand, y))
    return ShortestPathTree(source, dist, parent, best)


def shortest_path(graph: Graph, u: int, v: int) -> Path:
    """The unique tie-broken shortest path from u to v.

    The returned path is oriented from u; querying (v, u) yields the same
    path reversed. Raises UnreachableError when no path exists.
    """
    if not (0 <= u < graph.n and 0 <= v < graph.n):
        raise MinorforgeError(f"vertex out of range: {u}, {v}")
    if u == v:
        return Path((u,), ZERO)
    return dijkstra(graph, u).path_to(graph, v)


def single_source_distances(graph: Graph, source: int) -> list[Fraction | None]:
    return dijkstra(graph, source).dist


def terminal_distances(graph: Graph) -> dict[tuple[int, int], Fraction]:
    """Exact distances for every ordered terminal pair (zero diagonal).

    Raises UnreachableError if two terminals are disconnected. Sources are
    fanned out over MINORFORGE_THREADS workers.
    """
    terminals = graph.terminals

    def run(t: int) -> tuple[int, list[Fraction | None]]:
        return t, dijkstra(graph, t).dist

    workers = min(worker_count(), len(terminals))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = dict(pool.map(run, terminals))
    else:
        rows = dict(run(t) for t in terminals)

    out: dict[tuple[int, int], Fraction] = {}
    for t in terminals:
        for s in terminals:
            d = rows[t][s]
            if d is None:
                raise UnreachableError(f"terminals {t} and {s} are disconnected")
            out[(t, s)] = d
    return out


def dijkstra_on_adjacency(
    n: int,
    adjacency: Sequence[Sequence[tuple[int, Fraction, int]]],
    source: int,
) -> tuple[list[Fraction | None], list[tuple[int, int] | None]]:
    """Tie-broken Dijkstra over an explicit adjacency structure.

    Each adjacency entry is (neighbor, finite length, perturbation id); the
    perturbation ids play the role of edge ids and may repeat the ids of an
    underlying graph, e.g. after contractions. Returns distances and, per
    vertex, the (predecessor, perturbation id) pair that reached it.
    """
    dist: list[Fraction | None] = [None] * n
    parent: list[tuple[int, int] | None] = [None] * n
    best: list[PathCost | None] = [None] * n
    start = PathCost(ZERO, 0)
    best[source] = start
    dist[source] = ZERO
    heap: list[tuple[PathCost, int]] = [(start, source)]
    done = [False] * n
    while heap:
        cost, x = heapq.heappop(heap)
        if done[x] or cost != best[x]:
            continue
        done[x] = True
        for y, length, pid in adjacency[x]:
            if done[y]:
                continue
            cand = cost.extend(length, pid)
            if best[y] is None or cand < best[y]:
                best[y] = cand
                dist[y] = cand.length
                parent[y] = (x, pid)
                heapq.heappush(heap, (cand, y))
    return dist, parent
