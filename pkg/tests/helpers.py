"""Shared test utilities: independent brute-force oracles and instance builders.

Oracles here deliberately avoid the package's Dijkstra/search code paths so
they can serve as cross-checks.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from minorforge.graph import Graph
from minorforge.rational import is_finite


def adjacency_map(graph: Graph) -> dict[int, list[tuple[int, Fraction]]]:
    adj: dict[int, list[tuple[int, Fraction]]] = {v: [] for v in range(graph.n)}
    for edge in graph.edges:
        if is_finite(edge.length):
            adj[edge.u].append((edge.v, edge.length))
            adj[edge.v].append((edge.u, edge.length))
    return adj


def all_simple_paths(graph: Graph, u: int, v: int, max_edges: int | None = None):
    """Yield every simple u-v path as (vertex tuple, exact length)."""
    adj = adjacency_map(graph)
    stack = [(u, (u,), Fraction(0))]
    while stack:
        x, seq, total = stack.pop()
        if x == v and len(seq) > 1:
            yield seq, total
            continue
        if x == v and u == v:
            yield seq, total
            continue
        if max_edges is not None and len(seq) - 1 >= max_edges:
            continue
        for y, length in adj[x]:
            if y not in seq:
                stack.append((y, seq + (y,), total + length))


def brute_shortest(graph: Graph, u: int, v: int):
    """(min length, list of all min-length simple paths) by full enumeration."""
    if u == v:
        return Fraction(0), [(u,)]
    best = None
    witnesses = []
    for seq, total in all_simple_paths(graph, u, v):
        if best is None or total < best:
            best, witnesses = total, [seq]
        elif total == best:
            witnesses.append(seq)
    return best, witnesses


def floyd_warshall(graph: Graph) -> list[list[Fraction | None]]:
    """All-pairs exact distances, independent of the package's Dijkstra."""
    n = graph.n
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for v in range(n):
        dist[v][v] = Fraction(0)
    for edge in graph.edges:
        if is_finite(edge.length):
            cur = dist[edge.u][edge.v]
            if cur is None or edge.length < cur:
                dist[edge.u][edge.v] = edge.length
                dist[edge.v][edge.u] = edge.length
    for m in range(n):
        for a in range(n):
            dam = dist[a][m]
            if dam is None:
                continue
            row_m = dist[m]
            row_a = dist[a]
            for b in range(n):
                dmb = row_m[b]
                if dmb is None:
                    continue
                cand = dam + dmb
                if row_a[b] is None or cand < row_a[b]:
                    row_a[b] = cand
    return dist


def star_graph(k: int) -> Graph:
    """Unweighted star: terminals 0..k-1 around non-terminal hub k."""
    edges = [(t, k, Fraction(1)) for t in range(k)]
    return Graph.build(k + 1, edges, range(k))


def random_connected_graph(
    rng: random.Random,
    n: int,
    extra_edges: int,
    k: int,
    unit_lengths: bool = False,
) -> Graph:
    """Random connected graph: spanning tree plus extra edges, k random terminals."""
    edges: dict[tuple[int, int], Fraction] = {}
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        a = order[rng.randrange(i)]
        b = order[i]
        key = (min(a, b), max(a, b))
        edges[key] = Fraction(1)
    candidates = [
        (a, b) for a, b in combinations(range(n), 2) if (a, b) not in edges
    ]
    rng.shuffle(candidates)
    for a, b in candidates[:extra_edges]:
        edges[(a, b)] = Fraction(1)
    if not unit_lengths:
        for key in edges:
            edges[key] = Fraction(rng.randint(1, 60), rng.randint(1, 6))
    terminals = rng.sample(range(n), k)
    return Graph.build(n, [(a, b, l) for (a, b), l in edges.items()], terminals)


def random_valid_partition(rng: random.Random, graph: Graph, delete_prob: float = 0.3):
    """A random valid partial partition: grow connected groups from terminals,
    then scatter leftover non-terminals into fresh singleton-seeded groups or
    delete them."""
    from minorforge.minors import PartialPartition

    adj = adjacency_map(graph)
    assigned: dict[int, int] = {}
    groups: list[set[int]] = []
    for t in graph.terminals:
        groups.append({t})
        assigned[t] = len(groups) - 1

    frontier = list(graph.terminals)
    rng.shuffle(frontier)
    while frontier:
        x = frontier.pop()
        gid = assigned[x]
        for y, _ in adj[x]:
            if y in assigned or graph.is_terminal(y):
                continue
            if rng.random() < 0.5:
                groups[gid].add(y)
                assigned[y] = gid
                frontier.append(y)

    for v in range(graph.n):
        if v in assigned or graph.is_terminal(v):
            continue
        if rng.random() < delete_prob:
            continue
        groups.append({v})
        assigned[v] = len(groups) - 1
    return PartialPartition.from_sets(groups)
