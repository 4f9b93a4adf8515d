"""Terminal path covers, greedy spanner, the contraction sparsifier, 2-sums."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from math import comb

import pytest

from minorforge.errors import BadCorrespondenceError
from minorforge.graph import Graph, dijkstra, terminal_distances
from minorforge.lowerbound import star_instance
from minorforge.minors import validate_minor
from minorforge.sparsify import (
    TerminalPathCover,
    count_branching_vertices,
    cover_subgraph,
    greedy_spanner,
    minor_sparsifier,
    phi_merge,
    spanner_tpc,
    terminal_metric,
    trivial_tpc,
    verify_cover,
)
from minorforge.verify import distortion

from helpers import floyd_warshall, random_connected_graph, star_graph


def test_terminal_metric_star_instance_is_uniform():
    g = star_instance(7).graph
    metric = terminal_metric(g)
    assert len(metric.weights) == comb(7, 2)
    assert all(w == 2 for w in metric.weights.values())
    assert all(p.length == 2 and len(p.vertices) == 3 for p in metric.paths.values())


def test_terminal_metric_two_terminals():
    g = Graph.build(3, [(0, 1, Fraction(3)), (1, 2, Fraction(4))], [0, 2])
    metric = terminal_metric(g)
    assert metric.weights == {(0, 2): Fraction(7)}


def test_terminal_metric_triangle_inequality():
    rng = random.Random(2)
    for _ in range(10):
        g = random_connected_graph(rng, rng.randint(5, 14), 5, k=5)
        metric = terminal_metric(g)
        ts = g.terminals
        for a, b, c in combinations(ts, 3):
            assert metric.weight(a, c) <= metric.weight(a, b) + metric.weight(b, c)


def test_trivial_tpc_two_terminals():
    g = Graph.build(3, [(0, 1, Fraction(1)), (1, 2, Fraction(1))], [0, 2])
    cover = trivial_tpc(g)
    assert len(cover.paths) == 1
    assert cover.alpha == 1


def test_trivial_tpc_star_instance():
    g = star_instance(7).graph
    cover = trivial_tpc(g)
    assert len(cover.paths) == 21
    assert all(p.length == 2 for p in cover.paths)
    check = verify_cover(g, cover)
    assert check.ok and check.max_ratio == 1


def test_trivial_tpc_exact_on_random_graphs():
    rng = random.Random(6)
    for _ in range(8):
        g = random_connected_graph(rng, rng.randint(5, 16), 6, k=4)
        cover = trivial_tpc(g)
        union = cover_subgraph(g, cover.paths)
        dg = terminal_distances(g)
        du = terminal_distances(union)
        assert all(du[p] == dg[p] for p in dg)


def test_greedy_spanner_q1_keeps_generic_metric():
    g = star_instance(7).graph
    metric = terminal_metric(g)
    spanner = greedy_spanner(metric, 1)
    assert len(spanner) == comb(7, 2)


def test_greedy_spanner_uniform_metric_girth():
    # all-equal weights, q=2: any cycle of length <= 4 would have been
    # rejected when its last edge arrived
    g = star_instance(9).graph
    metric = terminal_metric(g)
    spanner = greedy_spanner(metric, 2)
    adj: dict[int, set[int]] = {t: set() for t in g.terminals}
    for t, s in spanner:
        adj[t].add(s)
        adj[s].add(t)
    # connectivity
    seen = {g.terminals[0]}
    stack = [g.terminals[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    assert seen == set(g.terminals)
    # girth > 4: no cycles on 3 or 4 vertices
    for a, b, c in combinations(g.terminals, 3):
        assert not (b in adj[a] and c in adj[b] and a in adj[c])
    for quad in combinations(g.terminals, 4):
        for perm in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 1, 3, 2)):
            cyc = [quad[i] for i in perm]
            if all(
                cyc[(i + 1) % 4] in adj[cyc[i]] for i in range(4)
            ):
                pytest.fail(f"4-cycle {cyc} in uniform-metric spanner")


@pytest.mark.parametrize("q", [1, 2, 3])
def test_greedy_spanner_stretch_bound(q):
    rng = random.Random(q * 17)
    for _ in range(6):
        g = random_connected_graph(rng, rng.randint(6, 16), 6, k=6)
        metric = terminal_metric(g)
        spanner = greedy_spanner(metric, q)
        adj: dict[int, list] = {t: [] for t in g.terminals}
        for t, s in spanner:
            w = metric.weight(t, s)
            adj[t].append((s, w))
            adj[s].append((t, w))
        # exact spanner distances by exhaustive relaxation
        for t in g.terminals:
            dist = {t: Fraction(0)}
            frontier = True
            while frontier:
                frontier = False
                for x in list(dist):
                    for y, w in adj[x]:
                        nd = dist[x] + w
                        if y not in dist or nd < dist[y]:
                            dist[y] = nd
                            frontier = True
            for s in g.terminals:
                if s == t:
                    continue
                assert dist[s] <= (2 * q - 1) * metric.weight(t, s)


def test_spanner_tpc_q1_equals_trivial():
    g = star_instance(7).graph
    assert spanner_tpc(g, 1).paths == trivial_tpc(g).paths


def test_spanner_tpc_q2_on_random_corpus():
    rng = random.Random(29)
    for _ in range(4):
        g = random_connected_graph(rng, 40, 30, k=12)
        cover = spanner_tpc(g, 2)
        trivial = trivial_tpc(g)
        assert len(cover.paths) <= len(trivial.paths)
        check = verify_cover(g, cover)
        assert check.ok
        assert check.max_ratio <= 3
        assert set(g.terminals) <= cover.covered_vertices()


def test_minor_sparsifier_path_collapses_to_edge():
    g = Graph.build(
        5,
        [(i, i + 1, Fraction(i + 1)) for i in range(4)],
        [0, 4],
    )
    m = minor_sparsifier(g, trivial_tpc(g))
    assert m.result.n == 2
    assert len(m.result.edges) == 1
    assert m.result.edges[0].length == Fraction(1 + 2 + 3 + 4)


def test_minor_sparsifier_star_instance():
    g = star_instance(7).graph
    m = minor_sparsifier(g, trivial_tpc(g))
    report = validate_minor(g, m)
    assert report.valid and report.domination_holds
    d = distortion(g, m)
    assert d.max_ratio == 1
    assert m.non_terminal_count <= 7


def test_minor_sparsifier_preserves_union_distances():
    rng = random.Random(31)
    for _ in range(10):
        g = random_connected_graph(rng, rng.randint(6, 20), 6, k=4)
        cover = trivial_tpc(g)
        union = cover_subgraph(g, cover.paths)
        m = minor_sparsifier(g, cover)
        du = terminal_distances(union)
        for t, s in combinations(g.terminals, 2):
            row = dijkstra(m.result, m.terminal_map[t]).dist
            assert row[m.terminal_map[s]] == du[(t, s)]


def test_cover_paths_pairwise_branching_bound():
    rng = random.Random(37)
    for _ in range(8):
        g = random_connected_graph(rng, rng.randint(8, 24), 8, k=5)
        cover = trivial_tpc(g)
        for p1, p2 in combinations(cover.paths, 2):
            assert count_branching_vertices(p1, p2) <= 2


def test_phi_merge_empty_correspondence_is_disjoint_union():
    g1 = star_graph(3)
    g2 = star_graph(3)
    merged = phi_merge(g1, g2, {})
    assert merged.n == g1.n + g2.n
    assert len(merged.edges) == len(g1.edges) + len(g2.edges)
    assert len(merged.terminals) == 6


def test_phi_merge_identity_takes_min_lengths():
    tri1 = Graph.build(
        3, [(0, 1, Fraction(5)), (1, 2, Fraction(2)), (0, 2, Fraction(3))], [0, 1, 2]
    )
    tri2 = Graph.build(
        3, [(0, 1, Fraction(1)), (1, 2, Fraction(9)), (0, 2, Fraction(3))], [0, 1, 2]
    )
    merged = phi_merge(tri1, tri2, {0: 0, 1: 1, 2: 2})
    assert merged.n == 3
    lengths = {(e.u, e.v): e.length for e in merged.edges}
    assert lengths == {(0, 1): 1, (1, 2): 2, (0, 2): 3}


def test_phi_merge_rejects_bad_correspondence():
    g1 = star_graph(3)
    g2 = star_graph(3)
    with pytest.raises(BadCorrespondenceError):
        phi_merge(g1, g2, {3: 0})  # hub is not a terminal
    with pytest.raises(BadCorrespondenceError):
        phi_merge(g1, g2, {0: 3})
    with pytest.raises(BadCorrespondenceError):
        phi_merge(g1, g2, {0: 0, 1: 0})


def _max_terminal_ratio(g_small: Graph, g_big: Graph, term_map: dict[int, int]):
    """Exhaustive distortion of g_small against g_big on mapped terminals."""
    fw_small = floyd_warshall(g_small)
    fw_big = floyd_warshall(g_big)
    worst = Fraction(1)
    dominates = True
    for t, s in combinations(sorted(term_map), 2):
        dh = fw_small[term_map[t]][term_map[s]]
        dg = fw_big[t][s]
        if dh < dg:
            dominates = False
        worst = max(worst, dh / dg)
    return worst, dominates


def test_phi_merge_composes_distortion():
    # side one: 4-star whose hub is contracted (distortion 2);
    # side two: 2-terminal path contracted to one exact edge (distortion 1);
    # the 2-sum of the contractions is a DAM of the 2-sum with max distortion.
    side1 = star_graph(4)
    h1 = Graph.build(
        4,
        [(0, 1, Fraction(2)), (0, 2, Fraction(2)), (0, 3, Fraction(2))],
        [0, 1, 2, 3],
    )
    side2 = Graph.build(
        4,
        [(0, 2, Fraction(1)), (2, 3, Fraction(1)), (3, 1, Fraction(1))],
        [0, 1],
    )
    h2 = Graph.build(2, [(0, 1, Fraction(3))], [0, 1])

    a1, dom1 = _max_terminal_ratio(h1, side1, {0: 0, 1: 1, 2: 2, 3: 3})
    a2, dom2 = _max_terminal_ratio(h2, side2, {0: 0, 1: 1})
    assert (a1, dom1) == (2, True)
    assert (a2, dom2) == (1, True)

    big = phi_merge(side1, side2, {0: 0, 1: 1})
    small = phi_merge(h1, h2, {0: 0, 1: 1})
    worst, dominates = _max_terminal_ratio(
        small, big, {t: t for t in big.terminals}
    )
    assert dominates
    assert worst <= max(a1, a2)
    assert worst == 2  # the star pair (2, 3) realizes the bound
