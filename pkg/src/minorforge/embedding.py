"""Planar embeddings as rotation systems, face tracing, and triangulation.

A rotation system lists each vertex's incident edge ids in cyclic order. Face
orbits follow the next-after-reversal rule: arriving at v along edge e, leave
along the rotation successor of e at v. An embedding is accepted as planar
when every connected component satisfies Euler's formula. Triangulation chords
carry the symbolic infinity length, so they shape faces and separators but
never appear on shortest paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import MinorforgeError, NotPlanarError
from .graph import Edge, Graph
from .rational import INF, Length

Dart = tuple[int, int]  # (tail vertex, edge id)


def _trace_faces(
    n: int, edges: Sequence[tuple[int, int, Length]], rotations: Sequence[Sequence[int]]
) -> list[list[Dart]]:
    position: list[dict[int, int]] = [
        {e: i for i, e in enumerate(rotations[v])} for v in range(n)
    ]

    def other(eid: int, v: int) -> int:
        u, w, _ = edges[eid]
        return w if v == u else u

    faces: list[list[Dart]] = []
    seen: set[Dart] = set()
    for v in range(n):
        for eid in rotations[v]:
            dart = (v, eid)
            if dart in seen:
                continue
            face: list[Dart] = []
            while dart not in seen:
                seen.add(dart)
                face.append(dart)
                tail, e = dart
                head = other(e, tail)
                rot = rotations[head]
                nxt = rot[(position[head][e] + 1) % len(rot)]
                dart = (head, nxt)
            faces.append(face)
    return faces


def _check_embedding(
    n: int, edges: Sequence[tuple[int, int, Length]], rotations: Sequence[Sequence[int]]
) -> None:
    incident: list[set[int]] = [set() for _ in range(n)]
    for eid, (u, v, _) in enumerate(edges):
        incident[u].add(eid)
        incident[v].add(eid)
    for v in range(n):
        rot = tuple(rotations[v])
        if len(set(rot)) != len(rot) or set(rot) != incident[v]:
            raise NotPlanarError(
                f"rotation at vertex {v} is not a permutation of its incident edges"
            )

    # Euler's formula per connected component (isolated vertices are trivially fine)
    comp = list(range(n))

    def find(x: int) -> int:
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for u, v, _ in edges:
        comp[find(u)] = find(v)
    faces = _trace_faces(n, edges, rotations)
    face_comp: dict[int, int] = {}
    for face in faces:
        root = find(face[0][0])
        face_comp[root] = face_comp.get(root, 0) + 1
    vertex_count: dict[int, int] = {}
    edge_count: dict[int, int] = {}
    for v in range(n):
        vertex_count[find(v)] = vertex_count.get(find(v), 0) + 1
    for u, v, _ in edges:
        edge_count[find(u)] = edge_count.get(find(u), 0) + 1
    for root, nc in vertex_count.items():
        mc = edge_count.get(root, 0)
        if mc == 0:
            continue
        fc = face_comp.get(root, 0)
        if nc - mc + fc != 2:
            raise NotPlanarError(
                f"component of vertex {root} fails Euler check: "
                f"V={nc}, E={mc}, F={fc}"
            )


@dataclass(frozen=True)
class EmbeddedPlanarGraph:
    """A graph together with a validated planar rotation system."""

    graph: Graph
    rotations: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rotations) != self.graph.n:
            raise NotPlanarError("one rotation per vertex required")
        _check_embedding(
            self.graph.n,
            [(e.u, e.v, e.length) for e in self.graph.edges],
            self.rotations,
        )

    def faces(self) -> list[list[Dart]]:
        return _trace_faces(
            self.graph.n,
            [(e.u, e.v, e.length) for e in self.graph.edges],
            self.rotations,
        )

    def is_triangulated(self) -> bool:
        fs = self.faces()
        return bool(fs) and all(len(f) == 3 for f in fs)


def build_embedded(
    n: int,
    edges: Iterable[tuple[int, int, Length]],
    terminals: Iterable[int],
    rotations_by_pairs: Sequence[Sequence[tuple[int, int]]],
) -> EmbeddedPlanarGraph:
    """Construct from rotations given as neighbor pairs instead of edge ids."""
    graph = Graph.build(n, edges, terminals)
    rot_ids = []
    for v in range(n):
        ids = []
        for a, b in rotations_by_pairs[v]:
            eid = graph.edge_id(a, b)
            if eid is None:
                raise NotPlanarError(f"rotation at {v} names missing edge ({a}, {b})")
            ids.append(eid)
        rot_ids.append(tuple(ids))
    return EmbeddedPlanarGraph(graph, tuple(rot_ids))


def triangulate(eg: EmbeddedPlanarGraph) -> EmbeddedPlanarGraph:
    """Add symbolic-infinity chords until every face is a triangle.

    Each face is fanned from its lowest-id corner whose chords do not
    duplicate existing edges (the next corner is tried otherwise); chords are
    inserted one at a time between the two corners' outgoing edges, which
    splits the face in two and keeps the rotation system consistent.
    """
    n = eg.graph.n
    edges: list[tuple[int, int, Length]] = [
        (e.u, e.v, e.length) for e in eg.graph.edges
    ]
    rotations: list[list[int]] = [list(r) for r in eg.rotations]
    present = {(min(u, v), max(u, v)) for u, v, _ in edges}

    safety = 3 * n + len(edges) + 8
    while safety:
        safety -= 1
        faces = _trace_faces(n, edges, rotations)
        target = next((f for f in faces if len(f) > 3), None)
        if target is None:
            break
        length = len(target)
        corners = sorted(range(length), key=lambda i: (target[i][0], i))
        inserted = False
        for i in corners:
            a, out_a = target[i]
            for offset in range(2, length - 1):
                j = (i + offset) % length
                b, out_b = target[j]
                key = (min(a, b), max(a, b))
                if a == b or key in present:
                    continue
                chord = len(edges)
                edges.append((a, b, INF))
                present.add(key)
                rotations[a].insert(rotations[a].index(out_a), chord)
                rotations[b].insert(rotations[b].index(out_b), chord)
                inserted = True
                break
            if inserted:
                break
        if not inserted:
            raise NotPlanarError(
                f"face {[d[0] for d in target]} admits no triangulation chord"
            )
    if not safety:
        raise NotPlanarError("triangulation did not converge")
    return _rebuild(n, edges, rotations, eg.graph.terminals)


def _rebuild(
    n: int,
    edges: Sequence[tuple[int, int, Length]],
    rotations: Sequence[Sequence[int]],
    terminals: Iterable[int],
) -> EmbeddedPlanarGraph:
    """Renumber working edges into canonical Graph order and remap rotations."""
    graph = Graph.build(n, edges, terminals)
    remap = {}
    for old, (u, v, _) in enumerate(edges):
        remap[old] = graph.edge_id(u, v)
    rot = tuple(tuple(remap[e] for e in rotations[v]) for v in range(n))
    return EmbeddedPlanarGraph(graph, rot)


def induced_embedding(
    eg: EmbeddedPlanarGraph, keep: Iterable[int], terminals: Iterable[int]
) -> tuple[EmbeddedPlanarGraph, list[int]]:
    """The embedded subgraph on `keep`, relabeled densely.

    Returns the new embedding and the old id of each new vertex. `terminals`
    are given in old ids and must lie inside `keep`.
    """
    old_ids = sorted(set(keep))
    renum = {old: new for new, old in enumerate(old_ids)}
    kept = set(old_ids)
    edges = []
    edge_renum: dict[int, int] = {}
    for eid, edge in enumerate(eg.graph.edges):
        if edge.u in kept and edge.v in kept:
            edge_renum[eid] = len(edges)
            edges.append((renum[edge.u], renum[edge.v], edge.length))
    rotations = []
    for old in old_ids:
        rotations.append(
            [edge_renum[e] for e in eg.rotations[old] if e in edge_renum]
        )
    sub = _rebuild(
        len(old_ids), edges, rotations, sorted(renum[t] for t in terminals)
    )
    return sub, old_ids


def grid_embedding(
    rows: int,
    cols: int,
    terminals: Iterable[int],
    length: Fraction = Fraction(1),
) -> EmbeddedPlanarGraph:
    """Unit-length rows x cols grid with the natural embedding.

    Vertex (i, j) is i*cols + j; each rotation lists the east, north, west,
    south neighbors counterclockwise.
    """
    if rows < 1 or cols < 1:
        raise MinorforgeError("grid needs positive dimensions")
    n = rows * cols

    def vid(i: int, j: int) -> int:
        return i * cols + j

    edges = []
    for i in range(rows):
        for j in range(cols):
            if j + 1 < cols:
                edges.append((vid(i, j), vid(i, j + 1), length))
            if i + 1 < rows:
                edges.append((vid(i, j), vid(i + 1, j), length))
    rotations = []
    for i in range(rows):
        for j in range(cols):
            order = []
            if j + 1 < cols:
                order.append((vid(i, j), vid(i, j + 1)))  # east
            if i > 0:
                order.append((vid(i, j), vid(i - 1, j)))  # north
            if j > 0:
                order.append((vid(i, j), vid(i, j - 1)))  # west
            if i + 1 < rows:
                order.append((vid(i, j), vid(i + 1, j)))  # south
            rotations.append(order)
    return build_embedded(n, edges, terminals, rotations)


def wheel_embedding(
    spokes: int, terminals: Iterable[int], length: Fraction = Fraction(1)
) -> EmbeddedPlanarGraph:
    """Wheel: hub 0 joined to a cycle 1..spokes; all inner faces are triangles."""
    if spokes < 3:
        raise MinorforgeError("wheel needs at least 3 rim vertices")
    n = spokes + 1
    edges = []
    for i in range(1, spokes + 1):
        edges.append((0, i, length))
        edges.append((i, i % spokes + 1, length))
    rotations: list[list[tuple[int, int]]] = [
        [(0, i) for i in range(1, spokes + 1)]
    ]
    for i in range(1, spokes + 1):
        prev = (i - 2) % spokes + 1
        nxt = i % spokes + 1
        rotations.append([(i, nxt), (i, 0), (i, prev)])
    return build_embedded(n, edges, terminals, rotations)
