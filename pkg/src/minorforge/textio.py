"""Line-based text formats.

Graph files ('#' starts a comment anywhere):

    graph <n> <m> <k>
    t <vertex>                      one per terminal
    e <u> <v> <num>/<den>           one per edge; 'inf' marks a triangulation chord
    g <group-id> <vertex...>        optional group annotations (instances, partitions)
    r <vertex> <edge-id...>         optional rotation lines for embedded graphs

Steiner system files:

    ss <k> <s>
    b <e1> ... <es>                 one per block, elements from 1..k

Terminal path cover files:

    tpc <paths> <alpha-num>/<alpha-den>
    p <v1> ... <vj>                 one per path
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from .errors import FormatError
from .graph import Graph, Path, path_from_vertices
from .rational import INF, Length, format_fraction, is_finite, parse_fraction


@dataclass
class GraphDocument:
    """A parsed graph file: the graph plus any annotation sections."""

    graph: Graph
    groups: dict[int, tuple[int, ...]] | None = None
    rotations: tuple[tuple[int, ...], ...] | None = None


def _clean_lines(text: str) -> list[list[str]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def _format_length(length: Length) -> str:
    return "inf" if not is_finite(length) else format_fraction(length)


def _parse_length(token: str) -> Length:
    if token == "inf":
        return INF
    return parse_fraction(token)


def dumps_graph(
    graph: Graph,
    groups: dict[int, Sequence[int]] | None = None,
    rotations: Sequence[Sequence[int]] | None = None,
    comments: Iterable[str] = (),
) -> str:
    out = io.StringIO()
    for comment in comments:
        out.write(f"# {comment}\n")
    out.write(f"graph {graph.n} {len(graph.edges)} {len(graph.terminals)}\n")
    for t in graph.terminals:
        out.write(f"t {t}\n")
    for edge in graph.edges:
        out.write(f"e {edge.u} {edge.v} {_format_length(edge.length)}\n")
    if groups is not None:
        for gid in sorted(groups):
            members = " ".join(str(v) for v in groups[gid])
            out.write(f"g {gid} {members}\n")
    if rotations is not None:
        for v, rot in enumerate(rotations):
            ids = " ".join(str(e) for e in rot)
            out.write(f"r {v} {ids}\n".rstrip() + "\n")
    return out.getvalue()


def loads_graph(text: str) -> GraphDocument:
    rows = _clean_lines(text)
    if not rows or rows[0][0] != "graph":
        raise FormatError("missing 'graph n m k' header")
    try:
        n, m, k = (int(x) for x in rows[0][1:4])
    except (ValueError, IndexError) as exc:
        raise FormatError("bad graph header") from exc

    terminals: list[int] = []
    edges: list[tuple[int, int, Length]] = []
    groups: dict[int, tuple[int, ...]] = {}
    rotations: dict[int, tuple[int, ...]] = {}
    for row in rows[1:]:
        tag, rest = row[0], row[1:]
        if tag == "t":
            terminals.append(int(rest[0]))
        elif tag == "e":
            edges.append((int(rest[0]), int(rest[1]), _parse_length(rest[2])))
        elif tag == "g":
            groups[int(rest[0])] = tuple(int(x) for x in rest[1:])
        elif tag == "r":
            rotations[int(rest[0])] = tuple(int(x) for x in rest[1:])
        else:
            raise FormatError(f"unknown record tag {tag!r}")
    if len(terminals) != k:
        raise FormatError(f"header says {k} terminals, found {len(terminals)}")
    if len(edges) != m:
        raise FormatError(f"header says {m} edges, found {len(edges)}")
    graph = Graph.build(n, edges, terminals)

    rot_tuple: tuple[tuple[int, ...], ...] | None = None
    if rotations:
        missing = [v for v in range(n) if v not in rotations and graph.adjacency[v]]
        if missing:
            raise FormatError(f"rotation lines missing for vertices {missing}")
        rot_tuple = tuple(rotations.get(v, ()) for v in range(n))
    return GraphDocument(graph, groups or None, rot_tuple)


def write_graph_file(path, graph: Graph, **kwargs) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_graph(graph, **kwargs))


def read_graph_file(path) -> GraphDocument:
    with open(path, "r", encoding="ascii") as fh:
        return loads_graph(fh.read())


def dumps_blocks(k: int, s: int, blocks: Sequence[Sequence[int]]) -> str:
    out = io.StringIO()
    out.write(f"ss {k} {s}\n")
    for block in blocks:
        out.write("b " + " ".join(str(x) for x in sorted(block)) + "\n")
    return out.getvalue()


def loads_blocks(text: str) -> tuple[int, int, list[frozenset[int]]]:
    rows = _clean_lines(text)
    if not rows or rows[0][0] != "ss":
        raise FormatError("missing 'ss k s' header")
    k, s = int(rows[0][1]), int(rows[0][2])
    blocks = []
    for row in rows[1:]:
        if row[0] != "b":
            raise FormatError(f"unknown record tag {row[0]!r}")
        blocks.append(frozenset(int(x) for x in row[1:]))
    return k, s, blocks


def dumps_cover(paths: Sequence[Path], alpha: Fraction) -> str:
    out = io.StringIO()
    out.write(f"tpc {len(paths)} {format_fraction(alpha)}\n")
    for path in paths:
        out.write("p " + " ".join(str(v) for v in path.vertices) + "\n")
    return out.getvalue()


def loads_cover(text: str, graph: Graph) -> tuple[list[Path], Fraction]:
    """Parse a cover file, recomputing path lengths against `graph`."""
    rows = _clean_lines(text)
    if not rows or rows[0][0] != "tpc":
        raise FormatError("missing 'tpc m alpha' header")
    count = int(rows[0][1])
    alpha = parse_fraction(rows[0][2])
    paths = []
    for row in rows[1:]:
        if row[0] != "p":
            raise FormatError(f"unknown record tag {row[0]!r}")
        paths.append(path_from_vertices(graph, [int(x) for x in row[1:]]))
    if len(paths) != count:
        raise FormatError(f"header says {count} paths, found {len(paths)}")
    return paths, alpha
