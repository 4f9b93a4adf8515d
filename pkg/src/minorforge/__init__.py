"""Distance approximating minors: constructions, hard instances, exact verification."""

from .graph import Edge, Graph, Path, shortest_path, terminal_distances
from .minors import Minor, PartialPartition, apply_partition, identity_minor, validate_minor
from .rational import INF, parse_fraction

__version__ = "0.1.0"

__all__ = [
    "Edge",
    "Graph",
    "INF",
    "Minor",
    "PartialPartition",
    "Path",
    "apply_partition",
    "identity_minor",
    "parse_fraction",
    "shortest_path",
    "terminal_distances",
    "validate_minor",
    "__version__",
]
