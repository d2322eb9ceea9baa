"""Finite undirected simple graphs and their structural analysis.

The process lives on small finite connected graphs.  Builders cover the
families with sharp classification results (lattice tori, complete graphs,
stars, cycles, paths); arbitrary graphs come from edge lists.  ``analyze``
derives the structural facts the regime classifier dispatches on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "StructureReport",
    "GraphError",
    "build_lattice_torus",
    "build_complete",
    "build_star",
    "build_cycle",
    "build_path",
    "analyze",
]

# Hard ceiling on vertices for torus construction; everything here is desk scale.
_MAX_TORUS_VERTICES = 1_000_000


class GraphError(ValueError):
    """Invalid graph construction or a graph outside an operation's domain."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on vertices ``0..vertex_count-1``.

    ``adjacency`` holds one sorted tuple of neighbour indices per vertex.
    Instances are validated on construction and safe to share across
    concurrent simulation replicas.
    """

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = self.vertex_count
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        if len(self.adjacency) != n:
            raise GraphError("adjacency length does not match vertex_count")
        for x, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"adjacency of vertex {x} is not sorted/deduplicated")
            for y in nbrs:
                if not 0 <= y < n:
                    raise GraphError(f"neighbour index {y} out of range")
                if y == x:
                    raise GraphError(f"self-loop at vertex {x}")
                if x not in self.adjacency[y]:
                    raise GraphError(f"asymmetric adjacency between {x} and {y}")

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: list[tuple[int, int]] | set[tuple[int, int]],
        allow_disconnected: bool = False,
    ) -> "Graph":
        """Build a graph from an edge list, rejecting disconnected graphs by default."""
        nbrs: list[set[int]] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError(f"edge ({u},{v}) out of range")
            nbrs[u].add(v)
            nbrs[v].add(u)
        g = cls(vertex_count, tuple(tuple(sorted(s)) for s in nbrs))
        if not allow_disconnected and not g.is_connected:
            raise GraphError("graph is disconnected (pass allow_disconnected=True to permit)")
        return g

    @classmethod
    def from_edge_list_text(cls, text: str, allow_disconnected: bool = False) -> "Graph":
        """Parse the edge-list text format: one ``u v`` pair per line, ``#`` comments."""
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected 'u v', got {raw!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise GraphError(f"line {lineno}: non-integer vertex in {raw!r}") from exc
            if u < 0 or v < 0:
                raise GraphError(f"line {lineno}: negative vertex index")
            edges.append((u, v))
        if not edges:
            raise GraphError("edge list is empty")
        n = max(max(u, v) for u, v in edges) + 1
        return cls.from_edges(n, edges, allow_disconnected=allow_disconnected)

    @classmethod
    def from_edge_list_file(cls, path: str | Path, allow_disconnected: bool = False) -> "Graph":
        return cls.from_edge_list_text(Path(path).read_text(), allow_disconnected=allow_disconnected)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.adjacency)

    @cached_property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nbrs) for nbrs in self.adjacency)

    @cached_property
    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.vertex_count

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (float64, symmetric)."""
        a = np.zeros((self.vertex_count, self.vertex_count))
        for x, nbrs in enumerate(self.adjacency):
            a[x, list(nbrs)] = 1.0
        return a

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat neighbour structure ``(indptr, indices)`` for the simulation kernels."""
        indptr = np.zeros(self.vertex_count + 1, dtype=np.int64)
        for x, nbrs in enumerate(self.adjacency):
            indptr[x + 1] = indptr[x] + len(nbrs)
        indices = np.empty(indptr[-1], dtype=np.int64)
        for x, nbrs in enumerate(self.adjacency):
            indices[indptr[x] : indptr[x + 1]] = nbrs
        return indptr, indices

    def relabel(self, perm: list[int] | np.ndarray) -> "Graph":
        """Graph with vertex ``x`` renamed to ``perm[x]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.vertex_count)):
            raise GraphError("perm must be a permutation of 0..n-1")
        nbrs: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for x, adj in enumerate(self.adjacency):
            for y in adj:
                nbrs[perm[x]].add(perm[y])
        return Graph(self.vertex_count, tuple(tuple(sorted(s)) for s in nbrs))


@dataclass(frozen=True)
class StructureReport:
    """Structural facts of a graph that decide which classification rule applies."""

    max_degree: int
    constant_degree: int | None
    is_connected: bool
    is_triangle_free: bool
    star_leaf_count: int | None
    is_complete: bool


def build_lattice_torus(side_half_width: int, dimension: int) -> Graph:
    """Lattice cube ``{-L..L}^d`` with periodic boundary; every degree is ``2d``.

    Wraparound edges are deduplicated (simple-graph convention), so the
    d=1, L=1 torus is the 3-cycle.
    """
    L, d = side_half_width, dimension
    if L < 1 or d < 1:
        raise GraphError("torus requires side_half_width >= 1 and dimension >= 1")
    side = 2 * L + 1
    n = side**d
    if n > _MAX_TORUS_VERTICES:
        raise GraphError(f"torus with {n} vertices exceeds the size budget {_MAX_TORUS_VERTICES}")
    # Vertex index = mixed-radix encoding of coordinates, base `side` per axis.
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for idx in range(n):
        coords = []
        rem = idx
        for _ in range(d):
            coords.append(rem % side)
            rem //= side
        for axis in range(d):
            for delta in (-1, 1):
                other = list(coords)
                other[axis] = (coords[axis] + delta) % side
                oidx = 0
                for a in reversed(range(d)):
                    oidx = oidx * side + other[a]
                if oidx != idx:
                    nbrs[idx].add(oidx)
    return Graph(n, tuple(tuple(sorted(s)) for s in nbrs))


def build_complete(n: int) -> Graph:
    """Complete graph K_n, n >= 2."""
    if n < 2:
        raise GraphError("complete graph requires n >= 2")
    return Graph(n, tuple(tuple(y for y in range(n) if y != x) for x in range(n)))


def build_star(n: int) -> Graph:
    """Star with center 0 and leaves 1..n, n >= 1."""
    if n < 1:
        raise GraphError("star requires n >= 1 leaves")
    adjacency = [tuple(range(1, n + 1))] + [(0,)] * n
    return Graph(n + 1, tuple(adjacency))


def build_cycle(n: int) -> Graph:
    """Cycle C_n, n >= 3."""
    if n < 3:
        raise GraphError("cycle requires n >= 3")
    return Graph(n, tuple(tuple(sorted(((x - 1) % n, (x + 1) % n))) for x in range(n)))


def build_path(n: int) -> Graph:
    """Path on n vertices, n >= 2."""
    if n < 2:
        raise GraphError("path requires n >= 2")
    nbrs = []
    for x in range(n):
        adj = [y for y in (x - 1, x + 1) if 0 <= y < n]
        nbrs.append(tuple(adj))
    return Graph(n, tuple(nbrs))


def _has_triangle(g: Graph) -> bool:
    # Scan adjacent pairs within each vertex's neighbour list.
    sets = g.neighbor_sets
    for x in range(g.vertex_count):
        nbrs = g.adjacency[x]
        for i in range(len(nbrs)):
            a = nbrs[i]
            if a < x:
                continue
            for j in range(i + 1, len(nbrs)):
                b = nbrs[j]
                if b in sets[a]:
                    return True
    return False


def _star_leaf_count(g: Graph) -> int | None:
    n = g.vertex_count
    if n < 2:
        return None
    degs = g.degrees
    leaves = n - 1
    if leaves == 1:
        return 1 if degs == (1, 1) else None
    centers = [x for x in range(n) if degs[x] == leaves]
    if len(centers) == 1 and all(degs[x] == 1 for x in range(n) if x != centers[0]):
        return leaves
    return None


def analyze(g: Graph) -> StructureReport:
    """Compute the structural facts used by the regime classifier.

    All outputs are invariant under vertex relabeling.
    """
    degs = g.degrees
    max_degree = max(degs)
    constant = degs[0] if all(d == degs[0] for d in degs) else None
    n = g.vertex_count
    return StructureReport(
        max_degree=max_degree,
        constant_degree=constant,
        is_connected=g.is_connected,
        is_triangle_free=not _has_triangle(g),
        star_leaf_count=_star_leaf_count(g),
        is_complete=(n >= 2 and constant == n - 1),
    )
