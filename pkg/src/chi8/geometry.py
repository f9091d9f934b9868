"""Forbidden-distance graphs over integer points, with bitset adjacency."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .notation import Point

FORBIDDEN_SQ = 16


class GraphFormatError(ValueError):
    pass


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack_rows(adj: np.ndarray) -> np.ndarray:
    """Pack a boolean ``(r, n)`` matrix into ``(r, words)`` uint64 bit rows.

    Bit ``j`` of row ``i`` lives in word ``j // 64`` at bit ``j % 64``.
    """
    w = n_words(adj.shape[1])
    padded = np.zeros((adj.shape[0], w * 64), dtype=bool)
    padded[:, : adj.shape[1]] = adj
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).copy()


def unpack_rows(rows: np.ndarray, n: int) -> np.ndarray:
    bits = np.unpackbits(rows.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :n].astype(bool)


@dataclass(frozen=True)
class GraphStats:
    v: int
    e: int
    deg_min: int
    deg_max: int


@dataclass(frozen=True, eq=False)
class DistGraph:
    """Simple undirected graph, optionally carrying the points it was built on.

    ``rows[i]`` is the neighbourhood of vertex ``i`` as a bitset.  Graphs read
    from DIMACS files have ``points = None``.
    """

    rows: np.ndarray
    points: Optional[tuple[Point, ...]] = None
    forbidden_sq: Optional[int] = FORBIDDEN_SQ
    name: str = ""
    _dense: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def __len__(self) -> int:
        return self.n

    @property
    def matrix(self) -> np.ndarray:
        """Dense boolean adjacency matrix (cached)."""
        if self._dense is None:
            object.__setattr__(self, "_dense", unpack_rows(self.rows, self.n))
        return self._dense  # type: ignore[return-value]

    def degrees(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.matrix[i])

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.matrix[i, j])

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.matrix, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def index_of(self) -> dict[Point, int]:
        if self.points is None:
            raise ValueError("graph has no point data")
        return {p: i for i, p in enumerate(self.points)}

    def induced(self, vertices: Sequence[int]) -> "DistGraph":
        idx = np.asarray(vertices, dtype=np.int64)
        sub = self.matrix[np.ix_(idx, idx)]
        pts = None if self.points is None else tuple(self.points[i] for i in idx)
        return DistGraph(pack_rows(sub), pts, self.forbidden_sq)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DistGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.points == other.points
            and bool(np.array_equal(self.rows, other.rows))
        )

    __hash__ = None  # type: ignore[assignment]


def from_matrix(adj: np.ndarray, name: str = "") -> DistGraph:
    adj = np.asarray(adj, dtype=bool)
    if adj.shape[0] != adj.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if not np.array_equal(adj, adj.T):
        raise ValueError("adjacency matrix must be symmetric")
    if adj.diagonal().any():
        raise ValueError("self-loops are not allowed")
    return DistGraph(pack_rows(adj), None, None, name)


def from_edges(n: int, edges: Iterable[tuple[int, int]], name: str = "") -> DistGraph:
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        adj[u, v] = adj[v, u] = True
    return from_matrix(adj, name)


def sq_distances(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def build_graph(
    points: Iterable[Sequence[int]], forbidden_sq: int = FORBIDDEN_SQ, name: str = ""
) -> DistGraph:
    """Graph on ``points`` joining pairs at squared distance ``forbidden_sq``.

    Vertices are ordered lexicographically by coordinates.
    """
    if forbidden_sq <= 0:
        raise ValueError("forbidden_sq must be positive")
    pts = [tuple(int(c) for c in p) for p in points]
    if len({len(p) for p in pts}) > 1:
        raise ValueError("points have mixed dimensions")
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points")
    pts.sort()
    if not pts:
        return DistGraph(np.zeros((0, 1), dtype=np.uint64), (), forbidden_sq, name)
    coords = np.array(pts, dtype=np.int64)
    adj = sq_distances(coords) == forbidden_sq
    return DistGraph(pack_rows(adj), tuple(pts), forbidden_sq, name)


def stats(g: DistGraph) -> GraphStats:
    if g.n == 0:
        return GraphStats(0, 0, 0, 0)
    deg = g.degrees()
    return GraphStats(g.n, int(deg.sum()) // 2, int(deg.min()), int(deg.max()))


def complement(g: DistGraph) -> DistGraph:
    """Bitwise complement of the adjacency, without self-loops.

    Point data is kept for reporting; the result is no longer a distance graph.
    """
    adj = ~g.matrix
    np.fill_diagonal(adj, False)
    return DistGraph(pack_rows(adj), g.points, None, g.name and f"~{g.name}")


def export_dimacs(g: DistGraph, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    edges = g.edges()
    lines.append(f"p edge {g.n} {len(edges)}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in edges)
    return "\n".join(lines) + "\n"


def import_dimacs(text: str, name: str = "") -> DistGraph:
    """Read a DIMACS ``p edge`` graph; vertices are 1-indexed in the file."""
    n: Optional[int] = None
    m_declared = 0
    edges: set[tuple[int, int]] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: second header")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphFormatError(f"line {lineno}: malformed header {line!r}")
            try:
                n, m_declared = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: malformed header {line!r}") from exc
        elif parts[0] == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before header")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: malformed edge {line!r}")
            u, v = int(parts[1]), int(parts[2])
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"line {lineno}: vertex index out of range")
            if u == v:
                raise GraphFormatError(f"line {lineno}: self-loop")
            edges.add((min(u, v) - 1, max(u, v) - 1))
        else:
            raise GraphFormatError(f"line {lineno}: unknown line type {parts[0]!r}")
    if n is None:
        raise GraphFormatError("missing 'p edge' header")
    if n == 0:
        return DistGraph(np.zeros((0, 1), dtype=np.uint64), None, None, name)
    del m_declared  # informative only; duplicate edges are collapsed
    return from_edges(n, edges, name)


def write_points(points: Iterable[Point]) -> str:
    return "".join(" ".join(str(c) for c in p) + "\n" for p in points)
