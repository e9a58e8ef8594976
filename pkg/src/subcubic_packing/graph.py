"""Simple undirected graphs, shortest-path distances and structural checks.

Vertices are dense integer ids ``0..n-1``. Human-readable names live in the
label tables of :mod:`subcubic_packing.families`, so everything here stays
generic.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

# Distance sentinel for unreachable pairs. Every attainable distance is at
# most n - 1, so this is strictly larger for any graph that fits in memory.
UNREACHABLE = np.iinfo(np.int32).max

# Above this vertex count the full distance matrix is not materialised.
FULL_MATRIX_LIMIT = 4096


class GraphError(ValueError):
    """Base class for graph construction and query errors."""


class VertexOutOfRange(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class MapNotTotalError(GraphError):
    pass


class Graph:
    """Immutable simple undirected graph stored as sorted adjacency tuples."""

    __slots__ = ("n", "adjacency", "m", "_csr")

    def __init__(self, n: int, adjacency: Sequence[Sequence[int]]):
        if len(adjacency) != n:
            raise GraphError(f"adjacency has {len(adjacency)} rows, expected {n}")
        adj = tuple(tuple(sorted(row)) for row in adjacency)
        total = 0
        for u, row in enumerate(adj):
            for i, v in enumerate(row):
                if not 0 <= v < n:
                    raise VertexOutOfRange(f"neighbour {v} of {u} outside 0..{n - 1}")
                if v == u:
                    raise SelfLoopError(f"self-loop at {u}")
                if i and row[i - 1] == v:
                    raise DuplicateEdgeError(f"duplicate edge {{{u}, {v}}}")
            total += len(row)
        for u, row in enumerate(adj):
            for v in row:
                if not _contains(adj[v], u):
                    raise GraphError(f"asymmetric adjacency: {u}->{v} without {v}->{u}")
        self.n = n
        self.adjacency = adj
        self.m = total // 2
        self._csr = None

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _contains(self.adjacency[u], v)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as ``(u, v)`` with ``u < v``, in ascending order."""
        for u, row in enumerate(self.adjacency):
            for v in row:
                if u < v:
                    yield (u, v)

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` arrays of the adjacency structure."""
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(r) for r in self.adjacency])
            indices = np.fromiter(
                (v for row in self.adjacency for v in row), dtype=np.int64, count=2 * self.m
            )
            self._csr = (indptr, indices)
        return self._csr

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _contains(row: tuple[int, ...], v: int) -> bool:
    # rows are short (subcubic graphs, small power graphs); linear scan is fine
    return v in row


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph on ``n`` vertices, rejecting bad ids, loops and repeats."""
    if n < 0:
        raise GraphError("vertex count must be non-negative")
    adj: list[list[int]] = [[] for _ in range(n)]
    seen: set[tuple[int, int]] = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"edge ({u}, {v}) has an id outside 0..{n - 1}")
        if u == v:
            raise SelfLoopError(f"self-loop at {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {key}")
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)
    return Graph(n, adj)


@dataclass(frozen=True)
class VertexMap:
    """Injective map from source vertex ids (by index) to target vertex ids."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.mapping)) != len(self.mapping):
            raise GraphError("vertex map is not injective")

    def __getitem__(self, v: int) -> int:
        return self.mapping[v]

    def __len__(self) -> int:
        return len(self.mapping)

    def image(self) -> frozenset[int]:
        return frozenset(self.mapping)

    @classmethod
    def from_dict(cls, f: Mapping[int, int], size: int) -> "VertexMap":
        missing = [v for v in range(size) if v not in f]
        if missing:
            raise MapNotTotalError(f"map undefined on {missing[:5]}")
        return cls(tuple(f[v] for v in range(size)))


def bfs_distances(g: Graph, source: int) -> list[int]:
    """Exact hop distances from ``source``; unreachable vertices get ``UNREACHABLE``."""
    if not 0 <= source < g.n:
        raise VertexOutOfRange(f"source {source} outside 0..{g.n - 1}")
    dist = [UNREACHABLE] * g.n
    dist[source] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adj[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = du
                queue.append(v)
    return dist


def _multi_bfs(g: Graph, sources: Sequence[int], want_dist: bool = False):
    """Bit-parallel BFS from many sources at once.

    Bit ``j`` of ``visited[v]`` records whether ``sources[j]`` has reached
    ``v``; one level of every search advances with a single gather and an
    OR-reduction over the CSR neighbour lists. Returns ``(ecc, dist)`` where
    ``ecc[j]`` is the eccentricity of ``sources[j]`` within its component
    (``-1`` flags a source that does not reach every vertex) and ``dist`` is
    the ``len(sources) x n`` distance block, or ``None`` unless requested.
    """
    sources = list(sources)
    n, count = g.n, len(sources)
    words = (count + 63) // 64
    indptr, indices = g.csr()
    deg = np.diff(indptr)
    has_nbrs = deg > 0
    starts = indptr[:-1][has_nbrs]

    visited = np.zeros((n, words), dtype="<u8")
    src = np.asarray(sources, dtype=np.int64)
    cols = np.arange(count)
    np.bitwise_or.at(visited, (src, cols // 64), np.left_shift(np.uint64(1), (cols % 64).astype(np.uint64)))
    ecc = np.zeros(count, dtype=np.int32)
    dist = None
    if want_dist:
        dist = np.full((count, n), UNREACHABLE, dtype=np.int32)
        dist[cols, src] = 0

    level = 0
    while True:
        level += 1
        reached = np.zeros_like(visited)
        if len(starts):
            reached[has_nbrs] = np.bitwise_or.reduceat(visited[indices], starts, axis=0)
        new = reached & ~visited
        if not new.any():
            break
        visited |= new
        grown = _unpack(np.bitwise_or.reduce(new, axis=0)[None, :], count)[0]
        ecc[grown] = level
        if want_dist:
            rows, srcs = np.nonzero(_unpack(new, count))
            dist[srcs, rows] = level
    complete = _unpack(np.bitwise_and.reduce(visited, axis=0)[None, :], count)[0]
    ecc[~complete] = -1
    return ecc, dist


def _unpack(words: np.ndarray, count: int) -> np.ndarray:
    bits = np.unpackbits(np.ascontiguousarray(words).view(np.uint8), axis=1, bitorder="little")
    return bits[:, :count].astype(bool)


def _bfs_block(g: Graph, sources: Sequence[int]) -> np.ndarray:
    """Distance rows for ``sources`` (int32, sentinel-coded)."""
    if g.n == 0:
        return np.zeros((len(sources), 0), dtype=np.int32)
    return _multi_bfs(g, sources, want_dist=True)[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs distances. ``dist[u, v] == UNREACHABLE`` marks disconnected pairs."""

    dist: np.ndarray
    diameter: int
    disconnected: bool

    def __call__(self, u: int, v: int) -> int:
        return int(self.dist[u, v])

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def eccentricities(self) -> np.ndarray:
        d = np.where(self.dist == UNREACHABLE, -1, self.dist)
        return d.max(axis=1) if self.n else np.zeros(0, dtype=np.int32)


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    """BFS from every vertex; ``diameter`` is the largest finite distance."""
    if g.n > FULL_MATRIX_LIMIT:
        raise GraphError(
            f"n={g.n} exceeds the full-matrix limit {FULL_MATRIX_LIMIT}; use diameter() or eccentricity rows"
        )
    dist = _bfs_block(g, range(g.n))
    unreachable = dist == UNREACHABLE
    finite = np.where(unreachable, 0, dist)
    diam = int(finite.max()) if g.n else 0
    return DistanceMatrix(dist=dist, diameter=diam, disconnected=bool(unreachable.any()))


def eccentricities(g: Graph, sources: Sequence[int] | None = None, chunk: int = 4096) -> np.ndarray:
    """Exact eccentricities of ``sources`` (default: every vertex)."""
    if sources is None:
        sources = range(g.n)
    sources = list(sources)
    out = np.empty(len(sources), dtype=np.int32)
    for start in range(0, len(sources), chunk):
        ecc, _ = _multi_bfs(g, sources[start : start + chunk])
        if (ecc < 0).any():
            raise DisconnectedGraphError("graph is disconnected")
        out[start : start + len(ecc)] = ecc
    return out


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return UNREACHABLE not in bfs_distances(g, 0)


def diameter(g: Graph, method: str = "auto") -> int:
    """Exact diameter of a connected graph.

    ``method`` is ``"exhaustive"`` (every eccentricity), ``"apsp"`` (full
    matrix), ``"ifub"`` (eccentricity-bounded sweep) or ``"auto"``, which
    runs every BFS up to :data:`FULL_MATRIX_LIMIT` vertices and iFUB above.
    """
    if g.n == 0:
        raise GraphError("diameter of the empty graph is undefined")
    if method == "auto":
        method = "exhaustive" if g.n <= FULL_MATRIX_LIMIT else "ifub"
    if method == "apsp":
        dm = all_pairs_distances(g)
        if dm.disconnected:
            raise DisconnectedGraphError("graph is disconnected")
        return dm.diameter
    if method == "ifub":
        return ifub_diameter(g)
    if method == "exhaustive":
        return int(eccentricities(g).max())
    raise ValueError(f"unknown diameter method {method!r}")


def ifub_diameter(g: Graph, start: int | None = None) -> int:
    """iFUB: BFS from a central vertex, then sweep its BFS levels from the outside in.

    With ``lb`` the best eccentricity seen so far and level ``i`` fully
    processed, every remaining pair has distance at most ``2 * (i - 1)``, so
    the sweep stops once ``lb`` reaches that bound.
    """
    if start is None:
        start = _double_sweep_center(g)
    dist0 = _bfs_block(g, [start])[0]
    if (dist0 == UNREACHABLE).any():
        raise DisconnectedGraphError("graph is disconnected")
    ecc_start = int(dist0.max())
    levels: list[list[int]] = [[] for _ in range(ecc_start + 1)]
    for v, d in enumerate(dist0.tolist()):
        levels[d].append(v)
    lb = ecc_start
    i = ecc_start
    while i > 0 and 2 * i > lb:
        lb = max(lb, int(eccentricities(g, levels[i]).max()))
        if lb >= 2 * (i - 1):
            return lb
        i -= 1
    return lb


def _double_sweep_center(g: Graph) -> int:
    """Midpoint of a long shortest path found by two sweeps from vertex 0."""
    row = _bfs_block(g, [0])[0]
    if (row == UNREACHABLE).any():
        raise DisconnectedGraphError("graph is disconnected")
    a = int(row.argmax())
    row_a = _bfs_block(g, [a])[0]
    b = int(row_a.argmax())
    row_b = _bfs_block(g, [b])[0]
    half = int(row_a[b]) // 2
    candidates = np.flatnonzero((row_a == half) & (row_a + row_b == row_a[b]))
    return int(candidates[0]) if len(candidates) else a


def power_graph(g: Graph, i: int) -> Graph:
    """Graph on the same vertices with an edge wherever ``0 < d(u, v) <= i``."""
    if i < 1:
        raise GraphError("power must be a positive integer")
    if i == 1:
        return g
    adj: list[list[int]] = []
    for s in range(g.n):
        seen = {s: 0}
        frontier = [s]
        for depth in range(1, i + 1):
            nxt = []
            for u in frontier:
                for v in g.adjacency[u]:
                    if v not in seen:
                        seen[v] = depth
                        nxt.append(v)
            if not nxt:
                break
            frontier = nxt
        del seen[s]
        adj.append(list(seen))
    return Graph(g.n, adj)


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, VertexMap]:
    """Subgraph on ``s``; sub-vertex ``j`` is the ``j``-th smallest id of ``s``."""
    verts = sorted(set(s))
    for v in verts:
        if not 0 <= v < g.n:
            raise VertexOutOfRange(f"vertex {v} outside 0..{g.n - 1}")
    index = {v: j for j, v in enumerate(verts)}
    adj = [[index[u] for u in g.adjacency[v] if u in index] for v in verts]
    return Graph(len(verts), adj), VertexMap(tuple(verts))


def check_map_isomorphism(src: Graph, dst: Graph, f: VertexMap | Mapping[int, int]) -> bool:
    """True iff ``f`` is injective and maps ``src`` onto the subgraph of ``dst`` induced by its image."""
    if isinstance(f, VertexMap):
        image = f.mapping
    else:
        missing = [v for v in range(src.n) if v not in f]
        if missing:
            raise MapNotTotalError(f"map undefined on {missing[:5]}")
        image = tuple(f[v] for v in range(src.n))
    if len(image) != src.n:
        raise MapNotTotalError(f"map covers {len(image)} of {src.n} source vertices")
    if len(set(image)) != len(image) or any(not 0 <= t < dst.n for t in image):
        return False
    inverse = {t: v for v, t in enumerate(image)}
    for v in range(src.n):
        mapped = sorted(image[u] for u in src.adjacency[v])
        induced = [t for t in dst.adjacency[image[v]] if t in inverse]
        if mapped != induced:
            return False
    return True


class DegreeProfile(NamedTuple):
    counts: dict[int, int]
    max_degree: int

    def vertices_of_degree(self, g: Graph, d: int) -> list[int]:
        return [v for v in range(g.n) if g.degree(v) == d]


def degree_profile(g: Graph) -> DegreeProfile:
    counts = Counter(len(row) for row in g.adjacency)
    return DegreeProfile(dict(sorted(counts.items())), max(counts) if counts else 0)
