"""
Radius graphs G(n, r): vertices are sample indices, edges join points at
distance <= r. Adjacency is kept both as sorted tuples and as Python int
bitmasks; the bitmasks drive the clique and domination code.
"""

import itertools
import logging
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .domains import PointCloud
from .errors import GeometryError, LabIOError
from .geometry import TOL

logger = logging.getLogger(__name__)


def bits_of(mask: int) -> Iterator[int]:
    """Indices of the set bits, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    def __init__(self, n: int, neighbors: Sequence[Iterable[int]]):
        if len(neighbors) != n:
            raise ValueError(f"expected {n} neighbour lists, got {len(neighbors)}")
        self.n = n
        self.neighbors: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(set(nb))) for nb in neighbors)
        masks = []
        for v, nb in enumerate(self.neighbors):
            mask = 0
            for u in nb:
                if u == v:
                    raise ValueError(f"self-loop at vertex {v}")
                mask |= 1 << u
            masks.append(mask)
        self.bits: Tuple[int, ...] = tuple(masks)
        for v, nb in enumerate(self.neighbors):
            for u in nb:
                if not (self.bits[u] >> v) & 1:
                    raise ValueError(f"adjacency is not symmetric at edge ({v}, {u})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        adj: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, adj)

    @classmethod
    def from_networkx(cls, g) -> "Graph":
        """Relabel a networkx graph's nodes to 0..n-1 in sorted order."""
        nodes = sorted(g.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[a], index[b]) for a, b in g.edges()))

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def closed_bits(self, v: int) -> int:
        return self.bits[v] | (1 << v)

    def edges(self) -> Iterator[Tuple[int, int]]:
        for v, nb in enumerate(self.neighbors):
            for u in nb:
                if u > v:
                    yield v, u

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.neighbors) // 2

    def induced(self, vertices: Iterable[int]) -> Tuple["Graph", List[int]]:
        """Subgraph induced on ``vertices``; returns it with the new-to-old label map."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        adj = [[index[u] for u in self.neighbors[v] if u in index] for v in keep]
        return Graph(len(keep), adj), keep

    def distances_from(self, source: int) -> Dict[int, int]:
        """Hop distance from ``source`` to every vertex it reaches, by bitset BFS layers."""
        if not 0 <= source < self.n:
            raise IndexError(f"vertex {source} out of range for {self.n} vertices")
        dist = {source: 0}
        seen = frontier = 1 << source
        layer = 0
        while frontier:
            layer += 1
            reach = 0
            for v in bits_of(frontier):
                reach |= self.bits[v]
            frontier = reach & ~seen
            seen |= frontier
            for v in bits_of(frontier):
                dist[v] = layer
        return dist

    def is_connected(self) -> bool:
        return self.n == 0 or len(self.distances_from(0)) == self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count()})"


class GeometricGraph(Graph):
    """Radius graph together with the cloud and radius that produced it."""

    def __init__(self, graph: Graph, r: float, cloud: Optional[PointCloud] = None):
        super().__init__(graph.n, graph.neighbors)
        self.r = float(r)
        self.cloud = cloud

    @property
    def points(self) -> np.ndarray:
        return self.cloud.points


def _cell_keys(points: np.ndarray, r: float) -> np.ndarray:
    return np.floor((points - points.min(axis=0)) / r).astype(np.int64)


def build_graph(cloud: PointCloud, r: float) -> GeometricGraph:
    """Radius graph by the uniform cell grid of side r (3^d neighbouring cells per cell).

    The comparison is closed: ``|X_i - X_j| <= r`` with a 1e-12 slack, so
    points at distance exactly r are adjacent.
    """
    if not r > 0:
        raise GeometryError(f"r must be > 0, got {r}")
    pts = cloud.points
    n, d = pts.shape
    adj: List[List[int]] = [[] for _ in range(n)]
    if n > 1:
        keys = _cell_keys(pts, r)
        cells: Dict[Tuple[int, ...], np.ndarray] = {}
        order = np.lexsort(keys.T[::-1])
        sorted_keys = keys[order]
        boundaries = np.flatnonzero(np.any(np.diff(sorted_keys, axis=0) != 0, axis=1)) + 1
        for members in np.split(order, boundaries):
            cells[tuple(keys[members[0]])] = members
        offsets = list(itertools.product((-1, 0, 1), repeat=d))
        threshold = r + TOL
        for key, members in cells.items():
            for off in offsets:
                other_key = tuple(k + o for k, o in zip(key, off))
                # each unordered cell pair once
                if other_key < key:
                    continue
                others = cells.get(other_key)
                if others is None:
                    continue
                dist = cdist(pts[members], pts[others])
                hits_a, hits_b = np.nonzero(dist <= threshold)
                for a, b in zip(hits_a, hits_b):
                    u, v = int(members[a]), int(others[b])
                    if other_key == key and u >= v:
                        continue
                    adj[u].append(v)
                    adj[v].append(u)
    graph = Graph(n, adj)
    logger.debug(f"Built G(n={n}, r={r}) with {graph.edge_count()} edges")
    return GeometricGraph(graph=graph, r=float(r), cloud=cloud)


def brute_force_graph(cloud: PointCloud, r: float) -> GeometricGraph:
    """All-pairs reference construction."""
    pts = cloud.points
    n = pts.shape[0]
    if n > 1:
        close = squareform(pdist(pts)) <= r + TOL
        np.fill_diagonal(close, False)
        adj = [np.flatnonzero(row).tolist() for row in close]
    else:
        adj = [[] for _ in range(n)]
    return GeometricGraph(graph=Graph(n, adj), r=float(r), cloud=cloud)


def closed_neighborhood(graph: Graph, v: int) -> FrozenSet[int]:
    """N[v] = {v} ∪ N(v)."""
    if not 0 <= v < graph.n:
        raise IndexError(f"vertex {v} out of range for {graph.n} vertices")
    return frozenset(graph.neighbors[v]) | {v}


def format_edge_list(graph: Graph) -> str:
    """``n m`` header then one ``i j`` line per edge with i < j."""
    lines = [f"{graph.n} {graph.edge_count()}"] + [f"{u} {v}" for u, v in graph.edges()]
    return "\n".join(lines) + "\n"


def write_edge_list(graph: Graph, path: str) -> None:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            f.write(format_edge_list(graph))
    except OSError as e:
        raise LabIOError(f"Could not write edge list: {e}", str(path))


def read_edge_list(path: str) -> Graph:
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = [line.strip() for line in f if line.strip()]
    except OSError as e:
        raise LabIOError(f"Could not read edge list: {e}", str(path))
    if not lines:
        raise LabIOError("Edge list is empty; expected an 'n m' header", str(path))
    try:
        n, m = (int(x) for x in lines[0].split())
        edges = [tuple(int(x) for x in line.split()) for line in lines[1:]]
        if len(edges) != m or any(len(e) != 2 for e in edges):
            raise ValueError(f"header announces {m} edges, found {len(edges)} lines")
        return Graph.from_edges(n, edges)
    except ValueError as e:
        raise LabIOError(f"Malformed edge list: {e}", str(path))
