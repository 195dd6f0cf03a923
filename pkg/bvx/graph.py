"""Graph, cost and site-list types plus shortest-path primitives."""

import heapq
import logging
from collections import deque
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

# Fixed-point scale for costs: decimal inputs are stored as integer millionths.
SCALE = 10**6
MAX_TOTAL_COST = 2**62

INF = np.iinfo(np.int64).max // 4

CostInput = Union[int, str, Decimal]


class InstanceError(ValueError):
    """Raised when an instance violates a structural invariant."""
    pass


class PreconditionError(Exception):
    """Raised when a solver's structural precondition does not hold."""
    pass


class NotAClassError(PreconditionError):
    """Raised when a graph is not a member of the class a solver requires."""
    pass


def parse_fixed(text: CostInput) -> int:
    """
    Convert a decimal cost to its fixed-point integer representation.

    Args:
        text: Decimal string, Decimal or int (ints are whole cost units)

    Returns:
        Cost scaled by SCALE

    Raises:
        InstanceError: If the value is malformed, negative or too precise
    """
    try:
        value = Decimal(str(text).strip())
    except InvalidOperation as e:
        raise InstanceError(f"Malformed cost value: {text!r}") from e
    if not value.is_finite():
        raise InstanceError(f"Cost must be finite: {text!r}")
    if value < 0:
        raise InstanceError(f"Cost must be nonnegative: {text!r}")
    scaled = value * SCALE
    if scaled != scaled.to_integral_value():
        raise InstanceError(f"Cost has more than 6 decimal places: {text!r}")
    return int(scaled)


def format_fixed(value: int) -> str:
    """Render a fixed-point value as a plain decimal string."""
    value = int(value)
    sign = "-" if value < 0 else ""
    whole, frac = divmod(abs(value), SCALE)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:06d}".rstrip("0")


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Immutable undirected simple connected graph in CSR layout.

    Neighbors of v are ``indices[indptr[v]:indptr[v + 1]]`` in ascending order.
    ``weights`` is aligned with ``indices``; ``None`` means unit lengths.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: Optional[np.ndarray] = None
    _adj: List[List[int]] = field(init=False, repr=False, compare=False)
    _wadj: Optional[List[List[int]]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        indptr = self.indptr.tolist()
        indices = self.indices.tolist()
        adj = [indices[indptr[v]:indptr[v + 1]] for v in range(self.n)]
        object.__setattr__(self, "_adj", adj)
        wadj = None
        if self.weights is not None:
            weights = self.weights.tolist()
            wadj = [weights[indptr[v]:indptr[v + 1]] for v in range(self.n)]
        object.__setattr__(self, "_wadj", wadj)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int]],
        weights: Optional[Sequence[int]] = None,
        require_connected: bool = True,
    ) -> "Graph":
        """
        Build a graph from an edge list.

        Args:
            n: Vertex count
            edges: Pairs (u, v) of 0-indexed vertex ids
            weights: Optional positive integer length per edge
            require_connected: Reject disconnected graphs

        Returns:
            Validated Graph

        Raises:
            InstanceError: On loops, parallel edges, bad ids, bad weights or
                disconnection
        """
        if n < 1:
            raise InstanceError("Graph must have at least one vertex")
        edge_list = [(int(u), int(v)) for u, v in edges]
        if weights is not None and len(weights) != len(edge_list):
            raise InstanceError(
                f"Got {len(weights)} weights for {len(edge_list)} edges"
            )
        seen = set()
        for u, v in edge_list:
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"Edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise InstanceError(f"Self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise InstanceError(f"Parallel edge {key}")
            seen.add(key)

        m = len(edge_list)
        if m:
            ends = np.array(edge_list, dtype=np.int64)
            rows = np.concatenate([ends[:, 0], ends[:, 1]])
            cols = np.concatenate([ends[:, 1], ends[:, 0]])
        else:
            rows = np.zeros(0, dtype=np.int64)
            cols = np.zeros(0, dtype=np.int64)
        order = np.lexsort((cols, rows))
        indices = cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])

        w_arr = None
        if weights is not None:
            w = np.array([int(x) for x in weights], dtype=np.int64)
            if m and int(w.min()) < 1:
                raise InstanceError("Edge weights must be positive integers")
            w_arr = np.concatenate([w, w])[order]

        graph = cls(n=n, indptr=indptr, indices=indices, weights=w_arr)
        if require_connected and not graph.is_connected():
            raise InstanceError("Graph is disconnected")
        return graph

    @property
    def m(self) -> int:
        return int(self.indices.shape[0]) // 2

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def neighbors(self, v: int) -> List[int]:
        return self._adj[v]

    def weighted_neighbors(self, v: int) -> Iterator[Tuple[int, int]]:
        """Yield (neighbor, length) pairs, unit length when unweighted."""
        if self._wadj is None:
            for u in self._adj[v]:
                yield u, 1
        else:
            yield from zip(self._adj[v], self._wadj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def adjacency(self) -> List[List[int]]:
        return self._adj

    def edge_list(self) -> List[Tuple[int, int, int]]:
        """Every edge once as (u, v, length) with u < v."""
        out = []
        for u in range(self.n):
            for v, w in self.weighted_neighbors(u):
                if u < v:
                    out.append((u, v, w))
        return out

    def to_networkx(self) -> nx.Graph:
        """Copy as a networkx graph with a 'weight' attribute on every edge."""
        nxg = nx.Graph()
        nxg.add_nodes_from(range(self.n))
        nxg.add_weighted_edges_from(self.edge_list())
        return nxg

    def has_edge(self, u: int, v: int) -> bool:
        row = self.indices[self.indptr[u]:self.indptr[u + 1]]
        i = int(np.searchsorted(row, v))
        return i < row.shape[0] and int(row[i]) == v

    def is_connected(self) -> bool:
        seen = bytearray(self.n)
        seen[0] = 1
        queue = deque([0])
        count = 1
        adj = self._adj
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = 1
                    count += 1
                    queue.append(w)
        return count == self.n


@dataclass(frozen=True, eq=False)
class CostVector:
    """Nonnegative per-vertex costs in fixed point, with the cached total."""

    values: np.ndarray
    total: int

    @classmethod
    def from_values(cls, values: Sequence[CostInput]) -> "CostVector":
        """Build from whole units (ints) or decimal strings."""
        return cls.from_fixed([parse_fixed(v) for v in values])

    @classmethod
    def from_fixed(cls, values: Union[Sequence[int], np.ndarray]) -> "CostVector":
        """Build from values that are already scaled."""
        arr = np.asarray(values, dtype=np.int64).copy()
        if arr.ndim != 1:
            raise InstanceError("Costs must be a flat array")
        if arr.size and int(arr.min()) < 0:
            raise InstanceError("Costs must be nonnegative")
        total = sum(int(x) for x in arr.tolist())
        if total > MAX_TOTAL_COST:
            raise InstanceError("Total cost exceeds 2^62 in fixed point")
        arr.setflags(write=False)
        return cls(values=arr, total=total)

    @classmethod
    def unit(cls, n: int) -> "CostVector":
        return cls.from_fixed(np.full(n, SCALE, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __getitem__(self, v: int) -> int:
        return int(self.values[v])

    def masked(self, keep: np.ndarray) -> "CostVector":
        """Costs with every entry outside the boolean mask set to zero."""
        return CostVector.from_fixed(np.where(keep, self.values, 0))

    def sum_over(self, vertices: Union[Sequence[int], np.ndarray]) -> int:
        idx = np.asarray(vertices, dtype=np.int64)
        return int(self.values[idx].sum()) if idx.size else 0


@dataclass(frozen=True, eq=False)
class SiteList:
    """Ordered, pairwise distinct site vertices; priority is list position."""

    sites: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.sites)) != len(self.sites):
            dupes = sorted({s for s in self.sites if self.sites.count(s) > 1})
            raise InstanceError(f"Duplicate site(s): {dupes}")

    @classmethod
    def of(cls, sites: Iterable[int], n: Optional[int] = None) -> "SiteList":
        """
        Build a site list, checking ids against the vertex count.

        Raises:
            InstanceError: On duplicate or out-of-range ids
        """
        items = tuple(int(s) for s in sites)
        if n is not None:
            for s in items:
                if not 0 <= s < n:
                    raise InstanceError(f"Site {s} outside 0..{n - 1}")
        return cls(items)

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sites)

    def __getitem__(self, i: int) -> int:
        return self.sites[i]

    def __contains__(self, v: object) -> bool:
        return v in self.sites

    def with_site(self, v: int) -> "SiteList":
        """The list S+v with v appended at lowest priority."""
        return SiteList(self.sites + (int(v),))

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        if self.sites:
            out[list(self.sites)] = True
        return out


def adjacency_bfs(
    adj: Sequence[Sequence[int]], sources: Sequence[int]
) -> Tuple[List[int], List[int]]:
    """
    Breadth-first search from several sources at once over adjacency lists.

    Each vertex is owned by the lowest-indexed source among its closest
    sources: a vertex takes the minimum owner over all neighbors one layer up.

    Args:
        adj: Adjacency lists of an unweighted connected graph
        sources: Source vertices in priority order

    Returns:
        (dist, owner) lists, owner holding indices into ``sources``
    """
    n = len(adj)
    dist = [-1] * n
    owner = [-1] * n
    queue: deque = deque()
    for i, s in enumerate(sources):
        dist[s] = 0
        owner[s] = i
        queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        ou = owner[u]
        for w in adj[u]:
            dw = dist[w]
            if dw == -1:
                dist[w] = du
                owner[w] = ou
                queue.append(w)
            elif dw == du and ou < owner[w]:
                owner[w] = ou
    return dist, owner


def multi_source_bfs(
    g: Graph, sources: Sequence[int]
) -> Tuple[np.ndarray, np.ndarray]:
    """Distances and priority owners from several sources of an unweighted graph."""
    dist, owner = adjacency_bfs(g.adjacency(), sources)
    return np.array(dist, dtype=np.int64), np.array(owner, dtype=np.int64)


def dijkstra(g: Graph, sources: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Multi-source Dijkstra with the same priority ownership rule as BFS.

    Vertices are settled in nondecreasing distance, so every shortest-path
    predecessor of v is settled before v and the owner minimum is final.
    """
    n = g.n
    dist = [INF] * n
    owner = [n + 1] * n
    done = bytearray(n)
    heap: List[Tuple[int, int]] = []
    for i, s in enumerate(sources):
        dist[s] = 0
        owner[s] = i
        heap.append((0, s))
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = 1
        ou = owner[u]
        for w, length in g.weighted_neighbors(u):
            nd = d + length
            if nd < dist[w]:
                dist[w] = nd
                owner[w] = ou
                heapq.heappush(heap, (nd, w))
            elif nd == dist[w] and ou < owner[w]:
                owner[w] = ou
    return np.array(dist, dtype=np.int64), np.array(owner, dtype=np.int64)


def shortest_paths(g: Graph, sources: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Multi-source distances and priority owners, BFS or Dijkstra as needed."""
    if not sources:
        raise InstanceError("no sites")
    if g.weighted:
        return dijkstra(g, sources)
    return multi_source_bfs(g, sources)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """
    Exact shortest-path distances from one vertex.

    Args:
        g: Graph (Dijkstra is used when edge weights are present)
        source: Source vertex id

    Returns:
        Distance array indexed by vertex
    """
    if not 0 <= source < g.n:
        raise InstanceError(f"Source {source} outside 0..{g.n - 1}")
    return shortest_paths(g, [source])[0]


def is_complete(g: Graph) -> bool:
    return g.m == g.n * (g.n - 1) // 2


def is_tree(g: Graph) -> bool:
    return g.m == g.n - 1


def is_path(g: Graph) -> bool:
    """Tree with exactly two degree-1 vertices and the rest of degree 2."""
    if g.n < 2 or not is_tree(g):
        return False
    deg = g.degrees()
    return int(deg.max()) <= 2 and int((deg == 1).sum()) == 2


def is_cycle(g: Graph) -> bool:
    if g.n < 3 or g.m != g.n:
        return False
    return bool((g.degrees() == 2).all())


def diameter_at_most_two(g: Graph) -> bool:
    """Full O(nm) check by one BFS per vertex."""
    for v in range(g.n):
        if int(multi_source_bfs(g, [v])[0].max()) > 2:
            return False
    return True


def require_unweighted(g: Graph, solver: str) -> None:
    if g.weighted:
        raise PreconditionError(f"The {solver} solver requires unit edge lengths")
