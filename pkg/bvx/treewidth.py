"""
Balanced Vertex on graphs of bounded treewidth.

Distances across a small separator are resolved with range-tree queries and
the two sides are handled recursively on graphs augmented with a weighted
separator clique.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.approximation import treewidth_min_degree

from .graph import (
    CostVector,
    Graph,
    InstanceError,
    SiteList,
    bfs_distances,
    dijkstra,
)
from .rangetree import KRangeTree
from .voronoi import SolveResult, check_candidates, finish, prioritized_voronoi

logger = logging.getLogger(__name__)


class DecompositionError(InstanceError):
    """Raised when a tree decomposition violates one of its defining conditions."""
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    """
    Bags of vertices arranged in a tree.

    ``edges`` joins bag indices; ``bags[i]`` is the vertex set of bag i.
    """

    bags: Tuple[FrozenSet[int], ...]
    edges: Tuple[Tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def bag_adjacency(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in self.bags]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    @classmethod
    def from_networkx(cls, decomposition: nx.Graph) -> "TreeDecomposition":
        """Convert a graph whose nodes are frozenset bags."""
        nodes = sorted(decomposition.nodes, key=lambda bag: sorted(bag))
        index = {bag: i for i, bag in enumerate(nodes)}
        edges = tuple(
            sorted((min(index[a], index[b]), max(index[a], index[b])) for a, b in decomposition.edges)
        )
        return cls(bags=tuple(frozenset(int(v) for v in bag) for bag in nodes), edges=edges)


@dataclass(frozen=True)
class SeparatorSplit:
    """
    Sides A and B of a separation with separator X = A ∩ B.

    ``separator`` lists X in ascending vertex order.
    """

    a: FrozenSet[int]
    b: FrozenSet[int]
    separator: Tuple[int, ...] = field(default=())

    @classmethod
    def of(cls, a: Sequence[int], b: Sequence[int]) -> "SeparatorSplit":
        fa, fb = frozenset(a), frozenset(b)
        return cls(a=fa, b=fb, separator=tuple(sorted(fa & fb)))

    def validate(self, g: Graph) -> None:
        if len(self.a | self.b) != g.n:
            raise InstanceError("Separation sides must cover every vertex")
        x = set(self.separator)
        for u, v, _ in g.edge_list():
            if (u in self.a and u not in x and v in self.b and v not in x) or (
                v in self.a and v not in x and u in self.b and u not in x
            ):
                raise InstanceError(f"Edge ({u}, {v}) crosses the separator")


def validate_tree_decomposition(g: Graph, td: TreeDecomposition) -> int:
    """
    Check the defining conditions of a tree decomposition.

    Args:
        g: Graph
        td: Candidate decomposition

    Returns:
        Width of the decomposition

    Raises:
        DecompositionError: Naming the first violated condition
    """
    count = len(td.bags)
    if count == 0:
        raise DecompositionError("decomposition has no bags")
    if len(td.edges) != count - 1:
        raise DecompositionError(
            f"bag tree is not a tree: {count} bags but {len(td.edges)} edges"
        )
    for a, b in td.edges:
        if not (0 <= a < count and 0 <= b < count):
            raise DecompositionError(f"bag edge ({a}, {b}) names a bag outside 0..{count - 1}")
    adj = td.bag_adjacency()
    seen = [False] * count
    seen[0] = True
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for c in adj[t]:
            if not seen[c]:
                seen[c] = True
                queue.append(c)
    if not all(seen):
        raise DecompositionError("bag tree is not connected")

    holders: List[List[int]] = [[] for _ in range(g.n)]
    for t, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                raise DecompositionError(f"bag {t} names vertex {v} outside 0..{g.n - 1}")
            holders[v].append(t)
    for v in range(g.n):
        if not holders[v]:
            raise DecompositionError(f"vertex coverage: vertex {v} is in no bag")
    for u, v, _ in g.edge_list():
        if not any(v in td.bags[t] for t in holders[u]):
            raise DecompositionError(f"edge coverage: edge ({u}, {v}) is in no bag")
    for v in range(g.n):
        members = set(holders[v])
        start = holders[v][0]
        reached = {start}
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for c in adj[t]:
                if c in members and c not in reached:
                    reached.add(c)
                    queue.append(c)
        if len(reached) != len(members):
            raise DecompositionError(
                f"connectivity: bags holding vertex {v} do not form a subtree"
            )
    return td.width


def heuristic_tree_decomposition(g: Graph) -> TreeDecomposition:
    """
    Tree decomposition from the minimum-degree elimination heuristic.

    Args:
        g: Graph

    Returns:
        Valid TreeDecomposition; its width is an upper bound on the treewidth
    """
    if g.n == 1:
        return TreeDecomposition(bags=(frozenset({0}),), edges=())
    width, decomposition = treewidth_min_degree(g.to_networkx())
    td = TreeDecomposition.from_networkx(decomposition)
    logger.debug(f"Min-degree decomposition: width {width}, {len(td.bags)} bags")
    return td


class _Part:
    """A graph of the recursion with its restricted decomposition and global labels."""

    __slots__ = ("graph", "bags", "bag_adj", "labels")

    def __init__(self, graph: Graph, bags: List[List[int]], bag_adj: List[List[int]], labels: np.ndarray):
        self.graph = graph
        self.bags = bags
        self.bag_adj = bag_adj
        self.labels = labels


def _as_weighted(g: Graph) -> Graph:
    if g.weighted:
        return g
    edges = [(u, v) for u, v, _ in g.edge_list()]
    return Graph.from_edges(g.n, edges, [1] * len(edges))


def _direct_delta(h: Graph, targets: Sequence[int], pi: np.ndarray, bound: np.ndarray) -> Dict[int, int]:
    """δ(v) = Σ π(u) over u with d(u, v) < bound(u), by one Dijkstra per target."""
    out: Dict[int, int] = {}
    for v in targets:
        dist, _ = dijkstra(h, [v])
        out[v] = int(pi[dist < bound].sum())
    return out


def _balanced_bag(bags: List[List[int]], bag_adj: List[List[int]], n: int) -> int:
    """
    Bag whose removal leaves components of at most n/2 vertices.

    Each vertex is counted at the bag closest to the root that holds it; the
    walk descends into a child while that child's subtree count exceeds n/2.
    """
    count = len(bags)
    parent = [-1] * count
    order = [0]
    seen = [False] * count
    seen[0] = True
    for t in order:
        for c in bag_adj[t]:
            if not seen[c]:
                seen[c] = True
                parent[c] = t
                order.append(c)
    top = [-1] * n
    for t in order:
        for v in bags[t]:
            if top[v] == -1:
                top[v] = t
    sub = [0] * count
    for v in range(n):
        sub[top[v]] += 1
    for t in reversed(order[1:]):
        sub[parent[t]] += sub[t]
    t = 0
    while True:
        heavy = next((c for c in bag_adj[t] if c != parent[t] and 2 * sub[c] > n), None)
        if heavy is None:
            return t
        t = heavy


def _components(h: Graph, removed: set) -> List[List[int]]:
    adj = h.adjacency()
    seen = set(removed)
    out = []
    for start in range(h.n):
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        out.append(comp)
    return out


def _restrict(part: _Part, side: Sequence[int], sep_dist: Dict[Tuple[int, int], int]) -> Tuple[_Part, np.ndarray]:
    """
    Graph G_A on ``side`` with the separator turned into a clique weighted by
    in-graph distances, plus the decomposition restricted to it.

    Returns:
        (sub part, local ids of ``side`` in order)
    """
    side = sorted(side)
    local = {v: i for i, v in enumerate(side)}
    h = part.graph
    edges: Dict[Tuple[int, int], int] = {}
    for u, v, w in h.edge_list():
        if u in local and v in local:
            edges[(local[u], local[v])] = w
    for (x, y), d in sep_dist.items():
        edges[(local[x], local[y])] = d
    graph = Graph.from_edges(len(side), list(edges.keys()), list(edges.values()))

    bags = [[local[v] for v in bag if v in local] for bag in part.bags]
    bags, bag_adj = _prune(bags, part.bag_adj)
    labels = part.labels[np.asarray(side, dtype=np.int64)]
    return _Part(graph, bags, bag_adj, labels), np.asarray(side, dtype=np.int64)


def _prune(bags: List[List[int]], bag_adj: List[List[int]]) -> Tuple[List[List[int]], List[List[int]]]:
    """Drop empty leaf bags until every leaf holds a vertex, then renumber."""
    count = len(bags)
    alive = [True] * count
    degree = [len(a) for a in bag_adj]
    stack = [t for t in range(count) if not bags[t] and degree[t] <= 1]
    remaining = count
    while stack and remaining > 1:
        t = stack.pop()
        if not alive[t]:
            continue
        alive[t] = False
        remaining -= 1
        for c in bag_adj[t]:
            if alive[c]:
                degree[c] -= 1
                if not bags[c] and degree[c] <= 1:
                    stack.append(c)
    ids = {t: i for i, t in enumerate(t for t in range(count) if alive[t])}
    new_bags = [bags[t] for t in ids]
    new_adj = [[ids[c] for c in bag_adj[t] if alive[c]] for t in ids]
    return new_bags, new_adj


def _cross_delta(
    sep: Sequence[int],
    sep_dists: Sequence[np.ndarray],
    targets: Sequence[int],
    others: Sequence[int],
    pi: np.ndarray,
    bound: np.ndarray,
) -> Dict[int, int]:
    """
    δ(a, B) for every target a: the cost of vertices b on the other side with
    d(a, b) < bound(b), each counted at the first separator vertex on a
    shortest a-b route.
    """
    k = len(sep)
    out = {a: 0 for a in targets}
    if not others or not targets:
        return out
    b_idx = np.asarray(others, dtype=np.int64)
    a_idx = np.asarray(targets, dtype=np.int64)
    db = np.stack([d[b_idx] for d in sep_dists], axis=1)
    da = np.stack([d[a_idx] for d in sep_dists], axis=1)
    weights = pi[b_idx].tolist()
    for i in range(k):
        points = db - db[:, [i]]
        points[:, i] = bound[b_idx] - db[:, i]
        tree = KRangeTree.build(points.tolist(), weights, k=k)
        for row, a in enumerate(targets):
            ai = int(da[row, i])
            lower = []
            for j in range(k):
                if j == i:
                    lower.append((ai, True))
                else:
                    lower.append((ai - int(da[row, j]), j < i))
            out[a] += tree.query(lower)
    return out


class _WallSolver:
    """Recursive evaluation of δ(v) = Σ{π(u) : d(u, v) < D(u)} over one graph."""

    def __init__(self, pi: np.ndarray, bound: np.ndarray, width: int):
        self.pi = pi
        self.bound = bound
        self.width = width
        self.splits: List[Tuple[int, int, int, int]] = []

    def run(self, part: _Part) -> np.ndarray:
        h = part.graph
        pi = self.pi[part.labels]
        bound = self.bound[part.labels]
        if h.n <= self.width + 1:
            return self._brute(part, pi, bound)

        t = _balanced_bag(part.bags, part.bag_adj, h.n)
        sep = sorted(part.bags[t])
        comps = sorted(_components(h, set(sep)), key=len, reverse=True)
        sides: List[List[int]] = [[], []]
        for comp in comps:
            sides[0 if len(sides[0]) <= len(sides[1]) else 1].extend(comp)
        if not sides[0] or not sides[1]:
            return self._brute(part, pi, bound)
        delta = np.zeros(h.n, dtype=np.int64)
        self.splits.append((h.n, len(sep), len(sides[0]), len(sides[1])))
        logger.debug(
            f"Separator of size {len(sep)} splits {h.n} vertices into "
            f"{len(sides[0])} + {len(sides[1])}"
        )

        sep_dists = [dijkstra(h, [x])[0] for x in sep]
        direct = _direct_delta_from(sep, sep_dists, pi, bound)
        for x, value in direct.items():
            delta[x] = value
        sep_dist = {
            (sep[i], sep[j]): int(sep_dists[i][sep[j]])
            for i in range(len(sep))
            for j in range(i + 1, len(sep))
        }
        for mine, other in ((sides[0], sides[1]), (sides[1], sides[0])):
            cross = _cross_delta(sep, sep_dists, mine, other, pi, bound)
            sub, ids = _restrict(part, sep + mine, sep_dist)
            inner = self.run(sub)
            mine_set = set(mine)
            for local_id, v in enumerate(ids.tolist()):
                if v in mine_set:
                    delta[v] = inner[local_id] + cross[v]
        return delta

    @staticmethod
    def _brute(part: _Part, pi: np.ndarray, bound: np.ndarray) -> np.ndarray:
        values = _direct_delta(part.graph, range(part.graph.n), pi, bound)
        return np.array([values[v] for v in range(part.graph.n)], dtype=np.int64)


def _direct_delta_from(
    sep: Sequence[int], sep_dists: Sequence[np.ndarray], pi: np.ndarray, bound: np.ndarray
) -> Dict[int, int]:
    return {x: int(pi[d < bound].sum()) for x, d in zip(sep, sep_dists)}


def _root_part(g: Graph, td: TreeDecomposition) -> _Part:
    bags = [sorted(b) for b in td.bags]
    return _Part(_as_weighted(g), bags, td.bag_adjacency(), np.arange(g.n, dtype=np.int64))


def wall_delta(
    g: Graph,
    td: TreeDecomposition,
    costs: CostVector,
    bound: Sequence[int],
    splits: Optional[List[Tuple[int, int, int, int]]] = None,
) -> np.ndarray:
    """
    δ(v) = Σ{π(u) : d(u, v) < D(u)} for every vertex v.

    Args:
        g: Connected graph, unit or positive integer edge lengths
        td: Tree decomposition of g
        costs: Vertex costs π
        bound: Per-vertex distance bound D, fixed for the whole recursion
        splits: Optional list collecting (n, |X|, |A∖X|, |B∖X|) per split

    Returns:
        int64 array of δ; entries for vertices with D(v) = 0 carry no meaning
    """
    bound_arr = np.asarray(bound, dtype=np.int64)
    if bound_arr.shape[0] != g.n or len(costs) != g.n:
        raise InstanceError("Cost and bound vectors must cover every vertex")
    solver = _WallSolver(costs.values, bound_arr, td.width)
    delta = solver.run(_root_part(g, td))
    if splits is not None:
        splits.extend(solver.splits)
    return delta


def separator_delta(
    g: Graph, split: SeparatorSplit, costs: CostVector, bound: Sequence[int]
) -> Dict[int, int]:
    """
    δ(a, B) = Σ{π(b) : b ∈ B∖X, d(b, a) < D(b)} for every a ∈ A∖X.

    Args:
        g: Graph (positive integer lengths)
        split: Separation with no edge between A∖X and B∖X
        costs: Vertex costs π
        bound: Per-vertex distance bound D

    Returns:
        Mapping from each a ∈ A∖X to δ(a, B)
    """
    split.validate(g)
    x = set(split.separator)
    targets = sorted(split.a - x)
    others = sorted(split.b - x)
    sep = list(split.separator)
    if not sep:
        return {a: 0 for a in targets}
    sep_dists = [bfs_distances(g, v) for v in sep]
    return _cross_delta(
        sep, sep_dists, targets, others, costs.values, np.asarray(bound, dtype=np.int64)
    )


def treewidth_scores(
    g: Graph, td: TreeDecomposition, costs: CostVector, s: SiteList
) -> np.ndarray:
    """L(S+v) for every vertex, using |S|+1 separator recursions."""
    diagram = prioritized_voronoi(g, s, costs)
    scores = wall_delta(g, td, costs, diagram.dist)
    for i, site in enumerate(s):
        masked = costs.masked(diagram.owner == i)
        taken = wall_delta(g, td, masked, bfs_distances(g, site))
        scores = np.maximum(scores, int(diagram.loads[i]) - taken)
    scores[s.mask(g.n)] = np.iinfo(np.int64).max
    return scores


def solve_treewidth(
    g: Graph, td: TreeDecomposition, costs: CostVector, s: SiteList
) -> SolveResult:
    """
    Balanced Vertex on a graph with a given tree decomposition.

    Args:
        g: Connected graph
        td: Tree decomposition of g
        costs: Vertex costs
        s: Site list

    Returns:
        SolveResult

    Raises:
        DecompositionError: If ``td`` is not a tree decomposition of g
        InstanceError: If there are no sites or every vertex is a site
    """
    check_candidates(g, costs, s)
    width = validate_tree_decomposition(g, td)
    logger.info(f"Treewidth solver: width {width}, n={g.n}, |S|={len(s)}")
    return finish(g, costs, s, treewidth_scores(g, td, costs, s), "treewidth")
