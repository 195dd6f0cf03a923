"""Random and hand-built instances for tests, benchmarks and `bvx gen`."""

import logging
import random
from typing import List, Optional, Sequence, Tuple

from .graph import CostVector, Graph, InstanceError, SiteList, multi_source_bfs
from .treewidth import TreeDecomposition

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

EXAMPLE_PATH_COSTS = (1, 19, 3, 5, 1, 1, 0, 2, 1, 1, 1, 4, 10)
EXAMPLE_PATH_SITES = (4, 12, 7)


def _relabel(n: int, edges: Sequence[Edge], rng: Optional[random.Random]) -> List[Edge]:
    if rng is None:
        return list(edges)
    perm = list(range(n))
    rng.shuffle(perm)
    return [(perm[u], perm[v]) for u, v in edges]


def random_tree(n: int, rng: random.Random) -> Graph:
    """Uniformly attached random tree with shuffled labels."""
    if n < 1:
        raise InstanceError("A tree needs at least one vertex")
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    return Graph.from_edges(n, _relabel(n, edges, rng))


def random_path(n: int, rng: Optional[random.Random] = None) -> Graph:
    """Path on n vertices, in id order unless ``rng`` shuffles the labels."""
    if n < 2:
        raise InstanceError("A path needs at least two vertices")
    return Graph.from_edges(n, _relabel(n, [(i, i + 1) for i in range(n - 1)], rng))


def random_cycle(n: int, rng: Optional[random.Random] = None) -> Graph:
    if n < 3:
        raise InstanceError("A cycle needs at least three vertices")
    edges = [(i, (i + 1) % n) for i in range(n)]
    return Graph.from_edges(n, _relabel(n, edges, rng))


def random_clique(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def random_diameter_two(n: int, rng: random.Random, p: float = 0.3) -> Graph:
    """
    Random graph closed to diameter at most two.

    Starts from a random tree plus G(n, p) edges, then joins every pair
    still at distance three or more.
    """
    edges = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    g = Graph.from_edges(n, sorted(edges))
    for u in range(n):
        dist, _ = multi_source_bfs(g, [u])
        far = [int(v) for v in (dist > 2).nonzero()[0]]
        if far:
            edges.update((min(u, v), max(u, v)) for v in far)
            g = Graph.from_edges(n, sorted(edges))
    return g


def random_proper_interval(
    n: int, rng: random.Random, max_gap: int = 700, unit: int = 1000
) -> Graph:
    """
    Unit interval graph from random left endpoints.

    Consecutive endpoints differ by at most ``max_gap`` < ``unit``, so the
    graph is connected; intervals meet when their endpoints differ by at most
    ``unit``.
    """
    if not 0 <= max_gap < unit:
        raise InstanceError("max_gap must lie in [0, unit)")
    points = [0]
    for _ in range(n - 1):
        points.append(points[-1] + rng.randint(0, max_gap))
    edges = []
    for i in range(n):
        j = i + 1
        while j < n and points[j] - points[i] <= unit:
            edges.append((i, j))
            j += 1
    return Graph.from_edges(n, _relabel(n, edges, rng))


def random_partial_ktree(
    n: int, k: int, rng: random.Random, keep: float = 0.7
) -> Tuple[Graph, TreeDecomposition]:
    """
    Random subgraph of a k-tree together with a width-k tree decomposition.

    Each new vertex joins a k-subset of an existing bag and keeps each edge
    to it with probability ``keep`` (at least one, so the graph stays
    connected).
    """
    if k < 1 or n < k + 1:
        raise InstanceError(f"Need n >= k + 1 for a partial {k}-tree, got n={n}")
    edges = {(u, v) for u in range(k + 1) for v in range(u + 1, k + 1)}
    bags: List[Tuple[int, ...]] = [tuple(range(k + 1))]
    tree_edges: List[Edge] = []
    for v in range(k + 1, n):
        home = rng.randrange(len(bags))
        base = list(bags[home])
        base.remove(rng.choice(base))
        kept = [u for u in base if rng.random() < keep] or [rng.choice(base)]
        edges.update((u, v) for u in kept)
        bags.append(tuple(base) + (v,))
        tree_edges.append((home, len(bags) - 1))

    perm = list(range(n))
    rng.shuffle(perm)
    g = Graph.from_edges(n, sorted((perm[u], perm[v]) for u, v in edges))
    td = TreeDecomposition(
        bags=tuple(frozenset(perm[u] for u in bag) for bag in bags),
        edges=tuple(tree_edges),
    )
    return g, td


def random_sites(n: int, p: int, rng: random.Random) -> SiteList:
    """p distinct sites in random priority order."""
    if not 1 <= p <= n:
        raise InstanceError(f"Cannot pick {p} sites from {n} vertices")
    return SiteList(tuple(rng.sample(range(n), p)))


def random_costs(
    n: int, rng: random.Random, high: int = 10, decimals: bool = False
) -> CostVector:
    """Costs drawn from 0..high whole units, or with two decimal places."""
    if decimals:
        return CostVector.from_values(
            [f"{rng.randint(0, high * 100) / 100:.2f}" for _ in range(n)]
        )
    return CostVector.from_values([rng.randint(0, high) for _ in range(n)])


def example_path() -> Tuple[Graph, CostVector, SiteList]:
    """The 13-vertex path with three sites used as a worked example."""
    n = len(EXAMPLE_PATH_COSTS)
    g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    return g, CostVector.from_values(EXAMPLE_PATH_COSTS), SiteList(EXAMPLE_PATH_SITES)


def staggered_sites_tree(p: int) -> Tuple[Graph, SiteList]:
    """
    Central path c_0..c_{p-1} with site s_i hung from c_{i-1} by a path of
    3i+1 edges.

    Vertex 0 is c_0; sites are listed as (s_1, ..., s_p).
    """
    if p < 1:
        raise InstanceError("Need at least one site")
    edges: List[Edge] = [(i, i + 1) for i in range(p - 1)]
    nxt = p
    sites = []
    for i in range(1, p + 1):
        prev = i - 1
        for _ in range(3 * i + 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        sites.append(prev)
    return Graph.from_edges(nxt, edges), SiteList(tuple(sites))


GENERATORS = (
    "tree",
    "path",
    "cycle",
    "clique",
    "diam2",
    "proper-interval",
    "partial-ktree",
)


def generate(kind: str, n: int, rng: random.Random, k: int = 3) -> Graph:
    """Random graph of a named class, as used by `bvx gen`."""
    if kind == "tree":
        return random_tree(n, rng)
    if kind == "path":
        return random_path(n, rng)
    if kind == "cycle":
        return random_cycle(n, rng)
    if kind == "clique":
        return random_clique(n)
    if kind == "diam2":
        return random_diameter_two(n, rng)
    if kind == "proper-interval":
        return random_proper_interval(n, rng)
    if kind == "partial-ktree":
        return random_partial_ktree(n, k, rng)[0]
    raise InstanceError(f"Unknown graph class {kind!r}; choose from {', '.join(GENERATORS)}")
