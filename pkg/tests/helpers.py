"""Shared instance builders and oracles for the test suite."""

import random
from typing import Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from bvx.generators import random_costs, random_sites
from bvx.graph import SCALE, CostVector, Graph, SiteList


def units(*values: int) -> list:
    """Whole cost units in fixed point."""
    return [v * SCALE for v in values]


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """Center 0 joined to leaves 1..leaves."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def costs_and_sites(
    g: Graph, rng: random.Random, high: int = 100, p: Optional[int] = None
) -> Tuple[CostVector, SiteList]:
    """Random integer costs in [0, high] and 1..n-1 random sites."""
    costs = random_costs(g.n, rng, high=high)
    if p is None:
        p = rng.randint(1, g.n - 1)
    return costs, random_sites(g.n, p, rng)


def nx_distances(g: Graph) -> np.ndarray:
    """All-pairs distances from networkx, independent of bvx's searches."""
    out = np.zeros((g.n, g.n), dtype=np.int64)
    lengths = dict(nx.all_pairs_dijkstra_path_length(g.to_networkx(), weight="weight"))
    for u, row in lengths.items():
        for v, d in row.items():
            out[u, v] = d
    return out


def naive_owner(dist: np.ndarray, sites: Sequence[int]) -> np.ndarray:
    """First closest site index per vertex."""
    block = dist[list(sites)]
    return np.argmax(block == block.min(axis=0), axis=0)


def naive_loads(dist: np.ndarray, costs: CostVector, sites: Sequence[int]) -> np.ndarray:
    owner = naive_owner(dist, sites)
    loads = np.zeros(len(sites), dtype=np.int64)
    np.add.at(loads, owner, costs.values)
    return loads


def random_connected(n: int, rng: random.Random, extra: float = 0.1) -> Graph:
    """Random tree plus each other pair with probability ``extra``."""
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < extra:
                edges.add((u, v))
    return Graph.from_edges(n, sorted(edges))
